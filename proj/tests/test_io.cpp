#include "svc/cases.hpp"
#include "svc/errors.hpp"
#include "svc/outputs.hpp"
#include "svc/scenario_io.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <random>

using namespace svc;
namespace fs = std::filesystem;

namespace {

const char* minimal = R"({
  "model": {"c_v": [1.0], "c_q": [[1.0]]},
  "participation": [1.0]
})";

template <class E>
E capture(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const E& e) {
        return e;
    }
    FAIL("no exception");
    throw;
}

fs::path temp_dir(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("svc_test_" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("minimal document gets defaults") {
    const Scenario s = parse_scenario(minimal);
    CHECK(s.size() == 1);
    CHECK(s.duration == 1000.0);
    CHECK(s.v_pp_ref == 0.98);
    CHECK(s.generators.size() == 1);
    CHECK_FALSE(s.generators[0].v_base);
    REQUIRE(s.inner.gains.size() == 1);
    CHECK(s.inner.gains[0].alpha == 1.0 / 0.2);
    CHECK(s.events.empty());
}

TEST_CASE("shipped fixtures equal the canned cases") {
    for (int id = 1; id <= case_count; ++id) {
        const auto path = fs::path(SVC_CASES_DIR) / ("case" + std::to_string(id) + ".json");
        INFO(path);
        CHECK(parse_scenario_file(path) == canned_case(id));
    }
    const Scenario c1 = parse_scenario_file(fs::path(SVC_CASES_DIR) / "case1.json");
    REQUIRE(c1.events.size() == 1);
    CHECK(c1.events[0].at == 500.0);
    CHECK(std::get<SetpointStep>(c1.events[0].kind).v_pp_ref == 1.0);
}

TEST_CASE("serialization round-trips") {
    for (int id = 1; id <= case_count; ++id) {
        const Scenario s = canned_case(id);
        CHECK(parse_scenario(serialize_scenario(s)) == s);
    }
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Scenario s = base_scenario();
        s.name = "random" + std::to_string(trial);
        s.v_pp_ref = 0.95 + 0.1 * u(rng);
        s.generators[rng() % 4].v_base = 1.0 + 0.5 * u(rng);
        s.generators[rng() % 4].tau_avr = 0.1 + 0.8 * u(rng);
        s.u2_distribution = rng() % 2 ? U2Distribution::Uniform : U2Distribution::Participation;
        s.reference_derivative = rng() % 2 ? ReferenceDerivative::Zero : ReferenceDerivative::Differentiate;
        s.outer.gains.alpha = 1.0 + 10.0 * u(rng);
        double at = 0.0;
        for (int e = 0; e < 6; ++e) {
            at += 100.0 * u(rng);
            switch (rng() % 7) {
            case 0: s.events.push_back({at, SetpointStep{0.9 + 0.2 * u(rng)}}); break;
            case 1: s.events.push_back({at, SetDelay{10.0 * u(rng)}}); break;
            case 2: s.events.push_back({at, LoadDisturbance{-0.01 * u(rng), {u(rng), 0.0, -u(rng), 0.1}}}); break;
            case 3: s.events.push_back({at, LinePerturb{rng() % 4, 0.8 + 0.4 * u(rng), std::nullopt}}); break;
            case 4: s.events.push_back({at, LinePerturb{0, 1.0, perturb_line(s.model, 2, 1.2)}}); break;
            case 5: s.events.push_back({at, LeaveSvc{rng() % 4}}); break;
            default: s.events.push_back({at, JoinSvc{rng() % 4}}); break;
            }
        }
        CHECK(parse_scenario(serialize_scenario(s)) == s);
    }
}

TEST_CASE("malformed documents report line and column") {
    const auto e = capture<ParseError>("{\n  \"model\": {\n    \"c_v\": [1.0,,]\n  }\n}");
    CHECK(e.line() == 3);
    CHECK(e.column() > 1);
}

TEST_CASE("invalid content names the field and its line") {
    const std::string bad_shape = R"({
  "model": {
    "c_v": [1.0, 0.5],
    "c_q": [[1.0, 0.0],
            [0.0]]
  },
  "participation": [1.0, 1.0]
})";
    const auto e = capture<ValidationError>(bad_shape);
    CHECK(e.field() == "/model/c_q/1");
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);

    const std::string bad_event = R"({
  "model": {"c_v": [1.0], "c_q": [[1.0]]},
  "participation": [1.0],
  "events": [
    {"at": 1.0, "kind": "setpoint_step", "v_pp_ref": 1.0},
    {"at": 2.0, "kind": "disconnect", "gen": 3}
  ]
})";
    const auto g = capture<ValidationError>(bad_event);
    CHECK(g.field() == "/events/1/gen");
    CHECK(std::string(g.what()).find("line 6") != std::string::npos);

    CHECK(capture<ValidationError>(R"({"model": {"c_v": [1.0], "c_q": [[1.0]]}})").field() == "/participation");
    CHECK(capture<ValidationError>(R"({"model": {"c_v": [1.0], "c_q": [[1.0]]}, "participation": [1], "speed": 3})")
              .field() == "/speed");
    CHECK(capture<ValidationError>(
              R"({"model": {"c_v": [1.0], "c_q": [[1.0]]}, "participation": [1], "events": [{"at": 1, "kind": "warp"}]})")
              .field() == "/events/0/kind");
    CHECK(capture<ValidationError>(R"({"model": {"c_v": [1.0], "c_q": [[1.0]]}, "participation": [1], "duration": "long"})")
              .field() == "/duration");
}

TEST_CASE("locate finds values by JSON pointer") {
    const std::string text = "{\n  \"a\": 1,\n  \"b\": [10,\n    {\"c\": true}]\n}";
    CHECK(locate(text, "") == std::pair<std::size_t, std::size_t>{1, 1});
    CHECK(locate(text, "/a") == std::pair<std::size_t, std::size_t>{2, 8});
    CHECK(locate(text, "/b/1/c") == std::pair<std::size_t, std::size_t>{4, 11});
    CHECK(locate(text, "/b/1/missing") == std::pair<std::size_t, std::size_t>{4, 5});
}

TEST_CASE("overrides") {
    auto doc = scenario_to_json(canned_case(1));
    apply_overrides(doc, {parse_override("duration=600"), parse_override("events.0.v_pp_ref=1.01"),
                          parse_override("name=custom"), parse_override("generators.2.v_base=1.4")});
    const Scenario s = scenario_from_json(doc);
    CHECK(s.duration == 600.0);
    CHECK(std::get<SetpointStep>(s.events[0].kind).v_pp_ref == 1.01);
    CHECK(s.name == "custom");
    CHECK(s.generators[2].v_base == 1.4);
    CHECK_THROWS_AS(parse_override("novalue"), InvalidArgument);
    CHECK_THROWS_AS(apply_overrides(doc, {{"a..b", "1"}}), InvalidArgument);
}

TEST_CASE("csv round trip") {
    Scenario s = base_scenario();
    s.duration = 5.0;
    const auto series = to_series(run(s));
    const std::string csv = to_csv(series);
    const Series back = parse_csv(csv);
    CHECK(back.columns == series.columns);
    REQUIRE(back.rows() == series.rows());
    for (std::size_t c = 0; c < series.columns.size(); ++c)
        for (std::size_t r = 0; r < series.rows(); ++r)
            CHECK(std::abs(back.data[c][r] - series.data[c][r]) <= 1e-13 * std::max(1.0, std::abs(series.data[c][r])));
    CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n"), ParseError);
    CHECK_THROWS_AS(parse_csv("a,b\n1,x\n"), ParseError);
}

TEST_CASE("write_outputs produces the file set, byte-identical on rewrite") {
    Scenario s = base_scenario();
    s.duration = 20.0;
    const auto r = run(s);
    const auto dir = temp_dir("outputs");
    write_outputs(r, s, dir);
    const std::string csv = read_text(dir / "timeseries.csv");
    const std::string metrics = read_text(dir / "metrics.json");
    CHECK(csv.rfind("t,v_pp_ref,v_pp,v_pp_meas,u2,v_t_1", 0) == 0);
    write_outputs(r, s, dir);
    CHECK(read_text(dir / "timeseries.csv") == csv);
    CHECK(read_text(dir / "metrics.json") == metrics);
    CHECK(parse_scenario_file(dir / "scenario.json") == s);

    const auto m = nlohmann::json::parse(metrics);
    CHECK(m["settling_time"].get<double>() == 0.0);
    CHECK(m.contains("final_alignment_spread"));
    CHECK(m.contains("max_overshoot"));
    CHECK(m["events"].is_array());

    const RunMetrics again = report(dir);
    CHECK(again.settling_time == 0.0);
    fs::remove_all(dir);
}

TEST_CASE("io errors") {
    CHECK_THROWS_AS(parse_scenario_file("/nonexistent/scenario.json"), IoError);
    CHECK_THROWS_AS(write_text("/nonexistent/dir/file.txt", "x"), IoError);
}
