// svc_sim: run scenarios and the canned case suite.
//
//   svc_sim run --scenario case.json --out dir [--set key=value ...]
//   svc_sim cases --ids 1,2,3 --out dir [--jobs N]
//   svc_sim report --out dir
//   svc_sim export --id N        prints canned case N as a scenario file

#include "svc/acceptance.hpp"
#include "svc/cases.hpp"
#include "svc/errors.hpp"
#include "svc/log.hpp"
#include "svc/metrics.hpp"
#include "svc/outputs.hpp"
#include "svc/scenario_io.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;

namespace {

void print_metrics(const svc::RunMetrics& m) {
    fmt::print("settling time: {}\n", m.settling_time ? fmt::format("{:.2f} s", *m.settling_time) : "not settled");
    fmt::print("final v_pp: {:.6f} (ref {:.6f}, |e| = {:.3e})\n", m.final_v_pp, m.final_v_pp_ref, m.final_error);
    fmt::print("final alignment spread: {:.3e}\n", m.final_spread);
    fmt::print("max overshoot: {:.3e}\n", m.max_overshoot);
    for (const auto& e : m.events) {
        fmt::print("event {} at {} s: max |e| = {:.3e}, recovery {}\n", e.kind, e.at, e.max_deviation,
                   e.recovery_time ? fmt::format("{:.2f} s", *e.recovery_time) : "none");
    }
}

int cmd_run(const std::string& scenario_path, const fs::path& out, const std::vector<std::string>& sets) {
    const std::string text = svc::read_text(scenario_path);
    svc::Scenario scenario = [&] {
        if (sets.empty())
            return svc::parse_scenario(text);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error&) {
            return svc::parse_scenario(text); // reports the location
        }
        std::vector<svc::Override> overrides;
        for (const auto& s : sets)
            overrides.push_back(svc::parse_override(s));
        svc::apply_overrides(doc, overrides);
        return svc::parse_scenario(doc.dump(2));
    }();
    const auto result = svc::run(scenario);
    svc::write_outputs(result, scenario, out);
    print_metrics(svc::compute_metrics(svc::to_series(result), scenario.pf, scenario.events));
    return 0;
}

struct CaseOutcome {
    std::vector<svc::Criterion> criteria;
    std::string error;
};

CaseOutcome run_case(int id, const fs::path& out) {
    CaseOutcome o;
    try {
        const svc::Scenario scenario = svc::canned_case(id);
        const auto start = std::chrono::steady_clock::now();
        const auto result = svc::run(scenario);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const fs::path dir = out / fmt::format("case{}", id);
        svc::write_outputs(result, scenario, dir);
        o.criteria = svc::evaluate_case(id, result, scenario);
        const std::string csv = svc::to_csv(svc::to_series(result));
        const auto again = svc::run(scenario);
        const auto parallel = svc::run(scenario, {.parallel_agents = true});
        o.criteria.push_back(svc::determinism_criterion(id, csv, svc::to_csv(svc::to_series(again)),
                                                        svc::to_csv(svc::to_series(parallel))));
        o.criteria.push_back(svc::runtime_criterion(id, seconds));
    } catch (const std::exception& e) {
        o.error = fmt::format("case {}: {}", id, e.what());
    }
    return o;
}

int cmd_cases(const std::vector<int>& ids, const fs::path& out, unsigned jobs) {
    std::vector<CaseOutcome> outcomes(ids.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < ids.size();)
            outcomes[k] = run_case(ids[k], out);
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(ids.size()))); ++j)
            pool.emplace_back(worker);
    }
    bool ok = true;
    for (std::size_t k = 0; k < ids.size(); ++k) {
        if (!outcomes[k].error.empty()) {
            fmt::print("[FAIL] {}\n", outcomes[k].error);
            ok = false;
            continue;
        }
        for (const auto& c : outcomes[k].criteria) {
            fmt::print("{}\n", svc::format_criterion(c));
            ok = ok && c.passed;
        }
    }
    fmt::print("{}\n", ok ? "all checks passed" : "some checks FAILED");
    return ok ? 0 : 1;
}

int cmd_report(const fs::path& out) {
    std::vector<fs::path> dirs;
    if (fs::exists(out / "timeseries.csv")) {
        dirs.push_back(out);
    } else {
        for (const auto& entry : fs::directory_iterator(out))
            if (entry.is_directory() && fs::exists(entry.path() / "timeseries.csv"))
                dirs.push_back(entry.path());
        std::sort(dirs.begin(), dirs.end());
    }
    if (dirs.empty())
        throw svc::IoError("no timeseries.csv under " + out.string());
    for (const auto& d : dirs) {
        fmt::print("== {}\n", d.string());
        print_metrics(svc::report(d));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    svc::init_logging();
    CLI::App app{"Secondary voltage control simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out;
    std::vector<std::string> sets;
    auto* run = app.add_subcommand("run", "Run one scenario file");
    run->add_option("--scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "Output directory")->required();
    run->add_option("--set", sets, "Override key=value (dotted path)");

    std::vector<int> ids;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    auto* cases = app.add_subcommand("cases", "Run canned cases and their acceptance checks");
    cases->add_option("--ids", ids, "Case ids, e.g. 1,2,3")
        ->required()
        ->delimiter(',')
        ->check(CLI::Range(1, svc::case_count));
    cases->add_option("--out", out, "Output directory")->required();
    cases->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    auto* report = app.add_subcommand("report", "Recompute metrics of existing outputs");
    report->add_option("--out", out, "Output directory")->required()->check(CLI::ExistingDirectory);

    int export_id = 1;
    auto* exp = app.add_subcommand("export", "Print a canned case as a scenario document");
    exp->add_option("--id", export_id, "Case id")->required()->check(CLI::Range(1, svc::case_count));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run)
            return cmd_run(scenario_path, out, sets);
        if (*cases) {
            if (ids.empty())
                throw CLI::ValidationError("--ids", "at least one case id is required");
            return cmd_cases(ids, out, jobs);
        }
        if (*exp) {
            fmt::print("{}", svc::serialize_scenario(svc::canned_case(export_id)));
            return 0;
        }
        return cmd_report(out);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
