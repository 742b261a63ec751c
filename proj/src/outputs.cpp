#include "svc/outputs.hpp"

#include "svc/errors.hpp"
#include "svc/scenario_io.hpp"

#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace svc {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

} // namespace

std::string to_csv(const Series& series) {
    std::string out;
    for (std::size_t c = 0; c < series.columns.size(); ++c) {
        if (c)
            out += ',';
        out += series.columns[c];
    }
    out += '\n';
    for (std::size_t r = 0; r < series.rows(); ++r) {
        for (std::size_t c = 0; c < series.columns.size(); ++c) {
            if (c)
                out += ',';
            fmt::format_to(std::back_inserter(out), "{:.15g}", series.data[c][r]);
        }
        out += '\n';
    }
    return out;
}

Series parse_csv(const std::string& text) {
    Series s;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
        if (s.columns.empty()) {
            s.columns = cells;
            s.data.resize(cells.size());
            continue;
        }
        if (cells.size() != s.columns.size())
            throw ParseError(line_no, 1, "expected " + std::to_string(s.columns.size()) + " fields");
        for (std::size_t c = 0; c < cells.size(); ++c) {
            char* end = nullptr;
            const double v = std::strtod(cells[c].c_str(), &end);
            if (cells[c].empty() || end != cells[c].c_str() + cells[c].size())
                throw ParseError(line_no, c + 1, "not a number: \"" + cells[c] + "\"");
            s.data[c].push_back(v);
        }
    }
    if (s.columns.empty())
        throw ParseError(1, 1, "missing header row");
    return s;
}

json metrics_to_json(const RunMetrics& m) {
    json events = json::array();
    for (const auto& e : m.events) {
        events.push_back({{"at", e.at},
                          {"kind", e.kind},
                          {"max_deviation", e.max_deviation},
                          {"recovery_time", optional_number(e.recovery_time)}});
    }
    return {{"settling_band", m.settling_band},
            {"recovery_band", m.recovery_band},
            {"settling_time", optional_number(m.settling_time)},
            {"final_v_pp", m.final_v_pp},
            {"final_v_pp_ref", m.final_v_pp_ref},
            {"final_error", m.final_error},
            {"final_alignment_spread", m.final_spread},
            {"max_overshoot", m.max_overshoot},
            {"events", std::move(events)}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << text;
    if (!out.flush())
        throw IoError("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_outputs(const RunResult& result, const Scenario& scenario, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    const Series series = to_series(result);
    write_text(dir / "timeseries.csv", to_csv(series));
    write_text(dir / "metrics.json",
               metrics_to_json(compute_metrics(series, scenario.pf, scenario.events)).dump(2) + "\n");
    write_text(dir / "scenario.json", serialize_scenario(scenario));
}

RunMetrics report(const std::filesystem::path& dir) {
    const Scenario scenario = parse_scenario_file(dir / "scenario.json");
    const Series series = parse_csv(read_text(dir / "timeseries.csv"));
    if (series.columns != RunResult::column_names(scenario.size()))
        throw IoError((dir / "timeseries.csv").string() + ": columns do not match the scenario");
    RunMetrics m = compute_metrics(series, scenario.pf, scenario.events);
    write_text(dir / "metrics.json", metrics_to_json(m).dump(2) + "\n");
    return m;
}

} // namespace svc
