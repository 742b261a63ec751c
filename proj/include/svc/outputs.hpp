#pragma once

// Output files of a run:
//   timeseries.csv  header row + one row per logged sample (RunResult columns)
//   metrics.json    RunMetrics
//   scenario.json   the scenario that produced the run

#include "svc/metrics.hpp"
#include "svc/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace svc {

std::string to_csv(const Series& series);
/// Throws ParseError on malformed CSV text.
Series parse_csv(const std::string& text);

nlohmann::json metrics_to_json(const RunMetrics& metrics);

/// Creates `dir` if needed. Throws IoError.
void write_outputs(const RunResult& result, const Scenario& scenario, const std::filesystem::path& dir);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Reads dir/timeseries.csv and dir/scenario.json back and recomputes the
/// metrics; rewrites dir/metrics.json.
RunMetrics report(const std::filesystem::path& dir);

} // namespace svc
