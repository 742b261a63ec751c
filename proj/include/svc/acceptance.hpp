#pragma once

// Pass/fail checks of the canned cases.

#include "svc/metrics.hpp"
#include "svc/scenario.hpp"

#include <string>
#include <vector>

namespace svc {

struct Criterion {
    int number = 0;
    std::string label;
    bool passed = false;
    std::string detail;
};

namespace bounds {
inline constexpr double settle_after_step = 200.0;  ///< [s], 2% band
inline constexpr double recovery = 250.0;           ///< [s], 1e-3 pu band
inline constexpr double final_error = 1e-3;         ///< [pu]
inline constexpr double spread = 1e-3;              ///< [pu]
inline constexpr double join_dip = 0.005;           ///< [pu]
inline constexpr double stable_window = 100.0;      ///< [s] checked at the end of the run
inline constexpr double wall_clock = 10.0;          ///< [s] per case
} // namespace bounds

/// Criteria that depend only on the run of case `id` (1..6).
std::vector<Criterion> evaluate_case(int id, const RunResult& result, const Scenario& scenario);

/// Byte-identical CSV across runs and across agent scheduling.
Criterion determinism_criterion(int id, const std::string& csv_a, const std::string& csv_b,
                                const std::string& csv_parallel);

Criterion runtime_criterion(int id, double seconds);

std::string format_criterion(const Criterion& c);

} // namespace svc
