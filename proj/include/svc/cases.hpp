#pragma once

// The 4-generator benchmark zone and the six canned case studies.

#include "svc/scenario.hpp"

#include <vector>

namespace svc {

/// Benchmark sensitivity matrices.
SensitivityModel benchmark_model();

/// Inner gains matched to the surrogate plant: alpha_i = c_q(i,i) / tau_avr.
std::vector<DtipGains> default_inner_gains(const SensitivityModel& model, double tau_avr = 0.2);

/// Reference gain set of the benchmark network, tuned on a plant with much
/// faster dynamics than the surrogate. Kept for comparison runs.
std::vector<DtipGains> reference_inner_gains();
DtipGains reference_outer_gains();

/// Default scenario on the benchmark zone with no events.
Scenario base_scenario();

/// Canned case 1..6. Throws InvalidArgument for any other id.
Scenario canned_case(int id);

inline constexpr int case_count = 6;

} // namespace svc
