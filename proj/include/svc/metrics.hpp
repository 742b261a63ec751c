#pragma once

// Post-run summaries of a RunResult.

#include "svc/model.hpp"
#include "svc/scenario.hpp"

#include <optional>
#include <string>
#include <vector>

namespace svc {

/// Earliest t* with |y - ref| <= band * |ref| for every sample at or after
/// t*; nullopt if the last sample is outside the band.
/// Throws EmptySeries, DimensionMismatch or InvalidArgument (band <= 0).
std::optional<double> settling_time(const std::vector<double>& t, const std::vector<double>& y,
                                    double ref, double band);

/// Same with an absolute band: |y - ref| <= tol.
std::optional<double> settling_time_abs(const std::vector<double>& t, const std::vector<double>& y,
                                        double ref, double tol);

/// max(q_i / pf_i) - min(q_i / pf_i) over SVC-active generators.
/// Throws NoActiveGenerator.
double alignment_spread(const Vector& q, const ParticipationFactors& pf, const ActiveMask& mask);

struct EventMetrics {
    double at = 0.0;
    std::string kind;
    double max_deviation = 0.0;            ///< max |v_pp - v_pp_ref| after the event
    std::optional<double> recovery_time;   ///< time after the event to re-enter the recovery band
};

struct RunMetrics {
    double settling_band = 0.02;           ///< relative band of settling_time
    double recovery_band = 1e-3;           ///< absolute band of per-event recovery [pu]
    std::optional<double> settling_time;   ///< after the last setpoint change, relative to it
    double final_v_pp = 0.0;
    double final_v_pp_ref = 0.0;
    double final_error = 0.0;              ///< |v_pp - v_pp_ref| at the last row
    double final_spread = 0.0;
    double max_overshoot = 0.0;            ///< max(v_pp - v_pp_ref, 0) after the last setpoint change
    std::vector<EventMetrics> events;
};

/// Column-level view used by both live results and CSV files read back.
struct Series {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data; ///< data[col][row]

    const std::vector<double>& column(const std::string& name) const;
    std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
    std::size_t generators() const;
};

Series to_series(const RunResult& result);

/// `pf` is needed for the spread; events are read from the scenario if
/// given, otherwise only the setpoint column is used.
RunMetrics compute_metrics(const Series& series, const ParticipationFactors& pf,
                           const std::vector<Event>& events = {});

} // namespace svc
