#pragma once

// Discrete-time surrogate of the benchmark grid: a first-order AVR lag per
// generator feeding the static sensitivity network
//   V_pp = c_v V_t + d_v,   Q = c_q V_t + d_q
// evaluated on the connected generators.

#include "svc/model.hpp"

#include <optional>
#include <vector>

namespace svc {

struct GeneratorParams {
    double tau_avr = 0.2; ///< AVR closed-loop time constant [s]
    double v_base = 1.0;  ///< nominal terminal-voltage setpoint [pu]
    double v_min = 0.5;   ///< setpoint clamp [pu]
    double v_max = 2.0;

    /// Throws InvalidArgument.
    void validate() const;
    double clamp_setpoint(double v) const { return v < v_min ? v_min : (v > v_max ? v_max : v); }

    friend bool operator==(const GeneratorParams&, const GeneratorParams&) = default;
};

struct PlantConfig {
    double dt = 0.01; ///< simulation step [s]
    // Sample times of the original phasor benchmark, kept as metadata.
    double t_power = 10e-6;
    double t_control = 100e-6;

    /// Throws InvalidArgument if dt > min(tau_avr) / 10.
    void validate(const std::vector<GeneratorParams>& generators) const;

    friend bool operator==(const PlantConfig&, const PlantConfig&) = default;
};

struct GridState {
    double t = 0.0;
    Vector v_t;   ///< terminal voltages (frozen for disconnected generators)
    Vector v_set; ///< applied AVR setpoints
    Vector q;     ///< reactive powers, 0 for disconnected generators
    double v_pp = 0.0;
    double d_v = 0.0;
    Vector d_q;
    ActiveMask mask;
    SensitivityModel model; ///< full n x n model currently in force
    std::vector<GeneratorParams> generators;

    std::size_t size() const noexcept { return model.size(); }
};

/// Generators start at rest with v_t = v_set = v_base.
GridState make_initial_state(const SensitivityModel& model,
                             const std::vector<GeneratorParams>& generators,
                             const ActiveMask& mask);

/// Recomputes q and v_pp from v_t, the model, the mask and the disturbances.
void refresh_outputs(GridState& state);

/// Advances every connected generator by the exact discretisation of
///   tau * dv_t/dt = clamp(v_base + u1) - v_t
/// and recomputes the algebraic outputs.
GridState plant_step(GridState state, const Vector& setpoint_corrections, double dt);

GridState apply_disturbance(GridState state, double d_v, const Vector& d_q);

/// Swaps the sensitivity model and/or the mask. Disconnected generators keep
/// their last terminal voltage and drop out of the network.
GridState apply_topology(GridState state, std::optional<SensitivityModel> new_model,
                         std::optional<ActiveMask> new_mask = std::nullopt);

/// Largest violation of the algebraic output equations (0 when consistent).
double consistency_error(const GridState& state);

} // namespace svc
