#pragma once

// Scenario description and the closed-loop run loop:
//   outer controller -> alignment -> reference composition -> inner agents -> plant

#include "svc/control.hpp"
#include "svc/model.hpp"
#include "svc/plant.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace svc {

struct SetpointStep {
    double v_pp_ref = 1.0;
    friend bool operator==(const SetpointStep&, const SetpointStep&) = default;
};

struct SetDelay {
    double delay = 0.0;
    friend bool operator==(const SetDelay&, const SetDelay&) = default;
};

/// Additive disturbance on the network outputs. An empty d_q means zero.
struct LoadDisturbance {
    double d_v = 0.0;
    std::vector<double> d_q;
    friend bool operator==(const LoadDisturbance&, const LoadDisturbance&) = default;
};

/// Either an explicit replacement model, or the scenario's base model with
/// the off-diagonal c_q couplings of generator `gen` (row and column) and
/// c_v[gen] scaled by `factor`. factor = 1 restores the base model.
struct LinePerturb {
    std::size_t gen = 0;
    double factor = 1.0;
    std::optional<SensitivityModel> model;
    friend bool operator==(const LinePerturb&, const LinePerturb&) = default;
};

struct Disconnect {
    std::size_t gen = 0;
    friend bool operator==(const Disconnect&, const Disconnect&) = default;
};

struct JoinSvc {
    std::size_t gen = 0;
    friend bool operator==(const JoinSvc&, const JoinSvc&) = default;
};

struct LeaveSvc {
    std::size_t gen = 0;
    friend bool operator==(const LeaveSvc&, const LeaveSvc&) = default;
};

using EventKind =
    std::variant<SetpointStep, SetDelay, LoadDisturbance, LinePerturb, Disconnect, JoinSvc, LeaveSvc>;

struct Event {
    double at = 0.0;
    EventKind kind;
    friend bool operator==(const Event&, const Event&) = default;
};

/// Short tag of an event kind ("setpoint_step", "disconnect", ...).
std::string event_tag(const EventKind& kind);

/// Perturbs row/column `gen` of the model as described for LinePerturb.
SensitivityModel perturb_line(const SensitivityModel& base, std::size_t gen, double factor);

/// Generator as written in a scenario; v_base left empty means "start at
/// the equilibrium of the initial alignment".
struct GeneratorSpec {
    double tau_avr = 0.2;
    std::optional<double> v_base;
    double v_min = 0.5;
    double v_max = 2.0;
    friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

struct InnerLoopConfig {
    double period = 0.05;
    std::vector<DtipGains> gains; ///< one entry per generator
    DifferentiatorConfig differentiator{0.01, 5};
    friend bool operator==(const InnerLoopConfig&, const InnerLoopConfig&) = default;
};

struct OuterLoopConfig {
    double period = 0.5;
    DtipGains gains{3.0, 0.09, 1};
    DifferentiatorConfig differentiator{0.1, 5};
    friend bool operator==(const OuterLoopConfig&, const OuterLoopConfig&) = default;
};

/// How the outer control u2 enters each generator's reference.
enum class U2Distribution {
    Uniform,       ///< q_ref'_i = q_ref_i + u2
    Participation, ///< q_ref'_i = q_ref_i + pf_i u2
};

struct Scenario {
    Scenario(SensitivityModel model_, ParticipationFactors pf_)
        : model(std::move(model_)), pf(std::move(pf_)) {}

    std::string name = "scenario";
    double duration = 1000.0;
    double v_pp_ref = 0.98;
    SensitivityModel model;
    ParticipationFactors pf;
    std::vector<GeneratorSpec> generators;
    std::vector<bool> initial_svc_active; ///< empty means all participate
    PlantConfig plant;
    InnerLoopConfig inner;
    OuterLoopConfig outer;
    ReferenceDerivative reference_derivative = ReferenceDerivative::Zero;
    U2Distribution u2_distribution = U2Distribution::Uniform;
    double log_interval = 0.1;
    Tolerances tolerances;
    std::vector<Event> events; ///< sorted by time

    std::size_t size() const noexcept { return model.size(); }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Throws ValidationError naming the offending field.
void validate(const Scenario& scenario);

/// Stable sort of the event list by time.
void sort_events(std::vector<Event>& events);

/// Generator parameters with v_base resolved.
std::vector<GeneratorParams> resolve_generators(const Scenario& scenario);

struct RunOptions {
    bool parallel_agents = false; ///< evaluate inner agents concurrently within a tick
};

struct AlignmentRecord {
    double t = 0.0;
    ActiveMask mask;
    AlignmentSolution solution;
    double v_pp_ref = 0.0;
    double residual = 0.0;
};

/// Logged time series. Columns (n generators):
///   t, v_pp_ref, v_pp, v_pp_meas, u2,
///   v_t_1..n, v_set_1..n, q_1..n, q_ref_1..n, q_ref_prime_1..n, u1_1..n,
///   connected_1..n, svc_active_1..n
class RunResult {
public:
    static constexpr std::size_t fixed_columns = 5;
    static constexpr std::size_t per_generator_columns = 8;
    static std::vector<std::string> column_names(std::size_t n);

    explicit RunResult(std::size_t n = 0);

    std::size_t generators() const noexcept { return n_; }
    std::size_t rows() const noexcept { return width_ == 0 ? 0 : data_.size() / width_; }
    std::size_t width() const noexcept { return width_; }
    const std::vector<std::string>& columns() const noexcept { return columns_; }

    double at(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }
    double at(std::size_t row, const std::string& name) const { return at(row, index(name)); }
    std::size_t index(const std::string& name) const;
    std::vector<double> column(const std::string& name) const;
    std::vector<double> row(std::size_t r) const;

    void append_row(const std::vector<double>& values);

    std::vector<std::size_t> inner_fires;
    std::size_t outer_fires = 0;
    std::vector<AlignmentRecord> alignments;

    friend bool operator==(const RunResult& a, const RunResult& b) {
        return a.n_ == b.n_ && a.data_ == b.data_;
    }

private:
    std::size_t n_ = 0;
    std::size_t width_ = 0;
    std::vector<std::string> columns_;
    std::vector<double> data_;
};

/// Runs the closed loop. Errors raised by the modules are rethrown as
/// RunError carrying the simulation time.
RunResult run(const Scenario& scenario, const RunOptions& options = {});

} // namespace svc
