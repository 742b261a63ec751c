#pragma once

// Decentralised SVC control layer: the discrete-time intelligent
// proportional (DTiP) law, per-generator reactive-power agents, the
// pilot-point controller and the measurement delay line.

#include "svc/estimation.hpp"

#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <vector>

namespace svc {

struct DtipGains {
    double alpha = 1.0;   ///< ultra-local input gain (output rate per control unit)
    double k_p = 1.0;     ///< proportional gain [1/s]
    std::size_t h_d = 1;  ///< delay of the stored control, in controller periods

    /// Throws InvalidArgument.
    void validate() const;

    friend bool operator==(const DtipGains&, const DtipGains&) = default;
};

/// u = -(f_bar - y_ref_dot + k_p e) / alpha
double dtip_law(double f_bar, double y_ref_dot, double e, const DtipGains& gains);

/// q_ref' = q_ref + u2
double compose_reference(double q_ref, double u2);
/// q_ref' = q_ref + weight * u2 (participation-weighted distribution of u2).
double compose_reference(double q_ref, double u2, double weight);

/// How the reference derivative in the DTiP law is obtained.
enum class ReferenceDerivative {
    Zero,          ///< references are piecewise constant
    Differentiate, ///< run the reference through its own differentiator
};

struct ControlLimits {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    double clamp(double u) const { return u < lower ? lower : (u > upper ? upper : u); }
};

/// One DTiP loop: differentiator on the measured output, the delayed-input
/// history used by the F estimate, and the control law.
///
/// observe() feeds the differentiator and must be called every t_ndf;
/// control() evaluates the law and must be called every loop period.
class DtipLoop {
public:
    DtipLoop(const DtipGains& gains, const DifferentiatorConfig& diff, double period,
             ControlLimits limits = {}, ReferenceDerivative ref_mode = ReferenceDerivative::Zero);

    void observe(double y, double y_ref);
    double control(double y, double y_ref);
    double step(double y, double y_ref) {
        observe(y, y_ref);
        return control(y, y_ref);
    }

    bool ready() const noexcept { return differentiator_.ready(); }
    void reset();

    const DtipGains& gains() const noexcept { return gains_; }
    double period() const noexcept { return period_; }
    const DifferentiatorConfig& differentiator_config() const noexcept { return differentiator_.config(); }
    const ControlLimits& limits() const noexcept { return limits_; }
    void set_limits(ControlLimits limits) { limits_ = limits; }

    /// Control h_d periods ago (the value used by the F estimate).
    double delayed_control() const noexcept { return history_[head_]; }
    double last_control() const noexcept { return last_; }
    /// Most recent (f_bar, y_dot); zeros during warm-up.
    const UltraLocalEstimate& last_estimate() const noexcept { return estimate_; }

private:
    DtipGains gains_;
    double period_;
    ControlLimits limits_;
    ReferenceDerivative ref_mode_;
    Differentiator differentiator_;
    std::optional<Differentiator> ref_differentiator_;
    std::vector<double> history_; // ring of the last h_d controls, head_ = oldest
    std::size_t head_ = 0;
    double last_ = 0.0;
    UltraLocalEstimate estimate_;
};

/// Reactive-power agent of one generator (inner loop). Its output is a
/// correction of the AVR setpoint; it only ever sees its own Q_i and its
/// own reference.
class InnerAgent {
public:
    InnerAgent(const DtipGains& gains, const DifferentiatorConfig& diff, double period,
               ControlLimits limits = {}, ReferenceDerivative ref_mode = ReferenceDerivative::Zero);

    void observe(double q_meas, double q_ref_prime);
    double control(double q_meas, double q_ref_prime);
    /// observe() then control().
    double step(double q_meas, double q_ref_prime);

    /// Enables/disables participation. Disabling resets the loop state; an
    /// agent that is enabled again starts from a fresh warm-up.
    void gate(bool active);

    bool enabled() const noexcept { return enabled_; }
    bool ready() const noexcept { return enabled_ && loop_.ready(); }
    std::size_t fires() const noexcept { return fires_; }
    const DtipLoop& loop() const noexcept { return loop_; }
    void set_limits(ControlLimits limits) { loop_.set_limits(limits); }

private:
    DtipLoop loop_;
    bool enabled_ = true;
    std::size_t fires_ = 0;
};

/// Pilot-point voltage controller (outer loop), run 5 to 10 times slower
/// than the inner agents.
class OuterController {
public:
    static constexpr double min_ratio = 5.0;
    static constexpr double max_ratio = 10.0;

    OuterController(const DtipGains& gains, const DifferentiatorConfig& diff, double period,
                    double inner_period,
                    ReferenceDerivative ref_mode = ReferenceDerivative::Zero);

    void observe(double v_pp_meas, double v_pp_ref) { loop_.observe(v_pp_meas, v_pp_ref); }
    double control(double v_pp_meas, double v_pp_ref);
    double step(double v_pp_meas, double v_pp_ref);

    std::size_t fires() const noexcept { return fires_; }
    const DtipLoop& loop() const noexcept { return loop_; }

private:
    DtipLoop loop_;
    std::size_t fires_ = 0;
};

/// Transport delay on a sampled signal. read(t) returns the latest sample
/// taken at or before t - delay, or the oldest sample held if there is none.
class DelayBuffer {
public:
    explicit DelayBuffer(double delay = 0.0);

    void set_delay(double delay);
    double delay() const noexcept { return delay_; }

    /// Samples must arrive with non-decreasing timestamps.
    void push(double t, double value);
    double read(double t) const;
    bool empty() const noexcept { return samples_.empty(); }

private:
    struct Sample {
        double t;
        double value;
    };
    double delay_;
    std::deque<Sample> samples_;
};

} // namespace svc
