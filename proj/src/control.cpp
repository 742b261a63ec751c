#include "svc/control.hpp"

#include "svc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace svc {

namespace {

// Tolerance on time comparisons expressed in seconds.
constexpr double time_eps = 1e-9;

} // namespace

void DtipGains::validate() const {
    if (!std::isfinite(alpha) || alpha == 0.0)
        throw InvalidArgument("dtip gains: alpha must be finite and non-zero");
    if (!std::isfinite(k_p) || !(k_p > 0.0))
        throw InvalidArgument("dtip gains: k_p must be > 0");
    if (h_d < 1)
        throw InvalidArgument("dtip gains: h_d must be >= 1");
}

double dtip_law(double f_bar, double y_ref_dot, double e, const DtipGains& gains) {
    if (!std::isfinite(f_bar) || !std::isfinite(y_ref_dot) || !std::isfinite(e))
        throw NonFiniteInput("dtip_law: non-finite input");
    // Same value as -(f_bar - y_ref_dot + k_p e) / alpha, but yields +0
    // rather than -0 at equilibrium.
    return (y_ref_dot - f_bar - gains.k_p * e) / gains.alpha;
}

double compose_reference(double q_ref, double u2) { return q_ref + u2; }

double compose_reference(double q_ref, double u2, double weight) { return q_ref + weight * u2; }

DtipLoop::DtipLoop(const DtipGains& gains, const DifferentiatorConfig& diff, double period,
                   ControlLimits limits, ReferenceDerivative ref_mode)
    : gains_(gains), period_(period), limits_(limits), ref_mode_(ref_mode), differentiator_(diff),
      history_(gains.h_d, 0.0) {
    gains_.validate();
    if (!std::isfinite(period) || !(period > 0.0))
        throw InvalidArgument("dtip loop: period must be > 0");
    diff.validate_for_period(period);
    if (!(limits.lower <= 0.0 && 0.0 <= limits.upper))
        throw InvalidArgument("dtip loop: control limits must contain 0");
    if (ref_mode_ == ReferenceDerivative::Differentiate)
        ref_differentiator_.emplace(diff);
}

void DtipLoop::observe(double y, double y_ref) {
    differentiator_.push(y);
    if (ref_differentiator_)
        ref_differentiator_->push(y_ref);
}

double DtipLoop::control(double y, double y_ref) {
    double u = 0.0;
    if (const auto y_dot = differentiator_.estimate()) {
        const double f_bar = estimate_f(*y_dot, gains_.alpha, delayed_control());
        double y_ref_dot = 0.0;
        if (ref_differentiator_)
            y_ref_dot = ref_differentiator_->estimate().value_or(0.0);
        u = limits_.clamp(dtip_law(f_bar, y_ref_dot, y - y_ref, gains_));
        estimate_ = {f_bar, *y_dot};
    } else {
        if (!std::isfinite(y) || !std::isfinite(y_ref))
            throw NonFiniteInput("dtip loop: non-finite input");
        estimate_ = {};
    }
    history_[head_] = u;
    head_ = (head_ + 1) % history_.size();
    last_ = u;
    return u;
}

void DtipLoop::reset() {
    differentiator_.reset();
    if (ref_differentiator_)
        ref_differentiator_->reset();
    std::fill(history_.begin(), history_.end(), 0.0);
    head_ = 0;
    last_ = 0.0;
    estimate_ = {};
}

InnerAgent::InnerAgent(const DtipGains& gains, const DifferentiatorConfig& diff, double period,
                       ControlLimits limits, ReferenceDerivative ref_mode)
    : loop_(gains, diff, period, limits, ref_mode) {}

void InnerAgent::observe(double q_meas, double q_ref_prime) {
    if (enabled_)
        loop_.observe(q_meas, q_ref_prime);
}

double InnerAgent::control(double q_meas, double q_ref_prime) {
    ++fires_;
    if (!enabled_)
        return 0.0;
    return loop_.control(q_meas, q_ref_prime);
}

double InnerAgent::step(double q_meas, double q_ref_prime) {
    observe(q_meas, q_ref_prime);
    return control(q_meas, q_ref_prime);
}

void InnerAgent::gate(bool active) {
    if (active == enabled_)
        return;
    loop_.reset();
    enabled_ = active;
}

OuterController::OuterController(const DtipGains& gains, const DifferentiatorConfig& diff,
                                 double period, double inner_period, ReferenceDerivative ref_mode)
    : loop_(gains, diff, period, {}, ref_mode) {
    if (!std::isfinite(inner_period) || !(inner_period > 0.0))
        throw InvalidArgument("outer controller: inner period must be > 0");
    const double ratio = period / inner_period;
    if (ratio < min_ratio - 1e-9 || ratio > max_ratio + 1e-9)
        throw InvalidArgument("outer/inner period ratio " + std::to_string(ratio) +
                              " outside [5, 10]");
}

double OuterController::control(double v_pp_meas, double v_pp_ref) {
    ++fires_;
    return loop_.control(v_pp_meas, v_pp_ref);
}

double OuterController::step(double v_pp_meas, double v_pp_ref) {
    observe(v_pp_meas, v_pp_ref);
    return control(v_pp_meas, v_pp_ref);
}

DelayBuffer::DelayBuffer(double delay) : delay_(0.0) { set_delay(delay); }

void DelayBuffer::set_delay(double delay) {
    if (!std::isfinite(delay) || delay < 0.0)
        throw InvalidArgument("delay buffer: delay must be >= 0");
    delay_ = delay;
}

void DelayBuffer::push(double t, double value) {
    if (!std::isfinite(t) || !std::isfinite(value))
        throw NonFiniteInput("delay buffer: non-finite sample");
    if (!samples_.empty() && t < samples_.back().t)
        throw InvalidArgument("delay buffer: timestamps must be non-decreasing");
    samples_.push_back({t, value});
    // Keep one sample at or before the current read horizon.
    const double horizon = t - delay_ + time_eps;
    while (samples_.size() >= 2 && samples_[1].t <= horizon)
        samples_.pop_front();
}

double DelayBuffer::read(double t) const {
    if (samples_.empty())
        throw InvalidArgument("delay buffer: no samples");
    const double horizon = t - delay_ + time_eps;
    if (samples_.front().t > horizon)
        return samples_.front().value;
    // Latest sample with timestamp <= horizon.
    std::size_t lo = 0;
    std::size_t hi = samples_.size();
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (samples_[mid].t <= horizon)
            lo = mid;
        else
            hi = mid;
    }
    return samples_[lo].value;
}

} // namespace svc
