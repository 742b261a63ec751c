#include "svc/estimation.hpp"

#include "svc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace svc {

void DifferentiatorConfig::validate() const {
    if (!std::isfinite(t_ndf) || !(t_ndf > 0.0))
        throw InvalidArgument("differentiator: t_ndf must be > 0");
    if (n_ndf < 3)
        throw InvalidArgument("differentiator: n_ndf must be >= 3");
}

void DifferentiatorConfig::validate_for_period(double loop_period) const {
    validate();
    if (window() > loop_period * (1.0 + 1e-9))
        throw InvalidArgument("differentiator window " + std::to_string(window()) +
                              " s exceeds loop period " + std::to_string(loop_period) + " s");
}

Differentiator::Differentiator(const DifferentiatorConfig& config)
    : config_(config), weights_(config.n_ndf), window_(config.n_ndf, 0.0) {
    config_.validate();
    const auto n = static_cast<double>(config_.n_ndf);
    const double mid = (n - 1.0) / 2.0;
    double denom = 0.0;
    for (std::size_t k = 0; k < config_.n_ndf; ++k)
        denom += (static_cast<double>(k) - mid) * (static_cast<double>(k) - mid);
    for (std::size_t k = 0; k < config_.n_ndf; ++k)
        weights_[k] = (static_cast<double>(k) - mid) / (denom * config_.t_ndf);
}

std::optional<double> Differentiator::push(double sample) {
    if (!std::isfinite(sample))
        throw NonFiniteInput("differentiator: non-finite sample");
    if (count_ < config_.n_ndf) {
        window_[count_++] = sample;
    } else {
        window_[head_] = sample;
        head_ = (head_ + 1) % config_.n_ndf;
    }
    return estimate();
}

std::optional<double> Differentiator::estimate() const {
    if (!ready())
        return std::nullopt;
    const std::size_t n = config_.n_ndf;
    const double newest = window_[(head_ + n - 1) % n];
    // Weights sum to zero, so referencing samples to the newest one changes
    // nothing mathematically and makes constant windows give exactly 0.
    double slope = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        slope += weights_[k] * (window_[(head_ + k) % n] - newest);
    return slope;
}

void Differentiator::reset() noexcept {
    head_ = 0;
    count_ = 0;
    std::fill(window_.begin(), window_.end(), 0.0);
}

double estimate_f(double y_dot, double alpha, double u_delayed) {
    if (!std::isfinite(y_dot) || !std::isfinite(alpha) || !std::isfinite(u_delayed))
        throw NonFiniteInput("estimate_f: non-finite input");
    return y_dot - alpha * u_delayed;
}

} // namespace svc
