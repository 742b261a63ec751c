#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace svc {

/// Sampling period and window length of a sliding-window differentiator.
struct DifferentiatorConfig {
    double t_ndf = 0.01;     ///< sample period [s]
    std::size_t n_ndf = 5;   ///< window length [samples], >= 3

    double window() const noexcept { return static_cast<double>(n_ndf - 1) * t_ndf; }
    /// Throws InvalidArgument.
    void validate() const;
    /// Throws InvalidArgument unless the window fits inside one loop period.
    void validate_for_period(double loop_period) const;

    friend bool operator==(const DifferentiatorConfig&, const DifferentiatorConfig&) = default;
};

/// First-order algebraic differentiator on a sliding window.
///
/// The estimate is the slope of the least-squares line through the last
/// n_ndf samples, which is the sampled form of
///   y'(t) ~ 6/T^3 * int_0^T (T - 2 tau) y(t - tau) dtau.
/// It is exact on affine sequences and averages out zero-mean noise.
class Differentiator {
public:
    explicit Differentiator(const DifferentiatorConfig& config);

    /// Pushes a sample; returns the slope once the window is full.
    /// Throws NonFiniteInput on NaN/inf samples (the window is left untouched).
    std::optional<double> push(double sample);

    /// Latest estimate, if the window is full.
    std::optional<double> estimate() const;

    bool ready() const noexcept { return count_ >= config_.n_ndf; }
    std::size_t samples() const noexcept { return count_; }
    void reset() noexcept;

    const DifferentiatorConfig& config() const noexcept { return config_; }

private:
    DifferentiatorConfig config_;
    std::vector<double> weights_; // oldest..newest, divided by t_ndf
    std::vector<double> window_;  // ring buffer
    std::size_t head_ = 0;        // index of the oldest sample once full
    std::size_t count_ = 0;
};

/// Ultra-local model disturbance estimate: f_bar = y_dot - alpha * u_delayed.
double estimate_f(double y_dot, double alpha, double u_delayed);

struct UltraLocalEstimate {
    double f_bar = 0.0;
    double y_dot = 0.0;
};

} // namespace svc
