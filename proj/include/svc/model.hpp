#pragma once

// Sensitivity model of a single-zone grid and the reactive-power alignment
// solver that turns a pilot-point reference into per-generator steady-state
// reactive-power references.

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace svc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Tolerances {
    double solve_residual = 1e-10; ///< linear solves and alignment residual
    double degeneracy = 1e-12;     ///< |s . pf| below this is degenerate

    friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

/// Linear map from generator terminal voltages to the pilot-point voltage
/// (row vector c_v) and to generator reactive powers (matrix c_q).
/// Everything is per-unit on a common base.
class SensitivityModel {
public:
    /// Throws DimensionMismatch, NonFiniteInput or SingularModel.
    SensitivityModel(Vector c_v, Matrix c_q, const Tolerances& tol = {});

    std::size_t size() const noexcept { return static_cast<std::size_t>(c_v_.size()); }
    const Vector& c_v() const noexcept { return c_v_; }
    const Matrix& c_q() const noexcept { return c_q_; }

    double pilot_voltage(const Vector& v_t) const { return c_v_.dot(v_t); }
    Vector reactive_power(const Vector& v_t) const { return c_q_ * v_t; }

    /// Solves c_q x = rhs.
    Vector solve_q(const Vector& rhs) const;
    /// Row vector s = c_v c_q^-1 (pilot-voltage sensitivity to reactive power).
    Vector pilot_sensitivity() const;

    friend bool operator==(const SensitivityModel& a, const SensitivityModel& b) {
        return a.c_v_.size() == b.c_v_.size() && a.c_v_ == b.c_v_ && a.c_q_ == b.c_q_;
    }

private:
    Vector c_v_;
    Matrix c_q_;
    Eigen::FullPivLU<Matrix> lu_;
};

/// Strictly positive per-generator weights Q_i^pf.
class ParticipationFactors {
public:
    explicit ParticipationFactors(std::vector<double> pf);

    std::size_t size() const noexcept { return pf_.size(); }
    double operator[](std::size_t i) const { return pf_[i]; }
    const std::vector<double>& values() const noexcept { return pf_; }

    friend bool operator==(const ParticipationFactors&, const ParticipationFactors&) = default;

private:
    std::vector<double> pf_;
};

/// Which generators are electrically present and which take part in SVC.
/// svc_active[i] implies connected[i].
struct ActiveMask {
    std::vector<bool> connected;
    std::vector<bool> svc_active;

    static ActiveMask all(std::size_t n) { return {std::vector<bool>(n, true), std::vector<bool>(n, true)}; }

    std::size_t size() const noexcept { return connected.size(); }
    bool is_consistent() const;
    std::size_t connected_count() const;
    std::size_t active_count() const;
    /// Indices of connected generators in ascending order.
    std::vector<std::size_t> connected_indices() const;

    friend bool operator==(const ActiveMask&, const ActiveMask&) = default;
};

struct AlignmentSolution {
    Vector q_ref; ///< c * pf_i on active generators, 0 elsewhere
    double c = 0.0;
};

/// Deletes rows/columns of disconnected generators.
SensitivityModel reduce_model(const SensitivityModel& model, const ActiveMask& mask,
                              const Tolerances& tol = {});

/// Closed-form solution of the alignment system
///   q_ref_i = c * pf_i (active i),  v_pp_ref = c_v c_q^-1 q_ref
/// on the connected sub-network. Inactive generators get q_ref_i = 0.
AlignmentSolution solve_alignment(const SensitivityModel& model, const ParticipationFactors& pf,
                                  double v_pp_ref, const ActiveMask& mask,
                                  const Tolerances& tol = {});

/// Max |v_pp_ref - s . q_ref| residual of the alignment system (connected
/// sub-network), used by tests and by the run loop's self-checks.
double alignment_residual(const SensitivityModel& model, const AlignmentSolution& sol,
                          double v_pp_ref, const ActiveMask& mask);

} // namespace svc
