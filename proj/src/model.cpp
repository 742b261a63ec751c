#include "svc/model.hpp"

#include "svc/errors.hpp"

#include <cmath>
#include <random>
#include <string>

namespace svc {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

} // namespace

SensitivityModel::SensitivityModel(Vector c_v, Matrix c_q, const Tolerances& tol)
    : c_v_(std::move(c_v)), c_q_(std::move(c_q)) {
    const auto n = c_v_.size();
    if (n == 0)
        throw DimensionMismatch("sensitivity model: empty c_v");
    if (c_q_.rows() != n || c_q_.cols() != n)
        throw DimensionMismatch("sensitivity model: c_q is " + std::to_string(c_q_.rows()) + "x" +
                                std::to_string(c_q_.cols()) + ", expected " + std::to_string(n) +
                                "x" + std::to_string(n));
    if (!c_v_.allFinite() || !all_finite(c_q_))
        throw NonFiniteInput("sensitivity model: non-finite entry");

    lu_.compute(c_q_);
    if (!lu_.isInvertible())
        throw SingularModel("sensitivity model: c_q is singular");

    // Invertibility is judged by an actual solve on a fixed pseudo-random
    // right-hand side.
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector b(n);
    for (Eigen::Index i = 0; i < n; ++i)
        b[i] = dist(rng);
    const Vector x = lu_.solve(b);
    const double residual = (c_q_ * x - b).lpNorm<Eigen::Infinity>();
    if (!x.allFinite() || !(residual < tol.solve_residual))
        throw SingularModel("sensitivity model: c_q solve residual " + std::to_string(residual));
}

Vector SensitivityModel::solve_q(const Vector& rhs) const {
    if (rhs.size() != c_v_.size())
        throw DimensionMismatch("solve_q: rhs dimension");
    return lu_.solve(rhs);
}

Vector SensitivityModel::pilot_sensitivity() const {
    // s c_q = c_v  <=>  c_q^T s^T = c_v^T
    Eigen::FullPivLU<Matrix> lu_t(c_q_.transpose());
    return lu_t.solve(c_v_);
}

ParticipationFactors::ParticipationFactors(std::vector<double> pf) : pf_(std::move(pf)) {
    if (pf_.empty())
        throw DimensionMismatch("participation factors: empty");
    for (double v : pf_)
        if (!std::isfinite(v) || !(v > 0.0))
            throw InvalidArgument("participation factors must be finite and > 0");
}

bool ActiveMask::is_consistent() const {
    if (connected.size() != svc_active.size())
        return false;
    for (std::size_t i = 0; i < connected.size(); ++i)
        if (svc_active[i] && !connected[i])
            return false;
    return true;
}

std::size_t ActiveMask::connected_count() const {
    std::size_t k = 0;
    for (bool b : connected)
        k += b ? 1 : 0;
    return k;
}

std::size_t ActiveMask::active_count() const {
    std::size_t k = 0;
    for (bool b : svc_active)
        k += b ? 1 : 0;
    return k;
}

std::vector<std::size_t> ActiveMask::connected_indices() const {
    std::vector<std::size_t> idx;
    idx.reserve(connected.size());
    for (std::size_t i = 0; i < connected.size(); ++i)
        if (connected[i])
            idx.push_back(i);
    return idx;
}

SensitivityModel reduce_model(const SensitivityModel& model, const ActiveMask& mask,
                              const Tolerances& tol) {
    if (mask.size() != model.size() || !mask.is_consistent())
        throw DimensionMismatch("reduce_model: mask does not match model");
    const auto idx = mask.connected_indices();
    if (idx.empty())
        throw NoActiveGenerator("reduce_model: no connected generator");
    if (idx.size() == model.size())
        return model;

    const auto m = static_cast<Eigen::Index>(idx.size());
    Vector c_v(m);
    Matrix c_q(m, m);
    for (Eigen::Index r = 0; r < m; ++r) {
        const auto i = static_cast<Eigen::Index>(idx[r]);
        c_v[r] = model.c_v()[i];
        for (Eigen::Index c = 0; c < m; ++c)
            c_q(r, c) = model.c_q()(i, static_cast<Eigen::Index>(idx[c]));
    }
    return SensitivityModel(std::move(c_v), std::move(c_q), tol);
}

AlignmentSolution solve_alignment(const SensitivityModel& model, const ParticipationFactors& pf,
                                  double v_pp_ref, const ActiveMask& mask, const Tolerances& tol) {
    const std::size_t n = model.size();
    if (pf.size() != n || mask.size() != n || !mask.is_consistent())
        throw DimensionMismatch("solve_alignment: dimensions of model, pf and mask disagree");
    if (!std::isfinite(v_pp_ref))
        throw NonFiniteInput("solve_alignment: non-finite reference");
    if (mask.active_count() == 0)
        throw NoActiveGenerator("solve_alignment: no generator participates in SVC");

    const SensitivityModel reduced = reduce_model(model, mask, tol);
    const Vector s = reduced.pilot_sensitivity();
    if (!s.allFinite())
        throw SingularModel("solve_alignment: reduced c_q is singular");

    const auto idx = mask.connected_indices();
    double s_dot_pf = 0.0;
    for (std::size_t r = 0; r < idx.size(); ++r)
        if (mask.svc_active[idx[r]])
            s_dot_pf += s[static_cast<Eigen::Index>(r)] * pf[idx[r]];
    if (std::abs(s_dot_pf) < tol.degeneracy)
        throw DegenerateAlignment("solve_alignment: s . pf = " + std::to_string(s_dot_pf));

    AlignmentSolution sol;
    sol.c = v_pp_ref / s_dot_pf;
    sol.q_ref = Vector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        if (mask.svc_active[i])
            sol.q_ref[static_cast<Eigen::Index>(i)] = sol.c * pf[i];

    const double residual = alignment_residual(model, sol, v_pp_ref, mask);
    if (!(residual < tol.solve_residual))
        throw SingularModel("solve_alignment: residual " + std::to_string(residual));
    return sol;
}

double alignment_residual(const SensitivityModel& model, const AlignmentSolution& sol,
                          double v_pp_ref, const ActiveMask& mask) {
    const SensitivityModel reduced = reduce_model(model, mask);
    const auto idx = mask.connected_indices();
    Vector q(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r)
        q[static_cast<Eigen::Index>(r)] = sol.q_ref[static_cast<Eigen::Index>(idx[r])];
    // v_pp = c_v c_q^-1 q, evaluated through the terminal voltages.
    const Vector v_t = reduced.solve_q(q);
    return std::abs(v_pp_ref - reduced.pilot_voltage(v_t));
}

} // namespace svc
