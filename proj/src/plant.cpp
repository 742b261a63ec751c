#include "svc/plant.hpp"

#include "svc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace svc {

void GeneratorParams::validate() const {
    if (!std::isfinite(tau_avr) || !(tau_avr > 0.0) || !(tau_avr < 1.0))
        throw InvalidArgument("generator: tau_avr must lie in (0, 1) s");
    if (!std::isfinite(v_base) || !std::isfinite(v_min) || !std::isfinite(v_max))
        throw InvalidArgument("generator: non-finite voltage parameter");
    if (!(v_min < v_base && v_base < v_max))
        throw InvalidArgument("generator: need v_min < v_base < v_max (v_base = " +
                              std::to_string(v_base) + ")");
}

void PlantConfig::validate(const std::vector<GeneratorParams>& generators) const {
    if (!std::isfinite(dt) || !(dt > 0.0))
        throw InvalidArgument("plant: dt must be > 0");
    for (const auto& g : generators)
        if (dt > g.tau_avr / 10.0 * (1.0 + 1e-12))
            throw InvalidArgument("plant: dt must not exceed tau_avr / 10");
}

GridState make_initial_state(const SensitivityModel& model,
                             const std::vector<GeneratorParams>& generators,
                             const ActiveMask& mask) {
    const auto n = static_cast<Eigen::Index>(model.size());
    if (generators.size() != model.size() || mask.size() != model.size())
        throw DimensionMismatch("initial state: generator count disagrees with the model");
    if (!mask.is_consistent())
        throw InvalidArgument("initial state: svc_active requires connected");
    for (const auto& g : generators)
        g.validate();

    GridState s{0.0,        Vector(n),        Vector(n), Vector::Zero(n), 0.0, 0.0,
                Vector::Zero(n), mask, model, generators};
    for (Eigen::Index i = 0; i < n; ++i) {
        s.v_t[i] = generators[static_cast<std::size_t>(i)].v_base;
        s.v_set[i] = s.v_t[i];
    }
    reduce_model(model, mask); // rejects an empty or singular connected set
    refresh_outputs(s);
    return s;
}

void refresh_outputs(GridState& s) {
    const auto n = static_cast<Eigen::Index>(s.size());
    const auto& c_q = s.model.c_q();
    const auto& c_v = s.model.c_v();
    double v_pp = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!s.mask.connected[static_cast<std::size_t>(i)]) {
            s.q[i] = 0.0;
            continue;
        }
        double qi = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (s.mask.connected[static_cast<std::size_t>(j)])
                qi += c_q(i, j) * s.v_t[j];
        s.q[i] = qi + s.d_q[i];
        v_pp += c_v[i] * s.v_t[i];
    }
    s.v_pp = v_pp + s.d_v;
}

GridState plant_step(GridState s, const Vector& u1, double dt) {
    const auto n = static_cast<Eigen::Index>(s.size());
    if (u1.size() != n)
        throw DimensionMismatch("plant_step: expected " + std::to_string(n) + " corrections");
    if (!u1.allFinite())
        throw NonFiniteInput("plant_step: non-finite correction");
    if (!std::isfinite(dt) || !(dt > 0.0))
        throw InvalidArgument("plant_step: dt must be > 0");

    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (!s.mask.connected[k])
            continue;
        const auto& g = s.generators[k];
        const double v_set = g.clamp_setpoint(g.v_base + u1[i]);
        s.v_set[i] = v_set;
        s.v_t[i] = v_set + (s.v_t[i] - v_set) * std::exp(-dt / g.tau_avr);
    }
    s.t += dt;
    refresh_outputs(s);
    return s;
}

GridState apply_disturbance(GridState s, double d_v, const Vector& d_q) {
    if (d_q.size() != static_cast<Eigen::Index>(s.size()))
        throw DimensionMismatch("apply_disturbance: d_q dimension");
    if (!std::isfinite(d_v) || !d_q.allFinite())
        throw NonFiniteInput("apply_disturbance: non-finite disturbance");
    s.d_v = d_v;
    s.d_q = d_q;
    refresh_outputs(s);
    return s;
}

GridState apply_topology(GridState s, std::optional<SensitivityModel> new_model,
                         std::optional<ActiveMask> new_mask) {
    if (new_model) {
        if (new_model->size() != s.size())
            throw DimensionMismatch("apply_topology: model dimension changed");
        s.model = std::move(*new_model);
    }
    if (new_mask) {
        if (new_mask->size() != s.size() || !new_mask->is_consistent())
            throw DimensionMismatch("apply_topology: inconsistent mask");
        s.mask = std::move(*new_mask);
    }
    reduce_model(s.model, s.mask); // throws SingularModel / NoActiveGenerator
    refresh_outputs(s);
    return s;
}

double consistency_error(const GridState& s) {
    const auto n = static_cast<Eigen::Index>(s.size());
    const auto idx = s.mask.connected_indices();
    double err = 0.0;
    double v_pp = s.d_v;
    for (auto j : idx)
        v_pp += s.model.c_v()[static_cast<Eigen::Index>(j)] * s.v_t[static_cast<Eigen::Index>(j)];
    err = std::abs(v_pp - s.v_pp);
    for (Eigen::Index i = 0; i < n; ++i) {
        double expected = 0.0;
        if (s.mask.connected[static_cast<std::size_t>(i)]) {
            expected = s.d_q[i];
            for (auto j : idx)
                expected += s.model.c_q()(i, static_cast<Eigen::Index>(j)) *
                            s.v_t[static_cast<Eigen::Index>(j)];
        }
        err = std::max(err, std::abs(expected - s.q[i]));
    }
    return err;
}

} // namespace svc
