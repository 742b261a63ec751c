#include "svc/cases.hpp"

#include "svc/errors.hpp"

#include <string>

namespace svc {

SensitivityModel benchmark_model() {
    Vector c_v(4);
    c_v << 0.2715, 0.0989, 0.2746, 0.1022;
    Matrix c_q(4, 4);
    c_q << 2.5370, -0.3528, -0.9798, -0.3647,
          -0.2729,  2.8570, -0.2761, -0.6678,
          -0.9774, -0.3560,  2.4910, -0.3680,
          -0.2729, -0.6605, -0.2823,  2.7530;
    return SensitivityModel(std::move(c_v), std::move(c_q));
}

std::vector<DtipGains> default_inner_gains(const SensitivityModel& model, double tau_avr) {
    std::vector<DtipGains> gains;
    for (std::size_t i = 0; i < model.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        gains.push_back({model.c_q()(ii, ii) / tau_avr, 2.0, 1});
    }
    return gains;
}

std::vector<DtipGains> reference_inner_gains() {
    return {{4346.0, 2.0, 1}, {4564.0, 2.0, 1}, {4410.0, 2.0, 1}, {4584.0, 2.0, 1}};
}

DtipGains reference_outer_gains() { return {50000.0, 0.09, 1}; }

Scenario base_scenario() {
    SensitivityModel model = benchmark_model();
    Scenario s(model, ParticipationFactors({1.0, 1.0, 1.0, 1.0}));
    s.generators.assign(4, GeneratorSpec{});
    s.inner.gains = default_inner_gains(model, GeneratorSpec{}.tau_avr);
    return s;
}

Scenario canned_case(int id) {
    Scenario s = base_scenario();
    s.name = "case" + std::to_string(id);
    switch (id) {
    case 1:
        s.events = {{500.0, SetpointStep{1.0}}};
        break;
    case 2:
        s.events = {{0.0, SetDelay{28.0}}, {280.0, SetpointStep{1.0}}};
        break;
    case 3:
        s.events = {{500.0, LoadDisturbance{-0.005, {}}}};
        break;
    case 4:
        s.events = {{500.0, LinePerturb{1, 1.15, std::nullopt}}, {650.0, LinePerturb{1, 1.0, std::nullopt}}};
        break;
    case 5:
        s.events = {{350.0, Disconnect{1}}};
        break;
    case 6:
        s.initial_svc_active = {true, false, true, true};
        s.events = {{350.0, SetpointStep{1.0}}, {500.0, JoinSvc{1}}};
        break;
    default:
        throw InvalidArgument("unknown case id " + std::to_string(id));
    }
    return s;
}

} // namespace svc
