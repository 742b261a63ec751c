#include "svc/acceptance.hpp"

#include "svc/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace svc {

namespace {

std::string opt(const std::optional<double>& v) { return v ? fmt::format("{:.2f} s", *v) : "never"; }

Criterion make(int number, const std::string& label, bool passed, std::string detail) {
    return {number, label, passed, std::move(detail)};
}

std::size_t row_at(const std::vector<double>& t, double at) {
    return static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), at - 1e-9) - t.begin());
}

} // namespace

std::vector<Criterion> evaluate_case(int id, const RunResult& result, const Scenario& scenario) {
    const Series series = to_series(result);
    const RunMetrics m = compute_metrics(series, scenario.pf, scenario.events);
    const auto& t = series.column("t");
    const auto& v = series.column("v_pp");
    const auto& ref = series.column("v_pp_ref");
    const std::string name = fmt::format("case {}", id);
    std::vector<Criterion> out;

    switch (id) {
    case 1: {
        const bool settle = m.settling_time && *m.settling_time <= bounds::settle_after_step;
        out.push_back(make(4, name + ": settling after step", settle,
                           fmt::format("t_settle = {} (bound {} s), within {:.0e} pu after {}", opt(m.settling_time),
                                       bounds::settle_after_step, m.recovery_band,
                                       opt(m.events.at(0).recovery_time))));
        out.push_back(make(4, name + ": final error", m.final_error < bounds::final_error,
                           fmt::format("|e| = {:.3e} pu (bound {:.0e})", m.final_error, bounds::final_error)));
        out.push_back(make(4, name + ": final alignment spread", m.final_spread < bounds::spread,
                           fmt::format("spread = {:.3e} pu (bound {:.0e})", m.final_spread, bounds::spread)));
        break;
    }
    case 2: {
        const bool settle = m.settling_time && *m.settling_time <= bounds::settle_after_step;
        out.push_back(make(5, name + ": settling after step", settle,
                           fmt::format("t_settle = {} (bound {} s), within {:.0e} pu after {}", opt(m.settling_time),
                                       bounds::settle_after_step, m.recovery_band,
                                       opt(m.events.at(1).recovery_time))));
        double worst = 0.0;
        bool finite = true;
        for (std::size_t r = 0; r < t.size(); ++r) {
            finite = finite && std::isfinite(v[r]);
            if (t[r] >= t.back() - bounds::stable_window)
                worst = std::max(worst, std::abs(v[r] - ref[r]));
        }
        out.push_back(make(5, name + ": stable to end of run", finite && worst < bounds::final_error,
                           fmt::format("max |e| over last {} s = {:.3e} pu", bounds::stable_window, worst)));
        break;
    }
    case 3: {
        const auto& ev = m.events.at(0);
        out.push_back(make(6, name + ": deviation at event", ev.max_deviation > bounds::final_error,
                           fmt::format("max |e| = {:.3e} pu", ev.max_deviation)));
        const bool rec = ev.recovery_time && *ev.recovery_time <= bounds::recovery;
        out.push_back(make(6, name + ": recovery", rec,
                           fmt::format("t_rec = {} (bound {} s)", opt(ev.recovery_time), bounds::recovery)));
        out.push_back(make(6, name + ": final alignment spread", m.final_spread < bounds::spread,
                           fmt::format("spread = {:.3e} pu", m.final_spread)));
        break;
    }
    case 4: {
        for (std::size_t k = 0; k < m.events.size(); ++k) {
            const auto& ev = m.events[k];
            const bool rec = ev.recovery_time && *ev.recovery_time <= bounds::recovery;
            out.push_back(make(7, fmt::format("{}: recovery after event at {} s", name, ev.at), rec,
                               fmt::format("max |e| = {:.3e} pu, t_rec = {} (bound {} s)", ev.max_deviation,
                                           opt(ev.recovery_time), bounds::recovery)));
        }
        break;
    }
    case 5: {
        const auto& ev = m.events.at(0);
        const bool rec = ev.recovery_time && *ev.recovery_time <= bounds::recovery;
        out.push_back(make(8, name + ": recovery after disconnection", rec,
                           fmt::format("t_rec = {} (bound {} s)", opt(ev.recovery_time), bounds::recovery)));
        out.push_back(make(8, name + ": remaining generators re-aligned", m.final_spread < bounds::spread,
                           fmt::format("spread = {:.3e} pu", m.final_spread)));
        break;
    }
    case 6: {
        const Event* join = nullptr;
        for (const auto& ev : scenario.events)
            if (std::holds_alternative<JoinSvc>(ev.kind))
                join = &ev;
        if (!join)
            throw InvalidArgument("case 6 scenario has no join event");
        const std::size_t gen = std::get<JoinSvc>(join->kind).gen;
        const std::size_t j = row_at(t, join->at);
        if (j == 0 || j >= t.size())
            throw InvalidArgument("case 6 join outside the logged range");
        double dip = 0.0;
        for (std::size_t r = j; r < t.size(); ++r)
            dip = std::max(dip, ref[r] - v[r]);
        out.push_back(make(9, name + ": dip at join", dip < bounds::join_dip,
                           fmt::format("dip = {:.4f} pu (bound {})", dip, bounds::join_dip)));
        bool lower = true;
        std::string detail;
        for (std::size_t i = 0; i < scenario.size(); ++i) {
            if (i == gen)
                continue;
            const auto& q = series.column(fmt::format("q_{}", i + 1));
            const double before = q[j - 1];
            const double after = q.back();
            lower = lower && after < before;
            detail += fmt::format("{}Q{}: {:.4f} -> {:.4f}", detail.empty() ? "" : ", ", i + 1, before, after);
        }
        out.push_back(make(9, name + ": other generators reduce Q", lower, detail));
        break;
    }
    default:
        throw InvalidArgument(fmt::format("unknown case id {}", id));
    }
    return out;
}

Criterion determinism_criterion(int id, const std::string& csv_a, const std::string& csv_b,
                                const std::string& csv_parallel) {
    const bool repeat = csv_a == csv_b;
    const bool parallel = csv_a == csv_parallel;
    return make(10, fmt::format("case {}: deterministic output", id), repeat && parallel,
                fmt::format("repeat run {}, parallel agents {}", repeat ? "identical" : "differs",
                            parallel ? "identical" : "differs"));
}

Criterion runtime_criterion(int id, double seconds) {
    return make(11, fmt::format("case {}: wall-clock", id), seconds < bounds::wall_clock,
                fmt::format("{:.2f} s (bound {} s)", seconds, bounds::wall_clock));
}

std::string format_criterion(const Criterion& c) {
    return fmt::format("[{}] criterion {:>2}  {}  ({})", c.passed ? "PASS" : "FAIL", c.number, c.label, c.detail);
}

} // namespace svc
