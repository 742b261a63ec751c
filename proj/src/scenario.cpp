#include "svc/scenario.hpp"

#include "svc/errors.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <execution>
#include <numeric>
#include <string>

namespace svc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string ptr(const std::string& a) { return "/" + a; }
std::string ptr(const std::string& a, std::size_t i) { return "/" + a + "/" + std::to_string(i); }
std::string ptr(const std::string& a, const std::string& b) { return "/" + a + "/" + b; }

/// Number of plant ticks in `span`; throws unless span is a positive
/// integer multiple of dt.
long long ticks_of(double span, double dt, const std::string& field) {
    const double r = span / dt;
    const double k = std::round(r);
    if (!std::isfinite(span) || k < 1.0 || std::abs(r - k) > 1e-6)
        throw ValidationError(field, "must be a positive multiple of plant dt (" +
                                         std::to_string(dt) + " s)");
    return static_cast<long long>(k);
}

std::size_t event_gen(const EventKind& kind) {
    return std::visit(overloaded{[](const LinePerturb& e) { return e.gen; },
                                 [](const Disconnect& e) { return e.gen; },
                                 [](const JoinSvc& e) { return e.gen; },
                                 [](const LeaveSvc& e) { return e.gen; },
                                 [](const auto&) { return std::size_t{0}; }},
                      kind);
}

ActiveMask initial_mask(const Scenario& s) {
    ActiveMask mask = ActiveMask::all(s.size());
    if (!s.initial_svc_active.empty())
        mask.svc_active = s.initial_svc_active;
    return mask;
}

} // namespace

std::string event_tag(const EventKind& kind) {
    return std::visit(overloaded{[](const SetpointStep&) { return std::string("setpoint_step"); },
                                 [](const SetDelay&) { return std::string("set_delay"); },
                                 [](const LoadDisturbance&) { return std::string("load_disturbance"); },
                                 [](const LinePerturb&) { return std::string("line_perturb"); },
                                 [](const Disconnect&) { return std::string("disconnect"); },
                                 [](const JoinSvc&) { return std::string("join_svc"); },
                                 [](const LeaveSvc&) { return std::string("leave_svc"); }},
                      kind);
}

SensitivityModel perturb_line(const SensitivityModel& base, std::size_t gen, double factor) {
    if (gen >= base.size())
        throw InvalidArgument("perturb_line: generator index out of range");
    if (!std::isfinite(factor) || !(factor > 0.0))
        throw InvalidArgument("perturb_line: factor must be > 0");
    Vector c_v = base.c_v();
    Matrix c_q = base.c_q();
    const auto g = static_cast<Eigen::Index>(gen);
    for (Eigen::Index j = 0; j < c_q.cols(); ++j) {
        if (j == g)
            continue;
        c_q(g, j) *= factor;
        c_q(j, g) *= factor;
    }
    c_v[g] *= factor;
    return SensitivityModel(std::move(c_v), std::move(c_q));
}

void sort_events(std::vector<Event>& events) {
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.at < b.at; });
}

void validate(const Scenario& s) {
    const std::size_t n = s.size();
    if (!std::isfinite(s.duration) || !(s.duration > 0.0))
        throw ValidationError(ptr("duration"), "must be > 0");
    if (!std::isfinite(s.v_pp_ref))
        throw ValidationError(ptr("v_pp_ref"), "must be finite");
    if (s.pf.size() != n)
        throw ValidationError(ptr("participation"), "expected " + std::to_string(n) + " entries");
    if (s.generators.size() != n)
        throw ValidationError(ptr("generators"), "expected " + std::to_string(n) + " entries");
    if (!s.initial_svc_active.empty() && s.initial_svc_active.size() != n)
        throw ValidationError(ptr("initial_svc_active"), "expected " + std::to_string(n) + " entries");
    if (!s.initial_svc_active.empty() &&
        std::none_of(s.initial_svc_active.begin(), s.initial_svc_active.end(), [](bool b) { return b; }))
        throw ValidationError(ptr("initial_svc_active"), "no generator participates in SVC");

    std::vector<GeneratorParams> taus;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& g = s.generators[i];
        GeneratorParams p{g.tau_avr, g.v_base.value_or((g.v_min + g.v_max) / 2.0), g.v_min, g.v_max};
        try {
            p.validate();
        } catch (const Error& e) {
            throw ValidationError(ptr("generators", i), e.what());
        }
        taus.push_back(p);
    }
    try {
        s.plant.validate(taus);
    } catch (const Error& e) {
        throw ValidationError(ptr("plant", "dt"), e.what());
    }

    const double dt = s.plant.dt;
    ticks_of(s.inner.period, dt, ptr("inner", "period"));
    ticks_of(s.outer.period, dt, ptr("outer", "period"));
    ticks_of(s.inner.differentiator.t_ndf, dt, "/inner/differentiator/t_ndf");
    ticks_of(s.outer.differentiator.t_ndf, dt, "/outer/differentiator/t_ndf");
    ticks_of(s.log_interval, dt, ptr("log_interval"));
    try {
        s.inner.differentiator.validate_for_period(s.inner.period);
    } catch (const Error& e) {
        throw ValidationError("/inner/differentiator", e.what());
    }
    try {
        s.outer.differentiator.validate_for_period(s.outer.period);
    } catch (const Error& e) {
        throw ValidationError("/outer/differentiator", e.what());
    }
    const double ratio = s.outer.period / s.inner.period;
    if (ratio < OuterController::min_ratio - 1e-9 || ratio > OuterController::max_ratio + 1e-9)
        throw ValidationError(ptr("outer", "period"),
                              "outer/inner period ratio " + std::to_string(ratio) + " outside [5, 10]");

    if (s.inner.gains.size() != n)
        throw ValidationError("/inner/gains", "expected " + std::to_string(n) + " entries");
    for (std::size_t i = 0; i < n; ++i) {
        try {
            s.inner.gains[i].validate();
        } catch (const Error& e) {
            throw ValidationError("/inner/gains/" + std::to_string(i), e.what());
        }
    }
    try {
        s.outer.gains.validate();
    } catch (const Error& e) {
        throw ValidationError("/outer/gains", e.what());
    }

    double last = 0.0;
    for (std::size_t k = 0; k < s.events.size(); ++k) {
        const auto& ev = s.events[k];
        const std::string field = ptr("events", k);
        if (!std::isfinite(ev.at) || ev.at < 0.0)
            throw ValidationError(field + "/at", "must be >= 0");
        if (ev.at < last)
            throw ValidationError(field + "/at", "events must be sorted by time");
        last = ev.at;
        const auto tag = event_tag(ev.kind);
        if (tag == "line_perturb" || tag == "disconnect" || tag == "join_svc" || tag == "leave_svc") {
            if (event_gen(ev.kind) >= n)
                throw ValidationError(field + "/gen", "generator index out of range");
        }
        std::visit(overloaded{
                       [&](const SetpointStep& e) {
                           if (!std::isfinite(e.v_pp_ref))
                               throw ValidationError(field + "/v_pp_ref", "must be finite");
                       },
                       [&](const SetDelay& e) {
                           if (!std::isfinite(e.delay) || e.delay < 0.0)
                               throw ValidationError(field + "/delay", "must be >= 0");
                       },
                       [&](const LoadDisturbance& e) {
                           if (!std::isfinite(e.d_v))
                               throw ValidationError(field + "/d_v", "must be finite");
                           if (!e.d_q.empty() && e.d_q.size() != n)
                               throw ValidationError(field + "/d_q", "expected " + std::to_string(n) + " entries");
                           for (double d : e.d_q)
                               if (!std::isfinite(d))
                                   throw ValidationError(field + "/d_q", "must be finite");
                       },
                       [&](const LinePerturb& e) {
                           if (e.model) {
                               if (e.model->size() != n)
                                   throw ValidationError(field + "/model", "dimension mismatch");
                           } else if (!std::isfinite(e.factor) || !(e.factor > 0.0)) {
                               throw ValidationError(field + "/factor", "must be > 0");
                           }
                       },
                       [](const auto&) {}},
                   ev.kind);
    }
}

std::vector<GeneratorParams> resolve_generators(const Scenario& s) {
    const std::size_t n = s.size();
    std::vector<GeneratorParams> out(n);
    const bool needs_equilibrium = std::any_of(s.generators.begin(), s.generators.end(),
                                               [](const GeneratorSpec& g) { return !g.v_base; });
    Vector v_eq;
    if (needs_equilibrium) {
        const ActiveMask mask = initial_mask(s);
        const auto sol = solve_alignment(s.model, s.pf, s.v_pp_ref, mask, s.tolerances);
        v_eq = s.model.solve_q(sol.q_ref);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto& g = s.generators[i];
        out[i] = {g.tau_avr, g.v_base ? *g.v_base : v_eq[static_cast<Eigen::Index>(i)], g.v_min, g.v_max};
        try {
            out[i].validate();
        } catch (const Error& e) {
            throw ValidationError(ptr("generators", i), e.what());
        }
    }
    return out;
}

std::vector<std::string> RunResult::column_names(std::size_t n) {
    std::vector<std::string> cols{"t", "v_pp_ref", "v_pp", "v_pp_meas", "u2"};
    for (const char* base :
         {"v_t", "v_set", "q", "q_ref", "q_ref_prime", "u1", "connected", "svc_active"})
        for (std::size_t i = 1; i <= n; ++i)
            cols.push_back(std::string(base) + "_" + std::to_string(i));
    return cols;
}

RunResult::RunResult(std::size_t n)
    : n_(n), width_(fixed_columns + per_generator_columns * n), columns_(column_names(n)) {}

std::size_t RunResult::index(const std::string& name) const {
    const auto it = std::find(columns_.begin(), columns_.end(), name);
    if (it == columns_.end())
        throw InvalidArgument("unknown column " + name);
    return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<double> RunResult::column(const std::string& name) const {
    const std::size_t c = index(name);
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < out.size(); ++r)
        out[r] = at(r, c);
    return out;
}

std::vector<double> RunResult::row(std::size_t r) const {
    return {data_.begin() + static_cast<std::ptrdiff_t>(r * width_),
            data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * width_)};
}

void RunResult::append_row(const std::vector<double>& values) {
    if (values.size() != width_)
        throw DimensionMismatch("run result: row width");
    if (rows() > 0 && !(values[0] > at(rows() - 1, 0)))
        throw InvalidArgument("run result: rows must be strictly increasing in t");
    data_.insert(data_.end(), values.begin(), values.end());
}

namespace {

class Engine {
public:
    Engine(const Scenario& s, const RunOptions& opt)
        : s_(s), opt_(opt), n_(s.size()), dt_(s.plant.dt),
          state_(make_initial_state(s.model, resolve_generators(s), initial_mask(s))),
          outer_(s.outer.gains, s.outer.differentiator, s.outer.period, s.inner.period,
                 s.reference_derivative),
          ref_(s.v_pp_ref), u1_(Vector::Zero(static_cast<Eigen::Index>(n_))),
          q_ref_prime_(Vector::Zero(static_cast<Eigen::Index>(n_))), pending_(n_, false),
          result_(n_) {
        total_ = static_cast<long long>(std::llround(s.duration / dt_));
        inner_stride_ = ticks_of(s.inner.period, dt_, "/inner/period");
        outer_stride_ = ticks_of(s.outer.period, dt_, "/outer/period");
        inner_sample_stride_ = ticks_of(s.inner.differentiator.t_ndf, dt_, "/inner/differentiator/t_ndf");
        outer_sample_stride_ = ticks_of(s.outer.differentiator.t_ndf, dt_, "/outer/differentiator/t_ndf");
        log_stride_ = ticks_of(s.log_interval, dt_, "/log_interval");

        agents_.reserve(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            const auto& g = state_.generators[i];
            agents_.emplace_back(s.inner.gains[i], s.inner.differentiator, s.inner.period,
                                 ControlLimits{g.v_min - g.v_base, g.v_max - g.v_base},
                                 s.reference_derivative);
            agents_.back().gate(state_.mask.svc_active[i]);
        }
        for (const auto& ev : s.events)
            event_ticks_.push_back(std::llround(ev.at / dt_));
        order_.resize(n_);
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        errors_.resize(n_);
        realign(0.0);
    }

    RunResult run() {
        std::size_t next_event = 0;
        for (long long k = 0; k <= total_; ++k) {
            const double t = static_cast<double>(k) * dt_;
            try {
                while (next_event < s_.events.size() && event_ticks_[next_event] <= k)
                    apply_event(s_.events[next_event++], t);
                tick(k, t);
            } catch (const RunError&) {
                throw;
            } catch (const Error& e) {
                throw RunError(t, e.what());
            }
        }
        result_.inner_fires.resize(n_);
        for (std::size_t i = 0; i < n_; ++i)
            result_.inner_fires[i] = agents_[i].fires();
        result_.outer_fires = outer_.fires();
        return std::move(result_);
    }

private:
    void realign(double t) {
        AlignmentRecord rec;
        rec.t = t;
        rec.mask = state_.mask;
        rec.v_pp_ref = ref_;
        rec.solution = solve_alignment(state_.model, s_.pf, ref_, state_.mask, s_.tolerances);
        rec.residual = alignment_residual(state_.model, rec.solution, ref_, state_.mask);
        alignment_ = rec.solution;
        spdlog::debug("t={:.3f} alignment c={:.9g} residual={:.3g}", t, rec.solution.c, rec.residual);
        result_.alignments.push_back(std::move(rec));
    }

    void leave(std::size_t g) {
        state_.mask.svc_active[g] = false;
        pending_[g] = false;
        agents_[g].gate(false);
        u1_[static_cast<Eigen::Index>(g)] = 0.0;
    }

    void apply_event(const Event& ev, double t) {
        spdlog::debug("t={:.3f} event {}", t, event_tag(ev.kind));
        bool topology = false;
        bool dirty = false;
        std::visit(overloaded{
                       [&](const SetpointStep& e) {
                           ref_ = e.v_pp_ref;
                           dirty = true;
                       },
                       [&](const SetDelay& e) { delay_.set_delay(e.delay); },
                       [&](const LoadDisturbance& e) {
                           Vector d_q = Vector::Zero(static_cast<Eigen::Index>(n_));
                           for (std::size_t i = 0; i < e.d_q.size(); ++i)
                               d_q[static_cast<Eigen::Index>(i)] = e.d_q[i];
                           state_ = apply_disturbance(std::move(state_), e.d_v, d_q);
                       },
                       [&](const LinePerturb& e) {
                           SensitivityModel m = e.model ? *e.model : perturb_line(s_.model, e.gen, e.factor);
                           state_ = apply_topology(std::move(state_), std::move(m));
                           dirty = true;
                       },
                       [&](const Disconnect& e) {
                           leave(e.gen);
                           state_.mask.connected[e.gen] = false;
                           topology = true;
                           dirty = true;
                       },
                       [&](const JoinSvc& e) {
                           if (!state_.mask.connected[e.gen])
                               throw InvalidArgument("join_svc: generator " + std::to_string(e.gen + 1) +
                                                     " is disconnected");
                           if (state_.mask.svc_active[e.gen] || pending_[e.gen])
                               return;
                           agents_[e.gen].gate(true);
                           pending_[e.gen] = true;
                       },
                       [&](const LeaveSvc& e) {
                           leave(e.gen);
                           dirty = true;
                       }},
                   ev.kind);
        if (topology)
            state_ = apply_topology(std::move(state_), std::nullopt, state_.mask);
        if (dirty)
            realign(t);
    }

    double u2_weight(std::size_t i) const {
        return s_.u2_distribution == U2Distribution::Participation ? s_.pf[i] : 1.0;
    }

    void compose(double u2) {
        for (std::size_t i = 0; i < n_; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            q_ref_prime_[ii] = state_.mask.svc_active[i]
                                   ? compose_reference(alignment_.q_ref[ii], u2, u2_weight(i))
                                   : 0.0;
        }
    }

    void tick(long long k, double t) {
        delay_.push(t, state_.v_pp);
        const double v_meas = delay_.read(t);

        // Sampling phase: differentiators run faster than the control laws.
        if (k % outer_sample_stride_ == 0)
            outer_.observe(v_meas, ref_);
        if (k % inner_sample_stride_ == 0)
            for (std::size_t i = 0; i < n_; ++i)
                agents_[i].observe(state_.q[static_cast<Eigen::Index>(i)],
                                   q_ref_prime_[static_cast<Eigen::Index>(i)]);

        const bool inner_tick = k % inner_stride_ == 0;
        if (inner_tick) {
            // A joining generator enters the alignment on the first inner
            // tick at which its agent can act.
            bool joined = false;
            for (std::size_t i = 0; i < n_; ++i) {
                if (pending_[i] && agents_[i].ready()) {
                    pending_[i] = false;
                    state_.mask.svc_active[i] = true;
                    joined = true;
                }
            }
            if (joined)
                realign(t);
        }

        if (k % outer_stride_ == 0)
            u2_ = outer_.control(v_meas, ref_);
        compose(u2_);

        if (inner_tick)
            step_agents();

        if (k % log_stride_ == 0)
            log_row(t, v_meas);

        if (k < total_) {
            state_ = plant_step(std::move(state_), u1_, dt_);
            state_.t = static_cast<double>(k + 1) * dt_;
        }
    }

    void step_agent(std::size_t i) {
        const auto ii = static_cast<Eigen::Index>(i);
        u1_[ii] = agents_[i].control(state_.q[ii], q_ref_prime_[ii]);
    }

    void step_agents() {
        if (!opt_.parallel_agents) {
            for (std::size_t i = 0; i < n_; ++i)
                step_agent(i);
            return;
        }
        std::for_each(std::execution::par, order_.begin(), order_.end(), [this](std::size_t i) {
            try {
                step_agent(i);
            } catch (...) {
                errors_[i] = std::current_exception();
            }
        });
        for (auto& e : errors_)
            if (e)
                std::rethrow_exception(std::exchange(e, nullptr));
    }

    void log_row(double t, double v_meas) {
        std::vector<double>& row = row_;
        row.assign(result_.width(), 0.0);
        row[0] = t;
        row[1] = ref_;
        row[2] = state_.v_pp;
        row[3] = v_meas;
        row[4] = u2_;
        const std::size_t b = RunResult::fixed_columns;
        for (std::size_t i = 0; i < n_; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto& g = state_.generators[i];
            const bool connected = state_.mask.connected[i];
            row[b + 0 * n_ + i] = state_.v_t[ii];
            row[b + 1 * n_ + i] = connected ? g.clamp_setpoint(g.v_base + u1_[ii]) : state_.v_set[ii];
            row[b + 2 * n_ + i] = state_.q[ii];
            row[b + 3 * n_ + i] = alignment_.q_ref[ii];
            row[b + 4 * n_ + i] = q_ref_prime_[ii];
            row[b + 5 * n_ + i] = u1_[ii];
            row[b + 6 * n_ + i] = connected ? 1.0 : 0.0;
            row[b + 7 * n_ + i] = state_.mask.svc_active[i] ? 1.0 : 0.0;
        }
        result_.append_row(row);
    }

    const Scenario& s_;
    RunOptions opt_;
    std::size_t n_;
    double dt_;
    GridState state_;
    std::vector<InnerAgent> agents_;
    OuterController outer_;
    DelayBuffer delay_;
    double ref_;
    double u2_ = 0.0;
    AlignmentSolution alignment_;
    Vector u1_;
    Vector q_ref_prime_;
    std::vector<bool> pending_;
    std::vector<long long> event_ticks_;
    std::vector<std::size_t> order_;
    std::vector<std::exception_ptr> errors_;
    std::vector<double> row_;
    long long total_ = 0;
    long long inner_stride_ = 1;
    long long outer_stride_ = 1;
    long long inner_sample_stride_ = 1;
    long long outer_sample_stride_ = 1;
    long long log_stride_ = 1;
    RunResult result_;
};

} // namespace

RunResult run(const Scenario& scenario, const RunOptions& options) {
    validate(scenario);
    Engine engine(scenario, options);
    return engine.run();
}

} // namespace svc
