// Acceptance gate: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include "support.hpp"

#include "svc/acceptance.hpp"
#include "svc/cases.hpp"
#include "svc/control.hpp"
#include "svc/estimation.hpp"
#include "svc/metrics.hpp"
#include "svc/model.hpp"
#include "svc/outputs.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <map>

using namespace svc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Line {
    bool passed = true;
    std::string label;
    std::vector<std::string> details;
};

double spread_of(const AlignmentSolution& sol, const std::vector<double>& pf, const ActiveMask& mask) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < pf.size(); ++i) {
        if (!mask.svc_active[i])
            continue;
        const double r = sol.q_ref[static_cast<Eigen::Index>(i)] / pf[i];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return hi - lo;
}

Line alignment_solver() {
    const auto start = Clock::now();
    std::mt19937_64 rng(1);
    double worst_residual = 0.0;
    double worst_spread = 0.0;
    double worst_oracle = 0.0;
    int models = 0;
    auto check = [&](const SensitivityModel& model, const std::vector<double>& pf, double v_ref) {
        const ActiveMask mask = ActiveMask::all(model.size());
        const auto sol = solve_alignment(model, ParticipationFactors(pf), v_ref, mask);
        worst_residual = std::max(worst_residual, alignment_residual(model, sol, v_ref, mask));
        worst_spread = std::max(worst_spread, spread_of(sol, pf, mask));
        ++models;
        return sol;
    };
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 2 + static_cast<std::size_t>(k % 7);
        const auto rm = gen::model(rng, n);
        const auto pf = gen::pf(rng, n);
        const double v_ref = std::uniform_real_distribution<double>(0.9, 1.1)(rng);
        const auto sol = check(rm.build(), pf, v_ref);
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i)
            all[i] = i;
        const auto [c, q] = oracle::alignment(rm.c_v, rm.c_q, pf, v_ref, all, std::vector<bool>(n, true));
        worst_oracle = std::max(worst_oracle, std::abs(sol.c - c) / std::abs(c));
    }
    const auto bench = check(benchmark_model(), {1, 1, 1, 1}, 1.0);
    const double elapsed = seconds_since(start);
    Line l;
    l.label = "alignment solver on random and benchmark models";
    l.passed = worst_residual < 1e-10 && worst_spread < 1e-12 && elapsed < 5.0;
    l.details = {fmt::format("{} models", models), fmt::format("max residual {:.2e} (< 1e-10)", worst_residual),
                 fmt::format("max spread {:.2e} (< 1e-12)", worst_spread),
                 fmt::format("max rel. deviation from oracle {:.2e}", worst_oracle),
                 fmt::format("benchmark c = {:.10f}", bench.c), fmt::format("{:.3f} s (< 5 s)", elapsed)};
    return l;
}

Line differentiator() {
    const auto start = Clock::now();
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    std::uniform_real_distribution<double> period(1e-3, 1.0);
    double worst_affine = 0.0;
    double worst_quad = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double a = coef(rng), b = coef(rng), c = coef(rng);
        const DifferentiatorConfig cfg{period(rng), 3 + static_cast<std::size_t>(rng() % 14)};
        Differentiator affine(cfg);
        Differentiator quad(cfg);
        std::vector<double> qs;
        for (std::size_t i = 0; i < cfg.n_ndf; ++i) {
            const double t = cfg.t_ndf * static_cast<double>(i);
            affine.push(a + b * t);
            qs.push_back(a + b * t + c * t * t);
            quad.push(qs.back());
        }
        worst_affine = std::max(worst_affine, std::abs(*affine.estimate() - b) / std::max(1.0, std::abs(b)));
        const double expected = oracle::ls_slope(qs, cfg.t_ndf);
        worst_quad = std::max(worst_quad, std::abs(*quad.estimate() - expected) / std::max(1.0, std::abs(expected)));
    }
    const double elapsed = seconds_since(start);
    Line l;
    l.label = "differentiator exactness";
    l.passed = worst_affine < 1e-9 && worst_quad < 1e-9 && elapsed < 1.0;
    l.details = {fmt::format("affine rel. error {:.2e} (< 1e-9)", worst_affine),
                 fmt::format("quadratic vs normal equations {:.2e} (< 1e-9)", worst_quad),
                 fmt::format("{:.4f} s (< 1 s)", elapsed)};
    return l;
}

Line closed_loop_law() {
    // y' = alpha u with the exact estimate f_bar = 0.
    Line l;
    l.label = "closed-loop law on the synthetic scalar plant";
    for (const double k_p : {0.5, 2.0, 10.0}) {
        const DtipGains g{3.0, k_p, 1};
        const double dt = 1e-4 / k_p;
        double y = 1.0, t = 0.0;
        std::vector<double> ratios;
        for (const double mark : {1.0 / k_p, 3.0 / k_p}) {
            while (t < mark - 1e-12) {
                y += dt * g.alpha * dtip_law(0.0, 0.0, y, g);
                t += dt;
            }
            ratios.push_back(y / std::exp(-k_p * t));
        }
        const bool ok = std::abs(ratios[0] - 1.0) < 0.05 && std::abs(ratios[1] - 1.0) < 0.05;
        l.passed = l.passed && ok;
        l.details.push_back(fmt::format("k_p={}: e/exp(-k_p t) = {:.4f}, {:.4f}", k_p, ratios[0], ratios[1]));
    }
    return l;
}

} // namespace

int main() {
    std::vector<std::pair<int, Line>> lines;
    lines.emplace_back(1, alignment_solver());
    lines.emplace_back(2, differentiator());
    lines.emplace_back(3, closed_loop_law());

    std::map<int, Line> by_number;
    for (int id = 1; id <= case_count; ++id) {
        const Scenario s = canned_case(id);
        const auto start = Clock::now();
        const auto r = run(s);
        const double elapsed = seconds_since(start);
        std::vector<Criterion> crit = evaluate_case(id, r, s);
        const std::string csv = to_csv(to_series(r));
        crit.push_back(determinism_criterion(id, csv, to_csv(to_series(run(s))),
                                             to_csv(to_series(run(s, {.parallel_agents = true})))));
        crit.push_back(runtime_criterion(id, elapsed));
        for (const auto& c : crit) {
            Line& l = by_number[c.number];
            l.passed = l.passed && c.passed;
            l.details.push_back(fmt::format("{}{}: {}", c.passed ? "" : "FAILED ", c.label, c.detail));
        }
    }
    by_number[4].label = "case 1: setpoint step";
    by_number[5].label = "case 2: measurement delay";
    by_number[6].label = "case 3: load disturbance";
    by_number[7].label = "case 4: line perturbation and restoration";
    by_number[8].label = "case 5: generator disconnection";
    by_number[9].label = "case 6: generator joins SVC";
    by_number[10].label = "determinism";
    by_number[11].label = "wall-clock per case";
    for (auto& [n, l] : by_number)
        lines.emplace_back(n, std::move(l));

    bool all = true;
    for (const auto& [n, l] : lines) {
        fmt::print("[{}] criterion {:>2}: {}\n", l.passed ? "PASS" : "FAIL", n, l.label);
        for (const auto& d : l.details)
            fmt::print("         {}\n", d);
        all = all && l.passed;
    }
    fmt::print("{}\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
    return all ? 0 : 1;
}
