#include "svc/metrics.hpp"

#include "svc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace svc {

namespace {

void check_series(const std::vector<double>& t, const std::vector<double>& y) {
    if (t.empty())
        throw EmptySeries();
    if (t.size() != y.size())
        throw DimensionMismatch("settling_time: t and y differ in length");
}

// Earliest index from which every |err| <= tol; size() if none.
std::size_t settled_from(const std::vector<double>& err, double tol, std::size_t begin, std::size_t end) {
    std::size_t first = end;
    for (std::size_t i = end; i-- > begin;) {
        if (!(std::abs(err[i]) <= tol))
            break;
        first = i;
    }
    return first;
}

std::string gen_col(const char* base, std::size_t i) { return std::string(base) + "_" + std::to_string(i + 1); }

} // namespace

std::optional<double> settling_time(const std::vector<double>& t, const std::vector<double>& y,
                                    double ref, double band) {
    if (!std::isfinite(band) || !(band > 0.0))
        throw InvalidArgument("settling_time: band must be > 0");
    return settling_time_abs(t, y, ref, band * std::abs(ref));
}

std::optional<double> settling_time_abs(const std::vector<double>& t, const std::vector<double>& y,
                                        double ref, double tol) {
    check_series(t, y);
    std::vector<double> err(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        err[i] = y[i] - ref;
    const std::size_t k = settled_from(err, tol, 0, err.size());
    if (k == err.size())
        return std::nullopt;
    return t[k];
}

double alignment_spread(const Vector& q, const ParticipationFactors& pf, const ActiveMask& mask) {
    if (static_cast<std::size_t>(q.size()) != pf.size() || mask.size() != pf.size())
        throw DimensionMismatch("alignment_spread: dimension mismatch");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < pf.size(); ++i) {
        if (!mask.svc_active[i])
            continue;
        const double r = q[static_cast<Eigen::Index>(i)] / pf[i];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    if (lo > hi)
        throw NoActiveGenerator();
    return hi - lo;
}

const std::vector<double>& Series::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end())
        throw InvalidArgument("unknown column " + name);
    return data[static_cast<std::size_t>(it - columns.begin())];
}

std::size_t Series::generators() const {
    if (columns.size() < RunResult::fixed_columns)
        return 0;
    return (columns.size() - RunResult::fixed_columns) / RunResult::per_generator_columns;
}

Series to_series(const RunResult& result) {
    Series s;
    s.columns = result.columns();
    s.data.reserve(s.columns.size());
    for (const auto& c : s.columns)
        s.data.push_back(result.column(c));
    return s;
}

RunMetrics compute_metrics(const Series& series, const ParticipationFactors& pf,
                           const std::vector<Event>& events) {
    const std::size_t rows = series.rows();
    if (rows == 0)
        throw EmptySeries();
    const std::size_t n = series.generators();
    if (n != pf.size())
        throw DimensionMismatch("compute_metrics: participation factors do not match the series");

    const auto& t = series.column("t");
    const auto& ref = series.column("v_pp_ref");
    const auto& v = series.column("v_pp");
    std::vector<double> err(rows);
    for (std::size_t r = 0; r < rows; ++r)
        err[r] = v[r] - ref[r];

    RunMetrics m;
    std::size_t step = 0;
    for (std::size_t r = 1; r < rows; ++r)
        if (ref[r] != ref[r - 1])
            step = r;
    const double final_ref = ref.back();
    const std::size_t k = settled_from(err, m.settling_band * std::abs(final_ref), step, rows);
    if (k < rows)
        m.settling_time = t[k] - t[step];
    for (std::size_t r = step; r < rows; ++r)
        m.max_overshoot = std::max(m.max_overshoot, err[r]);

    m.final_v_pp = v.back();
    m.final_v_pp_ref = final_ref;
    m.final_error = std::abs(err.back());

    Vector q(static_cast<Eigen::Index>(n));
    ActiveMask mask{std::vector<bool>(n), std::vector<bool>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        q[static_cast<Eigen::Index>(i)] = series.column(gen_col("q", i)).back();
        mask.connected[i] = series.column(gen_col("connected", i)).back() != 0.0;
        mask.svc_active[i] = series.column(gen_col("svc_active", i)).back() != 0.0;
    }
    m.final_spread = mask.active_count() > 0 ? alignment_spread(q, pf, mask) : 0.0;

    for (std::size_t e = 0; e < events.size(); ++e) {
        EventMetrics em;
        em.at = events[e].at;
        em.kind = event_tag(events[e].kind);
        const double until = e + 1 < events.size() ? events[e + 1].at : std::numeric_limits<double>::infinity();
        const auto lo = static_cast<std::size_t>(
            std::lower_bound(t.begin(), t.end(), em.at - 1e-9) - t.begin());
        const auto hi = static_cast<std::size_t>(
            std::lower_bound(t.begin(), t.end(), until - 1e-9) - t.begin());
        if (lo < hi) {
            for (std::size_t r = lo; r < hi; ++r)
                em.max_deviation = std::max(em.max_deviation, std::abs(err[r]));
            const std::size_t rk = settled_from(err, m.recovery_band, lo, hi);
            // A window cut short by the next event only counts if it settled
            // before that event.
            if (rk < hi)
                em.recovery_time = t[rk] - em.at;
        }
        m.events.push_back(std::move(em));
    }
    return m;
}

} // namespace svc
