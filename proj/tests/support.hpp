#pragma once

// Independent reference computations and random generators for the tests.

#include "svc/model.hpp"

#include <cmath>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

/// Gaussian elimination with partial pivoting on plain vectors.
inline std::vector<double> gauss_solve(Mat a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[p][k]))
                p = i;
        std::swap(a[k], a[p]);
        std::swap(b[k], b[p]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j)
                a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j)
            s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

inline Mat transpose(const Mat& a) {
    Mat t(a[0].size(), std::vector<double>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j)
            t[j][i] = a[i][j];
    return t;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

/// Least-squares slope of y against t = 0, h, 2h, ... from the normal equations.
inline double ls_slope(const std::vector<double>& y, double h) {
    const double n = static_cast<double>(y.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double t = h * static_cast<double>(k);
        st += t;
        sy += y[k];
        stt += t * t;
        sty += t * y[k];
    }
    return (n * sty - st * sy) / (n * stt - st * st);
}

/// c and q_ref of the alignment problem on the generators listed in `idx`.
inline std::pair<double, std::vector<double>> alignment(const std::vector<double>& c_v, const Mat& c_q,
                                                        const std::vector<double>& pf, double v_ref,
                                                        const std::vector<std::size_t>& connected,
                                                        const std::vector<bool>& active) {
    const std::size_t m = connected.size();
    Mat r(m, std::vector<double>(m));
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) {
        v[i] = c_v[connected[i]];
        for (std::size_t j = 0; j < m; ++j)
            r[i][j] = c_q[connected[i]][connected[j]];
    }
    const auto s = gauss_solve(transpose(r), v);
    double spf = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        if (active[connected[i]])
            spf += s[i] * pf[connected[i]];
    const double c = v_ref / spf;
    std::vector<double> q(c_v.size(), 0.0);
    for (std::size_t i = 0; i < c_v.size(); ++i)
        if (active[i])
            q[i] = c * pf[i];
    return {c, q};
}

} // namespace oracle

namespace gen {

struct RandomModel {
    std::vector<double> c_v;
    oracle::Mat c_q;

    svc::SensitivityModel build() const {
        const auto n = static_cast<Eigen::Index>(c_v.size());
        svc::Vector v(n);
        svc::Matrix q(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            v[i] = c_v[static_cast<std::size_t>(i)];
            for (Eigen::Index j = 0; j < n; ++j)
                q(i, j) = c_q[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        return svc::SensitivityModel(v, q);
    }
};

/// Diagonally dominant c_q with mixed-sign couplings and a positive c_v,
/// shaped like a sensitivity network.
inline RandomModel model(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> off(-1.0, 0.3);
    std::uniform_real_distribution<double> cv(0.05, 0.5);
    std::uniform_real_distribution<double> margin(0.5, 3.0);
    RandomModel m;
    m.c_v.resize(n);
    m.c_q.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        m.c_v[i] = cv(rng);
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j)
                continue;
            m.c_q[i][j] = off(rng);
            row += std::abs(m.c_q[i][j]);
        }
        m.c_q[i][i] = row + margin(rng);
    }
    return m;
}

inline std::vector<double> pf(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> d(0.2, 3.0);
    std::vector<double> out(n);
    for (auto& x : out)
        x = d(rng);
    return out;
}

} // namespace gen
