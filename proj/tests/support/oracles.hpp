#pragma once

// Independent reference computations for the tests. Apart from drawing
// random datasets, nothing here calls the library: values come from direct
// long-double transcriptions of the defining formulas and brute-force search.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "ccsemi/simulation.hpp"
#include "ccsemi/types.hpp"

namespace oracle {

using ld = long double;

inline ld logistic(ld t) { return 1.0L / (1.0L + std::exp(-t)); }

/// Rows of the dataset as plain vectors (labeled first).
struct Rows {
    std::vector<std::vector<ld>> x;
    std::vector<int> y;  // first n entries
    std::size_t n1 = 0, n0 = 0, n = 0, total = 0, dim = 0;
};

inline Rows rows_of(const ccsemi::SemiSupervisedDataset& d) {
    Rows r;
    r.n1 = d.n1();
    r.n0 = d.n0();
    r.n = d.labeled_count();
    r.total = d.total_count();
    r.dim = d.dim();
    for (std::size_t i = 0; i < r.total; ++i) {
        std::vector<ld> row(r.dim);
        for (std::size_t k = 0; k < r.dim; ++k) row[k] = d.covariates()(i, k);
        r.x.push_back(row);
    }
    for (double v : d.labels()) r.y.push_back(static_cast<int>(v));
    return r;
}

inline std::vector<ld> phis(const Rows& r, const std::vector<ld>& theta) {
    std::vector<ld> out(r.total);
    for (std::size_t i = 0; i < r.total; ++i) {
        ld t = theta[0];
        for (std::size_t k = 0; k < r.dim; ++k) t += theta[k + 1] * r.x[i][k];
        out[i] = logistic(t);
    }
    return out;
}

/// sum_lab [y log phi + (1-y) log(1-phi)] - n1 log c - n0 log(1-c), with
/// 1 - c taken literally, or as sum (1 - phi) p when `homogeneous`.
inline ld objective(const Rows& r, const std::vector<ld>& theta, const std::vector<ld>& p,
                    bool homogeneous = false) {
    const auto ph = phis(r, theta);
    ld lab = 0.0L;
    for (std::size_t i = 0; i < r.n; ++i) lab += r.y[i] ? std::log(ph[i]) : std::log(1.0L - ph[i]);
    ld c = 0.0L, comp = 0.0L;
    for (std::size_t i = 0; i < r.total; ++i) {
        c += ph[i] * p[i];
        comp += (1.0L - ph[i]) * p[i];
    }
    const ld omc = homogeneous ? comp : 1.0L - c;
    return lab - static_cast<ld>(r.n1) * std::log(c) - static_cast<ld>(r.n0) * std::log(omc);
}

inline ld loglik(const Rows& r, const std::vector<ld>& theta, const std::vector<ld>& p,
                 bool homogeneous = false) {
    ld s = 0.0L;
    for (ld v : p) {
        if (!(v > 0.0L)) return -std::numeric_limits<ld>::infinity();
        s += std::log(v);
    }
    return objective(r, theta, p, homogeneous) + s;
}

inline std::vector<ld> to_ld(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }
inline std::vector<ld> to_ld(std::span<const double> v) { return {v.begin(), v.end()}; }

/// Richardson-extrapolated central difference of f along coordinate k.
inline ld partial(const std::function<ld(const std::vector<ld>&)>& f, std::vector<ld> z, std::size_t k,
                  ld h) {
    auto central = [&](ld step) {
        const ld z0 = z[k];
        z[k] = z0 + step;
        const ld up = f(z);
        z[k] = z0 - step;
        const ld down = f(z);
        z[k] = z0;
        return (up - down) / (2.0L * step);
    };
    return (4.0L * central(h / 2.0L) - central(h)) / 3.0L;
}

inline std::vector<ld> gradient(const std::function<ld(const std::vector<ld>&)>& f, const std::vector<ld>& z,
                                ld h = 1e-5L) {
    std::vector<ld> g(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) g[k] = partial(f, z, k, h);
    return g;
}

/// Hessian by central differences of the Richardson partials.
inline Eigen::MatrixXd hessian(const std::function<ld(const std::vector<ld>&)>& f, const std::vector<ld>& z,
                               ld h = 1e-4L) {
    const std::size_t d = z.size();
    Eigen::MatrixXd out(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        auto gj = [&](const std::vector<ld>& w) { return partial(f, w, j, h * 1e-1L); };
        for (std::size_t k = j; k < d; ++k) {
            const double v = static_cast<double>(partial(gj, z, k, h));
            out(j, k) = out(k, j) = v;
        }
    }
    return out;
}

/// Nested grid search for the maximum of f over the box [lo, hi]^d: a
/// 65-point grid per axis, then 17-point grids spanning +-4 cells around the
/// best point. A best point on the edge of a zoomed box re-centres it at the
/// same width (the maximum can sit on a long, flat ridge); otherwise the
/// width halves, until the cell width is below `tol`.
inline std::vector<ld> grid_maximize(const std::function<ld(const std::vector<ld>&)>& f, std::size_t d,
                                     ld lo, ld hi, ld tol = 1e-8L) {
    std::vector<ld> lower(d, lo), upper(d, hi), best(d, 0.5L * (lo + hi));
    ld best_val = -std::numeric_limits<ld>::infinity();
    int pts = 65;
    for (int round = 0; round < 400; ++round) {
        std::vector<ld> cell(d);
        for (std::size_t k = 0; k < d; ++k) cell[k] = (upper[k] - lower[k]) / (pts - 1);
        std::vector<int> idx(d, 0), best_idx(d, -1);
        std::vector<ld> z(d);
        while (true) {
            for (std::size_t k = 0; k < d; ++k) z[k] = lower[k] + cell[k] * idx[k];
            const ld v = f(z);
            if (v > best_val) {
                best_val = v;
                best = z;
                best_idx = idx;
            }
            std::size_t k = 0;
            while (k < d && ++idx[k] == pts) idx[k++] = 0;
            if (k == d) break;
        }
        bool on_edge = false;
        for (std::size_t k = 0; k < d; ++k) {
            const bool box_edge = best[k] <= lo || best[k] >= hi;
            on_edge |= !box_edge && (best_idx[k] == 0 || best_idx[k] == pts - 1);
        }
        const bool first = pts != 17;
        if (!on_edge && *std::max_element(cell.begin(), cell.end()) < tol) break;
        for (std::size_t k = 0; k < d; ++k) {
            const ld half = (first || !on_edge ? 4 : 8) * cell[k];
            lower[k] = std::max(lo, best[k] - half);
            upper[k] = std::min(hi, best[k] + half);
        }
        pts = 17;
    }
    return best;
}

/// Jump weights maximizing l(theta, .) on the simplex. Stationarity forces
/// p_i = 1 / (N - n + n1 phi_i / c + n0 (1 - phi_i) / (1 - c)) with c a root
/// of sum_i phi_i p_i(c) = c; all roots are located by scanning and
/// bisection and the best one is returned.
inline std::vector<ld> profile_p(const Rows& r, const std::vector<ld>& theta) {
    const auto ph = phis(r, theta);
    const ld m = static_cast<ld>(r.total - r.n);
    const ld n1 = static_cast<ld>(r.n1), n0 = static_cast<ld>(r.n0);
    auto weights = [&](ld c) {
        std::vector<ld> p(r.total);
        for (std::size_t i = 0; i < r.total; ++i) p[i] = 1.0L / (m + n1 * ph[i] / c + n0 * (1.0L - ph[i]) / (1.0L - c));
        return p;
    };
    auto h = [&](ld c) {
        const auto p = weights(c);
        ld s = 0.0L;
        for (std::size_t i = 0; i < r.total; ++i) s += ph[i] * p[i];
        return s - c;
    };
    std::vector<ld> best_p;
    ld best_val = -std::numeric_limits<ld>::infinity();
    constexpr int kScan = 400;
    auto at = [](int k) { return logistic(-40.0L + 80.0L * k / kScan); };
    ld prev_c = at(0), prev_h = h(prev_c);
    for (int k = 1; k <= kScan; ++k) {
        const ld c = at(k);
        if (!(c < 1.0L)) break;
        const ld hc = h(c);
        if ((prev_h > 0) != (hc > 0)) {
            ld a = prev_c, b = c, ha = prev_h;
            for (int it = 0; it < 100; ++it) {
                const ld mid = 0.5L * (a + b);
                const ld hm = h(mid);
                if ((hm > 0) == (ha > 0)) {
                    a = mid;
                    ha = hm;
                } else {
                    b = mid;
                }
            }
            auto p = weights(0.5L * (a + b));
            ld s = 0.0L;
            for (ld v : p) s += v;
            for (ld& v : p) v /= s;
            const ld val = loglik(r, theta, p);
            if (val > best_val) {
                best_val = val;
                best_p = p;
            }
        }
        prev_c = c;
        prev_h = hc;
    }
    return best_p;
}

inline ld profile_loglik(const Rows& r, const std::vector<ld>& theta) {
    const auto p = profile_p(r, theta);
    if (p.empty()) return -std::numeric_limits<ld>::infinity();
    return loglik(r, theta, p);
}

/// Case-control data from the model with standard normal covariates and
/// randomly drawn, clearly non-zero slopes.
struct Instance {
    ccsemi::SemiSupervisedDataset data;
    ccsemi::Theta truth;
};

inline Instance random_instance(std::uint64_t seed, std::size_t dim, std::size_t n1, std::size_t n0,
                                std::size_t total) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> alpha(-2.0, 0.5), mag(0.5, 2.0);
    std::bernoulli_distribution sign(0.5);
    ccsemi::SimulationScenario s;
    s.alpha = alpha(gen);
    for (std::size_t k = 0; k < dim; ++k) s.beta.push_back(sign(gen) ? mag(gen) : -mag(gen));
    s.n1 = n1;
    s.n0 = n0;
    s.total_count = total;
    s.seed = seed;
    ccsemi::Philox4x64 rng = ccsemi::Philox4x64::substream(seed, 0);
    auto g = ccsemi::generate_dataset(s, rng);
    return {std::move(g.data), s.theta()};
}

}  // namespace oracle
