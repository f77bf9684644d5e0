#pragma once

// Test-only oracles, kept independent of the implementation paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "webtree/cadlag.hpp"
#include "webtree/metric_tree.hpp"

namespace webtree::oracle {

// Exact minimal eps-net cardinality over the sample points by set cover
// (feasible up to ~12 points).
inline std::size_t exact_min_net(const FiniteMetricTree& t, double eps) {
    const std::size_t n = t.size();
    if (n > 20) throw std::invalid_argument("exact_min_net: too many points");
    std::vector<std::uint32_t> cover(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (t.dist(i, j) <= eps) cover[i] |= (1u << j);
    const std::uint32_t full = n == 32 ? 0xffffffffu : ((1u << n) - 1);
    std::vector<std::uint8_t> best(full + 1, 255);
    best[0] = 0;
    for (std::uint32_t m = 0; m <= full; ++m) {
        if (best[m] == 255) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t nm = m | cover[i];
            if (best[nm] > best[m] + 1) best[nm] = best[m] + 1;
        }
    }
    return best[full];
}

// Staircase polyline of the completed graph on [-1, T], refined at the other
// function's breakpoint times and values.
inline std::vector<std::pair<double, double>> refined_graph(const MonotoneCadlag& f,
                                                            const MonotoneCadlag& g,
                                                            double T) {
    std::vector<std::pair<double, double>> v;
    v.emplace_back(-1.0, 0.0);
    const auto& bt = f.times();
    const auto& bv = f.values();
    for (std::size_t k = 0; k < bt.size() && bt[k] <= T; ++k) {
        const double prev = k == 0 ? 0.0 : bv[k - 1];
        // horizontal run at `prev` until bt[k]: refine at g's times
        for (double gt : g.times())
            if (gt < bt[k] && gt > v.back().first) v.emplace_back(gt, prev);
        v.emplace_back(bt[k], prev);
        // vertical run: refine at g's values
        std::vector<double> levels;
        for (double gv : g.values())
            if (gv > prev && gv < bv[k]) levels.push_back(gv);
        std::sort(levels.begin(), levels.end());
        for (double gv : levels) v.emplace_back(bt[k], gv);
        v.emplace_back(bt[k], bv[k]);
    }
    const double last_v = f.value(T);
    for (double gt : g.times())
        if (gt < T && gt > v.back().first) v.emplace_back(gt, last_v);
    v.emplace_back(T, last_v);
    return v;
}

inline double linf(std::pair<double, double> a, std::pair<double, double> b) {
    return std::max(std::fabs(a.first - b.first), std::fabs(a.second - b.second));
}

// Decision procedure of the continuous Frechet distance between polylines
// under the max metric (free-space reachability).
inline bool frechet_leq(const std::vector<std::pair<double, double>>& P,
                        const std::vector<std::pair<double, double>>& Q, double eps) {
    const std::size_t n = P.size(), m = Q.size();
    if (linf(P.front(), Q.front()) > eps || linf(P.back(), Q.back()) > eps) return false;
    // free interval of points on segment [a,b] within eps of point p (L-inf):
    // both coordinate constraints are interval conditions in the parameter
    const auto free_interval = [&](std::pair<double, double> a,
                                   std::pair<double, double> b,
                                   std::pair<double, double> p) -> std::pair<double, double> {
        double lo = 0.0, hi = 1.0;
        for (int c = 0; c < 2; ++c) {
            const double av = c ? a.second : a.first;
            const double bv = c ? b.second : b.first;
            const double pv = c ? p.second : p.first;
            const double d = bv - av;
            const double lo_v = pv - eps - av, hi_v = pv + eps - av;
            if (std::fabs(d) < 1e-300) {
                if (av < pv - eps || av > pv + eps) return {1.0, 0.0};
            } else if (d > 0) {
                lo = std::max(lo, lo_v / d);
                hi = std::min(hi, hi_v / d);
            } else {
                lo = std::max(lo, hi_v / d);
                hi = std::min(hi, lo_v / d);
            }
        }
        return {lo, hi};
    };
    const double inf = std::numeric_limits<double>::infinity();
    // L[i][j]: smallest reachable parameter on the left edge of cell (i,j)
    std::vector<std::vector<double>> L(n, std::vector<double>(m, inf));
    std::vector<std::vector<double>> B(n, std::vector<double>(m, inf));
    L[0][0] = 0.0;
    B[0][0] = 0.0;
    // boundary propagation: paths hugging t=0 or s=0
    for (std::size_t i = 0; i + 2 < n; ++i) {
        if (B[i][0] == inf) break;
        const auto bf = free_interval(P[i], P[i + 1], Q[0]);
        if (B[i][0] > bf.second || bf.second < 1.0 - 1e-12) break;
        B[i + 1][0] = 0.0;
    }
    for (std::size_t j = 0; j + 2 < m; ++j) {
        if (L[0][j] == inf) break;
        const auto lf = free_interval(Q[j], Q[j + 1], P[0]);
        if (L[0][j] > lf.second || lf.second < 1.0 - 1e-12) break;
        L[0][j + 1] = 0.0;
    }
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = 0; j + 1 < m; ++j) {
            // bottom edge of cell (i,j): P-segment i against Q vertex j
            // left edge: Q-segment j against P vertex i
            const auto bf = free_interval(P[i], P[i + 1], Q[j]);
            const auto lf = free_interval(Q[j], Q[j + 1], P[i]);
            const double b_reach =
                (B[i][j] <= bf.second && bf.first <= bf.second) ? std::max(B[i][j], bf.first)
                                                                : inf;
            const double l_reach =
                (L[i][j] <= lf.second && lf.first <= lf.second) ? std::max(L[i][j], lf.first)
                                                                : inf;
            const bool cell_open = b_reach < inf || l_reach < inf;
            if (!cell_open) continue;
            // top edge of the cell = bottom edge of (i, j+1)
            const auto tf = free_interval(P[i], P[i + 1], Q[j + 1]);
            if (tf.first <= tf.second) {
                double reach = inf;
                if (l_reach < inf) reach = tf.first;
                else if (b_reach < inf && b_reach <= tf.second)
                    reach = std::max(b_reach, tf.first);
                B[i][j + 1] = std::min(B[i][j + 1], reach);
            }
            const auto rf = free_interval(Q[j], Q[j + 1], P[i + 1]);
            if (rf.first <= rf.second) {
                double reach = inf;
                if (b_reach < inf) reach = rf.first;
                else if (l_reach < inf && l_reach <= rf.second)
                    reach = std::max(l_reach, rf.first);
                L[i + 1][j] = std::min(L[i + 1][j], reach);
            }
        }
    // the end corner was checked free up front, so it is reached iff either
    // the right edge of the last cell or its top edge carries reachability
    if (n >= 2 && m >= 2) return L[n - 1][m - 2] < inf || B[n - 2][m - 1] < inf;
    return true;
}

// Continuous Frechet distance by bisection: the parametric-representation
// infimum of the M1 metric on a bounded interval.
inline double frechet_bounded(const MonotoneCadlag& f, const MonotoneCadlag& g,
                              double T) {
    const auto P = refined_graph(f, g, T);
    const auto Q = refined_graph(g, f, T);
    double lo = 0.0;
    double hi = linf(P.front(), Q.front());
    for (const auto& p : P)
        for (const auto& q : Q) hi = std::max(hi, linf(p, q));
    if (frechet_leq(P, Q, lo + 1e-15)) return lo;
    for (int it = 0; it < 80 && hi - lo > 1e-11; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (frechet_leq(P, Q, mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

}  // namespace webtree::oracle
