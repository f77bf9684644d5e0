#include "webtree/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "webtree/rng.hpp"

namespace webtree {

std::int64_t CoalescingBMSystem::steps() const {
    return static_cast<std::int64_t>(std::ceil((grid_top - t_min) / h - 1e-9));
}

std::int32_t CoalescingBMSystem::class_at(std::size_t k, double t) const {
    std::int32_t c = static_cast<std::int32_t>(k);
    while (forest.parent(c) >= 0 && t <= forest.merge_time(c)) c = forest.parent(c);
    return c;
}

double CoalescingBMSystem::path_pos(std::size_t k, double t) const {
    const auto c = static_cast<std::size_t>(class_at(k, t));
    const auto& s = samples[c];
    const double ts = starts[c].t;
    if (t >= ts || s.empty()) return starts[c].x;
    const std::int64_t i0 = first_idx[c];
    const double t0 = grid_time(i0);
    if (t >= t0) {
        const double span = ts - t0;
        if (span <= 0) return s[0];
        const double w = (ts - t) / span;
        return starts[c].x + w * (s[0] - starts[c].x);
    }
    const auto at = [&](std::int64_t i) {
        const std::int64_t off =
            std::clamp<std::int64_t>(i - i0, 0, static_cast<std::int64_t>(s.size()) - 1);
        return s[static_cast<std::size_t>(off)];
    };
    const auto lo = static_cast<std::int64_t>(std::floor((grid_top - t) / h));
    const double t_hi = grid_time(lo), t_lo = grid_time(lo + 1);
    const double w = std::clamp((t_hi - t) / (t_hi - t_lo), 0.0, 1.0);
    return at(lo) + w * (at(lo + 1) - at(lo));
}

std::optional<double> CoalescingBMSystem::tau(std::size_t k, std::size_t l) const {
    if (k == l) return starts[k].t;
    std::unordered_map<std::int32_t, double> chain1;
    double entry = MergeForest::kAlive;
    for (std::int32_t c = static_cast<std::int32_t>(k);;) {
        chain1.emplace(c, entry);
        if (forest.parent(c) < 0) break;
        entry = std::min(entry, forest.merge_time(c));
        c = forest.parent(c);
    }
    double entry2 = MergeForest::kAlive;
    for (std::int32_t c = static_cast<std::int32_t>(l);;) {
        auto it = chain1.find(c);
        if (it != chain1.end()) {
            const double u = std::min(it->second, entry2);
            return u == MergeForest::kAlive ? std::min(starts[k].t, starts[l].t) : u;
        }
        if (forest.parent(c) < 0) break;
        entry2 = std::min(entry2, forest.merge_time(c));
        c = forest.parent(c);
    }
    return std::nullopt;
}

DiscreteWebTree::Dist CoalescingBMSystem::ancestral_dist(std::size_t k, double t1,
                                                         std::size_t l, double t2) const {
    DiscreteWebTree::Dist out;
    double tu;
    const auto t = tau(k, l);
    if (t) {
        tu = *t;
    } else {
        tu = t_min;
        out.resolved = false;
    }
    const double m = std::min({tu, t1, t2});
    out.d = t1 + t2 - 2.0 * m;
    return out;
}

CoalescingBMSystem sample_coalescing_bm(const std::vector<SpacePoint>& starts,
                                        double t_min, double h, std::uint64_t seed,
                                        bool bridge_exact) {
    if (h <= 0) throw std::invalid_argument("sample_coalescing_bm: h must be positive");
    if (starts.empty()) throw std::invalid_argument("sample_coalescing_bm: no starts");
    for (const auto& z : starts)
        if (z.t <= t_min)
            throw std::invalid_argument("sample_coalescing_bm: t_min must lie below all starts");

    CoalescingBMSystem sys;
    sys.starts = starts;
    sys.t_min = t_min;
    sys.h = h;
    sys.grid_top = starts[0].t;
    for (const auto& z : starts) sys.grid_top = std::max(sys.grid_top, z.t);

    const std::size_t n = starts.size();
    std::vector<rng::Xoshiro256> eng;
    eng.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        eng.emplace_back(rng::mix(rng::mix(seed, 0x62726f776e69616eULL), k));
    rng::Xoshiro256 bridge_eng(rng::mix(seed, 0x6272696467650000ULL));

    sys.first_idx.resize(n);
    sys.samples.assign(n, {});
    sys.merge_pos.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        sys.forest.new_class();
        sys.first_idx[k] =
            static_cast<std::int64_t>(std::ceil((sys.grid_top - starts[k].t) / h - 1e-9));
    }

    const std::int64_t steps = sys.steps();
    std::vector<double> cur(n, 0.0), prev(n, 0.0);
    // 0 pending, 1 live, 2 merged this step, 3 finished
    std::vector<int> state(n, 0);

    for (std::int64_t i = 0; i <= steps; ++i) {
        const double t_i = sys.grid_time(i);
        for (std::size_t k = 0; k < n; ++k) {
            if (state[k] == 1 && i > sys.first_idx[k]) {
                prev[k] = cur[k];
                cur[k] += eng[k].gaussian() * std::sqrt(h);
            } else if (state[k] == 0 && i == sys.first_idx[k]) {
                const double dt = starts[k].t - t_i;
                prev[k] = starts[k].x;
                cur[k] = starts[k].x + (dt > 0 ? eng[k].gaussian() * std::sqrt(dt) : 0.0);
                state[k] = 1;
            }
        }
        // merge times within a step must stay non-increasing in processing
        // order so the forest chains keep decreasing times
        double tau_floor = MergeForest::kAlive;
        const auto do_merge = [&](std::size_t mover, std::size_t target, double tau) {
            tau = std::min(tau, tau_floor);
            tau_floor = tau;
            sys.forest.merge(static_cast<std::int32_t>(mover),
                             static_cast<std::int32_t>(target), tau);
            sys.merge_pos[mover] = cur[target];
            cur[mover] = cur[target];
            state[mover] = 2;
        };
        const auto top_of = [&](std::size_t k) {
            return i == sys.first_idx[k] ? starts[k].t : sys.grid_time(i - 1);
        };
        // sign crossings / meetings, resolved from the earliest crossing
        // (largest backward time) first
        while (true) {
            double best_tau = -HUGE_VAL;
            std::size_t bk = n, bl = n;
            for (std::size_t k = 0; k < n; ++k) {
                if (state[k] != 1) continue;
                for (std::size_t l = 0; l < k; ++l) {
                    if (state[l] != 1) continue;
                    const double a = prev[k] - prev[l];
                    const double b = cur[k] - cur[l];
                    const bool hit = a == 0.0 || b == 0.0 || (a > 0) != (b > 0);
                    if (!hit) continue;
                    const double denom = std::fabs(a) + std::fabs(b);
                    const double frac = denom > 0 ? std::fabs(a) / denom : 0.0;
                    const double t_top = std::min(top_of(k), top_of(l));
                    const double tau = t_top - frac * (t_top - t_i);
                    if (tau > best_tau) {
                        best_tau = tau;
                        bk = k;
                        bl = l;
                    }
                }
            }
            if (bk == n) break;
            // the later component adopts the earlier one
            if (bk < bl) std::swap(bk, bl);
            do_merge(bk, bl, best_tau);
        }
        if (bridge_exact) {
            for (std::size_t k = 0; k < n; ++k) {
                if (state[k] != 1 || i == sys.first_idx[k]) continue;
                for (std::size_t l = 0; l < k; ++l) {
                    if (state[l] != 1 || i == sys.first_idx[l]) continue;
                    const double a = std::fabs(prev[k] - prev[l]);
                    const double b = std::fabs(cur[k] - cur[l]);
                    const double p = std::exp(-a * b / h);
                    if (bridge_eng.uniform() >= p) continue;
                    const double frac = a + b > 0 ? a / (a + b) : 0.0;
                    do_merge(k, l, sys.grid_time(i - 1) - frac * h);
                    break;
                }
            }
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (state[k] == 1 || state[k] == 2) {
                sys.samples[k].push_back(cur[k]);
                if (state[k] == 2) state[k] = 3;
            }
        }
    }
    return sys;
}

FiniteSpatialTree skeleton_tree(const CoalescingBMSystem& sys,
                                std::vector<double> sample_times, double alpha) {
    const std::size_t n = sys.starts.size();
    std::size_t base_path = n;
    for (std::size_t k = 0; k < n; ++k)
        if (sys.starts[k].t == 0.0 && sys.starts[k].x == 0.0) base_path = k;
    if (base_path == n)
        throw std::invalid_argument("skeleton_tree: start (0,0) must be present");
    sample_times.push_back(0.0);
    std::sort(sample_times.begin(), sample_times.end());
    sample_times.erase(std::unique(sample_times.begin(), sample_times.end()),
                       sample_times.end());

    struct Pt {
        std::size_t path;
        double t;
    };
    std::vector<Pt> pts;
    std::map<std::pair<std::int32_t, double>, std::size_t> seen;
    std::size_t base_idx = 0;
    bool truncated = false;
    for (std::size_t k = 0; k < n; ++k)
        for (double s : sample_times) {
            if (s > sys.starts[k].t) continue;
            if (s < sys.t_min) {
                truncated = true;
                continue;
            }
            const std::int32_t c = sys.class_at(k, s);
            auto [it, fresh] = seen.emplace(std::make_pair(c, s), pts.size());
            if (fresh) pts.push_back({k, s});
            if (k == base_path && s == 0.0) base_idx = it->second;
        }

    const std::size_t m = pts.size();
    std::vector<double> mat(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            const auto d = sys.ancestral_dist(pts[i].path, pts[i].t, pts[j].path, pts[j].t);
            if (!d.resolved) truncated = true;
            mat[i * m + j] = d.d;
            mat[j * m + i] = d.d;
        }
    std::vector<SpacePoint> ev(m);
    for (std::size_t i = 0; i < m; ++i)
        ev[i] = {pts[i].t, sys.path_pos(pts[i].path, pts[i].t)};
    FiniteMetricTree tr = FiniteMetricTree::from_matrix(std::move(mat), m, base_idx);
    tr.set_truncated(truncated);
    return FiniteSpatialTree(std::move(tr), std::move(ev), SpaceMode::line, alpha, 1.0);
}

double pair_coalescence_cdf(double a, double t) {
    if (a < 0 || t <= 0) throw std::invalid_argument("pair_coalescence_cdf: bad inputs");
    const double phi = 0.5 * std::erfc(-(a / std::sqrt(2.0 * t)) / std::sqrt(2.0));
    return 2.0 * (1.0 - phi);
}

std::size_t eta_count(const CoalescingBMSystem& sys, double t0, double t1,
                      double x_lo, double x_hi) {
    if (t1 >= t0) throw std::invalid_argument("eta_count: need t1 < t0");
    if (t1 < sys.t_min) throw std::invalid_argument("eta_count: t1 beyond realized depth");
    std::vector<std::int32_t> classes;
    for (std::size_t k = 0; k < sys.starts.size(); ++k) {
        if (sys.starts[k].t <= t0) continue;
        const double x = sys.path_pos(k, t1);
        if (x < x_lo || x > x_hi) continue;
        classes.push_back(sys.class_at(k, t1));
    }
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return classes.size();
}

std::size_t eta_count(const DiscreteWebTree& w, double t0, double t1, double x_lo,
                      double x_hi) {
    if (t1 >= t0) throw std::invalid_argument("eta_count: need t1 < t0");
    if (t1 < w.t_stop && !w.forward)
        throw std::invalid_argument("eta_count: t1 beyond realized depth");
    std::vector<std::int32_t> classes;
    for (std::size_t k = 0; k < w.walker_count(); ++k) {
        if (w.starts[k].t <= t0) continue;
        const double x = w.walker_pos(k, t1);
        if (x < x_lo || x > x_hi) continue;
        classes.push_back(w.class_at(k, t1));
    }
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    return classes.size();
}

}  // namespace webtree
