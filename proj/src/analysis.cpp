#include "webtree/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace webtree {

namespace {

std::vector<double> geometric_grid(double lo, double hi, int per_decade) {
    if (!(lo > 0 && hi > lo)) throw std::invalid_argument("eps grid: need 0 < lo < hi");
    std::vector<double> g;
    const double step = std::pow(10.0, 1.0 / per_decade);
    for (double e = hi; e >= lo * 0.999999; e /= step) g.push_back(e);
    std::reverse(g.begin(), g.end());
    return g;
}

}  // namespace

BoxDimension box_dimension(const FiniteMetricTree& t, double r,
                           std::pair<double, double> eps_range,
                           std::pair<double, double> fit_window,
                           int points_per_decade) {
    return box_dimension_pooled({t}, r, eps_range, fit_window, points_per_decade);
}

BoxDimension box_dimension_pooled(const std::vector<FiniteMetricTree>& trees, double r,
                                  std::pair<double, double> eps_range,
                                  std::pair<double, double> fit_window,
                                  int points_per_decade) {
    const auto grid = geometric_grid(eps_range.first, eps_range.second, points_per_decade);
    const double in_lo = std::max(eps_range.first, fit_window.first);
    const double in_hi = std::min(eps_range.second, fit_window.second);
    if (!(in_hi / in_lo >= 9.999))
        throw std::invalid_argument("box_dimension: eps range must span a decade inside the fit window");

    BoxDimension out;
    out.eps = grid;
    std::vector<double> mean_log(grid.size(), 0.0);
    for (const FiniteMetricTree& t : trees) {
        const FiniteMetricTree ball = ball_subset(t, r);
        const GreedyNet seq = greedy_net_sequence(ball, grid.front());
        for (std::size_t k = 0; k < grid.size(); ++k)
            mean_log[k] += std::log(static_cast<double>(net_count_for(seq, grid[k])));
    }
    std::vector<double> xs, ys;
    out.counts.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        mean_log[k] /= static_cast<double>(trees.size());
        out.counts[k] = std::exp(mean_log[k]);
        if (grid[k] >= fit_window.first && grid[k] <= fit_window.second) {
            xs.push_back(std::log(1.0 / grid[k]));
            ys.push_back(mean_log[k]);
        }
    }
    const auto fit = stats::least_squares(xs, ys);
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.slope_stderr = fit.slope_stderr;
    return out;
}

EpsnetScaling epsnet_scaling_check(const std::vector<FiniteMetricTree>& trees, double r,
                                   const std::vector<double>& eps_grid, double theta) {
    if (theta <= 1.5) throw std::invalid_argument("epsnet_scaling_check: need theta > 3/2");
    if (eps_grid.empty()) throw std::invalid_argument("epsnet_scaling_check: empty eps grid");
    const double eps_min = *std::min_element(eps_grid.begin(), eps_grid.end());
    EpsnetScaling out;
    for (const FiniteMetricTree& t : trees) {
        const FiniteMetricTree ball = ball_subset(t, r);
        const GreedyNet seq = greedy_net_sequence(ball, eps_min);
        double k_hat = 0.0;
        for (double e : eps_grid)
            k_hat = std::max(k_hat, static_cast<double>(net_count_for(seq, e)) *
                                        std::pow(e, theta));
        out.per_tree_khat.push_back(k_hat);
        out.k_hat = std::max(out.k_hat, k_hat);
    }
    return out;
}

double Path::pos(double t) const {
    if (samples.empty()) return 0.0;
    if (forward ? t <= sigma : t >= sigma)
        return forward ? samples.front().second : samples.back().second;
    auto it = std::lower_bound(samples.begin(), samples.end(), t,
                               [](const auto& s, double v) { return s.first < v; });
    if (it == samples.end()) return samples.back().second;
    if (it == samples.begin()) return samples.front().second;
    const auto& [t1, x1] = *(it - 1);
    const auto& [t2, x2] = *it;
    if (t2 == t1) return x2;
    const double w = (t - t1) / (t2 - t1);
    if (mode == SpaceMode::circle) {
        double x = x1 + w * circle_delta(x2, x1);
        x -= std::floor(x);
        return x;
    }
    return x1 + w * (x2 - x1);
}

std::vector<Path> k_map(const FiniteSpatialTree& t, bool forward, double tol) {
    const FiniteMetricTree tr = t.tree().materialized();
    const auto& ev = t.eval();
    const std::size_t n = tr.size();
    std::vector<Path> out;
    std::set<std::vector<double>> seen;
    for (std::size_t i = 0; i < n; ++i) {
        Path p;
        p.sigma = ev[i].t;
        p.forward = forward;
        p.mode = t.mode();
        std::vector<std::pair<double, double>> pts{{ev[i].t, ev[i].x}};
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double dt = forward ? ev[j].t - ev[i].t : ev[i].t - ev[j].t;
            if (dt <= tol) continue;
            if (std::fabs(tr.dist(i, j) - dt) <= tol) pts.emplace_back(ev[j].t, ev[j].x);
        }
        std::sort(pts.begin(), pts.end());
        p.samples = std::move(pts);
        std::vector<double> key;
        key.reserve(p.samples.size() * 2 + 1);
        key.push_back(p.sigma);
        for (const auto& [a, b] : p.samples) {
            key.push_back(a);
            key.push_back(b);
        }
        if (seen.insert(std::move(key)).second) out.push_back(std::move(p));
    }
    return out;
}

double finr_distance(const Path& p, const Path& q) {
    if (p.forward != q.forward || p.mode != q.mode)
        throw std::invalid_argument("finr_distance: mode mismatch");
    double d = std::fabs(std::tanh(p.sigma) - std::tanh(q.sigma));
    std::vector<double> grid;
    for (const auto& [t, x] : p.samples) grid.push_back(t);
    for (const auto& [t, x] : q.samples) grid.push_back(t);
    const double hi = p.forward ? HUGE_VAL : std::min(p.sigma, q.sigma);
    const double lo = p.forward ? std::max(p.sigma, q.sigma) : -HUGE_VAL;
    grid.push_back(std::clamp(p.sigma, lo, hi));
    grid.push_back(std::clamp(q.sigma, lo, hi));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (double t : grid) {
        if (t < lo || t > hi) continue;
        double term;
        if (p.mode == SpaceMode::circle) {
            term = circle_dist(p.pos(t), q.pos(t)) / (1.0 + std::fabs(t));
        } else {
            term = std::fabs(std::tanh(p.pos(t)) - std::tanh(q.pos(t))) /
                   (1.0 + std::fabs(t));
        }
        d = std::max(d, term);
    }
    return d;
}

double hausdorff_paths(const std::vector<Path>& A, const std::vector<Path>& B) {
    if (A.empty() || B.empty())
        throw std::invalid_argument("hausdorff_paths: empty path set");
    double h = 0.0;
    const auto directed = [&](const std::vector<Path>& X, const std::vector<Path>& Y) {
        double dd = 0.0;
        for (const Path& x : X) {
            double best = HUGE_VAL;
            for (const Path& y : Y) best = std::min(best, finr_distance(x, y));
            dd = std::max(dd, best);
        }
        return dd;
    };
    h = std::max(directed(A, B), directed(B, A));
    return h;
}

namespace {

// position on the ray from sample i at time s, interpolated between the
// nearest collinear samples; nullopt when the ray is not realized that deep
std::optional<double> ray_pos(const FiniteMetricTree& tr,
                              const std::vector<SpacePoint>& ev, std::size_t i,
                              double s, SpaceMode mode, double tol) {
    if (s > ev[i].t + tol) return std::nullopt;
    if (std::fabs(s - ev[i].t) <= tol) return ev[i].x;
    std::size_t above = i;
    double t_above = ev[i].t;
    bool have_below = false;
    std::size_t below = 0;
    double t_below = 0;
    for (std::size_t j = 0; j < tr.size(); ++j) {
        if (j == i) continue;
        const double dt = ev[i].t - ev[j].t;
        if (dt <= tol) continue;
        if (std::fabs(tr.dist(i, j) - dt) > tol) continue;
        if (ev[j].t >= s) {
            if (ev[j].t < t_above) { above = j; t_above = ev[j].t; }
        } else if (!have_below || ev[j].t > t_below) {
            have_below = true;
            below = j;
            t_below = ev[j].t;
        }
    }
    if (!have_below) return std::nullopt;
    const double w = (t_above - s) / (t_above - t_below);
    if (mode == SpaceMode::circle) {
        double x = ev[above].x + w * circle_delta(ev[below].x, ev[above].x);
        x -= std::floor(x);
        return x;
    }
    return ev[above].x + w * (ev[below].x - ev[above].x);
}

}  // namespace

TreeConditionReport tree_condition_check(const FiniteSpatialTree& t, double eps_probe,
                                         double tol) {
    const FiniteMetricTree tr = t.tree().materialized();
    const auto& ev = t.eval();
    TreeConditionReport rep;
    for (std::size_t i = 0; i < tr.size(); ++i)
        for (std::size_t j = i + 1; j < tr.size(); ++j) {
            if (tr.dist(i, j) <= tol) continue;  // same point
            if (std::fabs(ev[i].t - ev[j].t) > tol) continue;
            if (space_dist(ev[i].x, ev[j].x, t.mode()) > tol) continue;
            // same evaluation: the rays must separate within eps_probe below
            bool separated = false;
            for (int k = 1; k <= 16 && !separated; ++k) {
                const double s = ev[i].t - eps_probe * k / 16.0;
                const auto xi = ray_pos(tr, ev, i, s, t.mode(), tol);
                const auto xj = ray_pos(tr, ev, j, s, t.mode(), tol);
                if (xi && xj && space_dist(*xi, *xj, t.mode()) > tol) separated = true;
            }
            if (!separated) {
                rep.ok = false;
                rep.i = i;
                rep.j = j;
                return rep;
            }
        }
    return rep;
}

namespace {

struct EventIndex {
    // events keyed by (site -> sorted times+dirs)
    std::map<std::int64_t, std::vector<std::pair<double, ArrowDir>>> by_site;

    void add(const ArrowEvent& e) { by_site[e.site].emplace_back(e.t, e.dir); }
    void finish() {
        for (auto& [s, v] : by_site) std::sort(v.begin(), v.end());
    }
    // event with exactly this time at the site (times are exact doubles)
    std::optional<ArrowDir> at(std::int64_t site, double t) const {
        auto it = by_site.find(site);
        if (it == by_site.end()) return std::nullopt;
        for (const auto& [tt, d] : it->second)
            if (tt == t) return d;
        return std::nullopt;
    }
    double next_above(std::int64_t site, double t, double fallback) const {
        auto it = by_site.find(site);
        double best = fallback;
        if (it == by_site.end()) return best;
        for (const auto& [tt, d] : it->second)
            if (tt > t) return std::min(best, tt);
        return best;
    }
    double next_below(std::int64_t site, double t, double fallback) const {
        auto it = by_site.find(site);
        double best = fallback;
        if (it == by_site.end()) return best;
        for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit)
            if (rit->first < t) return std::max(best, rit->first);
        return best;
    }
};

}  // namespace

SpecialPointsReport special_points(const ArrowField& f, double t0, double t1,
                                   std::int64_t site_lo, std::int64_t site_hi) {
    const LatticeConfig& cfg = f.config();
    if (t0 >= t1) throw std::invalid_argument("special_points: empty time window");
    SpecialPointsReport rep;

    EventIndex idx;
    for (std::int64_t s = site_lo - 2; s <= site_hi + 2; ++s) {
        SiteCursor c(&f, s, t1, true);
        while (auto e = c.next()) {
            if (e->first <= t0) break;
            idx.add({e->first, s, e->second});
        }
    }
    idx.finish();

    // germ counts at a lattice point of the backward web, from the events
    const auto m_in_backward = [&](double t, std::int64_t x_site) {
        int m = 0;
        if (!idx.at(x_site, t)) ++m;  // the vertical germ survives
        const auto l = idx.at(x_site - 1, t);
        if (l && *l == ArrowDir::R) ++m;
        const auto r = idx.at(x_site + 1, t);
        if (r && *r == ArrowDir::L) ++m;
        return m;
    };

    // traced backward in-degree: actual walkers through a clean strip
    const auto traced_m_in = [&](double t, std::int64_t x_site) -> std::optional<int> {
        double up = t1, dn = t0;
        for (std::int64_t s = x_site - 1; s <= x_site + 1; ++s) {
            up = std::min(up, idx.next_above(s, t, t1));
            dn = std::max(dn, idx.next_below(s, t, t0));
        }
        const double eps_up = 0.5 * (up - t), eps_dn = 0.5 * (t - dn);
        if (eps_up <= 0 || eps_dn <= 0) return std::nullopt;
        int count = 0;
        for (std::int64_t s = x_site - 1; s <= x_site + 1; ++s) {
            if (!f.site_in_window(s)) continue;
            const DiscretePath p =
                walk(f, {t + eps_up, cfg.site_x(s)}, false, t - eps_dn);
            if (std::llround(p.pos(t - eps_dn) / cfg.delta) == x_site) ++count;
        }
        return count;
    };

    // forward germ channels around z from the dual events alone:
    // 2 - (dual arrows crossing the column) + (dual arrows leaving the flanks)
    const auto forward_out = [&](double t, std::int64_t x_site) {
        int crossing = 0, departing = 0;
        // dual site k sits between primal k and k+1
        const auto dual_at = [&](std::int64_t k) -> std::optional<ArrowDir> {
            for (const ArrowEvent& e : dual_events_between(f, k, t - 1e-12, t + 1e-12))
                if (e.t == t) return e.dir;
            return std::nullopt;
        };
        const auto left = dual_at(x_site - 1);   // dual site at x - delta/2
        const auto right = dual_at(x_site);      // dual site at x + delta/2
        if (left && *left == ArrowDir::R) ++crossing;
        if (right && *right == ArrowDir::L) ++crossing;
        if (left && *left == ArrowDir::L) ++departing;
        if (right && *right == ArrowDir::R) ++departing;
        return 2 - crossing + departing;
    };

    // tally and identity over the event stencils plus a generic probe per event
    for (const auto& [site, evs] : idx.by_site) {
        if (site < site_lo || site > site_hi) continue;
        for (const auto& [t, dir] : evs) {
            const std::int64_t tip = site + (dir == ArrowDir::R ? 1 : -1);
            rep.backward_tally[TypeCount{m_in_backward(t, site), 1}]++;
            if (tip >= site_lo && tip <= site_hi)
                rep.backward_tally[TypeCount{m_in_backward(t, tip), 1}]++;
            for (std::int64_t probe : {site, tip}) {
                if (probe < site_lo || probe > site_hi) continue;
                const auto traced = traced_m_in(t, probe);
                if (!traced) continue;
                ++rep.identity_checked;
                if (forward_out(t, probe) - 1 != *traced) ++rep.identity_violations;
                // the event-free point just above the event, as a generic probe
                const double up = idx.next_above(probe, t, t1);
                if (up > t) {
                    const double tg = 0.5 * (t + up);
                    const auto g = traced_m_in(tg, probe);
                    if (g) {
                        ++rep.identity_checked;
                        if (forward_out(tg, probe) - 1 != *g) ++rep.identity_violations;
                        rep.backward_tally[TypeCount{m_in_backward(tg, probe), 1}]++;
                    }
                }
            }
        }
    }

    // forward tallies from the dual events (the mirrored structure)
    for (std::int64_t k = site_lo - 1; k <= site_hi; ++k) {
        for (const ArrowEvent& e : dual_events_between(f, k, t0, t1)) {
            const std::int64_t tip = k + (e.dir == ArrowDir::R ? 1 : -1);
            const auto m_in_fwd = [&](std::int64_t dk) {
                int m = 0;
                bool own = false;
                for (const ArrowEvent& o : dual_events_between(f, dk, e.t - 1e-12, e.t + 1e-12))
                    if (o.t == e.t) own = true;
                if (!own) ++m;
                for (const ArrowEvent& o :
                     dual_events_between(f, dk - 1, e.t - 1e-12, e.t + 1e-12))
                    if (o.t == e.t && o.dir == ArrowDir::R) ++m;
                for (const ArrowEvent& o :
                     dual_events_between(f, dk + 1, e.t - 1e-12, e.t + 1e-12))
                    if (o.t == e.t && o.dir == ArrowDir::L) ++m;
                return m;
            };
            rep.forward_tally[TypeCount{m_in_fwd(k), 1}]++;
            rep.forward_tally[TypeCount{m_in_fwd(tip), 1}]++;
        }
    }
    return rep;
}

namespace {

double psi_over_stays(const std::vector<std::tuple<double, double, double>>& stays,
                      double r, double R, double eps) {
    // stays: (t_from, t_to, x) with t_from < t_to
    double psi = 0.0;
    for (std::size_t i = 0; i < stays.size(); ++i) {
        const auto& [a1, b1, x1] = stays[i];
        // evaluation points (s, x1) must fall inside the box
        const double s_lo = std::max(a1, -r), s_hi = std::min(b1, r);
        if (s_lo > s_hi || std::fabs(x1) > R) continue;
        for (std::size_t j = 0; j < stays.size(); ++j) {
            const auto& [a2, b2, x2] = stays[j];
            // need t in [s - eps, s] for some admissible s
            if (b2 < s_lo - eps || a2 > s_hi) continue;
            psi = std::max(psi, std::fabs(x1 - x2));
        }
    }
    return psi;
}

}  // namespace

double modulus_psi(const DiscreteWebTree& w, double r, double R, double eps) {
    if (eps <= 0) throw std::invalid_argument("modulus_psi: eps must be positive");
    double psi = 0.0;
    for (std::size_t k = 0; k < w.walker_count(); ++k) {
        std::vector<std::tuple<double, double, double>> stays;
        double cur_t = w.starts[k].t;
        double cur_x = w.walker_pos(k, cur_t);
        std::int32_t c = w.walker_class[k];
        while (true) {
            const auto& p = w.class_path[static_cast<std::size_t>(c)];
            for (const auto& [jt, jx] : p.jumps) {
                if (w.forward ? jt < cur_t : jt > cur_t) continue;
                stays.emplace_back(std::min(cur_t, jt), std::max(cur_t, jt), cur_x);
                cur_t = jt;
                cur_x = jx;
            }
            if (w.forest.parent(c) < 0) break;
            c = w.forest.parent(c);
        }
        stays.emplace_back(std::min(cur_t, w.t_stop), std::max(cur_t, w.t_stop), cur_x);
        psi = std::max(psi, psi_over_stays(stays, r, R, eps));
    }
    return psi;
}

double modulus_psi(const CoalescingBMSystem& sys, double r, double R, double eps) {
    if (eps <= 0) throw std::invalid_argument("modulus_psi: eps must be positive");
    double psi = 0.0;
    const std::int64_t steps = sys.steps();
    for (std::size_t k = 0; k < sys.starts.size(); ++k) {
        for (std::int64_t i = 0; i <= steps; ++i) {
            const double s = sys.grid_time(i);
            if (s > sys.starts[k].t || std::fabs(s) > r) continue;
            const double xs = sys.path_pos(k, s);
            if (std::fabs(xs) > R) continue;
            for (std::int64_t j = i;; ++j) {
                const double t = sys.grid_time(j);
                if (t < s - eps || t < sys.t_min) break;
                psi = std::max(psi, std::fabs(xs - sys.path_pos(k, t)));
            }
        }
    }
    return psi;
}

}  // namespace webtree
