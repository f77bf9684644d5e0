#include "webtree/walks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace webtree {

namespace {

std::int64_t primal_site_of(const LatticeConfig& cfg, double x) {
    const double s = x / cfg.delta;
    const std::int64_t site = static_cast<std::int64_t>(std::llround(s));
    if (std::fabs(s - static_cast<double>(site)) > 1e-6)
        throw std::invalid_argument("walk: start not on the lattice");
    return site;
}

std::int64_t dual_site_of(const LatticeConfig& cfg, double x) {
    const double s = x / cfg.delta - 0.5;
    const std::int64_t site = static_cast<std::int64_t>(std::llround(s));
    if (std::fabs(s - static_cast<double>(site)) > 1e-6)
        throw std::invalid_argument("walk: start not on the dual lattice");
    return site;
}

double primal_x(const LatticeConfig& cfg, std::int64_t s) { return s * cfg.delta; }
double dual_x(const LatticeConfig& cfg, std::int64_t s) {
    return (static_cast<double>(s) + 0.5) * cfg.delta;
}

// In circle mode positions are reported in [0,1).
double wrap_pos(const LatticeConfig& cfg, double x) {
    if (cfg.mode != SpaceMode::circle) return x;
    x -= std::floor(x);
    return x;
}

}  // namespace

double DiscretePath::pos(double t) const {
    double cur = x0;
    if (!forward) {
        for (const auto& [s, x] : jumps) {
            if (t <= s) cur = x;
            else break;
        }
    } else {
        for (const auto& [s, x] : jumps) {
            if (t >= s) cur = x;
            else break;
        }
    }
    return cur;
}

DiscretePath walk(const ArrowField& f, SpacePoint z, bool forward, double t_stop) {
    const LatticeConfig& cfg = f.config();
    DiscretePath p;
    p.forward = forward;
    p.t0 = z.t;
    std::int64_t site = forward ? dual_site_of(cfg, z.x) : primal_site_of(cfg, z.x);
    p.x0 = wrap_pos(cfg, forward ? dual_x(cfg, site) : primal_x(cfg, site));
    p.t_end = t_stop;
    double t = z.t;

    while (true) {
        std::optional<std::pair<double, ArrowDir>> ev;
        if (forward) {
            DualCursor c(&f, site, t, true);
            ev = c.next();
            if (ev && ev->first > t_stop) ev = std::nullopt;
        } else {
            SiteCursor c(&f, site, t, true);
            ev = c.next();
            if (ev && ev->first < t_stop) ev = std::nullopt;
        }
        if (!ev) break;
        t = ev->first;
        site += (ev->second == ArrowDir::R) ? 1 : -1;
        if (cfg.mode == SpaceMode::circle) {
            site = f.wrap_site(site);
        } else {
            const bool out = forward ? (site < cfg.site_lo() || site + 1 > cfg.site_hi())
                                     : !f.site_in_window(site);
            if (out) {
                p.truncated = true;
                p.t_end = t;
                p.jumps.emplace_back(t, wrap_pos(cfg, forward ? dual_x(cfg, site)
                                                              : primal_x(cfg, site)));
                return p;
            }
        }
        p.jumps.emplace_back(t, wrap_pos(cfg, forward ? dual_x(cfg, site)
                                                      : primal_x(cfg, site)));
    }
    return p;
}

std::int32_t DiscreteWebTree::class_at(std::size_t w, double t) const {
    const double u = sweep_u(t);
    std::int32_t c = walker_class[w];
    while (forest.parent(c) >= 0 && u <= forest.merge_time(c)) c = forest.parent(c);
    return c;
}

double DiscreteWebTree::walker_pos(std::size_t w, double t) const {
    if (!paths_stored) throw std::logic_error("web tree was built without paths");
    return class_path[static_cast<std::size_t>(class_at(w, t))].pos(t);
}

std::optional<double> DiscreteWebTree::tau(std::size_t w1, std::size_t w2) const {
    std::int32_t c1 = walker_class[w1];
    std::int32_t c2 = walker_class[w2];
    if (c1 == c2) {
        const double t = forward ? std::max(starts[w1].t, starts[w2].t)
                                 : std::min(starts[w1].t, starts[w2].t);
        return t;
    }
    std::unordered_map<std::int32_t, double> chain1;
    double entry = MergeForest::kAlive;
    for (std::int32_t c = c1;;) {
        chain1.emplace(c, entry);
        if (forest.parent(c) < 0) break;
        entry = std::min(entry, forest.merge_time(c));
        c = forest.parent(c);
    }
    double entry2 = MergeForest::kAlive;
    for (std::int32_t c = c2;;) {
        auto it = chain1.find(c);
        if (it != chain1.end()) {
            const double u = std::min(it->second, entry2);
            return forward ? -u : u;
        }
        if (forest.parent(c) < 0) break;
        entry2 = std::min(entry2, forest.merge_time(c));
        c = forest.parent(c);
    }
    return std::nullopt;
}

DiscreteWebTree::Dist DiscreteWebTree::ancestral_dist(std::size_t w1, double t1,
                                                      std::size_t w2, double t2) const {
    const double u1 = sweep_u(t1), u2 = sweep_u(t2);
    double tau_u;
    Dist out;
    if (walker_class[w1] == walker_class[w2]) {
        tau_u = MergeForest::kAlive;
    } else {
        const auto t = tau(w1, w2);
        if (t) {
            tau_u = sweep_u(*t);
        } else {
            tau_u = sweep_u(t_stop);
            out.resolved = false;
        }
    }
    const double m = std::min({tau_u, u1, u2});
    out.d = u1 + u2 - 2.0 * m;
    return out;
}

std::size_t DiscreteWebTree::alive_classes() const {
    std::size_t n = 0;
    for (std::size_t c = 0; c < forest.size(); ++c)
        if (forest.alive(static_cast<std::int32_t>(c))) ++n;
    return n;
}

DiscreteWebTree build_web_tree(const ArrowField& f, const std::vector<SpacePoint>& starts,
                               bool forward, const BuildOptions& opt) {
    const LatticeConfig& cfg = f.config();
    DiscreteWebTree w;
    w.cfg = cfg;
    w.forward = forward;
    w.starts = starts;
    w.t_stop = opt.t_stop;
    w.paths_stored = opt.store_paths;
    w.walker_class.assign(starts.size(), -1);

    struct Occ {
        std::int32_t cls = -1;
        std::uint32_t serial = 0;
    };
    std::unordered_map<std::int64_t, Occ> occ;

    struct HeapEv {
        double u;  // sweep-ordered time
        double t;
        std::int64_t site;
        std::uint32_t serial;
        ArrowDir dir;
        bool operator<(const HeapEv& o) const {
            if (u != o.u) return u < o.u;  // max-heap: largest u first
            return site < o.site;
        }
    };
    std::priority_queue<HeapEv> heap;

    const auto sweep_u = [&](double t) { return forward ? -t : t; };
    const double u_stop = sweep_u(opt.t_stop);

    const auto next_event = [&](std::int64_t site, double from)
        -> std::optional<std::pair<double, ArrowDir>> {
        if (forward) {
            DualCursor c(&f, site, from, true);
            auto e = c.next();
            if (e && e->first > opt.t_stop) return std::nullopt;
            return e;
        }
        SiteCursor c(&f, site, from, true);
        auto e = c.next();
        if (e && e->first < opt.t_stop) return std::nullopt;
        return e;
    };

    const auto pos_of = [&](std::int64_t site) {
        return wrap_pos(cfg, forward ? dual_x(cfg, site) : primal_x(cfg, site));
    };

    // walkers sorted by activation order (decreasing sweep u)
    std::vector<std::size_t> order(starts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (starts[a].t != starts[b].t)
            return sweep_u(starts[a].t) > sweep_u(starts[b].t);
        return starts[a].x < starts[b].x;
    });

    std::size_t next_act = 0;
    std::size_t alive = 0;
    bool single_reached = false;

    const auto activate = [&](std::size_t wi) {
        const SpacePoint& z = starts[wi];
        std::int64_t site = forward ? dual_site_of(cfg, z.x) : primal_site_of(cfg, z.x);
        if (cfg.mode == SpaceMode::circle) site = f.wrap_site(site);
        auto it = occ.find(site);
        if (it != occ.end()) {
            w.walker_class[wi] = it->second.cls;
            return;
        }
        const std::int32_t cls = w.forest.new_class();
        w.walker_class[wi] = cls;
        w.class_birth.push_back(sweep_u(z.t));
        if (opt.store_paths) {
            DiscretePath p;
            p.forward = forward;
            p.t0 = z.t;
            p.x0 = pos_of(site);
            p.t_end = opt.t_stop;
            w.class_path.push_back(std::move(p));
        }
        Occ o;
        o.cls = cls;
        o.serial = 1;
        occ[site] = o;
        ++alive;
        if (auto e = next_event(site, z.t))
            heap.push({sweep_u(e->first), e->first, site, o.serial, e->second});
    };

    while (true) {
        const bool have_act = next_act < order.size();
        const double act_u = have_act ? sweep_u(starts[order[next_act]].t) : -HUGE_VAL;
        const bool have_ev = !heap.empty();
        const double ev_u = have_ev ? heap.top().u : -HUGE_VAL;
        if (!have_act && !have_ev) break;
        if (single_reached && !have_act) break;

        if (have_ev && ev_u >= act_u) {
            const HeapEv ev = heap.top();
            heap.pop();
            if (ev.u < u_stop) break;
            auto it = occ.find(ev.site);
            if (it == occ.end() || it->second.serial != ev.serial) continue;  // stale
            const std::int32_t cls = it->second.cls;
            std::int64_t target = ev.site + (ev.dir == ArrowDir::R ? 1 : -1);
            if (cfg.mode == SpaceMode::circle) {
                target = f.wrap_site(target);
            } else {
                const bool out = forward ? (target < cfg.site_lo() || target + 1 > cfg.site_hi())
                                         : !f.site_in_window(target);
                if (out) {
                    if (opt.store_paths) {
                        auto& p = w.class_path[static_cast<std::size_t>(cls)];
                        p.jumps.emplace_back(ev.t, pos_of(target));
                        p.truncated = true;
                        p.t_end = ev.t;
                    }
                    w.any_truncated = true;
                    occ.erase(it);
                    --alive;
                    continue;
                }
            }
            if (opt.store_paths)
                w.class_path[static_cast<std::size_t>(cls)].jumps.emplace_back(ev.t, pos_of(target));
            auto jt = occ.find(target);
            if (jt != occ.end()) {
                w.forest.merge(cls, jt->second.cls, sweep_u(ev.t));
                if (opt.store_paths)
                    w.class_path[static_cast<std::size_t>(cls)].t_end = ev.t;
                occ.erase(it);
                --alive;
                if (opt.stop_when_single && alive == 1 && next_act >= order.size()) {
                    single_reached = true;
                    break;
                }
            } else {
                occ.erase(it);
                Occ& o = occ[target];  // may rehash; `it` is already gone
                o.cls = cls;
                ++o.serial;
                if (auto e = next_event(target, ev.t))
                    heap.push({sweep_u(e->first), e->first, target, o.serial, e->second});
            }
        } else if (have_act) {
            activate(order[next_act]);
            ++next_act;
        }
    }
    return w;
}

InterpolatedPoint interpolated_eval(const ArrowField& f, double t, std::int64_t site,
                                    bool forward) {
    const LatticeConfig& cfg = f.config();
    const double x = forward ? dual_x(cfg, site) : primal_x(cfg, site);
    InterpolatedPoint out;
    out.value = {t, wrap_pos(cfg, x)};

    // scans of the own-site stream and the two streams whose arrows point
    // into this site (tips)
    const auto first_matching = [&](std::int64_t s, bool ascending,
                                    std::optional<ArrowDir> filter)
        -> std::optional<std::pair<double, ArrowDir>> {
        if (cfg.mode == SpaceMode::circle) s = f.wrap_site(s);
        else if (forward ? (s < cfg.site_lo() || s + 1 > cfg.site_hi())
                         : !f.site_in_window(s))
            return std::nullopt;
        if (forward) {
            DualCursor c(&f, s, t, ascending);
            while (auto e = c.next()) {
                if (!filter || e->second == *filter) return e;
            }
            return std::nullopt;
        }
        SiteCursor c(&f, s, t, !ascending);
        while (auto e = c.next()) {
            if (!filter || e->second == *filter) return e;
        }
        return std::nullopt;
    };

    // travel side: strictly beyond t in the walk direction; an own event tilts
    // the segment toward the arrow target, a tip into this site does not.
    const bool travel_asc = forward;  // forward walks up, backward walks down
    struct Cand {
        double t = 0.0;
        int c = 0;
        bool valid = false;
    };
    Cand travel;
    const auto consider = [&](std::optional<std::pair<double, ArrowDir>> e, bool own) {
        if (!e) return;
        if (!travel.valid || (travel_asc ? e->first < travel.t : e->first > travel.t))
            travel = {e->first, own ? (e->second == ArrowDir::R ? 1 : -1) : 0, true};
    };
    consider(first_matching(site, travel_asc, std::nullopt), true);
    consider(first_matching(site - 1, travel_asc, ArrowDir::R), false);
    consider(first_matching(site + 1, travel_asc, ArrowDir::L), false);
    if (!travel.valid) {
        out.truncated = true;
        return out;
    }

    // anchor side: at-or-against the walk direction; window edge as fallback
    double anchor_t = forward ? cfg.t_lo : cfg.t_hi;
    const auto consider_anchor = [&](std::optional<std::pair<double, ArrowDir>> e) {
        if (!e) return;
        if (forward ? e->first > anchor_t : e->first < anchor_t) anchor_t = e->first;
    };
    consider_anchor(first_matching(site, !travel_asc, std::nullopt));
    consider_anchor(first_matching(site - 1, !travel_asc, ArrowDir::R));
    consider_anchor(first_matching(site + 1, !travel_asc, ArrowDir::L));

    const double span = anchor_t - travel.t;
    const double frac = span != 0.0 ? (anchor_t - t) / span : 0.0;
    out.value.x = wrap_pos(cfg, x + travel.c * cfg.delta * frac);
    return out;
}

InterpolationCheck check_interpolation(const ArrowField& f,
                                       const std::vector<std::pair<double, std::int64_t>>& queries,
                                       bool forward) {
    InterpolationCheck chk;
    chk.bound = f.config().delta;
    for (const auto& [t, site] : queries) {
        const InterpolatedPoint p = interpolated_eval(f, t, site, forward);
        if (p.truncated) {
            ++chk.truncated;
            continue;
        }
        const double x = forward ? dual_x(f.config(), site) : primal_x(f.config(), site);
        const double dev = space_dist(p.value.x, wrap_pos(f.config(), x), f.config().mode);
        chk.max_dev = std::max(chk.max_dev, dev);
    }
    chk.ok = chk.max_dev <= chk.bound + 1e-12;
    return chk;
}

namespace {

// kink times of the interpolated trajectory of one walker inside [lo, hi]:
// its own jumps plus the tip events entering the sites it sits on.
std::vector<double> path_kinks(const ArrowField& f, const DiscreteWebTree& w,
                               std::size_t walker, double lo, double hi) {
    const LatticeConfig& cfg = f.config();
    std::vector<double> ks{lo, hi};
    const bool fwd = w.forward;
    // stays: collect (t_from, t_to, site)
    double seg_start = w.starts[walker].t;
    double prev_x = w.walker_pos(walker, seg_start);
    std::vector<std::tuple<double, double, double>> stays;  // (a, b, x) a<b in real time
    double cursor_t = seg_start;
    // walk along merged class chain jump times
    std::int32_t c = w.walker_class[walker];
    while (true) {
        const auto& path = w.class_path[static_cast<std::size_t>(c)];
        for (const auto& [jt, jx] : path.jumps) {
            if (fwd ? jt < cursor_t : jt > cursor_t) continue;
            stays.emplace_back(std::min(cursor_t, jt), std::max(cursor_t, jt), prev_x);
            cursor_t = jt;
            prev_x = jx;
        }
        if (w.forest.parent(c) < 0) break;
        c = w.forest.parent(c);
    }
    stays.emplace_back(std::min(cursor_t, w.t_stop), std::max(cursor_t, w.t_stop), prev_x);

    for (const auto& [a, b, x] : stays) {
        const double wlo = std::max(a, lo), whi = std::min(b, hi);
        if (wlo >= whi) continue;
        ks.push_back(wlo);
        ks.push_back(whi);
        const std::int64_t site = fwd ? dual_site_of(cfg, x) : primal_site_of(cfg, x);
        // tips into `site` within (wlo, whi)
        const auto scan_tips = [&](std::int64_t s, ArrowDir want) {
            if (cfg.mode == SpaceMode::circle) s = f.wrap_site(s);
            else if (fwd ? (s < cfg.site_lo() || s + 1 > cfg.site_hi()) : !f.site_in_window(s))
                return;
            if (fwd) {
                DualCursor cur(&f, s, wlo, true);
                while (auto e = cur.next()) {
                    if (e->first >= whi) break;
                    if (e->second == want) ks.push_back(e->first);
                }
            } else {
                SiteCursor cur(&f, s, whi, true);
                while (auto e = cur.next()) {
                    if (e->first <= wlo) break;
                    if (e->second == want) ks.push_back(e->first);
                }
            }
        };
        scan_tips(site - 1, ArrowDir::R);
        scan_tips(site + 1, ArrowDir::L);
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
}

}  // namespace

NonCrossReport check_noncrossing(const ArrowField& f, const DiscreteWebTree& bwd,
                                 const DiscreteWebTree& fwd) {
    if (bwd.forward || !fwd.forward)
        throw std::invalid_argument("check_noncrossing: need a backward and a forward tree");
    NonCrossReport rep;
    const LatticeConfig& cfg = f.config();
    const double delta = cfg.delta;
    for (std::size_t wb = 0; wb < bwd.walker_count(); ++wb) {
        for (std::size_t wf = 0; wf < fwd.walker_count(); ++wf) {
            double lo = fwd.starts[wf].t;
            double hi = bwd.starts[wb].t;
            lo = std::max(lo, bwd.t_stop);
            hi = std::min(hi, fwd.t_stop);
            if (lo >= hi) continue;
            std::vector<double> ks = path_kinks(f, bwd, wb, lo, hi);
            const std::vector<double> k2 = path_kinks(f, fwd, wf, lo, hi);
            ks.insert(ks.end(), k2.begin(), k2.end());
            std::sort(ks.begin(), ks.end());
            ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
            double gmin = HUGE_VAL, gmax = -HUGE_VAL;
            double t_min = lo, t_max = lo;
            for (double s : ks) {
                if (s < lo || s > hi) continue;
                const double xb = bwd.walker_pos(wb, s);
                const double xf = fwd.walker_pos(wf, s);
                const double mb =
                    interpolated_eval(f, s, primal_site_of(cfg, xb), false).value.x;
                const double mf =
                    interpolated_eval(f, s, dual_site_of(cfg, xf), true).value.x;
                const double g = cfg.mode == SpaceMode::circle ? circle_delta(mf, mb)
                                                               : mf - mb;
                if (g < gmin) { gmin = g; t_min = s; }
                if (g > gmax) { gmax = g; t_max = s; }
            }
            const bool ok = gmin >= -delta - 1e-12 || gmax <= delta + 1e-12;
            if (!ok) {
                rep.ok = false;
                rep.bwd_walker = wb;
                rep.fwd_walker = wf;
                rep.at_low = t_min;
                rep.at_high = t_max;
                return rep;
            }
        }
    }
    return rep;
}

FiniteSpatialTree to_spatial_tree(const ArrowField& f, const DiscreteWebTree& w,
                                  std::vector<double> sample_times, double alpha) {
    if (!w.paths_stored)
        throw std::invalid_argument("to_spatial_tree: web tree built without paths");
    const LatticeConfig& cfg = f.config();
    const bool fwd = w.forward;

    // base walker: (0, 0) backward, (0, delta/2) forward
    const double bx = fwd ? 0.5 * cfg.delta : 0.0;
    std::size_t base_walker = w.walker_count();
    for (std::size_t i = 0; i < w.walker_count(); ++i) {
        if (std::fabs(w.starts[i].t) <= 1e-12 &&
            std::fabs(w.starts[i].x - bx) <= cfg.delta * 1e-6) {
            base_walker = i;
            break;
        }
    }
    if (base_walker == w.walker_count())
        throw std::invalid_argument("to_spatial_tree: base walker (t=0) not tracked");

    sample_times.push_back(0.0);
    std::sort(sample_times.begin(), sample_times.end());
    sample_times.erase(std::unique(sample_times.begin(), sample_times.end()),
                       sample_times.end());

    struct Pt {
        std::size_t walker;
        double t;
    };
    std::vector<Pt> pts;
    std::map<std::pair<std::int32_t, double>, std::size_t> seen;
    bool truncated = w.any_truncated;
    std::size_t base_idx = 0;
    for (std::size_t wi = 0; wi < w.walker_count(); ++wi) {
        for (double s : sample_times) {
            const bool within = fwd ? (s >= w.starts[wi].t && s <= w.t_stop)
                                    : (s <= w.starts[wi].t && s >= w.t_stop);
            if (!within) continue;
            const std::int32_t c = w.class_at(wi, s);
            const auto& cp = w.class_path[static_cast<std::size_t>(c)];
            if (cp.truncated && (fwd ? s > cp.t_end : s < cp.t_end)) {
                truncated = true;
                continue;
            }
            auto [it, fresh] = seen.emplace(std::make_pair(c, s), pts.size());
            if (fresh) pts.push_back({wi, s});
            if (wi == base_walker && s == 0.0) base_idx = it->second;
        }
    }

    const std::size_t n = pts.size();
    std::vector<double> mat(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto d = w.ancestral_dist(pts[i].walker, pts[i].t, pts[j].walker, pts[j].t);
            if (!d.resolved) truncated = true;
            mat[i * n + j] = d.d;
            mat[j * n + i] = d.d;
        }

    std::vector<SpacePoint> ev(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = w.walker_pos(pts[i].walker, pts[i].t);
        const std::int64_t site = fwd ? dual_site_of(cfg, x) : primal_site_of(cfg, x);
        ev[i] = interpolated_eval(f, pts[i].t, site, fwd).value;
    }

    FiniteMetricTree tr = FiniteMetricTree::from_matrix(std::move(mat), n, base_idx);
    tr.set_truncated(truncated);
    return FiniteSpatialTree(std::move(tr), std::move(ev), cfg.mode, alpha, 1.0);
}

Backbone backbone(const ArrowField& f, double t_start, std::size_t max_epochs) {
    const LatticeConfig& cfg = f.config();
    if (cfg.mode != SpaceMode::circle)
        throw std::invalid_argument("backbone: circle mode only");
    Backbone out;
    double cur = t_start;
    const std::int64_t n = cfg.n_sites();
    for (std::size_t epoch = 0; epoch < max_epochs; ++epoch) {
        std::vector<SpacePoint> starts;
        starts.reserve(static_cast<std::size_t>(n));
        for (std::int64_t k = 0; k < n; ++k)
            starts.push_back({cur, wrap_pos(cfg, dual_x(cfg, k))});
        BuildOptions opt;
        opt.t_stop = cfg.t_hi;
        opt.store_paths = true;
        opt.stop_when_single = true;
        DiscreteWebTree w = build_web_tree(f, starts, true, opt);
        if (w.alive_classes() != 1) {
            out.truncated = true;
            return out;
        }
        // total-coalescence time: the latest merge recorded
        double tau_k = cur;
        for (std::size_t c = 0; c < w.forest.size(); ++c)
            if (!w.forest.alive(static_cast<std::int32_t>(c)))
                tau_k = std::max(tau_k, -w.forest.merge_time(static_cast<std::int32_t>(c)));
        // surviving trajectory over [cur, tau_k]
        std::size_t survivor = 0;
        for (std::size_t wi = 0; wi < w.walker_count(); ++wi)
            if (w.forest.alive(w.walker_class[wi])) {
                survivor = wi;
                break;
            }
        DiscretePath seg = walk(f, w.starts[survivor], true, tau_k);
        out.taus.push_back(tau_k);
        out.segments.push_back(std::move(seg));
        cur = tau_k;
        if (cur >= cfg.t_hi) break;
    }
    return out;
}

ConvergenceCount convergence_counter(const ArrowField& f, double t, double x,
                                     const std::vector<double>& eps, double h) {
    const LatticeConfig& cfg = f.config();
    if (t - h < cfg.t_lo)
        throw std::invalid_argument("convergence_counter: window too shallow");
    const double emax = *std::max_element(eps.begin(), eps.end());
    std::vector<SpacePoint> starts;
    std::vector<double> offsets;
    const std::int64_t s_lo = static_cast<std::int64_t>(std::ceil((x - emax) / cfg.delta));
    const std::int64_t s_hi = static_cast<std::int64_t>(std::floor((x + emax) / cfg.delta));
    for (std::int64_t s = s_lo; s <= s_hi; ++s) {
        if (cfg.mode == SpaceMode::line && !f.site_in_window(s)) continue;
        starts.push_back({t, primal_x(cfg, s)});
        offsets.push_back(std::fabs(primal_x(cfg, s) - x));
    }
    BuildOptions opt;
    opt.t_stop = t - h;
    opt.store_paths = false;
    const DiscreteWebTree w = build_web_tree(f, starts, false, opt);
    ConvergenceCount out;
    for (double e : eps) {
        std::vector<std::int32_t> classes;
        for (std::size_t i = 0; i < starts.size(); ++i) {
            if (offsets[i] >= e) continue;  // open interval (x-eps, x+eps)
            classes.push_back(w.class_at(i, t - h));
        }
        std::sort(classes.begin(), classes.end());
        classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
        out.counts.push_back(classes.size());
    }
    return out;
}

}  // namespace webtree
