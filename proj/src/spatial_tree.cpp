#include "webtree/spatial_tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace webtree {

double circle_dist(double a, double b) {
    double d = std::fabs(a - b);
    d -= std::floor(d);
    return std::min(d, 1.0 - d);
}

double circle_delta(double a, double b) {
    double d = a - b;
    d -= std::round(d);
    if (d <= -0.5) d += 1.0;
    return d;
}

double space_dist(double a, double b, SpaceMode mode) {
    return mode == SpaceMode::circle ? circle_dist(a, b) : std::fabs(a - b);
}

double eval_dist(const SpacePoint& p, const SpacePoint& q, SpaceMode mode) {
    const double dx = space_dist(p.x, q.x, mode);
    return std::hypot(p.t - q.t, dx);
}

double eval_norm(const SpacePoint& p, SpaceMode mode) {
    const double x = mode == SpaceMode::circle ? circle_dist(p.x, 0.0) : p.x;
    return std::hypot(p.t, x);
}

FiniteSpatialTree::FiniteSpatialTree(FiniteMetricTree tree, std::vector<SpacePoint> eval,
                                     SpaceMode mode, double alpha, double spread_radius)
    : tree_(std::move(tree)), eval_(std::move(eval)), mode_(mode), alpha_(alpha),
      spread_radius_(spread_radius) {
    if (eval_.size() != tree_.size())
        throw std::invalid_argument("spatial tree: eval must cover every point");
    if (alpha_ <= 0.0 || alpha_ >= 1.0)
        throw std::invalid_argument("spatial tree: alpha outside (0,1)");
    if (spread_radius_ <= 0.0)
        throw std::invalid_argument("spatial tree: spread radius must be positive");
}

SpacePoint FiniteSpatialTree::eval_at(const TreePoint& p) const {
    if (!p.interior) return eval_[p.id];
    const double d = tree_.dist(p.a, p.b);
    const SpacePoint& ea = eval_[p.a];
    const SpacePoint& eb = eval_[p.b];
    SpacePoint out;
    out.t = std::max(ea.t - p.offset, eb.t - (d - p.offset));
    const double frac = d > 0 ? p.offset / d : 0.0;
    if (mode_ == SpaceMode::circle) {
        double x = ea.x + frac * circle_delta(eb.x, ea.x);
        x -= std::floor(x);
        out.x = x;
    } else {
        out.x = ea.x + frac * (eb.x - ea.x);
    }
    return out;
}

FiniteMetricTree ball_subset(const FiniteMetricTree& t, double r) {
    std::vector<double> row(t.size());
    t.dist_row(t.base(), row.data());
    std::vector<std::size_t> keep;
    std::size_t base_pos = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (row[i] <= r) {
            if (i == t.base()) base_pos = keep.size();
            keep.push_back(i);
        }
    }
    return t.subset(keep, base_pos);
}

FiniteSpatialTree ball_restriction(const FiniteSpatialTree& t, double r,
                                   double merge_tol) {
    if (r < 0) throw std::invalid_argument("ball_restriction: negative radius");
    const FiniteMetricTree dense = t.tree().materialized();
    const std::size_t n = dense.size();
    std::vector<double> from_base(n);
    dense.dist_row(dense.base(), from_base.data());

    std::vector<std::size_t> keep;
    std::vector<std::size_t> out;
    std::size_t base_pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (from_base[i] <= r + merge_tol) {
            if (i == dense.base()) base_pos = keep.size();
            keep.push_back(i);
        } else {
            out.push_back(i);
        }
    }

    // Exit points of the ball, one per direction leaving it.
    std::vector<TreePoint> clips;
    for (std::size_t w : out) {
        const TreePoint clip = TreePoint::segment(dense.base(), w, r);
        bool dup = false;
        for (const TreePoint& c : clips) {
            if (dist_points(dense, c, clip) <= merge_tol) { dup = true; break; }
        }
        if (dup) continue;
        for (std::size_t k : keep) {
            if (dist_point_sample(dense, clip, k) <= merge_tol) { dup = true; break; }
        }
        if (!dup) clips.push_back(clip);
    }

    FiniteSpatialTree full(dense, t.eval(), t.mode(), t.alpha(), t.spread_radius());
    const std::size_t m = keep.size() + clips.size();
    std::vector<double> mat(m * m, 0.0);
    std::vector<SpacePoint> ev(m);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        ev[i] = t.eval(keep[i]);
        for (std::size_t j = 0; j < keep.size(); ++j)
            mat[i * m + j] = dense.dist(keep[i], keep[j]);
    }
    for (std::size_t ci = 0; ci < clips.size(); ++ci) {
        const std::size_t i = keep.size() + ci;
        ev[i] = full.eval_at(clips[ci]);
        for (std::size_t j = 0; j < keep.size(); ++j) {
            const double d = dist_point_sample(dense, clips[ci], keep[j]);
            mat[i * m + j] = d;
            mat[j * m + i] = d;
        }
        for (std::size_t cj = 0; cj < ci; ++cj) {
            const std::size_t j = keep.size() + cj;
            const double d = dist_points(dense, clips[ci], clips[cj]);
            mat[i * m + j] = d;
            mat[j * m + i] = d;
        }
    }
    FiniteMetricTree sub = FiniteMetricTree::from_matrix(std::move(mat), m, base_pos);
    sub.set_truncated(dense.truncated());
    return FiniteSpatialTree(std::move(sub), std::move(ev), t.mode(), t.alpha(),
                             t.spread_radius());
}

namespace {

struct RaySamples {
    // samples on the descending (or ascending, forward) ray from i, sorted by
    // decreasing |t_i - t_j| gap; includes i itself first.
    std::vector<std::size_t> ids;
};

bool on_ray(const FiniteMetricTree& tr, const std::vector<SpacePoint>& ev,
            std::size_t i, std::size_t j, bool forward, double tol) {
    const double dt = forward ? ev[j].t - ev[i].t : ev[i].t - ev[j].t;
    if (dt <= tol) return false;
    return std::fabs(tr.dist(i, j) - dt) <= tol;
}

}  // namespace

CharacteristicReport check_characteristic(const FiniteSpatialTree& t,
                                          const std::vector<SpacePoint>& probes,
                                          bool forward, double tol) {
    CharacteristicReport rep;
    const FiniteMetricTree tr = t.tree().materialized();
    const auto& ev = t.eval();
    const std::size_t n = tr.size();
    const double sgn = forward ? -1.0 : 1.0;

    // (1) time coordinate: 1-Lipschitz along the tree, and the wedge formula
    // at every sample lying on a segment between two others.
    for (std::size_t i = 0; i < n && rep.violations.size() < 32; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = tr.dist(i, j);
            if (std::fabs(ev[i].t - ev[j].t) > d + tol) {
                rep.time_ok = false;
                rep.violations.push_back({"time", i, j, 0, 0,
                                          std::fabs(ev[i].t - ev[j].t) - d});
                break;
            }
        }
    for (std::size_t i = 0; i < n && rep.violations.size() < 32; ++i)
        for (std::size_t j = i + 1; j < n && rep.violations.size() < 32; ++j) {
            const double d = tr.dist(i, j);
            if (d <= tol) continue;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                const double dik = tr.dist(i, k);
                const double dkj = tr.dist(k, j);
                if (std::fabs(dik + dkj - d) > tol) continue;
                const double expect =
                    std::max(sgn * ev[i].t - dik, sgn * ev[j].t - dkj);
                if (std::fabs(sgn * ev[k].t - expect) > tol) {
                    rep.time_ok = false;
                    rep.violations.push_back({"time", i, j, k, 0,
                                              std::fabs(sgn * ev[k].t - expect)});
                    break;
                }
            }
        }

    // (2) spatial order between rays started at equal times.
    std::vector<std::vector<std::size_t>> anc(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && on_ray(tr, ev, i, j, forward, tol)) anc[i].push_back(j);

    const double arc_cap = 0.35;  // circle mode: skip quadruples outside one arc
    for (std::size_t i = 0; i < n && rep.violations.size() < 32; ++i)
        for (std::size_t j = 0; j < n && rep.violations.size() < 32; ++j) {
            if (i == j || std::fabs(ev[i].t - ev[j].t) > tol) continue;
            double gap0;
            if (t.mode() == SpaceMode::circle) {
                gap0 = circle_delta(ev[j].x, ev[i].x);
                if (gap0 <= tol || gap0 > arc_cap) continue;
            } else {
                gap0 = ev[j].x - ev[i].x;
                if (gap0 <= tol) continue;
            }
            for (std::size_t a : anc[i]) {
                for (std::size_t b : anc[j]) {
                    if (std::fabs(ev[a].t - ev[b].t) > tol) continue;
                    double gap1;
                    if (t.mode() == SpaceMode::circle) {
                        const double ya = circle_delta(ev[a].x, ev[i].x);
                        const double yb = circle_delta(ev[b].x, ev[i].x);
                        if (std::fabs(ya) > arc_cap || std::fabs(yb) > arc_cap) continue;
                        gap1 = yb - ya;
                    } else {
                        gap1 = ev[b].x - ev[a].x;
                    }
                    if (gap1 < -tol) {
                        rep.space_ok = false;
                        rep.violations.push_back({"space", i, j, a, b, -gap1});
                        if (rep.violations.size() >= 32) break;
                    }
                }
                if (rep.violations.size() >= 32) break;
            }
        }

    // (3) spread: each probe inside the realization window must be within
    // spread_radius of a ray crossing its time level.
    if (!probes.empty()) {
        double tmin = ev[0].t, tmax = ev[0].t, xmin = ev[0].x, xmax = ev[0].x;
        for (const auto& e : ev) {
            tmin = std::min(tmin, e.t);
            tmax = std::max(tmax, e.t);
            xmin = std::min(xmin, e.x);
            xmax = std::max(xmax, e.x);
        }
        for (std::size_t pi = 0; pi < probes.size(); ++pi) {
            const SpacePoint& z = probes[pi];
            if (z.t < tmin - tol || z.t > tmax + tol) continue;
            if (t.mode() == SpaceMode::line && (z.x < xmin - tol || z.x > xmax + tol))
                continue;
            bool hit = false;
            for (std::size_t i = 0; i < n && !hit; ++i) {
                if (std::fabs(ev[i].t - z.t) <= tol &&
                    space_dist(ev[i].x, z.x, t.mode()) <= t.spread_radius()) {
                    hit = true;
                    break;
                }
                const bool above = forward ? ev[i].t <= z.t : ev[i].t >= z.t;
                if (!above) continue;
                for (std::size_t j : anc[i]) {
                    const bool below = forward ? ev[j].t >= z.t : ev[j].t <= z.t;
                    if (!below) continue;
                    const double span = ev[i].t - ev[j].t;
                    const double frac = span != 0.0 ? (z.t - ev[j].t) / span : 0.0;
                    double x;
                    if (t.mode() == SpaceMode::circle) {
                        x = ev[j].x + frac * circle_delta(ev[i].x, ev[j].x);
                    } else {
                        x = ev[j].x + frac * (ev[i].x - ev[j].x);
                    }
                    if (space_dist(x, z.x, t.mode()) <= t.spread_radius()) {
                        hit = true;
                        break;
                    }
                }
            }
            if (!hit) {
                rep.spread_ok = false;
                rep.violations.push_back({"spread", pi, 0, 0, 0, 0.0});
            }
        }
    }
    return rep;
}

RadialResult radial_point(const FiniteSpatialTree& t, const TreePoint& z, double s,
                          bool forward, double tol) {
    const FiniteMetricTree& tr = t.tree();
    const auto& ev = t.eval();
    const double tz = t.eval_at(z).t;
    const double sgn = forward ? -1.0 : 1.0;
    if (sgn * s > sgn * tz + tol)
        throw std::invalid_argument("radial_point: target time on the wrong side");
    if (std::fabs(s - tz) <= tol) return {z, false, tz};

    if (z.interior) {
        // Below the wedge tip the ray from z coincides with the ray from a.
        const double d = tr.dist(z.a, z.b);
        const double ta = ev[z.a].t, tb = ev[z.b].t;
        const double cusp_from_a = 0.5 * (d + sgn * (ta - tb));
        const double t_cusp = sgn * (sgn * ta - cusp_from_a);
        const bool on_a_leg = z.offset <= cusp_from_a + tol;
        if (sgn * s >= sgn * t_cusp - tol) {
            // stays inside the segment
            const double off = on_a_leg ? sgn * (ta - s) : d - sgn * (tb - s);
            return {TreePoint::segment(z.a, z.b, std::clamp(off, 0.0, d)), false, s};
        }
        return radial_point(t, TreePoint::sample(on_a_leg ? z.a : z.b), s, forward, tol);
    }

    // Samples on the ray from z, bracketing s.
    std::size_t above = z.id;
    double t_above = tz;
    bool have_below = false;
    std::size_t below = 0;
    double t_below = 0.0;
    for (std::size_t j = 0; j < tr.size(); ++j) {
        if (j == z.id) continue;
        const double dt = sgn * (tz - ev[j].t);
        if (dt <= tol) continue;
        if (std::fabs(tr.dist(z.id, j) - dt) > tol) continue;
        const double tj = ev[j].t;
        if (std::fabs(tj - s) <= tol) return {TreePoint::sample(j), false, tj};
        if (sgn * tj > sgn * s) {
            if (sgn * tj < sgn * t_above) { above = j; t_above = tj; }
        } else {
            if (!have_below || sgn * tj > sgn * t_below) {
                have_below = true;
                below = j;
                t_below = tj;
            }
        }
    }
    if (!have_below) {
        return {TreePoint::sample(above), true, t_above};
    }
    const double off = sgn * (t_above - s);
    return {TreePoint::segment(above, below, off), false, s};
}

}  // namespace webtree
