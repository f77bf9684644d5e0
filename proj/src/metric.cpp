#include "webtree/metric.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace webtree {

FiniteSpatialTree spatial_subset_ball(const FiniteSpatialTree& t, double r) {
    std::vector<double> row(t.size());
    t.tree().dist_row(t.base(), row.data());
    std::vector<std::size_t> keep;
    std::size_t base_pos = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (row[i] <= r) {
            if (i == t.base()) base_pos = keep.size();
            keep.push_back(i);
        }
    std::vector<SpacePoint> ev;
    ev.reserve(keep.size());
    for (std::size_t k : keep) ev.push_back(t.eval(k));
    return FiniteSpatialTree(t.tree().subset(keep, base_pos), std::move(ev), t.mode(),
                             t.alpha(), t.spread_radius());
}

MetricReport delta_sp(const FiniteSpatialTree& left, const FiniteSpatialTree& right,
                      double r_max, SearchMode mode) {
    if (r_max <= 0) throw std::invalid_argument("delta_sp: r_max must be positive");
    std::vector<double> rl(left.size()), rr(right.size());
    left.tree().dist_row(left.base(), rl.data());
    right.tree().dist_row(right.base(), rr.data());
    std::set<double> bps{0.0};
    for (double d : rl)
        if (d < r_max) bps.insert(d);
    for (double d : rr)
        if (d < r_max) bps.insert(d);
    std::vector<double> b(bps.begin(), bps.end());
    b.push_back(r_max);

    MetricReport rep;
    rep.exact = true;
    rep.tail_bound = std::exp(-r_max);
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < b.size(); ++k) {
        const FiniteSpatialTree lr = spatial_subset_ball(left, b[k]);
        const FiniteSpatialTree rr2 = spatial_subset_ball(right, b[k]);
        const MetricReport dc = delta_c(lr, rr2, mode);
        rep.exact = rep.exact && dc.exact;
        integral += (std::exp(-b[k]) - std::exp(-b[k + 1])) * std::min(1.0, dc.value);
        if (k + 2 == b.size()) rep.witness = dc.witness;
    }
    rep.value = integral + m1_distance(properness_map(left), properness_map(right));
    return rep;
}

namespace {

// Hasse edges of the realized tree: pairs with no third sample strictly
// between them.
std::vector<std::pair<std::size_t, std::size_t>> tree_edges(const FiniteMetricTree& t,
                                                            double tol = 1e-9) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    const std::size_t n = t.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dij = t.dist(i, j);
            bool edge = true;
            for (std::size_t k = 0; k < n && edge; ++k) {
                if (k == i || k == j) continue;
                const double dik = t.dist(i, k), dkj = t.dist(k, j);
                if (dik < dij && dkj < dij && std::fabs(dik + dkj - dij) <= tol * std::max(1.0, dij))
                    edge = false;
            }
            if (edge) edges.emplace_back(i, j);
        }
    return edges;
}

}  // namespace

double eval_modulus(const FiniteSpatialTree& t, double r, double delta,
                    int interior_samples_per_edge) {
    const FiniteSpatialTree ball = ball_restriction(t, r);
    const FiniteMetricTree& tr = ball.tree();
    std::vector<TreePoint> pts;
    for (std::size_t i = 0; i < ball.size(); ++i) pts.push_back(TreePoint::sample(i));
    if (interior_samples_per_edge > 0) {
        for (const auto& [a, bb] : tree_edges(tr)) {
            const double d = tr.dist(a, bb);
            for (int s = 1; s <= interior_samples_per_edge; ++s) {
                const double off = d * s / (interior_samples_per_edge + 1);
                pts.push_back(TreePoint::segment(a, bb, off));
            }
        }
    }
    double w = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if (dist_points(tr, pts[i], pts[j]) > delta) continue;
            w = std::max(w, eval_dist(ball.eval_at(pts[i]), ball.eval_at(pts[j]), ball.mode()));
        }
    return w;
}

CompactnessReport compactness_diagnostics(const std::vector<FiniteSpatialTree>& family,
                                          double r, double eps,
                                          std::vector<double> delta_grid,
                                          int interior_samples_per_edge) {
    if (family.empty())
        throw std::invalid_argument("compactness_diagnostics: empty family");
    if (delta_grid.empty()) delta_grid = {eps / 4, eps / 2, eps, 2 * eps};
    CompactnessReport rep;
    rep.delta_grid = delta_grid;
    rep.maxima.moduli.assign(delta_grid.size(), 0.0);
    for (const FiniteSpatialTree& t : family) {
        MemberDiagnostics m;
        const FiniteSpatialTree ball = ball_restriction(t, r);
        m.net_count = greedy_eps_net(ball.tree(), eps).count;
        for (std::size_t i = 0; i < ball.size(); ++i)
            m.sup_norm = std::max(m.sup_norm, eval_norm(ball.eval(i), ball.mode()));
        for (double d : delta_grid)
            m.moduli.push_back(eval_modulus(t, r, d, interior_samples_per_edge));
        m.properness = properness_map(t).value(r);
        rep.maxima.net_count = std::max(rep.maxima.net_count, m.net_count);
        rep.maxima.sup_norm = std::max(rep.maxima.sup_norm, m.sup_norm);
        rep.maxima.properness = std::max(rep.maxima.properness, m.properness);
        for (std::size_t k = 0; k < delta_grid.size(); ++k)
            rep.maxima.moduli[k] = std::max(rep.maxima.moduli[k], m.moduli[k]);
        rep.members.push_back(std::move(m));
    }
    return rep;
}

NetBoundCheck net_restriction_bound_check(const FiniteSpatialTree& t,
                                          const std::vector<std::size_t>& sub,
                                          double delta, double C) {
    if (sub.empty()) throw std::invalid_argument("net bound: empty subset");
    std::size_t base_pos = sub.size();
    for (std::size_t k = 0; k < sub.size(); ++k)
        if (sub[k] == t.base()) base_pos = k;
    if (base_pos == sub.size())
        throw std::invalid_argument("net bound: subset must contain the base");
    // directed Hausdorff suffices: sub is a subset of the point set
    for (std::size_t i = 0; i < t.size(); ++i) {
        double best = HUGE_VAL;
        for (std::size_t k : sub) best = std::min(best, t.tree().dist(i, k));
        if (best > delta + 1e-12)
            throw std::invalid_argument("net bound: subset is not delta-dense");
    }
    std::vector<SpacePoint> ev;
    for (std::size_t k : sub) ev.push_back(t.eval(k));
    FiniteSpatialTree restr(t.tree().subset(sub, base_pos), std::move(ev), t.mode(),
                            t.alpha(), t.spread_radius());
    NetBoundCheck chk;
    chk.lhs = delta_c(t, restr).value;
    const double r = t.tree().radius() + 1.0;
    chk.rhs = C * std::pow(2.0 * delta, -t.alpha()) * eval_modulus(t, r, 2.0 * delta, 0);
    chk.ok = chk.lhs <= chk.rhs;
    return chk;
}

}  // namespace webtree
