#include "webtree/metric_tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "webtree/kernels.hpp"

namespace webtree {

FiniteMetricTree FiniteMetricTree::from_matrix(std::vector<double> dist,
                                               std::size_t n, std::size_t base) {
    if (dist.size() != n * n)
        throw std::invalid_argument("metric tree: matrix is not n x n");
    if (base >= n) throw std::invalid_argument("metric tree: base out of range");
    for (double d : dist)
        if (!std::isfinite(d))
            throw std::invalid_argument("metric tree: non-finite distance entry");
    FiniteMetricTree t;
    t.n_ = n;
    t.base_ = base;
    t.matrix_ = std::move(dist);
    return t;
}

FiniteMetricTree FiniteMetricTree::from_ancestry(
    std::vector<double> point_time, std::vector<std::int32_t> point_class,
    std::shared_ptr<const CompressedAncestry> anc, std::size_t base) {
    if (point_time.size() != point_class.size())
        throw std::invalid_argument("metric tree: time/class size mismatch");
    if (base >= point_time.size())
        throw std::invalid_argument("metric tree: base out of range");
    FiniteMetricTree t;
    t.n_ = point_time.size();
    t.base_ = base;
    t.time_ = std::move(point_time);
    t.cls_ = std::move(point_class);
    t.ancestry_ = std::move(anc);
    return t;
}

double FiniteMetricTree::ancestral_dist(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    const double tau = ancestry_->tau(cls_[i], cls_[j]);
    const double m = std::min({tau, time_[i], time_[j]});
    return time_[i] + time_[j] - 2.0 * m;
}

void FiniteMetricTree::dist_row(std::size_t i, double* out) const {
    if (!matrix_.empty()) {
        const double* row = matrix_.data() + i * n_;
        std::copy(row, row + n_, out);
        return;
    }
    for (std::size_t j = 0; j < n_; ++j) out[j] = ancestral_dist(i, j);
}

const std::vector<double>& FiniteMetricTree::matrix() const {
    if (matrix_.empty())
        throw std::logic_error("metric tree: matrix requested from ancestral backing");
    return matrix_;
}

FiniteMetricTree FiniteMetricTree::materialized(std::size_t max_points) const {
    if (dense()) return *this;
    if (n_ > max_points)
        throw std::length_error("metric tree: too many points to materialize");
    std::vector<double> m(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) dist_row(i, m.data() + i * n_);
    FiniteMetricTree t = from_matrix(std::move(m), n_, base_);
    t.truncated_ = truncated_;
    return t;
}

FiniteMetricTree FiniteMetricTree::subset(const std::vector<std::size_t>& keep,
                                          std::size_t new_base_pos) const {
    if (new_base_pos >= keep.size())
        throw std::invalid_argument("metric tree: subset base out of range");
    FiniteMetricTree t;
    t.n_ = keep.size();
    t.base_ = new_base_pos;
    t.truncated_ = truncated_;
    if (dense()) {
        t.matrix_.resize(t.n_ * t.n_);
        for (std::size_t i = 0; i < t.n_; ++i)
            for (std::size_t j = 0; j < t.n_; ++j)
                t.matrix_[i * t.n_ + j] = matrix_[keep[i] * n_ + keep[j]];
    } else {
        t.time_.reserve(t.n_);
        t.cls_.reserve(t.n_);
        for (std::size_t k : keep) {
            t.time_.push_back(time_[k]);
            t.cls_.push_back(cls_[k]);
        }
        t.ancestry_ = ancestry_;
    }
    return t;
}

double FiniteMetricTree::radius() const {
    double r = 0.0;
    std::vector<double> row(n_);
    dist_row(base_, row.data());
    for (double d : row) r = std::max(r, d);
    return r;
}

double dist_point_sample(const FiniteMetricTree& t, const TreePoint& p, std::size_t j) {
    if (!p.interior) return t.dist(p.id, j);
    // Gromov product (j|b)_a locates the projection of j onto [a,b].
    const double g = 0.5 * (t.dist(p.a, j) + t.dist(p.a, p.b) - t.dist(p.b, j));
    return t.dist(p.a, j) - p.offset + 2.0 * std::max(0.0, p.offset - g);
}

double dist_points(const FiniteMetricTree& t, const TreePoint& p, const TreePoint& q) {
    if (!q.interior) return dist_point_sample(t, p, q.id);
    if (!p.interior) return dist_point_sample(t, q, p.id);
    // Distance from p to the two ends of q's segment determines the distance
    // to the interior point exactly the same way a sample would.
    const double da = dist_points(t, p, TreePoint::sample(q.a));
    const double db = dist_points(t, p, TreePoint::sample(q.b));
    const double ab = t.dist(q.a, q.b);
    const double g = 0.5 * (da + ab - db);
    return da - q.offset + 2.0 * std::max(0.0, q.offset - g);
}

ValidationReport validate_tree(const FiniteMetricTree& t, double rel_tol) {
    ValidationReport rep;
    const std::size_t n = t.size();
    if (n == 0) {
        rep.ok = false;
        rep.message = "empty point set";
        return rep;
    }
    std::vector<double> m;
    const double* D = nullptr;
    if (t.dense()) {
        D = t.matrix().data();
    } else {
        if (n > 4096)
            throw std::length_error("validate_tree: ancestral tree too large for full validation");
        m.resize(n * n);
        for (std::size_t i = 0; i < n; ++i) t.dist_row(i, m.data() + i * n);
        D = m.data();
    }
    double dmax = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) dmax = std::max(dmax, D[i]);
    const double tol = rel_tol * std::max(dmax, 1e-300);

    for (std::size_t i = 0; i < n; ++i) {
        if (std::fabs(D[i * n + i]) > tol) {
            rep.ok = false;
            rep.message = "nonzero diagonal at point " + std::to_string(i);
            return rep;
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::fabs(D[i * n + j] - D[j * n + i]) > tol) {
                rep.ok = false;
                rep.message = "asymmetric entry (" + std::to_string(i) + "," + std::to_string(j) + ")";
                return rep;
            }
            if (D[i * n + j] <= tol) {
                rep.ok = false;
                rep.message = "distinct points at zero distance (" + std::to_string(i) +
                              "," + std::to_string(j) + ")";
                return rep;
            }
        }
    }
    // Triangle inequality: d(i,j) <= d(i,k) + d(k,j).
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dij = D[i * n + j];
            for (std::size_t k = 0; k < n; ++k) {
                if (dij > D[i * n + k] + D[k * n + j] + tol) {
                    rep.ok = false;
                    rep.message = "triangle inequality fails at (" + std::to_string(i) +
                                  "," + std::to_string(j) + "," + std::to_string(k) + ")";
                    return rep;
                }
            }
        }
    // Four-point condition: of the three pairings of each quadruple, the two
    // largest sums must agree.  Scanning l for fixed (i,j,k) uses rows of D.
    const auto& ker = simd::active_kernels();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                const double dij = D[i * n + j];
                const double dik = D[i * n + k];
                const double djk = D[j * n + k];
                const std::size_t nl = n - (k + 1);
                if (nl == 0) continue;
                const std::size_t l = ker.four_point_scan(
                    dij, dik, djk, D + k * n + (k + 1), D + j * n + (k + 1),
                    D + i * n + (k + 1), tol, nl);
                if (l < nl) {
                    const std::size_t L = k + 1 + l;
                    const double s1 = dij + D[k * n + L];
                    const double s2 = dik + D[j * n + L];
                    const double s3 = D[i * n + L] + djk;
                    double hi = std::max({s1, s2, s3});
                    double mid = s1 + s2 + s3 - hi - std::min({s1, s2, s3});
                    rep.ok = false;
                    rep.quadruple = QuadrupleViolation{i, j, k, L, hi - mid};
                    rep.message = "four-point condition fails";
                    return rep;
                }
            }
    return rep;
}

TreePoint geodesic_point(const FiniteMetricTree& t, std::size_t a, std::size_t b,
                         double s, double rel_tol) {
    if (a >= t.size() || b >= t.size())
        throw std::invalid_argument("geodesic_point: point out of range");
    if (s < 0.0 || s > 1.0)
        throw std::invalid_argument("geodesic_point: s outside [0,1]");
    const double dab = t.dist(a, b);
    const double off = s * dab;
    const double tol = rel_tol * std::max(dab, 1.0);
    if (off <= tol) return TreePoint::sample(a);
    if (dab - off <= tol) return TreePoint::sample(b);
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double da = t.dist(a, k);
        if (std::fabs(da - off) > tol) continue;
        if (std::fabs(da + t.dist(k, b) - dab) <= tol) return TreePoint::sample(k);
    }
    return TreePoint::segment(a, b, off);
}

int degree(const FiniteMetricTree& t, const TreePoint& p, double tol) {
    std::vector<double> dp(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) dp[j] = dist_point_sample(t, p, j);
    if (!p.interior && p.id >= t.size())
        throw std::invalid_argument("degree: point out of range");
    if (p.interior) {
        const double dab = t.dist(p.a, p.b);
        if (p.offset < -tol || p.offset > dab + tol)
            throw std::invalid_argument("degree: interior point not on its segment");
    }
    // Directions at p partition the samples away from p; w1 ~ w2 iff their
    // Gromov product at p is positive.  On a tree metric this is transitive,
    // a union-find keeps it robust under tolerance noise.
    std::vector<std::size_t> pts;
    for (std::size_t j = 0; j < t.size(); ++j)
        if (dp[j] > tol) pts.push_back(j);
    std::vector<std::size_t> comp(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) comp[i] = i;
    const auto find = [&](std::size_t x) {
        while (comp[x] != x) x = comp[x] = comp[comp[x]];
        return x;
    };
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double gp = 0.5 * (dp[pts[i]] + dp[pts[j]] - t.dist(pts[i], pts[j]));
            if (gp > tol) {
                const auto ri = find(i), rj = find(j);
                if (ri != rj) comp[ri] = rj;
            }
        }
    int deg = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (find(i) == i) ++deg;
    return deg;
}

GreedyNet greedy_net_sequence(const FiniteMetricTree& t, double eps_stop) {
    GreedyNet net;
    const std::size_t n = t.size();
    std::vector<double> dmin(n);
    std::vector<double> row(n);
    t.dist_row(t.base(), dmin.data());
    net.points.push_back(t.base());
    const auto& ker = simd::active_kernels();
    while (true) {
        const std::size_t far = ker.argmax(dmin.data(), n);
        const double r = dmin[far];
        net.radii.push_back(r);
        if (r <= eps_stop || net.points.size() == n) break;
        net.points.push_back(far);
        t.dist_row(far, row.data());
        ker.min_inplace(dmin.data(), row.data(), n);
    }
    return net;
}

std::size_t net_count_for(const GreedyNet& seq, double eps) {
    // radii[k] is the covering radius of the first k+1 points.
    for (std::size_t k = 0; k < seq.radii.size(); ++k)
        if (seq.radii[k] <= eps) return k + 1;
    return seq.points.size();
}

GreedyNet greedy_eps_net(const FiniteMetricTree& t, double eps) {
    if (eps <= 0) throw std::invalid_argument("greedy_eps_net: eps must be positive");
    GreedyNet seq = greedy_net_sequence(t, eps);
    seq.count = net_count_for(seq, eps);
    seq.points.resize(seq.count);
    return seq;
}

}  // namespace webtree
