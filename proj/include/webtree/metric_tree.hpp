#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "webtree/merge_forest.hpp"

namespace webtree {

// A finite pointed metric space intended to be a tree metric (0-hyperbolic).
// Two backings share one interface: an explicit symmetric matrix for desk
// scale work and serialization, and an ancestral form (point times + merge
// ancestry) for the large coalescing trees where an n x n matrix would not
// fit.  Distances in ancestral form are t_i + t_j - 2 min(tau_ij, t_i, t_j).
class FiniteMetricTree {
public:
    FiniteMetricTree() = default;

    static FiniteMetricTree from_matrix(std::vector<double> dist_row_major,
                                        std::size_t n, std::size_t base);
    static FiniteMetricTree from_ancestry(std::vector<double> point_time,
                                          std::vector<std::int32_t> point_class,
                                          std::shared_ptr<const CompressedAncestry> anc,
                                          std::size_t base);

    std::size_t size() const { return n_; }
    std::size_t base() const { return base_; }
    bool dense() const { return !matrix_.empty(); }

    double dist(std::size_t i, std::size_t j) const {
        if (!matrix_.empty()) return matrix_[i * n_ + j];
        return ancestral_dist(i, j);
    }
    void dist_row(std::size_t i, double* out) const;

    // True if some ancestral pair never merged inside the simulated window
    // (their distance uses the truncation time); always false for matrices.
    bool truncated() const { return truncated_; }
    void set_truncated(bool t) { truncated_ = t; }

    const std::vector<double>& matrix() const;  // dense only
    FiniteMetricTree materialized(std::size_t max_points = 4096) const;

    // Point subset (indices must be distinct, in range, and include the new
    // base, given as position within `keep`).
    FiniteMetricTree subset(const std::vector<std::size_t>& keep,
                            std::size_t new_base_pos) const;

    double radius() const;  // max distance from base

private:
    double ancestral_dist(std::size_t i, std::size_t j) const;

    std::size_t n_ = 0;
    std::size_t base_ = 0;
    std::vector<double> matrix_;  // row major, n*n when dense
    std::vector<double> time_;
    std::vector<std::int32_t> cls_;
    std::shared_ptr<const CompressedAncestry> ancestry_;
    bool truncated_ = false;
};

// A point of the realized tree: either one of the samples or a point in the
// interior of the segment [a,b] at `offset` from a.
struct TreePoint {
    std::size_t id = 0;
    bool interior = false;
    std::size_t a = 0, b = 0;
    double offset = 0.0;

    static TreePoint sample(std::size_t i) { return TreePoint{i, false, 0, 0, 0.0}; }
    static TreePoint segment(std::size_t a, std::size_t b, double offset) {
        return TreePoint{0, true, a, b, offset};
    }
};

double dist_point_sample(const FiniteMetricTree& t, const TreePoint& p, std::size_t j);
double dist_points(const FiniteMetricTree& t, const TreePoint& p, const TreePoint& q);

struct QuadrupleViolation {
    std::size_t i = 0, j = 0, k = 0, l = 0;
    double excess = 0.0;
};

struct ValidationReport {
    bool ok = true;
    std::string message;                         // empty when ok
    std::optional<QuadrupleViolation> quadruple; // first four-point failure
    bool operator!() const { return !ok; }
};

// Symmetry, zero-diagonal, positivity, triangle inequality and the four-point
// condition, all within `rel_tol` of the largest distance involved.  Throws
// std::invalid_argument on NaN or non-square input (handled upstream).
ValidationReport validate_tree(const FiniteMetricTree& t, double rel_tol = 1e-9);

// The point at distance s*d(a,b) from a on the segment [a,b].  Snaps to an
// existing sample when one lies there (within rel tolerance).
TreePoint geodesic_point(const FiniteMetricTree& t, std::size_t a, std::size_t b,
                         double s, double rel_tol = 1e-9);

// Number of connected components of the realized tree minus the point:
// directions are equivalence classes of samples under positive Gromov
// product at p.
int degree(const FiniteMetricTree& t, const TreePoint& p, double tol = 1e-9);

struct GreedyNet {
    std::vector<std::size_t> points;   // farthest-point order, starts at base
    std::vector<double> radii;         // covering radius before adding points[k]
    std::size_t count = 0;             // net size for the eps requested
};

// Farthest-point net from the base.  The sequence is eps-free; `count` is the
// prefix length needed for covering radius <= eps.  Every sample is within
// eps of the returned prefix and prefix points are pairwise > eps apart.
GreedyNet greedy_eps_net(const FiniteMetricTree& t, double eps);

// The full farthest-point sequence down to covering radius <= eps_stop, from
// which counts for every eps >= eps_stop can be read off.
GreedyNet greedy_net_sequence(const FiniteMetricTree& t, double eps_stop);
std::size_t net_count_for(const GreedyNet& seq, double eps);

}  // namespace webtree
