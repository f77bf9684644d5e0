#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "webtree/brownian.hpp"
#include "webtree/metric_tree.hpp"
#include "webtree/spatial_tree.hpp"
#include "webtree/stats.hpp"
#include "webtree/walks.hpp"

namespace webtree {

struct BoxDimension {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::vector<double> eps;
    std::vector<double> counts;  // greedy net counts (possibly seed-averaged)
};

// Greedy net counts of the r-ball over a geometric eps grid and the
// least-squares slope of log N against log(1/eps) inside the fit window.
BoxDimension box_dimension(const FiniteMetricTree& t, double r,
                           std::pair<double, double> eps_range,
                           std::pair<double, double> fit_window,
                           int points_per_decade = 12);

// Pooled fit over several trees (mean of log counts per eps).
BoxDimension box_dimension_pooled(const std::vector<FiniteMetricTree>& trees, double r,
                                  std::pair<double, double> eps_range,
                                  std::pair<double, double> fit_window,
                                  int points_per_decade = 12);

struct EpsnetScaling {
    double k_hat = 0.0;                       // max over family and eps of N eps^theta
    std::vector<double> per_tree_khat;
    bool pass = false;                        // filled by the caller's stability rule
};

EpsnetScaling epsnet_scaling_check(const std::vector<FiniteMetricTree>& trees, double r,
                                   const std::vector<double>& eps_grid, double theta);

// A backward (or forward) path in the compactified path space.
struct Path {
    double sigma = 0.0;                        // starting time
    std::vector<std::pair<double, double>> samples;  // (t, x), increasing t
    bool forward = false;
    SpaceMode mode = SpaceMode::line;

    double pos(double t) const;  // constant extension beyond sigma
    double deepest() const { return samples.empty() ? sigma : samples.front().first; }
};

// One path per tree point: the evaluation of the ray toward the open end,
// down to the realized depth; duplicate paths collapsed.
std::vector<Path> k_map(const FiniteSpatialTree& t, bool forward = false,
                        double tol = 1e-7);

double finr_distance(const Path& p, const Path& q);
double hausdorff_paths(const std::vector<Path>& A, const std::vector<Path>& B);

struct TreeConditionReport {
    bool ok = true;
    std::size_t i = 0, j = 0;  // violating pair when !ok
};

// Pairs of distinct points with equal evaluation must have radial images that
// differ somewhere within eps_probe below the common time.
TreeConditionReport tree_condition_check(const FiniteSpatialTree& t, double eps_probe,
                                         double tol = 1e-7);

struct TypeCount {
    int m_in = 0;
    int m_out = 1;
    bool operator<(const TypeCount& o) const {
        return m_in != o.m_in ? m_in < o.m_in : m_out < o.m_out;
    }
};

struct SpecialPointsReport {
    std::map<TypeCount, std::size_t> backward_tally;
    std::map<TypeCount, std::size_t> forward_tally;
    std::size_t identity_checked = 0;
    std::size_t identity_violations = 0;
};

// Germ counts at lattice points of a small window, tallied per type, plus the
// degree identity: the forward germ channels around z, counted from the dual
// field's events alone, must exceed by one the backward in-degree of z traced
// with actual walkers (and symmetrically with the webs swapped).
SpecialPointsReport special_points(const ArrowField& f, double t0, double t1,
                                   std::int64_t site_lo, std::int64_t site_hi);

// sup over tracked paths and admissible s of |pi(s) - pi(t)|, t in [s-eps, s],
// over evaluation points inside [-r, r] x [-R, R].
double modulus_psi(const DiscreteWebTree& w, double r, double R, double eps);
double modulus_psi(const CoalescingBMSystem& sys, double r, double R, double eps);

}  // namespace webtree
