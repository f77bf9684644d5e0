#pragma once

#include <vector>

#include "webtree/cadlag.hpp"
#include "webtree/correspondence.hpp"
#include "webtree/spatial_tree.hpp"

namespace webtree {

// Point-subset restriction of a spatial tree to the closed ball of radius r.
FiniteSpatialTree spatial_subset_ball(const FiniteSpatialTree& t, double r);

// Weighted metric: int_0^{r_max} e^{-r} (1 ^ delta_c(restrictions)) dr plus
// the M1 distance of the properness maps.  The integrand is constant between
// the merged distance-from-base breakpoints; the e^{-r_max} tail is reported,
// not added.
MetricReport delta_sp(const FiniteSpatialTree& left, const FiniteSpatialTree& right,
                      double r_max, SearchMode mode = SearchMode::automatic);

struct MemberDiagnostics {
    std::size_t net_count = 0;
    double sup_norm = 0.0;
    std::vector<double> moduli;  // omega^{(r)}(M, delta) per grid delta
    double properness = 0.0;     // b(r)
};

struct CompactnessReport {
    std::vector<MemberDiagnostics> members;
    MemberDiagnostics maxima;  // component-wise maxima over the family
    std::vector<double> delta_grid;
};

// The quantities whose uniform boundedness characterizes relative
// compactness: eps-net cardinality of the r-ball, sup norm and modulus of
// continuity of the evaluation map on it, and the properness value.
CompactnessReport compactness_diagnostics(const std::vector<FiniteSpatialTree>& family,
                                          double r, double eps,
                                          std::vector<double> delta_grid = {},
                                          int interior_samples_per_edge = 4);

// Modulus of continuity of M over the r-ball, sup over realized pairs at tree
// distance <= delta, optionally refined with interior samples on the edges.
double eval_modulus(const FiniteSpatialTree& t, double r, double delta,
                    int interior_samples_per_edge = 4);

struct NetBoundCheck {
    double lhs = 0.0;  // delta_c(full, restriction)
    double rhs = 0.0;  // C (2 delta)^{-alpha} omega(M, 2 delta)
    bool ok = false;
};

// Checks the net-approximation bound for a sub point set at Hausdorff
// distance <= delta from the full tree.
NetBoundCheck net_restriction_bound_check(const FiniteSpatialTree& t,
                                          const std::vector<std::size_t>& sub,
                                          double delta, double C = 4.0);

}  // namespace webtree
