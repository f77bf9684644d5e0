#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "webtree/merge_forest.hpp"
#include "webtree/spatial_tree.hpp"
#include "webtree/walks.hpp"

namespace webtree {

// Family of coalescing backward Brownian motions on a common Euler grid.
// Paths are built in index order; each follows its own increments until it
// first meets or crosses an existing component, then follows that component.
struct CoalescingBMSystem {
    std::vector<SpacePoint> starts;
    double t_min = 0.0;
    double h = 1e-4;
    double grid_top = 0.0;               // first grid time (max start)
    std::vector<std::int64_t> first_idx; // grid index at/below each start
    std::vector<std::vector<double>> samples;  // per path, from first_idx on
    MergeForest forest;                  // merge times are real (backward) times
    std::vector<double> merge_pos;       // position at each path's merge

    double grid_time(std::int64_t i) const { return grid_top - double(i) * h; }
    std::int64_t steps() const;
    std::int32_t class_at(std::size_t k, double t) const;
    double path_pos(std::size_t k, double t) const;  // linear interpolation
    std::optional<double> tau(std::size_t k, std::size_t l) const;
    DiscreteWebTree::Dist ancestral_dist(std::size_t k, double t1, std::size_t l,
                                         double t2) const;
};

// Euler sampling with coalescence detection per grid interval: meeting or
// order swap always merges (at the linearly interpolated crossing time);
// `bridge_exact` adds a Brownian-bridge crossing Bernoulli per interval to
// remove the O(sqrt(h)) detection bias.
CoalescingBMSystem sample_coalescing_bm(const std::vector<SpacePoint>& starts,
                                        double t_min, double h, std::uint64_t seed,
                                        bool bridge_exact = false);

// (path, time) samples quotiented by coalescence with the ancestral metric;
// the base is the path started at (0,0), which must be present.
FiniteSpatialTree skeleton_tree(const CoalescingBMSystem& sys,
                                std::vector<double> sample_times, double alpha = 0.45);

// P(two independent standard BMs started a apart meet within elapsed time t)
// = 2 (1 - Phi(a / sqrt(2 t))).
double pair_coalescence_cdf(double a, double t);

// Distinct ancestral classes at time t1 of paths started above t0, with
// position at t1 inside [x_lo, x_hi].
std::size_t eta_count(const CoalescingBMSystem& sys, double t0, double t1,
                      double x_lo, double x_hi);
std::size_t eta_count(const DiscreteWebTree& w, double t0, double t1,
                      double x_lo, double x_hi);

}  // namespace webtree
