#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "webtree/lattice.hpp"
#include "webtree/merge_forest.hpp"
#include "webtree/metric_tree.hpp"
#include "webtree/spatial_tree.hpp"

namespace webtree {

// Piecewise-constant trajectory.  Backward paths are scanned in decreasing
// time and take the value after the jump at the jump time itself; forward
// paths mirror this.
struct DiscretePath {
    bool forward = false;
    double t0 = 0.0, x0 = 0.0;
    std::vector<std::pair<double, double>> jumps;  // (time, new position), scan order
    double t_end = 0.0;
    bool truncated = false;  // left the spatial window

    double pos(double t) const;
};

// Coalescing system of tracked walkers over one arrow-field realization.
struct DiscreteWebTree {
    LatticeConfig cfg;
    bool forward = false;
    std::vector<SpacePoint> starts;
    std::vector<std::int32_t> walker_class;
    MergeForest forest;          // merge times stored sweep-ordered (negated if forward)
    std::vector<DiscretePath> class_path;   // per class (empty if paths not stored)
    std::vector<double> class_birth;        // sweep-ordered birth time
    double t_stop = 0.0;
    bool any_truncated = false;
    bool paths_stored = true;

    // sweep-ordered coordinate: u = -t for forward trees
    double sweep_u(double t) const { return forward ? -t : t; }

    std::int32_t class_at(std::size_t w, double t) const;
    double walker_pos(std::size_t w, double t) const;

    // last (backward) / first (forward) time the two walkers agree; nullopt
    // if they never merge inside the window.
    std::optional<double> tau(std::size_t w1, std::size_t w2) const;

    struct Dist {
        double d = 0.0;
        bool resolved = true;  // false when the merge was truncated away
    };
    Dist ancestral_dist(std::size_t w1, double t1, std::size_t w2, double t2) const;

    std::size_t walker_count() const { return walker_class.size(); }
    std::size_t alive_classes() const;
};

DiscretePath walk(const ArrowField& f, SpacePoint z, bool forward, double t_stop);

struct BuildOptions {
    double t_stop = 0.0;
    bool store_paths = true;
    bool stop_when_single = false;
};

// Single sweep over the events at occupied sites, walkers merging through a
// union-find with recorded merge times.
DiscreteWebTree build_web_tree(const ArrowField& f, const std::vector<SpacePoint>& starts,
                               bool forward, const BuildOptions& opt);

struct InterpolatedPoint {
    SpacePoint value;
    bool truncated = false;  // no event in travel direction inside the window
};

// Evaluation of the interpolated map at a lattice point: the point on the
// segment joining the anchor event above to the travel event below (tilted by
// c delta according to the event's direction), at the query's time.
// Backward queries live on the primal lattice, forward ones on the dual.
InterpolatedPoint interpolated_eval(const ArrowField& f, double t, std::int64_t site,
                                    bool forward);

struct InterpolationCheck {
    double max_dev = 0.0;   // max ||M~ - M|| over queries
    double bound = 0.0;     // delta
    bool ok = true;         // max_dev <= delta
    std::size_t truncated = 0;
};
InterpolationCheck check_interpolation(const ArrowField& f,
                                       const std::vector<std::pair<double, std::int64_t>>& queries,
                                       bool forward);

struct NonCrossReport {
    bool ok = true;
    std::size_t bwd_walker = 0, fwd_walker = 0;
    double at_low = 0.0, at_high = 0.0;  // witness times of the sign change
};

// Verifies the signed-gap condition between every tracked backward walker and
// every tracked forward walker over their common time range: the interpolated
// gap may not pass from below -delta to above +delta.
NonCrossReport check_noncrossing(const ArrowField& f, const DiscreteWebTree& bwd,
                                 const DiscreteWebTree& fwd);

// (walker, time) samples quotiented by coalescence, ancestral matrix,
// interpolated evaluation map.  The base is the walker started at (0,0)
// (backward) or (0, delta/2) (forward), which must be among the starts.
FiniteSpatialTree to_spatial_tree(const ArrowField& f, const DiscreteWebTree& w,
                                  std::vector<double> sample_times, double alpha = 0.45);

struct Backbone {
    std::vector<double> taus;             // successive total-coalescence times
    std::vector<DiscretePath> segments;   // surviving trajectory between taus
    bool truncated = false;
};

// Circle mode, forward direction: repeatedly start walkers from every site
// and record when they first collapse to a single trajectory.
Backbone backbone(const ArrowField& f, double t_start, std::size_t max_epochs = 64);

// Mass sampler for the ball of radius r around the base point (0,0): fresh
// walkers are injected at every site at each slice time and coalesce through
// a descending sweep; the distinct classes surviving to mid-gap become the
// sample points of the ancestral tree.  gap should be at most eps_min/4 for
// eps-net work at scale eps_min.
struct BallParams {
    double delta = 0.01;
    double r = 1.0;
    double gap = 0.005;
    std::uint64_t seed = 0;
    double halfwidth = 0.0;  // 0: use 4 sqrt(r) + 1 rounded to the lattice
};
FiniteMetricTree web_ball_tree(const BallParams& p);

struct ConvergenceCount {
    std::vector<std::size_t> counts;  // distinct classes per eps, matching eps order
};

// #{rho(w, t-h): w in M^{-1}({t} x (x-eps, x+eps))} for several nested eps in
// one realization.
ConvergenceCount convergence_counter(const ArrowField& f, double t, double x,
                                     const std::vector<double>& eps, double h);

}  // namespace webtree
