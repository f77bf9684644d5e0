#pragma once

#include <optional>
#include <string>
#include <vector>

#include "webtree/metric_tree.hpp"

namespace webtree {

enum class SpaceMode { line, circle };

// A point of space-time: t real, x real (line) or in [0,1) (circle).
struct SpacePoint {
    double t = 0.0;
    double x = 0.0;
};

// Periodic distance on the unit circle.
double circle_dist(double a, double b);
// Signed circle increment in (-1/2, 1/2].
double circle_delta(double a, double b);

// d on the spatial coordinate respecting the mode.
double space_dist(double a, double b, SpaceMode mode);
// Euclidean norm of M(z)-M(w) with the periodic spatial increment in circle
// mode.
double eval_dist(const SpacePoint& p, const SpacePoint& q, SpaceMode mode);
// |M(z)|: Euclidean norm of (t, x), with x replaced by its distance to 0 on
// the circle in periodic mode.
double eval_norm(const SpacePoint& p, SpaceMode mode);

class FiniteSpatialTree {
public:
    FiniteSpatialTree() = default;
    FiniteSpatialTree(FiniteMetricTree tree, std::vector<SpacePoint> eval,
                      SpaceMode mode, double alpha, double spread_radius = 1.0);

    const FiniteMetricTree& tree() const { return tree_; }
    FiniteMetricTree& tree() { return tree_; }
    const std::vector<SpacePoint>& eval() const { return eval_; }
    const SpacePoint& eval(std::size_t i) const { return eval_[i]; }
    SpaceMode mode() const { return mode_; }
    double alpha() const { return alpha_; }
    double spread_radius() const { return spread_radius_; }
    std::size_t size() const { return tree_.size(); }
    std::size_t base() const { return tree_.base(); }

    // Evaluation at an arbitrary tree point.  The time coordinate follows the
    // wedge shape of geodesics (exact on characteristic trees); the spatial
    // coordinate is interpolated linearly along the segment, by shortest arc
    // in circle mode.
    SpacePoint eval_at(const TreePoint& p) const;

private:
    FiniteMetricTree tree_;
    std::vector<SpacePoint> eval_;
    SpaceMode mode_ = SpaceMode::line;
    double alpha_ = 0.5;
    double spread_radius_ = 1.0;
};

// Closed ball of radius r around the base as a spatial tree.  Samples beyond
// the ball are clipped: the exit point of [base, w] at distance exactly r is
// synthesized (one per direction; exits closer than merge_tol in the tree
// metric collapse to one point).
FiniteSpatialTree ball_restriction(const FiniteSpatialTree& t, double r,
                                   double merge_tol = 1e-9);

// Metric-only ball restriction (point subset, no clip synthesis).
FiniteMetricTree ball_subset(const FiniteMetricTree& t, double r);

struct CharViolation {
    std::string kind;  // "time", "space", "spread"
    std::size_t i = 0, j = 0, k = 0, l = 0;
    double magnitude = 0.0;
};

struct CharacteristicReport {
    bool time_ok = true;
    bool space_ok = true;
    bool spread_ok = true;
    std::vector<CharViolation> violations;
    bool ok() const { return time_ok && space_ok && spread_ok; }
};

// Characteristic-tree checks on the realized samples:
//  (1) wedge shape of the time coordinate along geodesics, verified at every
//      sample lying on a segment between two others (plus 1-Lipschitz in
//      time at the endpoints);
//  (2) spatial order preservation between rays started at equal times;
//  (3) for each probe (t,x), a realized ray passes through
//      {t} x [x - spread, x + spread].
// `forward` flips the wedge for dual trees.
CharacteristicReport check_characteristic(const FiniteSpatialTree& t,
                                          const std::vector<SpacePoint>& probes = {},
                                          bool forward = false, double tol = 1e-7);

struct RadialResult {
    TreePoint point;
    bool truncated = false;
    double reached_time = 0.0;  // deepest/realized time if truncated
};

// The point at time s on the ray from z toward the distinguished open end
// (strictly decreasing time for backward trees, increasing when `forward`).
// Truncates at the deepest realized time on the ray.
RadialResult radial_point(const FiniteSpatialTree& t, const TreePoint& z, double s,
                          bool forward = false, double tol = 1e-7);

}  // namespace webtree
