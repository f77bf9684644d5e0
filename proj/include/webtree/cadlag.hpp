#pragma once

#include <functional>
#include <span>
#include <vector>

#include "webtree/spatial_tree.hpp"

namespace webtree {

// Nondecreasing right-continuous step function on [-1, oo), identically 0
// before its first breakpoint.
class MonotoneCadlag {
public:
    MonotoneCadlag() = default;
    static MonotoneCadlag from_steps(std::vector<double> times,
                                     std::vector<double> values);

    double value(double t) const;       // right-continuous evaluation
    double left_value(double t) const;  // limit from the left
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& values() const { return values_; }
    double last_time() const { return times_.empty() ? -1.0 : times_.back(); }
    double final_value() const { return values_.empty() ? 0.0 : values_.back(); }

private:
    std::vector<double> times_;   // strictly increasing, >= -1
    std::vector<double> values_;  // nondecreasing, >= 0
};

// b(r) = sup { d(base, z) : M(z) in Lambda_r }, evaluated on the realized
// samples; the step breakpoints are induced by the eval values.  Extra grid
// radii may be merged in as explicit (value-preserving) breakpoints.
MonotoneCadlag properness_map(const FiniteSpatialTree& t,
                              std::span<const double> r_grid = {});

// M1 distance between the restrictions to [-1, T], computed as the Hausdorff
// distance between completed graphs under the max metric.  For monotone step
// functions this equals the parametric-representation infimum; the test suite
// checks it against an independent Frechet oracle.
double m1_bounded(const MonotoneCadlag& f, const MonotoneCadlag& g, double T);

// d_M1(f,g) = int_0^oo e^{-t} (1 ^ m1_bounded(f,g,t)) dt, integrated exactly
// over the piecewise-linear integrand (adaptive subdivision).
double m1_distance(const MonotoneCadlag& f, const MonotoneCadlag& g);

// Same weighted integral with a caller-supplied bounded distance; lets the
// tests run the oracle through the identical quadrature.
double m1_integral(const MonotoneCadlag& f, const MonotoneCadlag& g,
                   const std::function<double(const MonotoneCadlag&,
                                              const MonotoneCadlag&, double)>& dc);

// Distance from a point to the completed graph of g on [-1, T] in the max
// metric (exposed for the oracle tests).
double dist_to_graph(double t, double y, const MonotoneCadlag& g, double T);

}  // namespace webtree
