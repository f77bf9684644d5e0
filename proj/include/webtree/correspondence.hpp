#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "webtree/spatial_tree.hpp"

namespace webtree {

// A relation between the point sets of two trees covering both sides.
struct Correspondence {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;

    bool covers(std::size_t n_left, std::size_t n_right) const;
    bool contains(std::uint32_t l, std::uint32_t r) const;
};

// sup over pairs of pairs of |d(z,w) - d'(z',w')|.
double distortion(const Correspondence& c, const FiniteMetricTree& left,
                  const FiniteMetricTree& right);

// Third summand of the compact metric: sup_n 2^{n a} of the dyadic-scale
// matched increments of the evaluation maps, with the one-sided convention
// when a scale is realized on only one side.
double holder_term(const Correspondence& c, const FiniteSpatialTree& left,
                   const FiniteSpatialTree& right);

// All three summands for a specific correspondence.
double correspondence_cost(const Correspondence& c, const FiniteSpatialTree& left,
                           const FiniteSpatialTree& right);

struct MetricReport {
    double value = 0.0;
    bool exact = false;       // true iff an exhaustive correspondence search ran
    double tail_bound = 0.0;  // e^{-r_max} for the weighted metric, else 0
    Correspondence witness;
};

enum class SearchMode { exact, heuristic, automatic };

inline constexpr std::size_t kExactLimit = 5;

// inf over correspondences containing (base, base') of the correspondence
// cost.  Exact mode enumerates every minimal pair cover (the infimum over all
// correspondences is attained there since the cost is monotone under adding
// pairs); it requires both sides to have at most kExactLimit points.
MetricReport delta_c(const FiniteSpatialTree& left, const FiniteSpatialTree& right,
                     SearchMode mode = SearchMode::automatic);

}  // namespace webtree
