#include "webtree/merge_forest.hpp"

#include <algorithm>
#include <stdexcept>

namespace webtree {

CompressedAncestry::CompressedAncestry(const MergeForest& forest,
                                       const std::vector<std::int32_t>& marked,
                                       double unmerged_tau)
    : unmerged_tau_(unmerged_tau) {
    const std::size_t n = forest.size();
    // 0 = untouched, 1 = on one walked path, 2 = junction
    std::vector<std::uint8_t> state(n, 0);
    for (std::int32_t m : marked) {
        std::int32_t x = m;
        while (x >= 0 && state[x] == 0) {
            state[x] = 1;
            x = forest.parent(x);
        }
        if (x >= 0) state[x] = 2;
    }
    std::vector<std::uint8_t> kept(n, 0);
    for (std::size_t i = 0; i < n; ++i) kept[i] = (state[i] == 2);
    for (std::int32_t m : marked) kept[m] = 1;

    std::vector<std::int32_t> comp_id(n, -1);
    for (std::size_t i = 0; i < n; ++i)
        if (kept[i]) {
            comp_id[i] = static_cast<std::int32_t>(nodes_.size());
            nodes_.emplace_back();
        }

    // Compressed parent + arrival: walk the unmarked chain above each kept
    // node; chain segments are disjoint so the total work is linear.
    for (std::size_t i = 0; i < n; ++i) {
        if (!kept[i]) continue;
        Node& nd = nodes_[comp_id[i]];
        std::int32_t y = static_cast<std::int32_t>(i);
        while (true) {
            const std::int32_t p = forest.parent(y);
            if (p < 0) {
                nd.parent = -1;
                nd.root = comp_id[i];  // provisional; fixed below
                break;
            }
            if (kept[p]) {
                nd.parent = comp_id[p];
                nd.arrival = forest.merge_time(y);
                break;
            }
            y = p;
        }
    }

    // Depths and component roots, iteratively to survive long chains.
    std::vector<std::int32_t> stack;
    for (std::size_t c = 0; c < nodes_.size(); ++c) {
        if (nodes_[c].root >= 0 || nodes_[c].depth != 0) continue;
        std::int32_t x = static_cast<std::int32_t>(c);
        stack.clear();
        while (x >= 0 && nodes_[x].root < 0) {
            stack.push_back(x);
            x = nodes_[x].parent;
        }
        std::int32_t root = x >= 0 ? nodes_[x].root : -1;
        std::int32_t depth = x >= 0 ? nodes_[x].depth : -1;
        while (!stack.empty()) {
            const std::int32_t y = stack.back();
            stack.pop_back();
            ++depth;
            nodes_[y].depth = depth;
            nodes_[y].root = root >= 0 ? root : y;
            if (root < 0) root = y;
        }
    }

    of_marked_.resize(marked.size());
    for (std::size_t i = 0; i < marked.size(); ++i) of_marked_[i] = comp_id[marked[i]];

    int levels = 1;
    while ((std::size_t(1) << levels) < std::max<std::size_t>(nodes_.size(), 2)) ++levels;
    up_.assign(levels, std::vector<std::int32_t>(nodes_.size(), -1));
    arr_up_.assign(levels, std::vector<double>(nodes_.size(), MergeForest::kAlive));
    for (std::size_t x = 0; x < nodes_.size(); ++x) {
        up_[0][x] = nodes_[x].parent;
        arr_up_[0][x] = nodes_[x].parent >= 0 ? nodes_[x].arrival : MergeForest::kAlive;
    }
    for (int k = 1; k < levels; ++k)
        for (std::size_t x = 0; x < nodes_.size(); ++x) {
            const std::int32_t h = up_[k - 1][x];
            if (h >= 0) {
                up_[k][x] = up_[k - 1][h];
                arr_up_[k][x] = std::min(arr_up_[k - 1][x], arr_up_[k - 1][h]);
            }
        }
}

std::int32_t CompressedAncestry::lift(std::int32_t x, std::int32_t levels) const {
    for (int k = 0; levels > 0 && x >= 0; ++k, levels >>= 1)
        if (levels & 1) x = up_[k][x];
    return x;
}

std::pair<double, bool> CompressedAncestry::tau_impl(std::int32_t ma, std::int32_t mb) const {
    std::int32_t a = of_marked_[ma];
    std::int32_t b = of_marked_[mb];
    if (a == b) return {MergeForest::kAlive, true};
    if (nodes_[a].root != nodes_[b].root) return {unmerged_tau_, false};
    double arr_a = MergeForest::kAlive, arr_b = MergeForest::kAlive;
    if (nodes_[a].depth > nodes_[b].depth) {
        const std::int32_t steps = nodes_[a].depth - nodes_[b].depth;
        for (int k = 0, s = steps; s > 0; ++k, s >>= 1)
            if (s & 1) { arr_a = std::min(arr_a, arr_up_[k][a]); a = up_[k][a]; }
    } else if (nodes_[b].depth > nodes_[a].depth) {
        const std::int32_t steps = nodes_[b].depth - nodes_[a].depth;
        for (int k = 0, s = steps; s > 0; ++k, s >>= 1)
            if (s & 1) { arr_b = std::min(arr_b, arr_up_[k][b]); b = up_[k][b]; }
    }
    if (a == b) {
        // one class is an ancestor of the other: the junction is `a` itself
        // and only the lifted side contributes an arrival time.
        return {std::min(arr_a, arr_b), true};
    }
    for (int k = static_cast<int>(up_.size()) - 1; k >= 0; --k) {
        if (up_[k][a] != up_[k][b]) {
            arr_a = std::min(arr_a, arr_up_[k][a]);
            arr_b = std::min(arr_b, arr_up_[k][b]);
            a = up_[k][a];
            b = up_[k][b];
        }
    }
    arr_a = std::min(arr_a, arr_up_[0][a]);
    arr_b = std::min(arr_b, arr_up_[0][b]);
    return {std::min(arr_a, arr_b), true};
}

double CompressedAncestry::tau(std::int32_t a, std::int32_t b) const {
    return tau_impl(a, b).first;
}

bool CompressedAncestry::joined(std::int32_t a, std::int32_t b) const {
    return tau_impl(a, b).second;
}

}  // namespace webtree
