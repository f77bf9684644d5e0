#pragma once

#include <cstdint>
#include <limits>
#include <vector>

// Merge history of a coalescing system.  Classes are created as walkers (or
// paths) appear and each class dies at most once by merging into another
// class at a recorded time.  Running time backward the merge times along any
// parent chain are strictly decreasing, so the history is a forest and the
// last time two classes agree is read off the lowest common ancestor.
//
// `compress` builds an LCA structure restricted to the classes that actually
// carry tree points; the full history can hold millions of short-lived
// classes while only a few tens of thousands are ever queried.

namespace webtree {

class MergeForest {
public:
    static constexpr double kAlive = std::numeric_limits<double>::infinity();

    std::int32_t new_class() {
        parent_.push_back(-1);
        merge_time_.push_back(kAlive);
        return static_cast<std::int32_t>(parent_.size()) - 1;
    }

    // `child` dies at `time`, its members continue as `into`.
    void merge(std::int32_t child, std::int32_t into, double time) {
        parent_[child] = into;
        merge_time_[child] = time;
    }

    bool alive(std::int32_t c) const { return parent_[c] < 0; }
    std::size_t size() const { return parent_.size(); }

    // Representative of c's class at the current end of the sweep.
    std::int32_t find(std::int32_t c) const {
        while (parent_[c] >= 0) c = parent_[c];
        return c;
    }

    std::int32_t parent(std::int32_t c) const { return parent_[c]; }
    double merge_time(std::int32_t c) const { return merge_time_[c]; }

private:
    std::vector<std::int32_t> parent_;
    std::vector<double> merge_time_;
};

// LCA structure over a set of marked classes, with chains of unmarked
// intermediate classes compressed away.  tau(a,b) is the last time the two
// classes agree, or `unmerged_tau` when their histories never join (window
// truncation); `joined` reports which case occurred.
class CompressedAncestry {
public:
    CompressedAncestry() = default;
    CompressedAncestry(const MergeForest& forest,
                       const std::vector<std::int32_t>& marked,
                       double unmerged_tau);

    // tau for the marked classes given by their positions in `marked`.
    double tau(std::int32_t a, std::int32_t b) const;
    bool joined(std::int32_t a, std::int32_t b) const;
    double unmerged_tau() const { return unmerged_tau_; }

private:
    struct Node {
        std::int32_t parent = -1;   // compressed parent
        double arrival = 0.0;       // time this path enters the parent node
        std::int32_t depth = 0;
        std::int32_t root = -1;
    };
    std::pair<double, bool> tau_impl(std::int32_t a, std::int32_t b) const;
    std::int32_t lift(std::int32_t x, std::int32_t levels) const;

    std::vector<Node> nodes_;                 // compressed forest
    std::vector<std::int32_t> of_marked_;     // marked index -> compressed node
    std::vector<std::vector<std::int32_t>> up_;  // binary lifting
    std::vector<std::vector<double>> arr_up_;    // min arrival along lifted path
    double unmerged_tau_ = 0.0;
};

}  // namespace webtree
