// Slice-injection sampler for the ball of radius r of the discrete web tree.
// Fresh walkers enter at every lattice site at each slice time and coalesce in
// a single descending sweep; the classes surviving to mid-gap become sample
// points of the ancestral tree.  Only the visited cells of the arrow field are
// ever generated, which is what makes delta = 0.002 runs fit in memory.

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "webtree/lattice.hpp"
#include "webtree/merge_forest.hpp"
#include "webtree/walks.hpp"

namespace webtree {

namespace {

struct SiteStream {
    std::int64_t cell = -1;  // -1: not loaded yet
    std::vector<std::pair<double, ArrowDir>> buf;
    std::ptrdiff_t idx = -1;
    bool exhausted = false;

    // next event strictly below t at this site (descending scan; calls must
    // pass non-increasing t, which the sweep guarantees)
    std::optional<std::pair<double, ArrowDir>> next_below(const ArrowField& f,
                                                          std::int64_t site, double t) {
        if (exhausted) return std::nullopt;
        if (cell < 0) {
            cell = f.cell_of(t);
            buf = f.cell_events(site, cell);
            idx = static_cast<std::ptrdiff_t>(buf.size()) - 1;
        }
        while (true) {
            while (idx >= 0 && buf[static_cast<std::size_t>(idx)].first >= t) --idx;
            if (idx >= 0) {
                auto ev = buf[static_cast<std::size_t>(idx)];
                --idx;
                return ev;
            }
            if (--cell < 0) {
                exhausted = true;
                return std::nullopt;
            }
            buf = f.cell_events(site, cell);
            idx = static_cast<std::ptrdiff_t>(buf.size()) - 1;
        }
    }
};

struct HeapEv {
    double t;
    std::int32_t ofs;
    std::uint32_t serial;
    ArrowDir dir;
};

struct HeapLess {
    bool operator()(const HeapEv& a, const HeapEv& b) const {
        if (a.t != b.t) return a.t < b.t;  // pop largest time first
        return a.ofs < b.ofs;
    }
};

}  // namespace

FiniteMetricTree web_ball_tree(const BallParams& p) {
    if (p.r <= 0 || p.gap <= 0 || p.delta <= 0)
        throw std::invalid_argument("web_ball_tree: positive delta, r, gap required");
    const double W0 = p.halfwidth > 0 ? p.halfwidth : 4.0 * std::sqrt(p.r) + 1.0;
    const double W = std::ceil(W0 / p.delta) * p.delta;

    LatticeConfig cfg;
    cfg.delta = p.delta;
    cfg.t_lo = -p.r - 2.0 * p.gap;
    cfg.t_hi = p.r + p.gap;
    cfg.x_lo = -W;
    cfg.x_hi = W;
    cfg.mode = SpaceMode::line;
    cfg.seed = p.seed;
    const ArrowField field(cfg);

    const std::int64_t n_slices = std::llround(2.0 * p.r / p.gap);
    const std::int64_t j_base = std::llround(p.r / p.gap);
    const std::int32_t S = static_cast<std::int32_t>(cfg.n_sites());
    const std::int32_t ofs0 = static_cast<std::int32_t>(-cfg.site_lo());  // site 0

    std::vector<std::int32_t> cls(S, -1);
    std::vector<std::uint32_t> serial(S, 0);
    std::vector<SiteStream> stream(static_cast<std::size_t>(S));
    std::vector<HeapEv> heap;
    heap.reserve(static_cast<std::size_t>(S) * 2);
    const HeapLess less{};

    MergeForest forest;
    struct Cand {
        double t;
        std::int32_t node;
    };
    std::vector<Cand> cands;
    std::int32_t base_cls = -1;
    std::int32_t base_node = -1;

    const auto site_of_ofs = [&](std::int32_t o) {
        return cfg.site_lo() + static_cast<std::int64_t>(o);
    };

    const auto push_next = [&](std::int32_t o, double from) {
        auto e = stream[static_cast<std::size_t>(o)].next_below(field, site_of_ofs(o), from);
        if (e) {
            heap.push_back({e->first, o, serial[static_cast<std::size_t>(o)], e->second});
            std::push_heap(heap.begin(), heap.end(), less);
        }
    };

    const auto process_until = [&](double t_floor) {
        while (!heap.empty() && heap.front().t > t_floor) {
            std::pop_heap(heap.begin(), heap.end(), less);
            const HeapEv ev = heap.back();
            heap.pop_back();
            const auto o = static_cast<std::size_t>(ev.ofs);
            if (serial[o] != ev.serial || cls[o] < 0) continue;
            const std::int32_t c = cls[o];
            const std::int32_t to = ev.ofs + (ev.dir == ArrowDir::R ? 1 : -1);
            cls[o] = -1;
            ++serial[o];
            if (to < 0 || to >= S) continue;  // escaped the window: class retired
            const auto ot = static_cast<std::size_t>(to);
            if (cls[ot] >= 0) {
                forest.merge(c, cls[ot], ev.t);
            } else {
                cls[ot] = c;
                ++serial[ot];
                push_next(to, ev.t);
            }
        }
    };

    for (std::int64_t j = 0; j <= n_slices; ++j) {
        const double t_j = p.r - static_cast<double>(j) * p.gap;
        // inject fresh walkers at every vacant site
        for (std::int32_t o = 0; o < S; ++o) {
            if (cls[static_cast<std::size_t>(o)] >= 0) continue;
            cls[static_cast<std::size_t>(o)] = forest.new_class();
            ++serial[static_cast<std::size_t>(o)];
            push_next(o, t_j);
        }
        if (j == j_base) base_cls = cls[static_cast<std::size_t>(ofs0)];
        // collect the surviving classes at mid-gap as this slice's samples
        process_until(t_j - 0.5 * p.gap);
        for (std::int32_t o = 0; o < S; ++o)
            if (cls[static_cast<std::size_t>(o)] >= 0)
                cands.push_back({t_j, cls[static_cast<std::size_t>(o)]});
        if (j == j_base) base_node = forest.find(base_cls);
        // finish the gap
        process_until(t_j - p.gap);
    }

    if (base_node < 0) throw std::logic_error("web_ball_tree: base slice missing");

    // mark candidate classes and the base, build the compressed ancestry
    std::vector<std::int32_t> marked;
    marked.reserve(cands.size() + 1);
    for (const Cand& c : cands) marked.push_back(c.node);
    marked.push_back(base_node);
    std::sort(marked.begin(), marked.end());
    marked.erase(std::unique(marked.begin(), marked.end()), marked.end());
    std::vector<std::int32_t> marked_index(forest.size(), -1);
    for (std::size_t i = 0; i < marked.size(); ++i)
        marked_index[static_cast<std::size_t>(marked[i])] = static_cast<std::int32_t>(i);

    const double unmerged_tau = -(2.0 * p.r + 1.0);
    auto anc = std::make_shared<CompressedAncestry>(forest, marked, unmerged_tau);

    const std::int32_t base_m = marked_index[static_cast<std::size_t>(base_node)];
    const double base_t = p.r - static_cast<double>(j_base) * p.gap;

    std::vector<double> times;
    std::vector<std::int32_t> classes;
    times.push_back(base_t);
    classes.push_back(base_m);
    for (const Cand& c : cands) {
        const std::int32_t m = marked_index[static_cast<std::size_t>(c.node)];
        if (m == base_m && c.t == base_t) continue;  // the base itself
        const double tau = std::min({anc->tau(base_m, m), base_t, c.t});
        const double d = base_t + c.t - 2.0 * tau;
        if (d <= p.r) {
            times.push_back(c.t);
            classes.push_back(m);
        }
    }
    return FiniteMetricTree::from_ancestry(std::move(times), std::move(classes),
                                           std::move(anc), 0);
}

}  // namespace webtree
