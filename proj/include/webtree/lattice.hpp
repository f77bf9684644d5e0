#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "webtree/rng.hpp"
#include "webtree/spatial_tree.hpp"

namespace webtree {

struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& what, std::uint64_t estimate_)
        : std::runtime_error(what), estimate(estimate_) {}
    std::uint64_t estimate = 0;
};

struct LatticeConfig {
    double delta = 0.1;
    double t_lo = -1.0, t_hi = 0.0;
    double x_lo = -2.0, x_hi = 2.0;  // ignored in circle mode
    SpaceMode mode = SpaceMode::line;
    std::uint64_t seed = 0;

    void validate() const;
    double gamma() const { return 1.0 / (2.0 * delta * delta); }
    // integer site range (line: x = site * delta; circle: site in [0, n))
    std::int64_t site_lo() const;
    std::int64_t site_hi() const;
    std::int64_t n_sites() const { return site_hi() - site_lo() + 1; }
    double site_x(std::int64_t s) const;
};

enum class ArrowDir : std::uint8_t { L = 0, R = 1 };

struct ArrowEvent {
    double t = 0.0;
    std::int64_t site = 0;
    ArrowDir dir = ArrowDir::L;
};

// Realization of the two Poisson arrow measures.  Events are generated on
// demand per (site, time-cell) from substreams keyed by (seed, site, cell),
// so any scan order yields the same realization and only the visited part of
// the window is ever materialized.  Each site's merged L/R stream is strictly
// increasing by construction (zero gaps are redrawn and counted).
class ArrowField {
public:
    explicit ArrowField(LatticeConfig cfg);

    const LatticeConfig& config() const { return cfg_; }
    double gamma() const { return cfg_.gamma(); }

    // Events of one site within one cell, in increasing time order.
    std::vector<std::pair<double, ArrowDir>> cell_events(std::int64_t site,
                                                         std::int64_t cell) const;

    std::int64_t cell_of(double t) const;
    double cell_start(std::int64_t cell) const { return cfg_.t_lo + cell * cell_len_; }
    double cell_len() const { return cell_len_; }

    std::uint64_t tie_redraws() const { return tie_redraws_; }
    std::uint64_t estimated_events() const;

    // Full materialization for persistence and desk-scale sweeps; throws
    // resource_error with the estimate when the window is too large.
    std::vector<ArrowEvent> materialize(std::uint64_t max_events = 20'000'000) const;

    // circle wrap-around for site indices
    std::int64_t wrap_site(std::int64_t s) const;
    bool site_in_window(std::int64_t s) const;

private:
    LatticeConfig cfg_;
    double cell_len_ = 0.0;
    std::int64_t n_cells_ = 0;
    mutable std::uint64_t tie_redraws_ = 0;
};

// Scans one primal site's events in decreasing or increasing time.
class SiteCursor {
public:
    SiteCursor() = default;
    SiteCursor(const ArrowField* f, std::int64_t site, double from, bool descending);

    // next event strictly beyond the current position in scan direction
    std::optional<std::pair<double, ArrowDir>> next();

private:
    void load_cell();
    const ArrowField* f_ = nullptr;
    std::int64_t site_ = 0;
    std::int64_t cell_ = 0;
    bool descending_ = true;
    double from_ = 0.0;
    std::vector<std::pair<double, ArrowDir>> buf_;
    std::ptrdiff_t idx_ = 0;
    bool done_ = true;
};

// Ascending scan of one dual site's events.  The dual site k sits at
// x = (k + 1/2) delta; its L events are the R events of primal site k shifted
// by +delta/2 and its R events are the L events of primal site k+1 shifted by
// -delta/2.  No new randomness is involved.
class DualCursor {
public:
    DualCursor() = default;
    DualCursor(const ArrowField* f, std::int64_t dual_site, double from,
               bool ascending = true);
    std::optional<std::pair<double, ArrowDir>> next();

private:
    void pull_left();
    void pull_right();
    SiteCursor left_, right_;  // primal k (R->L̂) and k+1 (L->R̂)
    std::optional<std::pair<double, ArrowDir>> pl_, pr_;
    bool ascending_ = true;
};

// Dual field events of one dual cell, for materialization-style consumers.
std::vector<ArrowEvent> dual_events_between(const ArrowField& f, std::int64_t dual_site,
                                            double t0, double t1);

}  // namespace webtree
