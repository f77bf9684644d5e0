#include "webtree/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace webtree {

void LatticeConfig::validate() const {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("lattice: delta outside (0,1]");
    if (!(t_lo < t_hi)) throw std::invalid_argument("lattice: empty time window");
    if (mode == SpaceMode::circle) {
        const double n = 1.0 / delta;
        if (std::fabs(n - std::round(n)) > 1e-9)
            throw std::invalid_argument("lattice: circle mode needs 1/delta integer");
    } else {
        if (!(x_lo < x_hi)) throw std::invalid_argument("lattice: empty space window");
        const double lo = x_lo / delta, hi = x_hi / delta;
        if (std::fabs(lo - std::round(lo)) > 1e-6 || std::fabs(hi - std::round(hi)) > 1e-6)
            throw std::invalid_argument("lattice: x bounds must be multiples of delta");
    }
}

std::int64_t LatticeConfig::site_lo() const {
    return mode == SpaceMode::circle ? 0
                                     : static_cast<std::int64_t>(std::llround(x_lo / delta));
}

std::int64_t LatticeConfig::site_hi() const {
    return mode == SpaceMode::circle
               ? static_cast<std::int64_t>(std::llround(1.0 / delta)) - 1
               : static_cast<std::int64_t>(std::llround(x_hi / delta));
}

double LatticeConfig::site_x(std::int64_t s) const { return s * delta; }

ArrowField::ArrowField(LatticeConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    // Mean of four events per site per cell keeps cell generation cheap
    // relative to the walkers consuming them.
    cell_len_ = 2.0 / cfg_.gamma();
    const double span = cfg_.t_hi - cfg_.t_lo;
    n_cells_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(span / cell_len_)));
}

std::int64_t ArrowField::cell_of(double t) const {
    std::int64_t c = static_cast<std::int64_t>(std::floor((t - cfg_.t_lo) / cell_len_));
    return std::clamp<std::int64_t>(c, 0, n_cells_ - 1);
}

std::int64_t ArrowField::wrap_site(std::int64_t s) const {
    if (cfg_.mode != SpaceMode::circle) return s;
    const std::int64_t n = cfg_.n_sites();
    return ((s % n) + n) % n;
}

bool ArrowField::site_in_window(std::int64_t s) const {
    if (cfg_.mode == SpaceMode::circle) return true;
    return s >= cfg_.site_lo() && s <= cfg_.site_hi();
}

std::vector<std::pair<double, ArrowDir>> ArrowField::cell_events(std::int64_t site,
                                                                 std::int64_t cell) const {
    std::vector<std::pair<double, ArrowDir>> out;
    if (cell < 0 || cell >= n_cells_) return out;
    const double start = cell_start(cell);
    const double end = std::min(cell_start(cell + 1), cfg_.t_hi);
    const std::uint64_t site_key = static_cast<std::uint64_t>(site * 2 + (site < 0 ? 1 : 0));
    rng::Xoshiro256 eng(rng::mix(rng::mix(rng::mix(cfg_.seed, 0x6c61747469636531ULL), site_key),
                                 static_cast<std::uint64_t>(cell)));
    const double rate = 2.0 * cfg_.gamma();
    double t = start;
    while (true) {
        double gap = eng.exponential(rate);
        while (gap <= 0.0) {  // zero gap would tie with the previous event
            ++tie_redraws_;
            gap = eng.exponential(rate);
        }
        t += gap;
        if (t >= end) break;
        const ArrowDir d = (eng.next() & 1) ? ArrowDir::R : ArrowDir::L;
        out.emplace_back(t, d);
    }
    return out;
}

std::uint64_t ArrowField::estimated_events() const {
    const double per_site = 2.0 * cfg_.gamma() * (cfg_.t_hi - cfg_.t_lo);
    return static_cast<std::uint64_t>(per_site * static_cast<double>(cfg_.n_sites()));
}

std::vector<ArrowEvent> ArrowField::materialize(std::uint64_t max_events) const {
    const std::uint64_t est = estimated_events();
    if (est > max_events)
        throw resource_error("arrow field too large to materialize (about " +
                                 std::to_string(est) + " events; limit " +
                                 std::to_string(max_events) + ")",
                             est);
    std::vector<ArrowEvent> all;
    all.reserve(est + 16);
    for (std::int64_t s = cfg_.site_lo(); s <= cfg_.site_hi(); ++s)
        for (std::int64_t c = 0; c < n_cells_; ++c)
            for (const auto& [t, d] : cell_events(s, c)) all.push_back({t, s, d});
    std::sort(all.begin(), all.end(), [](const ArrowEvent& a, const ArrowEvent& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.site < b.site;
    });
    return all;
}

SiteCursor::SiteCursor(const ArrowField* f, std::int64_t site, double from,
                       bool descending)
    : f_(f), site_(site), descending_(descending), from_(from), done_(false) {
    cell_ = f_->cell_of(from);
    load_cell();
}

void SiteCursor::load_cell() {
    buf_ = f_->cell_events(site_, cell_);
    if (descending_) {
        idx_ = static_cast<std::ptrdiff_t>(buf_.size()) - 1;
        while (idx_ >= 0 && buf_[static_cast<std::size_t>(idx_)].first >= from_) --idx_;
    } else {
        idx_ = 0;
        while (idx_ < static_cast<std::ptrdiff_t>(buf_.size()) &&
               buf_[static_cast<std::size_t>(idx_)].first <= from_)
            ++idx_;
    }
}

std::optional<std::pair<double, ArrowDir>> SiteCursor::next() {
    if (done_) return std::nullopt;
    while (true) {
        if (descending_) {
            if (idx_ >= 0) {
                auto ev = buf_[static_cast<std::size_t>(idx_)];
                --idx_;
                return ev;
            }
            if (--cell_ < 0) {
                done_ = true;
                return std::nullopt;
            }
            buf_ = f_->cell_events(site_, cell_);
            idx_ = static_cast<std::ptrdiff_t>(buf_.size()) - 1;
        } else {
            if (idx_ < static_cast<std::ptrdiff_t>(buf_.size())) {
                auto ev = buf_[static_cast<std::size_t>(idx_)];
                ++idx_;
                return ev;
            }
            ++cell_;
            if (f_->cell_start(cell_) >= f_->config().t_hi) {
                done_ = true;
                return std::nullopt;
            }
            buf_ = f_->cell_events(site_, cell_);
            idx_ = 0;
        }
    }
}

DualCursor::DualCursor(const ArrowField* f, std::int64_t dual_site, double from,
                       bool ascending)
    : ascending_(ascending) {
    const std::int64_t left = f->wrap_site(dual_site);
    const std::int64_t right = f->wrap_site(dual_site + 1);
    left_ = SiteCursor(f, left, from, !ascending);
    right_ = SiteCursor(f, right, from, !ascending);
    pull_left();
    pull_right();
}

void DualCursor::pull_left() {
    // primal R events at site k become dual L events at the dual site
    while (true) {
        auto e = left_.next();
        if (!e) { pl_ = std::nullopt; return; }
        if (e->second == ArrowDir::R) { pl_ = {{e->first, ArrowDir::L}}; return; }
    }
}

void DualCursor::pull_right() {
    // primal L events at site k+1 become dual R events at the dual site
    while (true) {
        auto e = right_.next();
        if (!e) { pr_ = std::nullopt; return; }
        if (e->second == ArrowDir::L) { pr_ = {{e->first, ArrowDir::R}}; return; }
    }
}

std::optional<std::pair<double, ArrowDir>> DualCursor::next() {
    if (!pl_ && !pr_) return std::nullopt;
    bool take_left;
    if (!pl_) take_left = false;
    else if (!pr_) take_left = true;
    else if (ascending_) take_left = pl_->first <= pr_->first;
    else take_left = pl_->first >= pr_->first;
    auto ev = take_left ? *pl_ : *pr_;
    if (take_left) pull_left(); else pull_right();
    return ev;
}

std::vector<ArrowEvent> dual_events_between(const ArrowField& f, std::int64_t dual_site,
                                            double t0, double t1) {
    std::vector<ArrowEvent> out;
    DualCursor c(&f, dual_site, t0, true);
    while (auto e = c.next()) {
        if (e->first > t1) break;
        out.push_back({e->first, dual_site, e->second});
    }
    return out;
}

}  // namespace webtree
