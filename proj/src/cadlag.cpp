#include "webtree/cadlag.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace webtree {

MonotoneCadlag MonotoneCadlag::from_steps(std::vector<double> times,
                                          std::vector<double> values) {
    if (times.size() != values.size())
        throw std::invalid_argument("cadlag: times/values size mismatch");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || !std::isfinite(values[i]))
            throw std::invalid_argument("cadlag: non-finite entry");
        if (times[i] < -1.0)
            throw std::invalid_argument("cadlag: breakpoint before -1");
        if (values[i] < 0.0)
            throw std::invalid_argument("cadlag: negative value");
        if (i > 0 && times[i] <= times[i - 1])
            throw std::invalid_argument("cadlag: breakpoints not increasing");
        if (i > 0 && values[i] < values[i - 1])
            throw std::invalid_argument("cadlag: values not monotone");
    }
    MonotoneCadlag f;
    f.times_ = std::move(times);
    f.values_ = std::move(values);
    return f;
}

double MonotoneCadlag::value(double t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return 0.0;
    return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double MonotoneCadlag::left_value(double t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return 0.0;
    return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

MonotoneCadlag properness_map(const FiniteSpatialTree& t,
                              std::span<const double> r_grid) {
    const std::size_t n = t.size();
    std::vector<double> from_base(n);
    t.tree().dist_row(t.base(), from_base.data());
    std::map<double, double> step;  // covering radius -> max tree distance
    for (std::size_t i = 0; i < n; ++i) {
        const SpacePoint& e = t.eval(i);
        const double r = t.mode() == SpaceMode::circle
                             ? std::fabs(e.t)
                             : std::max(std::fabs(e.t), std::fabs(e.x));
        auto [it, fresh] = step.emplace(r, from_base[i]);
        if (!fresh) it->second = std::max(it->second, from_base[i]);
    }
    for (double r : r_grid)
        if (r >= 0.0) step.emplace(r, 0.0);
    std::vector<double> times, values;
    double run = 0.0;
    for (const auto& [r, v] : step) {
        run = std::max(run, v);
        if (!values.empty() && values.back() == run) continue;
        times.push_back(r);
        values.push_back(run);
    }
    return MonotoneCadlag::from_steps(std::move(times), std::move(values));
}

namespace {

// upper/lower envelope of the completed graph of g at time t (t clamped to
// [-1, T] by the callers).
inline double upper_env(const MonotoneCadlag& g, double t) { return g.value(t); }
inline double lower_env(const MonotoneCadlag& g, double t) { return g.left_value(t); }

}  // namespace

double dist_to_graph(double t, double y, const MonotoneCadlag& g, double T) {
    // A point is within eps of the connected monotone graph iff its eps-box
    // meets it, i.e. g(min(t+eps,T)) >= y-eps and g((max(t-eps,-1))-) <= y+eps.
    // Both conditions are monotone in eps; each infimum is the minimum over
    // the flat pieces of max(piece entry radius, vertical gap on the piece).
    const auto& bt = g.times();
    const auto& bv = g.values();

    double eps1 = std::max(0.0, y - upper_env(g, t));
    for (std::size_t k = 0; k < bt.size(); ++k) {
        if (bt[k] <= t) continue;
        if (bt[k] > T) break;
        eps1 = std::min(eps1, std::max(bt[k] - t, y - bv[k]));
    }
    eps1 = std::min(eps1, std::max(T - t, y - g.value(T)));
    eps1 = std::max(eps1, 0.0);

    double eps2 = std::max(0.0, lower_env(g, t) - y);
    for (std::size_t k = 0; k < bt.size(); ++k) {
        if (bt[k] > t) break;
        const double prev = k == 0 ? 0.0 : bv[k - 1];
        eps2 = std::min(eps2, std::max(t - bt[k], prev - y));
    }
    eps2 = std::min(eps2, std::max(t + 1.0, -y));
    eps2 = std::max(eps2, 0.0);

    return std::max(eps1, eps2);
}

double m1_bounded(const MonotoneCadlag& f, const MonotoneCadlag& g, double T) {
    const auto corners = [&](const MonotoneCadlag& h) {
        std::vector<std::pair<double, double>> c;
        c.emplace_back(-1.0, 0.0);
        const auto& bt = h.times();
        const auto& bv = h.values();
        for (std::size_t k = 0; k < bt.size(); ++k) {
            if (bt[k] > T) break;
            const double prev = k == 0 ? 0.0 : bv[k - 1];
            c.emplace_back(bt[k], prev);
            c.emplace_back(bt[k], bv[k]);
        }
        c.emplace_back(T, h.value(T));
        return c;
    };
    double d = 0.0;
    for (const auto& [t, y] : corners(f)) d = std::max(d, dist_to_graph(t, y, g, T));
    for (const auto& [t, y] : corners(g)) d = std::max(d, dist_to_graph(t, y, f, T));
    return d;
}

namespace {

double integrate_exp_linear(double a, double b, double fa, double fb) {
    // integral of e^{-t} ell(t) with ell linear through (a,fa),(b,fb),
    // with the integrand capped at 1 handled by splitting at the crossing.
    if (b <= a) return 0.0;
    const double slope = (fb - fa) / (b - a);
    const auto piece = [&](double lo, double hi, double flo, double sl) {
        // int_lo^hi e^{-t} (flo + sl (t-lo)) dt
        const double alpha = flo - sl * lo;
        const double beta = sl;
        const auto F = [&](double t) { return -std::exp(-t) * (alpha + beta * t + beta); };
        return F(hi) - F(lo);
    };
    const bool ca = fa >= 1.0, cb = fb >= 1.0;
    if (ca && cb) return std::exp(-a) - std::exp(-b);
    if (!ca && !cb) return piece(a, b, fa, slope);
    const double tc = a + (1.0 - fa) / slope;  // crossing of ell = 1
    if (ca) return (std::exp(-a) - std::exp(-tc)) + piece(tc, b, 1.0, slope);
    return piece(a, tc, fa, slope) + (std::exp(-tc) - std::exp(-b));
}

void integrate_adaptive(const std::function<double(double)>& h, double a, double b,
                        double fa, double fb, int depth, double& acc) {
    const double mid = 0.5 * (a + b);
    const double fm = h(mid);
    if (depth <= 0 || (std::fabs(fm - 0.5 * (fa + fb)) <= 1e-12 &&
                       b - a < 0.5)) {
        acc += integrate_exp_linear(a, mid, fa, fm);
        acc += integrate_exp_linear(mid, b, fm, fb);
        return;
    }
    integrate_adaptive(h, a, mid, fa, fm, depth - 1, acc);
    integrate_adaptive(h, mid, b, fm, fb, depth - 1, acc);
}

}  // namespace

double m1_integral(const MonotoneCadlag& f, const MonotoneCadlag& g,
                   const std::function<double(const MonotoneCadlag&,
                                              const MonotoneCadlag&, double)>& dc) {
    // Knots where the integrand can kink: both breakpoint sets, plus a tail
    // point after which the bounded distance is constant.
    std::vector<double> knots{0.0};
    for (double t : f.times())
        if (t > 0) knots.push_back(t);
    for (double t : g.times())
        if (t > 0) knots.push_back(t);
    const double span = std::max({1.0, f.final_value(), g.final_value()});
    const double tail = std::max({f.last_time(), g.last_time(), 0.0}) + span + 2.0;
    knots.push_back(tail);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    const std::function<double(double)> h = [&](double t) {
        return std::min(1.0, dc(f, g, t));
    };
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const double a = knots[k], b = knots[k + 1];
        integrate_adaptive(h, a, b, h(a), h(b), 24, acc);
    }
    // constant tail
    acc += std::exp(-tail) * std::min(1.0, dc(f, g, tail));
    return acc;
}

double m1_distance(const MonotoneCadlag& f, const MonotoneCadlag& g) {
    return m1_integral(f, g, [](const MonotoneCadlag& a, const MonotoneCadlag& b,
                                double t) { return m1_bounded(a, b, t); });
}

}  // namespace webtree
