#include "webtree/correspondence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace webtree {

namespace {

constexpr int kMaxScale = 64;

// A_n = (2^-n, 2^-(n-1)], n >= 1; 0 means "no scale" (d = 0 or d > 1).
inline int scale_of(double d) {
    if (d <= 0.0 || d > 1.0) return 0;
    const int n = static_cast<int>(std::floor(-std::log2(d))) + 1;
    return n > kMaxScale ? 0 : n;
}

struct PairContext {
    const FiniteSpatialTree* L;
    const FiniteSpatialTree* R;
    std::vector<double> DL, DR;          // dense matrices
    std::vector<std::int8_t> SL, SR;     // per-pair dyadic scale
    std::vector<double> dMLt, dMLx, dMRt, dMRx;  // eval increments
    std::size_t nl = 0, nr = 0;
    std::array<double, kMaxScale + 1> one_sided{};  // convention term per scale
    std::array<bool, kMaxScale + 1> left_has{}, right_has{};
    std::array<double, kMaxScale + 1> weight{};     // 2^{n alpha}
    int max_scale = 0;

    PairContext(const FiniteSpatialTree& left, const FiniteSpatialTree& right)
        : L(&left), R(&right), nl(left.size()), nr(right.size()) {
        if (left.alpha() != right.alpha())
            throw std::invalid_argument("holder term: alpha mismatch");
        const FiniteMetricTree ml = left.tree().materialized();
        const FiniteMetricTree mr = right.tree().materialized();
        DL = ml.matrix();
        DR = mr.matrix();
        SL.resize(nl * nl);
        SR.resize(nr * nr);
        dMLt.resize(nl * nl);
        dMLx.resize(nl * nl);
        dMRt.resize(nr * nr);
        dMRx.resize(nr * nr);
        std::array<double, kMaxScale + 1> lmax{}, rmax{};
        for (std::size_t i = 0; i < nl; ++i)
            for (std::size_t j = 0; j < nl; ++j) {
                const int s = scale_of(DL[i * nl + j]);
                SL[i * nl + j] = static_cast<std::int8_t>(s);
                const auto &a = left.eval(i), &b = left.eval(j);
                dMLt[i * nl + j] = a.t - b.t;
                dMLx[i * nl + j] = left.mode() == SpaceMode::circle
                                       ? circle_delta(a.x, b.x)
                                       : a.x - b.x;
                if (s > 0) {
                    left_has[s] = true;
                    lmax[s] = std::max(lmax[s], std::hypot(dMLt[i * nl + j], dMLx[i * nl + j]));
                    max_scale = std::max(max_scale, s);
                }
            }
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nr; ++j) {
                const int s = scale_of(DR[i * nr + j]);
                SR[i * nr + j] = static_cast<std::int8_t>(s);
                const auto &a = right.eval(i), &b = right.eval(j);
                dMRt[i * nr + j] = a.t - b.t;
                dMRx[i * nr + j] = right.mode() == SpaceMode::circle
                                       ? circle_delta(a.x, b.x)
                                       : a.x - b.x;
                if (s > 0) {
                    right_has[s] = true;
                    rmax[s] = std::max(rmax[s], std::hypot(dMRt[i * nr + j], dMRx[i * nr + j]));
                    max_scale = std::max(max_scale, s);
                }
            }
        for (int n = 1; n <= kMaxScale; ++n) {
            weight[n] = std::pow(2.0, n * left.alpha());
            if (left_has[n] && !right_has[n]) one_sided[n] = lmax[n];
            else if (!left_has[n] && right_has[n]) one_sided[n] = rmax[n];
        }
    }

    double cost(const std::pair<std::uint32_t, std::uint32_t>* p, std::size_t m) const {
        double dis = 0.0, supM = 0.0;
        std::array<double, kMaxScale + 1> both{};
        for (std::size_t u = 0; u < m; ++u) {
            const std::uint32_t zl = p[u].first, zr = p[u].second;
            const auto &el = L->eval(zl), &er = R->eval(zr);
            const double dxm = L->mode() == SpaceMode::circle
                                   ? circle_dist(el.x, er.x)
                                   : el.x - er.x;
            supM = std::max(supM, std::hypot(el.t - er.t, dxm));
            for (std::size_t v = u + 1; v < m; ++v) {
                const std::uint32_t wl = p[v].first, wr = p[v].second;
                const double dl = DL[zl * nl + wl];
                const double dr = DR[zr * nr + wr];
                dis = std::max(dis, std::fabs(dl - dr));
                const int s = SL[zl * nl + wl];
                if (s > 0 && s == SR[zr * nr + wr]) {
                    const double ht = dMLt[zl * nl + wl] - dMRt[zr * nr + wr];
                    const double hx = dMLx[zl * nl + wl] - dMRx[zr * nr + wr];
                    both[s] = std::max(both[s], ht * ht + hx * hx);
                }
            }
        }
        double holder = 0.0;
        for (int n = 1; n <= max_scale; ++n) {
            double term = one_sided[n];
            if (left_has[n] && right_has[n]) term = std::sqrt(both[n]);
            if (term > 0.0) holder = std::max(holder, weight[n] * term);
        }
        return 0.5 * dis + supM + holder;
    }

    double holder_only(const std::pair<std::uint32_t, std::uint32_t>* p,
                       std::size_t m) const {
        std::array<double, kMaxScale + 1> both{};
        for (std::size_t u = 0; u < m; ++u)
            for (std::size_t v = u + 1; v < m; ++v) {
                const int s = SL[p[u].first * nl + p[v].first];
                if (s > 0 && s == SR[p[u].second * nr + p[v].second]) {
                    const double ht = dMLt[p[u].first * nl + p[v].first] -
                                      dMRt[p[u].second * nr + p[v].second];
                    const double hx = dMLx[p[u].first * nl + p[v].first] -
                                      dMRx[p[u].second * nr + p[v].second];
                    both[s] = std::max(both[s], ht * ht + hx * hx);
                }
            }
        double holder = 0.0;
        for (int n = 1; n <= max_scale; ++n) {
            double term = one_sided[n];
            if (left_has[n] && right_has[n]) term = std::sqrt(both[n]);
            if (term > 0.0) holder = std::max(holder, weight[n] * term);
        }
        return holder;
    }
};

}  // namespace

bool Correspondence::covers(std::size_t n_left, std::size_t n_right) const {
    std::vector<bool> l(n_left, false), r(n_right, false);
    for (const auto& [a, b] : pairs) {
        if (a >= n_left || b >= n_right) return false;
        l[a] = true;
        r[b] = true;
    }
    for (bool v : l)
        if (!v) return false;
    for (bool v : r)
        if (!v) return false;
    return true;
}

bool Correspondence::contains(std::uint32_t l, std::uint32_t r) const {
    for (const auto& [a, b] : pairs)
        if (a == l && b == r) return true;
    return false;
}

double distortion(const Correspondence& c, const FiniteMetricTree& left,
                  const FiniteMetricTree& right) {
    if (!c.covers(left.size(), right.size()))
        throw std::invalid_argument("distortion: relation does not cover both point sets");
    double dis = 0.0;
    for (std::size_t u = 0; u < c.pairs.size(); ++u)
        for (std::size_t v = u + 1; v < c.pairs.size(); ++v) {
            const double dl = left.dist(c.pairs[u].first, c.pairs[v].first);
            const double dr = right.dist(c.pairs[u].second, c.pairs[v].second);
            dis = std::max(dis, std::fabs(dl - dr));
        }
    return dis;
}

double holder_term(const Correspondence& c, const FiniteSpatialTree& left,
                   const FiniteSpatialTree& right) {
    if (!c.covers(left.size(), right.size()))
        throw std::invalid_argument("holder_term: relation does not cover both point sets");
    PairContext ctx(left, right);
    return ctx.holder_only(c.pairs.data(), c.pairs.size());
}

double correspondence_cost(const Correspondence& c, const FiniteSpatialTree& left,
                           const FiniteSpatialTree& right) {
    if (!c.covers(left.size(), right.size()))
        throw std::invalid_argument("correspondence cost: relation does not cover both sides");
    PairContext ctx(left, right);
    return ctx.cost(c.pairs.data(), c.pairs.size());
}

namespace {

MetricReport delta_c_exact(const FiniteSpatialTree& L, const FiniteSpatialTree& R) {
    const std::size_t nl = L.size(), nr = R.size();
    PairContext ctx(L, R);
    const std::uint32_t bl = static_cast<std::uint32_t>(L.base());
    const std::uint32_t br = static_cast<std::uint32_t>(R.base());

    // C = graph(f) u graph(g)^T u {(base, base')}; every minimal pair cover
    // arises this way and the cost only grows when pairs are added.
    std::vector<std::uint32_t> f(nl, 0), g(nr, 0);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> buf(nl + nr + 1);
    MetricReport best;
    best.value = HUGE_VAL;
    best.exact = true;
    while (true) {
        // assemble and evaluate
        std::size_t m = 0;
        for (std::uint32_t i = 0; i < nl; ++i) buf[m++] = {i, f[i]};
        for (std::uint32_t j = 0; j < nr; ++j) buf[m++] = {g[j], j};
        buf[m++] = {bl, br};
        const double v = ctx.cost(buf.data(), m);
        if (v < best.value) {
            best.value = v;
            best.witness.pairs.assign(buf.begin(), buf.begin() + m);
        }
        // odometer over (f, g)
        std::size_t k = 0;
        for (; k < nl; ++k) {
            if (++f[k] < nr) break;
            f[k] = 0;
        }
        if (k < nl) continue;
        for (k = 0; k < nr; ++k) {
            if (++g[k] < nl) break;
            g[k] = 0;
        }
        if (k == nr) break;
    }
    return best;
}

MetricReport delta_c_heuristic(const FiniteSpatialTree& L, const FiniteSpatialTree& R) {
    const std::size_t nl = L.size(), nr = R.size();
    PairContext ctx(L, R);
    const std::uint32_t bl = static_cast<std::uint32_t>(L.base());
    const std::uint32_t br = static_cast<std::uint32_t>(R.base());

    std::vector<std::uint32_t> f(nl), g(nr);
    for (std::size_t i = 0; i < nl; ++i) {
        double bestd = HUGE_VAL;
        for (std::size_t j = 0; j < nr; ++j) {
            const double d = eval_dist(L.eval(i), R.eval(j), L.mode());
            if (d < bestd) { bestd = d; f[i] = static_cast<std::uint32_t>(j); }
        }
    }
    for (std::size_t j = 0; j < nr; ++j) {
        double bestd = HUGE_VAL;
        for (std::size_t i = 0; i < nl; ++i) {
            const double d = eval_dist(L.eval(i), R.eval(j), L.mode());
            if (d < bestd) { bestd = d; g[j] = static_cast<std::uint32_t>(i); }
        }
    }
    f[bl] = br;
    g[br] = bl;

    std::vector<std::pair<std::uint32_t, std::uint32_t>> buf(nl + nr + 1);
    const auto eval_fg = [&]() {
        std::size_t m = 0;
        for (std::uint32_t i = 0; i < nl; ++i) buf[m++] = {i, f[i]};
        for (std::uint32_t j = 0; j < nr; ++j) buf[m++] = {g[j], j};
        buf[m++] = {bl, br};
        return ctx.cost(buf.data(), m);
    };

    double cur = eval_fg();
    for (int pass = 0; pass < 4; ++pass) {
        bool improved = false;
        for (std::size_t i = 0; i < nl; ++i) {
            const std::uint32_t keep = f[i];
            std::uint32_t arg = keep;
            for (std::uint32_t j = 0; j < nr; ++j) {
                if (j == keep) continue;
                f[i] = j;
                const double v = eval_fg();
                if (v < cur) { cur = v; arg = j; improved = true; }
            }
            f[i] = arg;
        }
        for (std::size_t j = 0; j < nr; ++j) {
            const std::uint32_t keep = g[j];
            std::uint32_t arg = keep;
            for (std::uint32_t i = 0; i < nl; ++i) {
                if (i == keep) continue;
                g[j] = static_cast<std::uint32_t>(i);
                const double v = eval_fg();
                if (v < cur) { cur = v; arg = static_cast<std::uint32_t>(i); improved = true; }
            }
            g[j] = arg;
        }
        if (!improved) break;
    }
    MetricReport rep;
    rep.value = eval_fg();
    rep.exact = false;
    rep.witness.pairs.assign(buf.begin(), buf.end());
    return rep;
}

}  // namespace

MetricReport delta_c(const FiniteSpatialTree& left, const FiniteSpatialTree& right,
                     SearchMode mode) {
    const bool small = left.size() <= kExactLimit && right.size() <= kExactLimit;
    if (mode == SearchMode::exact && !small)
        throw std::length_error("delta_c: exact search limited to " +
                                std::to_string(kExactLimit) + " points per side");
    if (mode == SearchMode::automatic) mode = small ? SearchMode::exact : SearchMode::heuristic;
    return mode == SearchMode::exact ? delta_c_exact(left, right)
                                     : delta_c_heuristic(left, right);
}

}  // namespace webtree
