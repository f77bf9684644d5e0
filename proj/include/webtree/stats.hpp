#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace webtree::stats {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    std::size_t n = 0;
};

inline LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("least_squares: need >= 2 matching samples");
    const std::size_t n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw std::invalid_argument("least_squares: degenerate x range");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.n = n;
    if (n > 2) {
        double ss = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - (f.intercept + f.slope * x[i]);
            ss += r * r;
        }
        f.slope_stderr = std::sqrt(ss / double(n - 2) / sxx);
    }
    return f;
}

// Survival function of the Kolmogorov distribution, Q(lambda) = P(K > lambda).
inline double kolmogorov_q(double lambda) {
    if (lambda <= 0) return 1.0;
    double q = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        q += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(q, 0.0, 1.0);
}

struct KsResult {
    double statistic = 0.0;  // sup |F1 - F2|
    double p_value = 1.0;    // asymptotic
};

// One-sample KS of `sample` against a model CDF evaluated by `cdf`.  The sup
// may be restricted to values <= x_max (sub-CDF comparison for censored
// samples), which only makes the test conservative.
template <typename Cdf>
KsResult ks_one_sample(std::vector<double> sample, Cdf&& cdf,
                       double x_max = HUGE_VAL) {
    if (sample.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = double(sample.size());
    double d = 0.0;
    std::size_t i = 0;
    for (; i < sample.size() && sample[i] <= x_max; ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::fabs(double(i + 1) / n - f));
        d = std::max(d, std::fabs(double(i) / n - f));
    }
    if (i < sample.size()) {
        // censored tail: compare the sub-CDFs at the censoring point
        d = std::max(d, std::fabs(double(i) / n - cdf(x_max)));
    }
    KsResult r;
    r.statistic = d;
    r.p_value = kolmogorov_q(std::sqrt(n) * d);
    return r;
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = double(a.size()), nb = double(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(double(i) / na - double(j) / nb));
    }
    KsResult r;
    r.statistic = d;
    r.p_value = kolmogorov_q(std::sqrt(na * nb / (na + nb)) * d);
    return r;
}

struct MeanErr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

inline MeanErr mean_stderr(std::span<const double> v) {
    MeanErr m;
    m.n = v.size();
    if (v.empty()) return m;
    double s = 0;
    for (double x : v) s += x;
    m.mean = s / double(v.size());
    if (v.size() > 1) {
        double ss = 0;
        for (double x : v) ss += (x - m.mean) * (x - m.mean);
        m.stderr_ = std::sqrt(ss / double(v.size() - 1) / double(v.size()));
    }
    return m;
}

}  // namespace webtree::stats
