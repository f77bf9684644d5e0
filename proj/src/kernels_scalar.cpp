#include "webtree/kernels.hpp"

#include <cmath>

namespace webtree::simd {
namespace {

void min_inplace_scalar(double* dst, const double* src, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (src[i] < dst[i]) dst[i] = src[i];
}

std::size_t argmax_scalar(const double* v, std::size_t n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

double max_absdiff_scalar(const double* a, const double* b, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

double max_abs_scalar(const double* v, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::fabs(v[i]);
        if (d > m) m = d;
    }
    return m;
}

std::size_t four_point_scan_scalar(double dij, double dik, double djk,
                                   const double* dkl, const double* djl,
                                   const double* dil, double tol,
                                   std::size_t n) {
    for (std::size_t l = 0; l < n; ++l) {
        const double s1 = dij + dkl[l];
        const double s2 = dik + djl[l];
        const double s3 = dil[l] + djk;
        double hi = s1, mid = s2;
        if (mid > hi) { hi = s2; mid = s1; }
        if (s3 > hi) { mid = hi; hi = s3; }
        else if (s3 > mid) { mid = s3; }
        if (hi - mid > tol) return l;
    }
    return n;
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{min_inplace_scalar, argmax_scalar,
                           max_absdiff_scalar, max_abs_scalar,
                           four_point_scan_scalar};
    return k;
}

namespace detail {
const Kernels*& active_slot() {
    static const Kernels* slot = nullptr;
    return slot;
}
}  // namespace detail

const Kernels& active_kernels() {
    const Kernels*& slot = detail::active_slot();
    if (!slot) slot = avx2_supported() ? &avx2_kernels() : &scalar_kernels();
    return *slot;
}

void set_active_kernels(const Kernels& k) { detail::active_slot() = &k; }

}  // namespace webtree::simd
