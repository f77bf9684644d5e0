// AVX2 variants of the metric kernels.  Compiled with -mavx2 for this file
// only; callers reach them through the runtime-dispatched table.

#include "webtree/kernels.hpp"

#include <cmath>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define WEBTREE_HAVE_AVX2_TU 1
#endif

namespace webtree::simd {

bool avx2_supported() {
#if defined(WEBTREE_HAVE_AVX2_TU) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

#ifdef WEBTREE_HAVE_AVX2_TU
namespace {

const __m256d kAbsMask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

void min_inplace_avx2(double* dst, const double* src, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_loadu_pd(dst + i);
        __m256d s = _mm256_loadu_pd(src + i);
        _mm256_storeu_pd(dst + i, _mm256_min_pd(d, s));
    }
    for (; i < n; ++i)
        if (src[i] < dst[i]) dst[i] = src[i];
}

std::size_t argmax_avx2(const double* v, std::size_t n) {
    // Vector pass finds the maximum value; a scalar pass finds its first
    // index so ties resolve identically to the scalar kernel.
    std::size_t i = 0;
    __m256d vmax = _mm256_set1_pd(-HUGE_VAL);
    for (; i + 4 <= n; i += 4) vmax = _mm256_max_pd(vmax, _mm256_loadu_pd(v + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vmax);
    double m = lanes[0];
    for (int k = 1; k < 4; ++k)
        if (lanes[k] > m) m = lanes[k];
    for (; i < n; ++i)
        if (v[i] > m) m = v[i];
    for (std::size_t j = 0; j < n; ++j)
        if (v[j] == m) return j;
    return 0;  // all-NaN input; matches scalar behaviour of returning 0
}

double max_absdiff_avx2(const double* a, const double* b, std::size_t n) {
    __m256d vm = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        vm = _mm256_max_pd(vm, _mm256_and_pd(d, kAbsMask));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vm);
    double m = 0.0;
    for (int k = 0; k < 4; ++k)
        if (lanes[k] > m) m = lanes[k];
    for (; i < n; ++i) {
        const double d = std::fabs(a[i] - b[i]);
        if (d > m) m = d;
    }
    return m;
}

double max_abs_avx2(const double* v, std::size_t n) {
    __m256d vm = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        vm = _mm256_max_pd(vm, _mm256_and_pd(_mm256_loadu_pd(v + i), kAbsMask));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vm);
    double m = 0.0;
    for (int k = 0; k < 4; ++k)
        if (lanes[k] > m) m = lanes[k];
    for (; i < n; ++i) {
        const double d = std::fabs(v[i]);
        if (d > m) m = d;
    }
    return m;
}

std::size_t four_point_scan_avx2(double dij, double dik, double djk,
                                 const double* dkl, const double* djl,
                                 const double* dil, double tol,
                                 std::size_t n) {
    const __m256d vij = _mm256_set1_pd(dij);
    const __m256d vik = _mm256_set1_pd(dik);
    const __m256d vjk = _mm256_set1_pd(djk);
    const __m256d vtol = _mm256_set1_pd(tol);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d s1 = _mm256_add_pd(vij, _mm256_loadu_pd(dkl + i));
        const __m256d s2 = _mm256_add_pd(vik, _mm256_loadu_pd(djl + i));
        const __m256d s3 = _mm256_add_pd(vjk, _mm256_loadu_pd(dil + i));
        const __m256d hi = _mm256_max_pd(_mm256_max_pd(s1, s2), s3);
        const __m256d lo = _mm256_min_pd(_mm256_min_pd(s1, s2), s3);
        // mid = s1 + s2 + s3 - hi - lo computed with max/min only:
        const __m256d mid = _mm256_max_pd(_mm256_min_pd(s1, s2),
                                          _mm256_min_pd(_mm256_max_pd(s1, s2), s3));
        (void)lo;
        const __m256d bad = _mm256_cmp_pd(_mm256_sub_pd(hi, mid), vtol, _CMP_GT_OQ);
        const int mask = _mm256_movemask_pd(bad);
        if (mask) {
            // Redo the four lanes scalar-exactly to report the first index.
            return i + scalar_kernels().four_point_scan(dij, dik, djk, dkl + i,
                                                        djl + i, dil + i, tol, 4);
        }
    }
    const std::size_t r = scalar_kernels().four_point_scan(dij, dik, djk, dkl + i,
                                                           djl + i, dil + i, tol, n - i);
    return r == n - i ? n : i + r;
}

}  // namespace

const Kernels& avx2_kernels() {
    static const Kernels k{min_inplace_avx2, argmax_avx2, max_absdiff_avx2,
                           max_abs_avx2, four_point_scan_avx2};
    return k;
}
#else
const Kernels& avx2_kernels() { return scalar_kernels(); }
#endif

}  // namespace webtree::simd
