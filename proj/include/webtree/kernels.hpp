#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

// Data-parallel inner loops shared by the metric code paths.  Each kernel has
// a scalar reference implementation and an AVX2 variant; the active set is
// chosen once at runtime from CPUID.  All kernels are exact (min/max/add only,
// no reassociation of sums), so the variants agree bit-for-bit and the test
// suite asserts exact equivalence.

namespace webtree::simd {

struct Kernels {
    // dst[i] = min(dst[i], src[i])
    void (*min_inplace)(double* dst, const double* src, std::size_t n);
    // index of the maximum element (first occurrence); n must be >= 1
    std::size_t (*argmax)(const double* v, std::size_t n);
    // max_i |a[i] - b[i]|
    double (*max_absdiff)(const double* a, const double* b, std::size_t n);
    // max_i |v[i]|
    double (*max_abs)(const double* v, std::size_t n);
    // Four-point condition scan over l for a fixed (i,j,k) triple:
    //   s1 = dij + dkl[l], s2 = dik + djl[l], s3 = dil[l] + djk
    // Returns the first l in [0,n) where the largest of {s1,s2,s3} exceeds the
    // second largest by more than tol, or n if none does.
    std::size_t (*four_point_scan)(double dij, double dik, double djk,
                                   const double* dkl, const double* djl,
                                   const double* dil, double tol,
                                   std::size_t n);
};

const Kernels& scalar_kernels();
const Kernels& avx2_kernels();   // valid only if avx2_supported()
bool avx2_supported();

// Kernels selected at startup: AVX2 when the CPU has it, scalar otherwise.
const Kernels& active_kernels();

// Force a specific set (used by the equivalence tests).
void set_active_kernels(const Kernels& k);

}  // namespace webtree::simd
