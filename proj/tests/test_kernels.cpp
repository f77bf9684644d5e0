#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "webtree/kernels.hpp"
#include "webtree/rng.hpp"

using namespace webtree;

namespace {
std::vector<double> random_vec(std::size_t n, std::uint64_t seed, double scale = 1.0) {
    rng::Xoshiro256 eng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = (eng.uniform() - 0.5) * scale;
    return v;
}
}  // namespace

TEST_CASE("scalar and avx2 kernels agree exactly") {
    if (!simd::avx2_supported()) return;
    const auto& sc = simd::scalar_kernels();
    const auto& vx = simd::avx2_kernels();
    for (std::size_t n : {1u, 3u, 4u, 7u, 8u, 33u, 100u, 1001u}) {
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            auto a = random_vec(n, seed, 10.0);
            auto b = random_vec(n, seed + 100, 10.0);
            CHECK(sc.max_absdiff(a.data(), b.data(), n) ==
                  vx.max_absdiff(a.data(), b.data(), n));
            CHECK(sc.max_abs(a.data(), n) == vx.max_abs(a.data(), n));
            CHECK(sc.argmax(a.data(), n) == vx.argmax(a.data(), n));
            auto d1 = a, d2 = a;
            sc.min_inplace(d1.data(), b.data(), n);
            vx.min_inplace(d2.data(), b.data(), n);
            CHECK(d1 == d2);
            auto dkl = random_vec(n, seed + 7, 3.0);
            auto djl = random_vec(n, seed + 8, 3.0);
            auto dil = random_vec(n, seed + 9, 3.0);
            for (double tol : {1e-9, 0.5, 2.0}) {
                CHECK(sc.four_point_scan(1.0, 0.7, 1.3, dkl.data(), djl.data(),
                                         dil.data(), tol, n) ==
                      vx.four_point_scan(1.0, 0.7, 1.3, dkl.data(), djl.data(),
                                         dil.data(), tol, n));
            }
        }
    }
}

TEST_CASE("argmax handles duplicates and single element") {
    const auto& k = simd::active_kernels();
    std::vector<double> v{2.0, 5.0, 5.0, 1.0};
    CHECK(k.argmax(v.data(), v.size()) == 1);
    CHECK(k.argmax(v.data(), 1) == 0);
}

TEST_CASE("four_point_scan finds the first violating index") {
    const auto& k = simd::active_kernels();
    // arrange so that l=2 is the first violation
    std::vector<double> dkl{0.0, 0.1, 5.0, 6.0};
    std::vector<double> djl{1.0, 1.0, 1.0, 1.0};
    std::vector<double> dil{1.0, 1.0, 1.0, 1.0};
    const std::size_t l = k.four_point_scan(1.0, 1.0, 1.0, dkl.data(), djl.data(),
                                            dil.data(), 1e-9, 4);
    CHECK(l == 2);
}

TEST_CASE("rng determinism and distribution sanity") {
    rng::Xoshiro256 a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    rng::Xoshiro256 eng(7);
    double sum = 0, sumsq = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double g = eng.gaussian();
        sum += g;
        sumsq += g * g;
    }
    CHECK(std::fabs(sum / n) < 0.02);
    CHECK(std::fabs(sumsq / n - 1.0) < 0.02);
    rng::Xoshiro256 e2(9);
    double esum = 0;
    for (int i = 0; i < n; ++i) esum += e2.exponential(2.0);
    CHECK(std::fabs(esum / n - 0.5) < 0.01);
}
