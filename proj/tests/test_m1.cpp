#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "webtree/cadlag.hpp"
#include "webtree/rng.hpp"

using namespace webtree;

namespace {

MonotoneCadlag random_step(rng::Xoshiro256& eng, int max_steps = 6, double tmax = 4.0,
                           double vmax = 2.0) {
    const int n = 1 + int(eng.next() % max_steps);
    std::vector<double> ts, vs;
    double t = -0.5 + eng.uniform();
    double v = 0.0;
    for (int i = 0; i < n; ++i) {
        t += eng.uniform() * tmax / n;
        v += eng.uniform() * vmax / n;
        ts.push_back(t);
        vs.push_back(v);
    }
    return MonotoneCadlag::from_steps(std::move(ts), std::move(vs));
}

}  // namespace

TEST_CASE("cadlag validation") {
    CHECK_THROWS_AS(MonotoneCadlag::from_steps({0.0, 0.0}, {1.0, 2.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(MonotoneCadlag::from_steps({0.0, 1.0}, {2.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(MonotoneCadlag::from_steps({-2.0}, {1.0}), std::invalid_argument);
    const auto f = MonotoneCadlag::from_steps({0.0, 1.0}, {1.0, 2.0});
    CHECK(f.value(-0.5) == 0.0);
    CHECK(f.value(0.0) == 1.0);
    CHECK(f.left_value(0.0) == 0.0);
    CHECK(f.value(0.5) == 1.0);
    CHECK(f.left_value(1.0) == 1.0);
    CHECK(f.value(1.0) == 2.0);
}

TEST_CASE("m1 distance of equal functions and constants") {
    const auto f = MonotoneCadlag::from_steps({0.3, 1.0}, {0.4, 0.9});
    CHECK(m1_distance(f, f) == doctest::Approx(0.0));

    // f = 0, g = 0.5 on [-1, oo): both layers reduce to the constant gap
    const auto zero = MonotoneCadlag::from_steps({}, {});
    const auto half = MonotoneCadlag::from_steps({-1.0}, {0.5});
    CHECK(m1_bounded(zero, half, 2.0) == doctest::Approx(0.5));
    CHECK(m1_distance(zero, half) == doctest::Approx(0.5));
}

TEST_CASE("jump-time wobble costs at most the wobble") {
    const double h = 0.8, a = 0.5, eps = 0.01;
    const auto f = MonotoneCadlag::from_steps({a}, {h});
    const auto g = MonotoneCadlag::from_steps({a + eps}, {h});
    const double d = m1_bounded(f, g, 3.0);
    CHECK(d <= eps + 1e-12);
    CHECK(m1_distance(f, g) <= eps + 1e-12);
}

TEST_CASE("bounded m1 equals the Frechet oracle") {
    rng::Xoshiro256 eng(101);
    for (int i = 0; i < 200; ++i) {
        const auto f = random_step(eng);
        const auto g = random_step(eng);
        for (double T : {0.7, 1.9, 5.0}) {
            const double mine = m1_bounded(f, g, T);
            const double oracle = oracle::frechet_bounded(f, g, T);
            CHECK(std::fabs(mine - oracle) <= 1e-6);
        }
    }
}

TEST_CASE("m1 integral matches the oracle route") {
    rng::Xoshiro256 eng(202);
    for (int i = 0; i < 40; ++i) {
        const auto f = random_step(eng);
        const auto g = random_step(eng);
        const double mine = m1_distance(f, g);
        const double via_oracle = m1_integral(
            f, g, [](const MonotoneCadlag& a, const MonotoneCadlag& b, double t) {
                return oracle::frechet_bounded(a, b, t);
            });
        CHECK(std::fabs(mine - via_oracle) <= 1e-6);
    }
}

TEST_CASE("m1 pseudometric axioms on random triples") {
    rng::Xoshiro256 eng(303);
    for (int i = 0; i < 60; ++i) {
        const auto f = random_step(eng);
        const auto g = random_step(eng);
        const auto h = random_step(eng);
        const double fg = m1_distance(f, g);
        const double gf = m1_distance(g, f);
        const double gh = m1_distance(g, h);
        const double fh = m1_distance(f, h);
        CHECK(fg == doctest::Approx(gf).epsilon(1e-10));
        CHECK(fh <= fg + gh + 1e-9);
        CHECK(m1_distance(f, f) == doctest::Approx(0.0));
    }
}
