#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "webtree/metric_tree.hpp"
#include "webtree/rng.hpp"
#include "webtree/spatial_tree.hpp"

using namespace webtree;

namespace {

FiniteMetricTree star3(double a = 1.0, double b = 1.0, double c = 1.0) {
    // center + three legs; center is point 0
    std::vector<double> d{0, a, b, c,  //
                          a, 0, a + b, a + c,
                          b, a + b, 0, b + c,
                          c, a + c, b + c, 0};
    return FiniteMetricTree::from_matrix(std::move(d), 4, 0);
}

FiniteMetricTree line_points(const std::vector<double>& xs, std::size_t base = 0) {
    const std::size_t n = xs.size();
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::fabs(xs[i] - xs[j]);
    return FiniteMetricTree::from_matrix(std::move(d), n, base);
}

}  // namespace

TEST_CASE("validate_tree accepts tree metrics") {
    CHECK(validate_tree(star3()).ok);
    CHECK(validate_tree(line_points({0, 1, 3})).ok);
}

TEST_CASE("validate_tree rejects the 4-cycle metric") {
    // cycle 0-1-2-3: adjacent 1, opposite 2; fails the four-point condition
    std::vector<double> d{0, 1, 2, 1,  //
                          1, 0, 1, 2,  //
                          2, 1, 0, 1,  //
                          1, 2, 1, 0};
    const auto rep = validate_tree(FiniteMetricTree::from_matrix(std::move(d), 4, 0));
    CHECK_FALSE(rep.ok);
    CHECK(rep.quadruple.has_value());
    // by hand: pairings give sums 4, 2, 2 -- max exceeds the middle by 2
    CHECK(rep.quadruple->excess == doctest::Approx(2.0));
}

TEST_CASE("validate_tree flags asymmetry, NaN and zero distances") {
    std::vector<double> d{0, 1, 1.5, 0, 0, 1, 1, 1, 0};
    const auto rep = validate_tree(FiniteMetricTree::from_matrix(std::move(d), 3, 0));
    CHECK_FALSE(rep.ok);
    CHECK_THROWS_AS(FiniteMetricTree::from_matrix({0, NAN, NAN, 0}, 2, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(FiniteMetricTree::from_matrix({0, 1, 1}, 2, 0), std::invalid_argument);
    std::vector<double> z{0, 0, 0, 0};
    CHECK_FALSE(validate_tree(FiniteMetricTree::from_matrix(std::move(z), 2, 0)).ok);
}

TEST_CASE("geodesic_point endpoints, midpoint and snapping") {
    const auto t = line_points({0, 2});
    CHECK(geodesic_point(t, 0, 1, 0.0).id == 0);
    CHECK(geodesic_point(t, 0, 1, 1.0).id == 1);
    const auto mid = geodesic_point(t, 0, 1, 0.5);
    CHECK(mid.interior);
    CHECK(mid.offset == doctest::Approx(1.0));
    const auto t3 = line_points({0, 1, 2});
    const auto snap = geodesic_point(t3, 0, 2, 0.5);
    CHECK_FALSE(snap.interior);
    CHECK(snap.id == 1);
    CHECK_THROWS_AS(geodesic_point(t, 0, 1, 1.5), std::invalid_argument);
}

TEST_CASE("degree of leaves, edge points and the star center") {
    const auto seg = line_points({0, 1});
    CHECK(degree(seg, TreePoint::sample(0)) == 1);
    CHECK(degree(seg, TreePoint::segment(0, 1, 0.5)) == 2);
    const auto st = star3();
    CHECK(degree(st, TreePoint::sample(0)) == 3);
    CHECK(degree(st, TreePoint::sample(1)) == 1);
    CHECK(degree(st, TreePoint::segment(0, 1, 0.5)) == 2);
}

TEST_CASE("interior point distances follow the Gromov product") {
    const auto st = star3();
    const auto p = TreePoint::segment(0, 1, 0.25);  // on leg toward leaf 1
    CHECK(dist_point_sample(st, p, 1) == doctest::Approx(0.75));
    CHECK(dist_point_sample(st, p, 2) == doctest::Approx(1.25));
    const auto q = TreePoint::segment(0, 2, 0.5);
    CHECK(dist_points(st, p, q) == doctest::Approx(0.75));
}

TEST_CASE("greedy net basics and oracle sandwich") {
    const auto one = line_points({0.0});
    CHECK(greedy_eps_net(one, 0.5).count == 1);
    const auto t = line_points({0, 0.5, 1});
    CHECK(greedy_eps_net(t, 0.6).count == 2);
    // the exact minimum is 1 (the midpoint covers both ends); the greedy
    // count stays within the covering/packing sandwich
    CHECK(oracle::exact_min_net(t, 0.6) == 1);
    CHECK(oracle::exact_min_net(t, 0.3) == 3);
    const auto st = star3();
    CHECK(greedy_eps_net(st, 10.0).count == 1);  // eps >= diameter

    rng::Xoshiro256 eng(5);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> xs;
        const std::size_t n = 4 + eng.next() % 7;
        for (std::size_t i = 0; i < n; ++i) xs.push_back(eng.uniform() * 3.0);
        const auto tr = line_points(xs);
        double prev = 1e18;
        for (double eps : {0.1, 0.2, 0.4, 0.8, 1.6}) {
            const auto g = greedy_eps_net(tr, eps);
            const std::size_t exact = oracle::exact_min_net(tr, eps);
            const std::size_t pack = oracle::exact_min_net(tr, eps / 2);
            CHECK(g.count >= exact);
            CHECK(g.count <= pack);
            CHECK(double(g.count) <= prev);  // nonincreasing in eps
            prev = double(g.count);
        }
    }
}

TEST_CASE("farthest greedy extremes are leaves") {
    const auto st = star3(1.0, 0.7, 0.4);
    const auto g = greedy_eps_net(st, 0.05);
    for (std::size_t k = 1; k < g.points.size() && k < 3; ++k)
        CHECK(degree(st, TreePoint::sample(g.points[k])) == 1);
}

TEST_CASE("ball restriction clips and is idempotent / monotone") {
    // 3-leg star with legs 1, base center, r = 0.5
    std::vector<SpacePoint> ev{{0, 0}, {-1, -1}, {-1, 0}, {-1, 1}};
    FiniteSpatialTree star(star3(), ev, SpaceMode::line, 0.5);
    const auto ball = ball_restriction(star, 0.5);
    CHECK(ball.size() == 4);  // center + three clipped leg points
    CHECK(ball.tree().radius() == doctest::Approx(0.5));
    CHECK(validate_tree(ball.tree()).ok);
    // clip eval: wedge time max(0 - 0.5, -1 - 0.5) = -0.5, spatial midpointish
    for (std::size_t i = 0; i < ball.size(); ++i)
        if (i != ball.base()) CHECK(ball.eval(i).t == doctest::Approx(-0.5));

    const auto same = ball_restriction(star, 5.0);
    CHECK(same.size() == star.size());
    const auto zero = ball_restriction(star, 0.0);
    CHECK(zero.size() == 1);

    const auto b2 = ball_restriction(star, 0.8);
    const auto b1_again = ball_restriction(b2, 0.5);
    CHECK(b1_again.size() == ball.size());
    CHECK(b1_again.tree().radius() == doctest::Approx(0.5));
}

TEST_CASE("characteristic checks: wedge time and the coalescing example") {
    // two rays from time 2 coalescing at time 1: endpoints at distance 2,
    // the midpoint sits at time 1
    std::vector<double> d{0, 2, 1, 2, 0, 1, 1, 1, 0};
    FiniteMetricTree tr = FiniteMetricTree::from_matrix(std::move(d), 3, 2);
    std::vector<SpacePoint> ev{{2, -0.3}, {2, 0.3}, {1, 0.0}};
    FiniteSpatialTree t(std::move(tr), ev, SpaceMode::line, 0.5);
    const auto rep = check_characteristic(t);
    CHECK(rep.time_ok);
    CHECK(rep.space_ok);
}

TEST_CASE("characteristic check flags swapped branches below the meet") {
    // A=(1,0), B=(1,1) with rays down to A'=(0,1), B'=(0,0); spatial order
    // swaps below the top: the space-monotonicity check must fire
    const double tau = -5.0;
    std::vector<double> d(16, 0.0);
    const auto set = [&](int i, int j, double v) {
        d[i * 4 + j] = v;
        d[j * 4 + i] = v;
    };
    set(0, 1, 1.0);                 // A to its ancestor A'
    set(2, 3, 1.0);                 // B to its ancestor B'
    set(0, 2, 1.0 + 1.0 - 2 * tau);  // A,B merge far below
    set(0, 3, 1.0 + 0.0 - 2 * tau);
    set(1, 2, 0.0 + 1.0 - 2 * tau);
    set(1, 3, 0.0 + 0.0 - 2 * tau);
    FiniteMetricTree tr = FiniteMetricTree::from_matrix(std::move(d), 4, 0);
    CHECK(validate_tree(tr).ok);
    std::vector<SpacePoint> ev{{1, 0}, {0, 1}, {1, 1}, {0, 0}};
    FiniteSpatialTree t(std::move(tr), ev, SpaceMode::line, 0.5);
    const auto rep = check_characteristic(t);
    CHECK(rep.time_ok);
    CHECK_FALSE(rep.space_ok);
}

TEST_CASE("characteristic check time violation is reported") {
    // segment of length 1 whose endpoint times differ by 2: not 1-Lipschitz
    std::vector<double> d{0, 1, 1, 0};
    FiniteMetricTree tr = FiniteMetricTree::from_matrix(std::move(d), 2, 0);
    std::vector<SpacePoint> ev{{0, 0}, {2, 0}};
    FiniteSpatialTree t(std::move(tr), ev, SpaceMode::line, 0.5);
    CHECK_FALSE(check_characteristic(t).time_ok);
}

TEST_CASE("spread probe check") {
    // two far-apart descending rays at x=0 and x=3
    const double tau = -9.0;
    std::vector<double> d(16, 0.0);
    const auto set = [&](int i, int j, double v) {
        d[i * 4 + j] = v;
        d[j * 4 + i] = v;
    };
    set(0, 1, 2.0);
    set(2, 3, 2.0);
    for (int i : {0, 1})
        for (int j : {2, 3}) {
            const double ti = i == 0 ? 0.0 : -2.0;
            const double tj = j == 2 ? 0.0 : -2.0;
            set(i, j, ti + tj - 2 * tau);
        }
    FiniteMetricTree tr = FiniteMetricTree::from_matrix(std::move(d), 4, 0);
    REQUIRE(validate_tree(tr).ok);
    std::vector<SpacePoint> ev{{0, 0}, {-2, 0}, {0, 3}, {-2, 3}};
    FiniteSpatialTree t(std::move(tr), ev, SpaceMode::line, 0.5);
    const auto ok = check_characteristic(t, {{-1.0, 0.5}, {-1.0, 2.4}});
    CHECK(ok.spread_ok);
    // probe in the gap between the rays, more than spread_radius from both
    const auto bad = check_characteristic(t, {{-1.0, 1.5}});
    CHECK_FALSE(bad.spread_ok);
    const auto outside = check_characteristic(t, {{7.0, 0.0}});
    CHECK(outside.spread_ok);  // outside the realization window: not checked
}

TEST_CASE("radial map on a single ray and across a merge") {
    // ray: points at times 2, 1, 0 at unit speed
    std::vector<double> d{0, 1, 2, 1, 0, 1, 2, 1, 0};
    FiniteMetricTree tr = FiniteMetricTree::from_matrix(std::move(d), 3, 0);
    std::vector<SpacePoint> ev{{2, 0}, {1, 0}, {0, 0}};
    FiniteSpatialTree t(std::move(tr), ev, SpaceMode::line, 0.5);
    // s = M_t(z): the point itself
    CHECK_FALSE(radial_point(t, TreePoint::sample(0), 2.0).point.interior);
    CHECK(radial_point(t, TreePoint::sample(0), 2.0).point.id == 0);
    // s = 0.5: interior of the lower segment, at distance 1.5 from z
    const auto r = radial_point(t, TreePoint::sample(0), 0.5);
    CHECK_FALSE(r.truncated);
    CHECK(dist_point_sample(t.tree(), r.point, 0) == doctest::Approx(1.5));
    // beyond the realized depth
    const auto trunc = radial_point(t, TreePoint::sample(0), -1.0);
    CHECK(trunc.truncated);
    CHECK(trunc.reached_time == doctest::Approx(0.0));

    // two rays merging at time 1: below the merge the radial points coincide
    std::vector<double> d2{0, 2, 1, 3, 2, 0, 1, 3, 1, 1, 0, 2, 3, 3, 2, 0};
    FiniteMetricTree tr2 = FiniteMetricTree::from_matrix(std::move(d2), 4, 2);
    std::vector<SpacePoint> ev2{{2, -0.3}, {2, 0.3}, {1, 0.0}, {-1, 0.2}};
    FiniteSpatialTree t2(std::move(tr2), ev2, SpaceMode::line, 0.5);
    const auto ra = radial_point(t2, TreePoint::sample(0), 0.0);
    const auto rb = radial_point(t2, TreePoint::sample(1), 0.0);
    CHECK(ra.point.interior);
    CHECK(rb.point.interior);
    CHECK(dist_points(t2.tree(), ra.point, rb.point) == doctest::Approx(0.0));
    // e:Ray identity: d(z, rho(z,s)) = M_t(z) - s
    CHECK(dist_point_sample(t2.tree(), ra.point, 0) == doctest::Approx(2.0));
}

TEST_CASE("radial map errors on the wrong side") {
    std::vector<double> d{0, 1, 1, 0};
    FiniteMetricTree tr = FiniteMetricTree::from_matrix(std::move(d), 2, 0);
    std::vector<SpacePoint> ev{{0, 0}, {-1, 0}};
    FiniteSpatialTree t(std::move(tr), ev, SpaceMode::line, 0.5);
    CHECK_THROWS_AS(radial_point(t, TreePoint::sample(0), 1.0), std::invalid_argument);
}
