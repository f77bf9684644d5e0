#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "webtree/correspondence.hpp"
#include "webtree/metric.hpp"
#include "webtree/rng.hpp"

using namespace webtree;

namespace {

FiniteSpatialTree segment_tree(const std::vector<double>& xs, std::size_t base,
                               double alpha = 0.5,
                               std::vector<SpacePoint> ev = {}) {
    const std::size_t n = xs.size();
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::fabs(xs[i] - xs[j]);
    if (ev.empty()) ev.assign(n, SpacePoint{0.0, 0.0});
    return FiniteSpatialTree(FiniteMetricTree::from_matrix(std::move(d), n, base),
                             std::move(ev), SpaceMode::line, alpha);
}

// random small characteristic-ish spatial tree built from a coalescing comb
FiniteSpatialTree random_tree(rng::Xoshiro256& eng, std::size_t max_pts,
                              double alpha = 0.5) {
    const std::size_t n = 1 + eng.next() % max_pts;
    // points at times t_i with a random ultrametric-like merge structure:
    // generate by sampling a random sequence of rays off a spine
    std::vector<double> t(n), x(n), depth(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = eng.uniform() * 2.0 - 1.0;
        x[i] = eng.uniform() * 2.0 - 1.0;
    }
    std::vector<double> d(n * n, 0.0);
    // chain the points: tau(i,j) = min over the path of pair levels
    std::vector<double> level(n);
    for (std::size_t i = 0; i < n; ++i)
        level[i] = std::min(t[i], t[(i + 1) % n]) - eng.uniform();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double tau = HUGE_VAL;
            for (std::size_t k = i; k < j; ++k) tau = std::min(tau, level[k]);
            tau = std::min({tau, t[i], t[j]});
            const double dist = t[i] + t[j] - 2 * tau;
            d[i * n + j] = dist;
            d[j * n + i] = dist;
        }
    std::vector<SpacePoint> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = {t[i], x[i]};
    return FiniteSpatialTree(FiniteMetricTree::from_matrix(std::move(d), n, 0),
                             std::move(ev), SpaceMode::line, alpha);
}

}  // namespace

TEST_CASE("distortion of the worked example is 2/3 and 1/3") {
    // [0,1] with base 1/3 against [0,1/3] with base 1/3
    const auto L4 = segment_tree({0, 1.0 / 3, 2.0 / 3, 1.0}, 1);
    const auto L3 = segment_tree({0, 1.0 / 3, 2.0 / 3}, 1);
    const auto R = segment_tree({0, 1.0 / 3}, 1);

    Correspondence natural;
    natural.pairs = {{0, 0}, {1, 1}, {2, 1}, {3, 1}};
    CHECK(distortion(natural, L4.tree(), R.tree()) == doctest::Approx(2.0 / 3).epsilon(1e-12));

    // x -> 2/3 - x on the part of [0,1] it reaches
    Correspondence reflected;
    reflected.pairs = {{2, 0}, {1, 1}, {0, 1}};
    CHECK(distortion(reflected, L3.tree(), R.tree()) == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("distortion basics") {
    const auto T = segment_tree({0, 0.5, 1}, 0);
    Correspondence id;
    id.pairs = {{0, 0}, {1, 1}, {2, 2}};
    CHECK(distortion(id, T.tree(), T.tree()) == 0.0);
    Correspondence bad;
    bad.pairs = {{0, 0}, {1, 1}};  // point 2 uncovered
    CHECK_THROWS_AS(distortion(bad, T.tree(), T.tree()), std::invalid_argument);
}

TEST_CASE("holder term: identity, one-sided convention, matched scales") {
    // identical trees and maps: zero
    std::vector<SpacePoint> ev{{0, 0}, {-0.6, 0.1}};
    const auto A = segment_tree({0, 0.6}, 0, 0.5, ev);
    Correspondence id;
    id.pairs = {{0, 0}, {1, 1}};
    CHECK(holder_term(id, A, A) == doctest::Approx(0.0));

    // left single point vs a segment of length 2^-n with |dM'| = v:
    // the convention takes the right increment alone, weighted 2^{n alpha}
    const double len = 0.25;  // in A_3 = (1/8, 1/4]
    const double v = 0.37;
    const auto P = segment_tree({0.0}, 0, 0.5, {{0, 0}});
    const auto S = segment_tree({0, len}, 0, 0.5, {{0, 0}, {0, v}});
    Correspondence c;
    c.pairs = {{0, 0}, {0, 1}};
    CHECK(holder_term(c, P, S) == doctest::Approx(std::pow(2.0, 3 * 0.5) * v).epsilon(1e-12));

    // two 2-point trees with equal distances in A_1, increments differing by w
    const double w = 0.2;
    const auto U = segment_tree({0, 0.6}, 0, 0.5, {{0, 0}, {0, 0.5}});
    const auto V = segment_tree({0, 0.6}, 0, 0.5, {{0, 0}, {0, 0.5 + w}});
    Correspondence c2;
    c2.pairs = {{0, 0}, {1, 1}};
    CHECK(holder_term(c2, U, V) == doctest::Approx(std::pow(2.0, 0.5) * w).epsilon(1e-12));

    const auto Abad = segment_tree({0, 0.6}, 0, 0.4, ev);
    CHECK_THROWS_AS(holder_term(id, Abad, A), std::invalid_argument);
}

TEST_CASE("delta_c trivial cases") {
    std::vector<SpacePoint> ev{{0.3, -0.2}, {-0.5, 0.4}};
    const auto A = segment_tree({0, 0.8}, 0, 0.5, ev);
    const auto self = delta_c(A, A, SearchMode::exact);
    CHECK(self.exact);
    CHECK(self.value == doctest::Approx(0.0));

    const auto P = segment_tree({0.0}, 0, 0.5, {{0.1, 0.2}});
    const auto Q = segment_tree({0.0}, 0, 0.5, {{0.5, -0.1}});
    const auto pq = delta_c(P, Q, SearchMode::exact);
    CHECK(pq.value == doctest::Approx(std::hypot(0.4, 0.3)));
}

TEST_CASE("delta_c on the reflected pair stays below 1/6") {
    const auto L3 = segment_tree({0, 1.0 / 3, 2.0 / 3}, 1);
    const auto R = segment_tree({0, 1.0 / 3}, 1);
    const auto rep = delta_c(L3, R, SearchMode::exact);
    CHECK(rep.exact);
    CHECK(rep.value <= 1.0 / 6 + 1e-12);
    // the witness is a genuine correspondence achieving the value
    CHECK(rep.witness.covers(L3.size(), R.size()));
    CHECK(correspondence_cost(rep.witness, L3, R) == doctest::Approx(rep.value));
}

TEST_CASE("delta_c size guard and heuristic upper bound") {
    rng::Xoshiro256 eng(11);
    const auto big = random_tree(eng, 9);
    const auto small = random_tree(eng, 4);
    if (big.size() > kExactLimit)
        CHECK_THROWS_AS(delta_c(big, small, SearchMode::exact), std::length_error);
    for (int i = 0; i < 25; ++i) {
        const auto a = random_tree(eng, 4);
        const auto b = random_tree(eng, 4);
        const auto ex = delta_c(a, b, SearchMode::exact);
        const auto he = delta_c(a, b, SearchMode::heuristic);
        CHECK(he.value >= ex.value - 1e-12);
        CHECK_FALSE(he.exact);
    }
}

TEST_CASE("delta_c symmetry and zero iff matched isometry") {
    rng::Xoshiro256 eng(23);
    for (int i = 0; i < 30; ++i) {
        const auto a = random_tree(eng, 4);
        const auto b = random_tree(eng, 4);
        const auto ab = delta_c(a, b, SearchMode::exact);
        const auto ba = delta_c(b, a, SearchMode::exact);
        CHECK(ab.value == doctest::Approx(ba.value).epsilon(1e-9));
    }
    // relabeled copy: base-preserving isometry with identical evals -> 0
    std::vector<double> d{0, 1, 3, 1, 0, 2, 3, 2, 0};
    std::vector<SpacePoint> ev{{0, 0}, {-1, 0.2}, {-2, -0.4}};
    FiniteSpatialTree A(FiniteMetricTree::from_matrix(std::move(d), 3, 0), ev,
                        SpaceMode::line, 0.5);
    std::vector<double> dp{0, 2, 3, 2, 0, 1, 3, 1, 0};
    std::vector<SpacePoint> evp{{-2, -0.4}, {-1, 0.2}, {0, 0}};
    FiniteSpatialTree B(FiniteMetricTree::from_matrix(std::move(dp), 3, 2), evp,
                        SpaceMode::line, 0.5);
    CHECK(delta_c(A, B, SearchMode::exact).value == doctest::Approx(0.0));
    // perturbed eval: strictly positive
    evp[1].x += 0.3;
    std::vector<double> dq{0, 2, 3, 2, 0, 1, 3, 1, 0};
    FiniteSpatialTree C(FiniteMetricTree::from_matrix(std::move(dq), 3, 2), evp,
                        SpaceMode::line, 0.5);
    CHECK(delta_c(A, C, SearchMode::exact).value > 1e-3);
}

TEST_CASE("properness map of simple trees") {
    const auto single = segment_tree({0.0}, 0, 0.5, {{0, 0}});
    const auto b0 = properness_map(single);
    CHECK(b0.value(0.0) == 0.0);
    CHECK(b0.value(3.0) == 0.0);

    // unit-speed ray from (0,0) to (-1,0): b(r) = min(r, 1) at realized points
    std::vector<SpacePoint> ev{{0, 0}, {-0.5, 0}, {-1, 0}};
    const auto ray = segment_tree({0, 0.5, 1.0}, 0, 0.5, ev);
    const auto b = properness_map(ray);
    CHECK(b.value(0.4) == doctest::Approx(0.0));  // only the base fits
    CHECK(b.value(0.5) == doctest::Approx(0.5));
    CHECK(b.value(1.0) == doctest::Approx(1.0));
    CHECK(b.value(9.0) == doctest::Approx(1.0));
    // nondecreasing right-continuous by construction
    for (std::size_t k = 1; k < b.values().size(); ++k)
        CHECK(b.values()[k] >= b.values()[k - 1]);

    // far point: b jumps to its distance at the first covering radius
    std::vector<SpacePoint> ev2{{0, 0}, {-0.2, 5.0}};
    const auto far_tree = segment_tree({0, 3.0}, 0, 0.5, ev2);
    const auto b2 = properness_map(far_tree);
    CHECK(b2.value(4.9) == 0.0);
    CHECK(b2.value(5.0) == doctest::Approx(3.0));
}

TEST_CASE("delta_sp identity, symmetry, triangle on random triples") {
    rng::Xoshiro256 eng(37);
    const auto self = random_tree(eng, 4);
    const auto s = delta_sp(self, self, 6.0, SearchMode::exact);
    CHECK(s.value == doctest::Approx(0.0));
    CHECK(s.tail_bound == doctest::Approx(std::exp(-6.0)));

    int done = 0;
    while (done < 12) {
        const auto a = random_tree(eng, 4);
        const auto b = random_tree(eng, 4);
        const auto c = random_tree(eng, 4);
        const double ab = delta_sp(a, b, 6.0, SearchMode::exact).value;
        const double ba = delta_sp(b, a, 6.0, SearchMode::exact).value;
        const double bc = delta_sp(b, c, 6.0, SearchMode::exact).value;
        const double ac = delta_sp(a, c, 6.0, SearchMode::exact).value;
        CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
        CHECK(ac <= ab + bc + 1e-9);
        ++done;
    }
}

TEST_CASE("compactness diagnostics") {
    const auto single = segment_tree({0.0}, 0, 0.5, {{0, 0}});
    const auto rep1 = compactness_diagnostics({single}, 1.0, 0.25);
    CHECK(rep1.members[0].net_count == 1);
    CHECK(rep1.members[0].sup_norm == 0.0);
    CHECK(rep1.members[0].properness == 0.0);

    // segment of length L: net count within a factor 2 of L/eps
    const double L = 1.0, eps = 0.1;
    std::vector<double> xs;
    std::vector<SpacePoint> ev;
    for (int i = 0; i <= 100; ++i) {
        xs.push_back(L * i / 100.0);
        ev.push_back({-L * i / 100.0, 0.0});
    }
    const auto seg = segment_tree(xs, 0, 0.5, ev);
    const auto rep = compactness_diagnostics({seg}, 2.0, eps);
    const double ideal = std::ceil(L / eps);
    CHECK(rep.members[0].net_count >= std::size_t(ideal / 2));
    CHECK(rep.members[0].net_count <= std::size_t(ideal * 2));
    CHECK(rep.maxima.net_count == rep.members[0].net_count);
}

TEST_CASE("net restriction bound check") {
    // full subset at delta -> 0: lhs = 0
    std::vector<SpacePoint> ev{{0, 0}, {-0.25, 0}, {-0.5, 0}};
    const auto seg = segment_tree({0, 0.25, 0.5}, 0, 0.5, ev);
    const auto full = net_restriction_bound_check(seg, {0, 1, 2}, 1e-6);
    CHECK(full.lhs == doctest::Approx(0.0));
    CHECK(full.ok);

    // segment with midpoint removed, delta = half length, C = 4
    const auto chk = net_restriction_bound_check(seg, {0, 2}, 0.25, 4.0);
    CHECK(chk.ok);
    CHECK(chk.lhs > 0.0);

    CHECK_THROWS_AS(net_restriction_bound_check(seg, {1, 2}, 0.25),
                    std::invalid_argument);  // base missing
    CHECK_THROWS_AS(net_restriction_bound_check(seg, {0}, 0.1),
                    std::invalid_argument);  // not delta-dense
}
