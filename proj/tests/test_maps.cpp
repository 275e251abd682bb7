#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ruelle/rational_map.hpp"

using namespace ruelle;

namespace {
RationalMap cubic_pm1() {
    // z^3 - 3z: critical points +-1, orbits land on fixed points -+2
    return RationalMap::create(Polynomial({0.0, -3.0, 0.0, 1.0}),
                               Polynomial::constant(1.0));
}
}  // namespace

TEST_CASE("evaluation") {
    RationalMap R = RationalMap::quadratic(-2.0);
    CHECK(*R.eval(0.0) == cplx(-2.0));
    CHECK(*R.eval(2.0) == cplx(2.0));

    // (z^2+1)/(2z): numerator root at i
    RationalMap S = RationalMap::create(Polynomial({1.0, 0.0, 1.0}),
                                        Polynomial({0.0, 2.0}));
    CHECK(std::abs(*S.eval(cplx(0.0, 1.0))) < 1e-15);
    CHECK_FALSE(S.eval(0.0).has_value());  // pole: point at infinity
    CHECK_THROWS_AS((void)S.eval_finite(0.0), pole_error);
}

TEST_CASE("derivatives") {
    RationalMap R = RationalMap::quadratic(cplx(0.25, 0.0));
    CHECK(std::abs(R.deriv(1.0, 1) - cplx(2.0)) < 1e-15);
    CHECK(std::abs(R.deriv(0.0, 2) - cplx(2.0)) < 1e-15);

    RationalMap C = cubic_pm1();
    CHECK(std::abs(C.deriv(1.0, 1)) < 1e-12);
    CHECK(std::abs(C.deriv(1.0, 2) - cplx(6.0)) < 1e-12);
}

TEST_CASE("construction enforces the standing hypotheses") {
    // z^3 has a non-simple critical point at 0
    CHECK_THROWS_AS((void)RationalMap::create(Polynomial({0.0, 0.0, 0.0, 1.0}),
                                              Polynomial::constant(1.0)),
                    hypothesis_error);
    // infinity not fixed
    CHECK_THROWS_AS((void)RationalMap::create(Polynomial({1.0, 1.0}),
                                              Polynomial({0.0, 0.0, 1.0})),
                    hypothesis_error);
    // shared root between numerator and denominator
    CHECK_THROWS_AS((void)RationalMap::create(
                        Polynomial({0.0, -1.0, 0.0, 1.0}),  // z(z^2-1)
                        Polynomial({-1.0, 1.0})),           // z - 1
                    hypothesis_error);
}

TEST_CASE("orbit with chain-rule derivative products") {
    RationalMap R = RationalMap::quadratic(-2.0);
    OrbitData o = R.orbit(-2.0, 3);
    REQUIRE(o.points.size() == 4);
    CHECK(o.points[0] == cplx(-2.0));
    CHECK(o.points[1] == cplx(2.0));
    CHECK(o.points[2] == cplx(2.0));
    CHECK(o.points[3] == cplx(2.0));
    std::vector<double> expected{1.0, -4.0, -16.0, -64.0};
    for (int k = 0; k <= 3; ++k)
        CHECK(std::abs(o.cumulative_derivatives[k].to_complex() -
                       cplx(expected[k])) < 1e-12);
}

TEST_CASE("orbit at the fixed critical point") {
    RationalMap R = RationalMap::quadratic(0.0);
    OrbitData o = R.orbit(0.0, 5);
    for (const cplx& z : o.points) CHECK(z == cplx(0.0));
    CHECK(o.cumulative_derivatives[0].to_complex() == cplx(1.0));
    for (int k = 1; k <= 5; ++k) CHECK(o.cumulative_derivatives[k].is_zero());
}

TEST_CASE("orbit escape") {
    RationalMap R = RationalMap::quadratic(1.0);
    OrbitData o = R.orbit(0.0, 4, 10.0);
    REQUIRE(o.points.size() == 5);
    CHECK(o.points[4] == cplx(26.0));
    REQUIRE(o.escaped_at.has_value());
    CHECK(*o.escaped_at == 4);
}

TEST_CASE("orbit lands on a pole") {
    // (z^3 + 1)/z has a pole at 0 and R(-1) = 0
    RationalMap R = RationalMap::create(Polynomial({1.0, 0.0, 0.0, 1.0}),
                                        Polynomial({0.0, 1.0}));
    OrbitData o = R.orbit(-1.0, 3);
    REQUIRE(o.pole_at.has_value());
    CHECK(*o.pole_at == 1);
    CHECK(o.points.size() == 2);
    CHECK(o.cumulative_derivatives.size() == 2);
}

TEST_CASE("preimages") {
    RationalMap sq = RationalMap::quadratic(0.0);
    auto p = sq.preimages(4.0);
    REQUIRE(p.size() == 2);
    CHECK(std::abs(p[0] - cplx(-2.0)) < 1e-10);
    CHECK(std::abs(p[1] - cplx(2.0)) < 1e-10);

    RationalMap m2 = RationalMap::quadratic(-2.0);
    auto q = m2.preimages(-2.0);  // critical value: double preimage at 0
    REQUIRE(q.size() == 2);
    CHECK(std::abs(q[0]) < 1e-6);
    CHECK(std::abs(q[1]) < 1e-6);

    RationalMap p1 = RationalMap::quadratic(1.0);
    auto r = p1.preimages(2.0);
    REQUIRE(r.size() == 2);
    CHECK(std::abs(r[0] - cplx(-1.0)) < 1e-10);
    CHECK(std::abs(r[1] - cplx(1.0)) < 1e-10);
}

TEST_CASE("preimage section property and fiber size") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    RationalMap maps[2] = {cubic_pm1(),
                           RationalMap::quadratic(cplx(0.2, -0.3))};
    for (const RationalMap& R : maps) {
        for (int t = 0; t < 25; ++t) {
            cplx w(2.0 * uni(rng), 2.0 * uni(rng));
            auto ys = R.preimages(w);
            CHECK(static_cast<int>(ys.size()) == R.degree());
            for (cplx y : ys)
                CHECK(std::abs(*R.eval(y) - w) <= 1e-8 * std::max(1.0, std::abs(w)));
        }
    }
}

TEST_CASE("critical point count matches the degree formula") {
    for (const RationalMap& R :
         {cubic_pm1(), RationalMap::quadratic(cplx(0.4, 0.2)),
          RationalMap::create(Polynomial({0.3, 0.1, 0.7, 1.0}),
                              Polynomial({0.9, 1.0}))}) {
        int m = R.numerator().degree();
        int q = R.denominator().degree();
        int finite = static_cast<int>(R.critical_points().size());
        int at_infinity = m - q - 1;
        CHECK(finite + at_infinity == 2 * R.degree() - 2);
    }
}

TEST_CASE("chain rule agrees with finite differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    RationalMap R = RationalMap::create(Polynomial({0.3, -0.2, 0.5, 1.0}),
                                        Polynomial::constant(1.0));
    int checked = 0;
    for (int t = 0; t < 60 && checked < 12; ++t) {
        cplx z0(uni(rng), uni(rng));
        int n = 1 + static_cast<int>(rng() % 6);
        OrbitData o = R.orbit(z0, n, 1e9);
        if (static_cast<int>(o.points.size()) <= n) continue;
        ScaledComplex der = o.cumulative_derivatives[n];
        if (der.is_zero()) continue;
        double mag = std::exp2(std::min(100.0, der.log2_abs()));
        if (mag < 1e-3 || mag > 1e3) continue;
        double h = 1e-6;
        OrbitData op = R.orbit(z0 + h, n, 1e9);
        OrbitData om = R.orbit(z0 - h, n, 1e9);
        if (static_cast<int>(op.points.size()) <= n ||
            static_cast<int>(om.points.size()) <= n)
            continue;
        cplx fd = (op.points[n] - om.points[n]) / (2.0 * h);
        CHECK(std::abs(fd - der.to_complex()) <= 1e-4 * std::abs(fd));
        ++checked;
    }
    CHECK(checked >= 8);
}

TEST_CASE("critical relation check") {
    // single finite critical point: vacuous pass
    auto rep1 = check_no_simple_critical_relations(RationalMap::quadratic(0.7), 6, 1e-9);
    CHECK(rep1.passed);

    // z^3 - 3z: orbits {1, -2, -2, ...} and {-1, 2, 2, ...} never meet
    auto rep2 = check_no_simple_critical_relations(cubic_pm1(), 3, 1e-9);
    CHECK(rep2.passed);

    // z^3 - 3z - 4: R(1) = -6 equals R^2(-1) = -6
    RationalMap bad = RationalMap::create(Polynomial({-4.0, -3.0, 0.0, 1.0}),
                                          Polynomial::constant(1.0));
    auto rep3 = check_no_simple_critical_relations(bad, 3, 1e-9);
    CHECK_FALSE(rep3.passed);
    REQUIRE(rep3.witness.has_value());
    int n = rep3.witness->n, m = rep3.witness->m;
    CHECK(((n == 1 && m == 2) || (n == 2 && m == 1)));
}

TEST_CASE("conjugation to fix infinity") {
    // polynomial, point already infinity: identity
    Polynomial P({-2.0, 0.0, 1.0}), Q({1.0});
    auto [p1, q1] = conjugate_to_fix_infinity(P, Q, std::nullopt);
    CHECK(p1.coeffs() == P.coeffs());
    CHECK(q1.coeffs() == Q.coeffs());

    // R = 2z/(z+1), fixed point 1: conjugate grows linearly at infinity
    Polynomial P2({0.0, 2.0}), Q2({1.0, 1.0});
    auto [num, den] = conjugate_to_fix_infinity(P2, Q2, cplx(1.0));
    CHECK(num.degree() > den.degree());
    for (double w : {50.0, 500.0, 5000.0}) {
        cplx val = num(w) / den(w);
        CHECK(std::abs(val - cplx(2.0 * w + 1.0)) <= 1e-9 * w);
    }

    // multiplier preserved: finite differences at the fixed points agree
    double h = 1e-6;
    auto orig = [&](cplx z) { return P2(z) / Q2(z); };
    cplx mult_orig = (orig(1.0 + h) - orig(1.0 - h)) / (2.0 * h);
    // conjugate multiplier at infinity in the coordinate w = 1/z
    auto conj_inv = [&](cplx v) { return den(1.0 / v) / num(1.0 / v); };
    cplx mult_conj = (conj_inv(h) - conj_inv(-h)) / (2.0 * h);
    CHECK(std::abs(mult_orig - mult_conj) < 1e-9);
    CHECK(std::abs(mult_orig - cplx(0.5)) < 1e-9);

    // a point that is not fixed is rejected
    CHECK_THROWS_AS((void)conjugate_to_fix_infinity(P2, Q2, cplx(5.0)),
                    precondition_error);
}

TEST_CASE("attracting cycles") {
    // z^2 - 1: superattracting 2-cycle {0, -1}
    auto cyc1 = find_attracting_cycles(RationalMap::quadratic(-1.0), 4, 32);
    REQUIRE(cyc1.size() == 1);
    REQUIRE(cyc1[0].points.size() == 2);
    CHECK(std::abs(cyc1[0].points[0] - cplx(-1.0)) < 1e-8);
    CHECK(std::abs(cyc1[0].points[1]) < 1e-8);
    CHECK(std::abs(cyc1[0].multiplier) < 1e-8);

    // z^2 - 2: no finite attracting cycles
    auto cyc2 = find_attracting_cycles(RationalMap::quadratic(-2.0), 4, 32);
    CHECK(cyc2.empty());

    // z^2 + 0.1: attracting fixed point (1 - sqrt(0.6))/2
    auto cyc3 = find_attracting_cycles(RationalMap::quadratic(0.1), 4, 32);
    REQUIRE(cyc3.size() == 1);
    REQUIRE(cyc3[0].points.size() == 1);
    double z = (1.0 - std::sqrt(0.6)) / 2.0;
    CHECK(std::abs(cyc3[0].points[0] - cplx(z)) < 1e-8);
    CHECK(std::abs(cyc3[0].multiplier - cplx(2.0 * z)) < 1e-8);
}

TEST_CASE("infinity multiplier") {
    CHECK(RationalMap::quadratic(0.3).superattracting_infinity());
    CHECK(RationalMap::quadratic(0.3).infinity_multiplier() == cplx(0.0));
    // deg P = deg Q + 1: lambda = q_lead / p_lead
    RationalMap R = RationalMap::create(Polynomial({0.3, 0.1, 0.7, 2.0}),
                                        Polynomial({0.9, 0.0, 1.0}));
    CHECK_FALSE(R.superattracting_infinity());
    CHECK(std::abs(R.infinity_multiplier() - cplx(0.5)) < 1e-15);
}
