#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ruelle/verify_suites.hpp"

using namespace ruelle;

TEST_CASE("single-step pullback of a kernel under z^2") {
    RationalMap sq = RationalMap::quadratic(0.0);
    CauchyCombo img = apply_star(sq, CauchyCombo::kernel(2.0));
    REQUIRE(img.atoms.size() == 2);
    CHECK(std::abs(img.atoms[0].pole.to_complex()) < 1e-14);
    CHECK(std::abs(img.atoms[0].weight.to_complex() - cplx(-0.25)) < 1e-14);
    CHECK(std::abs(img.atoms[1].pole.to_complex() - cplx(4.0)) < 1e-14);
    CHECK(std::abs(img.atoms[1].weight.to_complex() - cplx(0.25)) < 1e-14);
}

TEST_CASE("kernel anchored at the critical point maps to zero under z^2") {
    RationalMap sq = RationalMap::quadratic(0.0);
    CauchyCombo img = apply_star(sq, CauchyCombo::kernel(0.0));
    CHECK(img.atoms.empty());
    CHECK(img.constant_part == cplx(0.0));
}

TEST_CASE("critical-point kernel limit form agrees with the oracle") {
    // cubic with two critical points: the limit form is nonzero
    RationalMap C = RationalMap::create(Polynomial({0.2, -3.0, 0.0, 1.0}),
                                        Polynomial::constant(1.0));
    REQUIRE(C.critical_points().size() == 2);
    cplx c0 = C.critical_points()[0];
    CauchyCombo img = apply_star(C, CauchyCombo::kernel(c0));
    for (cplx z : {cplx(2.3, 1.1), cplx(-1.7, 0.4)}) {
        cplx oracle = apply_star_oracle(
            C, [c0](cplx y) { return 1.0 / (y - c0); }, z, 1);
        cplx closed = img.value_at(z).to_complex();
        CHECK(std::abs(closed - oracle) <= 1e-8 * std::max(1.0, std::abs(oracle)));
    }
}

TEST_CASE("oracle on the constant function") {
    RationalMap sq = RationalMap::quadratic(0.0);
    cplx v = apply_star_oracle(sq, [](cplx) { return cplx(1.0); }, 1.0, 1);
    CHECK(std::abs(v - cplx(0.5)) < 1e-12);
}

TEST_CASE("iterated single steps match the depth-n closed form atom by atom") {
    RationalMap R = RationalMap::quadratic(-2.0);
    cplx a(0.37, 0.21);
    CauchyCombo combo = CauchyCombo::kernel(a);
    for (int n = 1; n <= 4; ++n) {
        combo = apply_star(R, combo);
        CauchyCombo direct = apply_star_direct(R, a, n);
        REQUIRE(combo.atoms.size() == direct.atoms.size());
        for (size_t i = 0; i < combo.atoms.size(); ++i) {
            ScaledComplex pd = combo.atoms[i].pole - direct.atoms[i].pole;
            CHECK((pd.is_zero() || pd.log2_abs() < -30));
            ScaledComplex wd = combo.atoms[i].weight - direct.atoms[i].weight;
            double rel = wd.is_zero() ? 0.0
                                      : std::exp2(wd.log2_abs() -
                                                  direct.atoms[i].weight.log2_abs());
            CHECK(rel <= 1e-9);
        }
    }
}

TEST_CASE("iterated pullback for z^2 against the oracle") {
    RationalMap sq = RationalMap::quadratic(0.0);
    cplx a(2.0, 0.0);
    CauchyCombo combo = CauchyCombo::kernel(a);
    combo = apply_star(sq, combo);
    combo = apply_star(sq, combo);
    // (1/32)(tau_16 - tau_0)
    REQUIRE(combo.atoms.size() == 2);
    CHECK(std::abs(combo.atoms[0].weight.to_complex() - cplx(-1.0 / 32)) < 1e-14);
    CHECK(std::abs(combo.atoms[1].pole.to_complex() - cplx(16.0)) < 1e-12);
    for (cplx z : {cplx(3.0, 1.0), cplx(-0.7, 2.2)}) {
        cplx oracle = apply_star_oracle(
            sq, [a](cplx y) { return 1.0 / (y - a); }, z, 2);
        CHECK(std::abs(combo.value_at(z).to_complex() - oracle) <= 1e-10);
    }
}

TEST_CASE("pullback is linear at the atom level") {
    RationalMap R = RationalMap::quadratic(cplx(0.3, -0.2));
    CauchyCombo f = CauchyCombo::kernel(cplx(1.5, 0.5));
    CauchyCombo g = CauchyCombo::kernel(cplx(-0.8, 1.2));
    ScaledComplex alpha = ScaledComplex::from(cplx(2.0, 1.0));
    ScaledComplex beta = ScaledComplex::from(cplx(-0.5, 0.25));
    CauchyCombo lhs = apply_star(R, f.scaled(alpha) + g.scaled(beta));
    CauchyCombo rhs = apply_star(R, f).scaled(alpha) + apply_star(R, g).scaled(beta);
    REQUIRE(lhs.atoms.size() == rhs.atoms.size());
    for (size_t i = 0; i < lhs.atoms.size(); ++i) {
        ScaledComplex wd = lhs.atoms[i].weight - rhs.atoms[i].weight;
        double rel = wd.is_zero()
                         ? 0.0
                         : std::exp2(wd.log2_abs() - rhs.atoms[i].weight.log2_abs());
        CHECK(rel <= 1e-12);
    }
}

TEST_CASE("total weight law") {
    // polynomials: total output weight is exactly the vanishing constant term
    RationalMap P = RationalMap::quadratic(cplx(0.4, 0.1));
    CauchyCombo combo = CauchyCombo::kernel(cplx(1.1, -0.3));
    for (int n = 1; n <= 5; ++n) {
        combo = apply_star(P, combo);
        ScaledComplex tw = combo.total_weight();
        double mag = tw.is_zero() ? 0.0 : std::exp2(tw.log2_abs());
        CHECK(mag <= 1e-9);
    }
    // nonzero multiplier at infinity: total weight of one step equals lambda
    RationalMap R = RationalMap::create(Polynomial({0.3, 0.1, 0.7, 2.0}),
                                        Polynomial({0.9, 0.0, 1.0}));
    CauchyCombo one = apply_star(R, CauchyCombo::kernel(cplx(1.7, 0.9)));
    CHECK(std::abs(one.total_weight().to_complex() - R.infinity_multiplier()) <=
          1e-9);
}

TEST_CASE("closed form vs oracle (randomized, degree 2)") {
    SuiteResult res = run_oracle_suite(99, 100);
    CHECK(res.passed());
    CHECK(res.max_error <= 1e-8);
}

TEST_CASE("pullback of the pushforward returns the degree multiple") {
    SuiteResult res = run_duality_suite(7, 50);
    CHECK(res.passed());
    CHECK(res.max_error <= 1e-9);
}

TEST_CASE("beltrami action preserves modulus") {
    RationalMap R = RationalMap::quadratic(cplx(0.3, 0.1));
    Field unit = [](cplx) { return cplx(1.0); };
    for (cplx z : {cplx(1.2, 0.4), cplx(-0.9, 0.8)}) {
        cplx v = beltrami_eval(R, unit, z);
        CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
    }
    // z^2: mu(w) = conj(w)/w gives conj(z)^3 / z^3
    RationalMap sq = RationalMap::quadratic(0.0);
    Field mu = [](cplx w) { return std::conj(w) / w; };
    cplx z(0.6, 0.35);
    cplx got = beltrami_eval(sq, mu, z);
    cplx want = std::pow(std::conj(z), 3) / std::pow(z, 3);
    CHECK(std::abs(got - want) < 1e-12);
    // the same field is not fixed under a generic quadratic
    cplx moved = beltrami_eval(R, mu, z);
    CHECK(std::abs(moved - mu(z)) > 1e-3);
    CHECK_THROWS_AS((void)beltrami_eval(sq, mu, 0.0), precondition_error);
}

TEST_CASE("T operator quadratic form and degenerate inputs") {
    cplx c(-0.7, 0.3);
    RationalMap R = RationalMap::quadratic(c);
    Field F = [](cplx z) { return z * z - 3.0 * z + cplx(0.0, 1.0); };
    for (cplx a : {cplx(1.3, -0.2), cplx(-2.1, 0.7)}) {
        cplx want = (F(a * a + c) - F(c)) / (2.0 * a);
        CHECK(std::abs(apply_T(R, F, a) - want) < 1e-12);
    }
    Field konst = [](cplx) { return cplx(4.2, -1.0); };
    CHECK(std::abs(apply_T(R, konst, cplx(0.9, 0.1))) < 1e-14);
    CHECK_THROWS_AS((void)apply_T(R, F, 0.0), precondition_error);
}

TEST_CASE("T duality against the pullback pairing on atomic data") {
    RationalMap R = RationalMap::quadratic(cplx(0.2, -0.4));
    std::vector<std::pair<cplx, cplx>> atoms{{cplx(1.4, 0.6), cplx(0.7, 0.0)},
                                             {cplx(-0.9, -1.1), cplx(0.0, 1.3)}};
    Field F = [&atoms](cplx a) {
        cplx acc = 0.0;
        for (const auto& [loc, w] : atoms) acc += w / (loc - a);
        return acc;
    };
    cplx a(0.8, 0.9);
    cplx lhs = apply_T(R, F, a);
    CauchyCombo img = apply_star(R, CauchyCombo::kernel(a));
    cplx rhs = 0.0;
    for (const auto& [loc, w] : atoms) rhs += w * img.value_at(loc).to_complex();
    CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, std::abs(rhs)));
}

TEST_CASE("Cesaro trail of the T operator") {
    RationalMap R = RationalMap::quadratic(-2.0);
    // constant zero input
    CesaroTrail z = cesaro_T(R, [](cplx) { return cplx(0.0); }, cplx(0.4, 0.2), 8);
    for (const auto& av : z.averages) CHECK(av.is_zero());

    // constant one at a = 1: iterates vanish from index 1, averages are 1/m
    CesaroTrail one = cesaro_T(R, [](cplx) { return cplx(1.0); }, cplx(1.0), 10);
    REQUIRE(one.computed == 10);
    CHECK(std::abs(one.iterates_at_a[0].to_complex() - cplx(1.0)) < 1e-14);
    for (int j = 1; j < 10; ++j) {
        double mag = one.iterates_at_a[j].is_zero()
                         ? 0.0
                         : std::exp2(one.iterates_at_a[j].log2_abs());
        CHECK(mag < 1e-13);
    }
    for (int m = 1; m <= 10; ++m)
        CHECK(std::abs(one.averages[m - 1].to_complex() - cplx(1.0 / m)) < 1e-12);
}

TEST_CASE("Cesaro averages obey the resolvent-mass bound") {
    RationalMap R = RationalMap::quadratic(-2.0);
    cplx a(0.3, 0.0);
    Field F = [](cplx z) { return 1.0 / (z - cplx(10.0, 3.0)); };
    int N = 5;
    CesaroTrail trail = cesaro_T(R, F, a, N);
    REQUIRE(trail.computed == N);
    // |A_m| <= 2 (1/m) sum_{j<m} s_j(a) sup|F|, with s_0(a) = 1 for the
    // identity term
    std::vector<double> s{1.0};
    for (int j = 1; j < N; ++j)
        s.push_back(std::exp2(resolvent_mass(decompose(R, j), a).log2_abs()));
    for (int m = 1; m <= N; ++m) {
        double bound = 0.0;
        for (int j = 0; j < m; ++j) bound += s[j];
        bound *= 2.0 * trail.sup_F_seen / m;
        double got = trail.averages[m - 1].is_zero()
                         ? 0.0
                         : std::exp2(trail.averages[m - 1].log2_abs());
        CHECK(got <= bound * (1.0 + 1e-9));
    }
}

TEST_CASE("nonzero constant part requires a constant pullback of 1") {
    RationalMap sq = RationalMap::quadratic(0.0);
    CauchyCombo combo = CauchyCombo::kernel(2.0);
    combo.constant_part = cplx(1.0);
    CHECK_THROWS_AS((void)apply_star(sq, combo), precondition_error);
}
