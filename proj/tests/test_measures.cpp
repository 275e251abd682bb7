#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ruelle/verify_suites.hpp"

using namespace ruelle;

TEST_CASE("mu_0 is the unit mass at the critical value") {
    RationalMap R = RationalMap::quadratic(cplx(0.3, 0.4));
    AtomicMeasure m = mu_n(R, 0, 0);
    REQUIRE(m.atoms.size() == 1);
    CHECK(std::abs(m.atoms[0].location.to_complex() - cplx(0.3, 0.4)) < 1e-15);
    CHECK(m.atoms[0].weight == ScaledComplex::one());
}

TEST_CASE("mu_1 for the quadratic family") {
    cplx c(0.3, 0.4);
    RationalMap R = RationalMap::quadratic(c);
    AtomicMeasure m = mu_n(R, 0, 1);
    REQUIRE(m.atoms.size() == 2);
    cplx rc = c * c + c;
    cplx w = 1.0 / (2.0 * c);
    CHECK(std::abs(m.weight_near(rc).to_complex() - w) < 1e-14);
    CHECK(std::abs(m.weight_near(c).to_complex() + w) < 1e-14);
}

TEST_CASE("quadratic recursion equals the general path") {
    SuiteResult res = run_measures_suite(4242, 20);
    CHECK(res.passed());
}

TEST_CASE("recursion matches after orbit collapse at c = -2") {
    AtomicMeasure rec = mu_n_quadratic_recursive(-2.0, 2);
    RationalMap R = RationalMap::quadratic(-2.0);
    AtomicMeasure gen = mu_n(R, 0, 2);
    REQUIRE(rec.atoms.size() == gen.atoms.size());
    for (const auto& a : gen.atoms) {
        ScaledComplex other = rec.weight_near(a.location.to_complex());
        ScaledComplex diff = a.weight - other;
        double err = diff.is_zero() ? 0.0 : std::exp2(diff.log2_abs());
        CHECK(err <= 1e-9);
    }
}

TEST_CASE("degenerate parameter c = 0") {
    CHECK_THROWS_AS((void)mu_n_quadratic_recursive(0.0, 1),
                    degenerate_parameter_error);
    try {
        (void)mu_n_quadratic_recursive(0.0, 3);
    } catch (const degenerate_parameter_error& e) {
        CHECK(e.index == 1);
    }
}

TEST_CASE("Cesaro averages of the measures") {
    cplx c(0.31, -0.18);
    RationalMap R = RationalMap::quadratic(c);
    AtomicMeasure n1 = nu_l(R, 0, 1);
    AtomicMeasure m0 = mu_n(R, 0, 0);
    REQUIRE(n1.atoms.size() == m0.atoms.size());
    CHECK(n1.atoms[0].weight == m0.atoms[0].weight);

    for (int l : {2, 3, 5, 8}) {
        AtomicMeasure nl = nu_l(R, 0, l);
        // only mu_0 carries net weight for polynomial maps
        CHECK(std::abs(nl.total_weight().to_complex() - cplx(1.0 / l)) <= 1e-12);
        // support inside the forward orbit of the critical value
        OrbitData orbit = R.orbit(c, l, 1e12);
        for (const auto& at : nl.atoms) {
            double dmin = 1e300;
            for (cplx p : orbit.points)
                dmin = std::min(dmin, std::abs(at.location.to_complex() - p));
            CHECK(dmin < 1e-9);
        }
    }
}

TEST_CASE("pairing is linear and matches the kernel value") {
    RationalMap R = RationalMap::quadratic(cplx(0.2, 0.5));
    TestFunction h{"cauchy(w=7+2i)",
                   [](const ScaledComplex& z) {
                       return (ScaledComplex::from(cplx(7.0, 2.0)) - z).reciprocal();
                   },
                   0.0};
    AtomicMeasure m1 = mu_n(R, 0, 1);
    AtomicMeasure m2 = mu_n(R, 0, 2);
    ScaledComplex alpha = ScaledComplex::from(cplx(1.5, -0.5));
    cplx lhs = pair_measure(m1.scaled(alpha) + m2, h).to_complex();
    cplx rhs = (alpha * pair_measure(m1, h) + pair_measure(m2, h)).to_complex();
    CHECK(std::abs(lhs - rhs) <= 1e-13 * std::max(1.0, std::abs(rhs)));

    // <mu_n, 1/(w - z)> equals the n-step kernel pullback evaluated at w
    cplx w(7.0, 2.0);
    CauchyCombo combo = CauchyCombo::kernel(R.critical_values()[0]);
    for (int n = 0; n <= 5; ++n) {
        AtomicMeasure mu = mu_n(R, 0, n);
        cplx paired = pair_measure(mu, h).to_complex();
        cplx direct = combo.value_at(w).to_complex();
        CHECK(std::abs(paired - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
        combo = apply_star(R, combo);
    }
}

TEST_CASE("essential neighborhood for z^2 - 2") {
    RationalMap R = RationalMap::quadratic(-2.0);
    EssentialNeighborhood U = build_essential_neighborhood(R, 0.1);
    CHECK(U.excluded.empty());  // no finite attracting cycles
    CHECK(U.outer_radius >= 2.0);
    CHECK(U.outer_radius <= 3.5);
    CHECK_FALSE(U.contains(cplx(10.0, 0.0)));
    // fresh-sample backward invariance
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    int tested = 0, violations = 0;
    while (tested < 1000) {
        cplx w(U.outer_radius * uni(rng), U.outer_radius * uni(rng));
        if (!U.contains(w)) continue;
        ++tested;
        for (cplx y : R.preimages(w))
            if (!U.contains(y)) ++violations;
    }
    CHECK(violations == 0);
    // the Julia segment [-2, 2] sits inside U
    for (int k = 0; k <= 100; ++k)
        CHECK(U.contains(cplx(-2.0 + 4.0 * k / 100.0, 0.0)));
}

TEST_CASE("essential neighborhood for z^2 - 1 excludes the superattracting"
          " 2-cycle") {
    RationalMap R = RationalMap::quadratic(-1.0);
    EssentialNeighborhood U = build_essential_neighborhood(R, 0.1);
    REQUIRE(U.excluded.size() == 2);
    bool has0 = false, has_m1 = false;
    for (const auto& d : U.excluded) {
        if (std::abs(d.center) < 1e-8) has0 = true;
        if (std::abs(d.center - cplx(-1.0)) < 1e-8) has_m1 = true;
        CHECK(d.radius > 0.0);
    }
    CHECK(has0);
    CHECK(has_m1);
    CHECK_FALSE(U.contains(cplx(0.0)));
    CHECK_FALSE(U.contains(cplx(-1.0)));
    // sampled backward invariance holds for the refined disks
    std::mt19937_64 rng(556);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    int tested = 0, violations = 0;
    while (tested < 1000) {
        cplx w(U.outer_radius * uni(rng), U.outer_radius * uni(rng));
        if (!U.contains(w)) continue;
        ++tested;
        for (cplx y : R.preimages(w))
            if (!U.contains(y)) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("weak-* probe controls") {
    SuiteResult res = run_probe_controls_suite();
    CHECK(res.passed());
}

TEST_CASE("weak-* probe along the quadratic fixture") {
    RationalMap R = RationalMap::quadratic(-2.0);
    EssentialNeighborhood U = build_essential_neighborhood(R, 0.1);
    TestFunctionFamily fam = build_test_family(U);
    ProbeReport rep = weak_star_probe([&](int l) { return nu_l(R, 0, l); }, fam,
                                      64, &U);
    CHECK(rep.L == 64);
    CHECK(rep.atoms_in_U_fraction == 1.0);
    REQUIRE(rep.trails.size() == fam.size());
    // the averages decay like 1/l toward zero; at this probe length that is
    // dominated by the Cauchy tolerance for some members, but no member may
    // grow (the expectation attached to the derivative-growth certificate)
    for (const auto& t : rep.trails) CHECK(t.verdict != "growing");
}
