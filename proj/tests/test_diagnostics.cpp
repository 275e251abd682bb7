#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ruelle/diagnostics.hpp"
#include "ruelle/report_json.hpp"

using namespace ruelle;

TEST_CASE("quadratic criterion certificate at c = -2") {
    QuadraticCriterionResult r = quadratic_criterion_check(-2.0, 64);
    CHECK(r.verdict == QuadraticCriterionResult::Verdict::condition1);
    // |D_n| = 4^n, negative real
    for (int n = 1; n <= 64; ++n)
        CHECK(r.log2_abs_D[n] == doctest::Approx(2.0 * n).epsilon(1e-12));
    CHECK(std::abs(r.S[64] - cplx(2.0 / 3.0)) <= 1e-10);
    // witness is the full suffix from an index <= 4
    CHECK(r.witness_suffix_start >= 1);
    CHECK(r.witness_suffix_start <= 4);
}

TEST_CASE("degenerate parameters carry the failing index") {
    QuadraticCriterionResult r0 = quadratic_criterion_check(0.0, 64);
    CHECK(r0.verdict == QuadraticCriterionResult::Verdict::degenerate);
    CHECK(r0.failing_index == 1);

    QuadraticCriterionResult r1 = quadratic_criterion_check(-1.0, 64);
    CHECK(r1.verdict == QuadraticCriterionResult::Verdict::degenerate);
    CHECK(r1.failing_index == 2);

    // real root of c^3 + 2c^2 + c + 1: the critical orbit hits 0 at step 2
    QuadraticCriterionResult r2 =
        quadratic_criterion_check(-1.7548776662466927601, 64);
    CHECK(r2.verdict == QuadraticCriterionResult::Verdict::degenerate);
    CHECK(r2.failing_index == 3);
}

TEST_CASE("attracting parameter is inconclusive") {
    QuadraticCriterionResult r = quadratic_criterion_check(0.1, 64);
    CHECK(r.verdict == QuadraticCriterionResult::Verdict::inconclusive);
}

TEST_CASE("escaping parameter completes the long trail") {
    QuadraticCriterionResult r = quadratic_criterion_check(cplx(0.7, 0.9), 64);
    CHECK(static_cast<int>(r.log2_abs_D.size()) == 65);
    CHECK(r.log2_abs_D[64] > 1e6);  // doubly exponential growth in log2
    CHECK(r.verdict == QuadraticCriterionResult::Verdict::condition1);
    CHECK(std::isfinite(std::abs(r.S[64])));
}

TEST_CASE("synthetic decision table for the series classification cases") {
    ClassifyConfig cfg;
    auto mk = [](SeriesClass cls, double max_term, double r2, double coeff) {
        SeriesClassification c;
        c.cls = cls;
        c.max_abs_term = max_term;
        c.logfit_r2 = r2;
        c.logfit_coeff = coeff;
        return c;
    };
    auto conv = mk(SeriesClass::absolutely_convergent, 1.0, 0.0, 0.0);
    auto bnd = mk(SeriesClass::bounded_terms_divergent, 1.0, 0.5, 1.0);
    auto slow = mk(SeriesClass::slow_divergent, 1.0, 0.999, 1.0);
    auto bad = mk(SeriesClass::divergent, 1e9, 0.0, 0.0);
    auto degen = mk(SeriesClass::degenerate, 0.0, 0.0, 0.0);

    CHECK(collet_eckmann_cases(conv, conv, cfg) == std::set<int>{1, 2});
    CHECK(collet_eckmann_cases(conv, bnd, cfg) == std::set<int>{2});
    CHECK(collet_eckmann_cases(bnd, conv, cfg) == std::set<int>{2});
    CHECK(collet_eckmann_cases(slow, slow, cfg) == std::set<int>{3});
    CHECK(collet_eckmann_cases(conv, bad, cfg).empty());
    CHECK(collet_eckmann_cases(degen, conv, cfg).empty());
}

TEST_CASE("Collet-Eckmann classification of z^2 - 2") {
    RationalMap R = RationalMap::quadratic(-2.0);
    ColletEckmannResult res = collet_eckmann_classify(R, 0.3, 48);
    CHECK(static_cast<int>(res.orbit_points.size()) == 4);
    // forward series at the critical point decays geometrically
    for (const auto& p : res.pairs)
        CHECK(p.rp_class.cls == SeriesClass::absolutely_convergent);
    CHECK((res.overall_case == 1 || res.overall_case == 2));
}

TEST_CASE("short orbits are rejected") {
    RationalMap R = RationalMap::quadratic(-2.0);
    CHECK_THROWS_AS((void)collet_eckmann_classify(R, 2.0, 32), short_orbit_error);
}

TEST_CASE("Cesaro condition trail for z^2 - 2") {
    RationalMap R = RationalMap::quadratic(-2.0);
    CesaroConditionResult res = cesaro_condition_check(R, 0.3, {4, 8, 16, 32});
    REQUIRE(res.rows.size() == 4);
    for (const auto& row : res.rows) {
        REQUIRE(row.values.size() == 4);
        CHECK(row.excluded_j.empty());
    }
    CHECK(res.bounded);
    CHECK(res.max_value < 1e3);
}

TEST_CASE("orbit passing through a critical point is flagged and excluded") {
    // sqrt(2) -> 0 -> -2 -> 2: the second orbit point is the critical point
    RationalMap R = RationalMap::quadratic(-2.0);
    cplx a = std::sqrt(2.0);
    CesaroConditionResult res = cesaro_condition_check(R, a, {4});
    bool found = false;
    for (const auto& row : res.rows) {
        if (std::abs(row.x) < 1e-12) {
            found = true;
            REQUIRE(!row.excluded_j.empty());
            CHECK(row.excluded_j.front() == 0);
        }
    }
    CHECK(found);
}

TEST_CASE("mass trail on a critical orbit names the colliding depth") {
    RationalMap R = RationalMap::quadratic(-2.0);
    ResolventMassResult r = resolvent_mass_check(R, std::sqrt(2.0), 4);
    CHECK(r.values.size() == 1);  // depth 1 has its only pole at 0
    CHECK(r.failed_at == 2);      // depth 2 gains poles at +-sqrt(2)
    CHECK(r.error.find("n=2") != std::string::npos);
}

TEST_CASE("single-average value matches the hand formula") {
    // A_1(x) = sum_k |1/(c_k - x)| / |R''(c_k)|, one term, j = 0
    RationalMap R = RationalMap::quadratic(-2.0);
    cplx x(0.3, 0.0);
    CesaroConditionResult res = cesaro_condition_check(R, x, {1});
    double expect = (1.0 / std::abs(cplx(0.0) - x)) / 2.0;
    REQUIRE(!res.rows.empty());
    CHECK(res.rows[0].values[0].value == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("resolvent mass trail") {
    // z^2: s_1(3) = (1/2)/3; deeper levels hit the critical self-relation
    RationalMap sq = RationalMap::quadratic(0.0);
    ResolventMassResult r = resolvent_mass_check(sq, 3.0, 6);
    REQUIRE(static_cast<int>(r.values.size()) == 1);
    CHECK(r.values[0] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(r.failed_at == 2);
    CHECK(r.verdict == "short");
    CHECK_FALSE(r.error.empty());

    RationalMap m2 = RationalMap::quadratic(-2.0);
    ResolventMassResult r2 = resolvent_mass_check(m2, 0.3, 6);
    CHECK(static_cast<int>(r2.values.size()) == 6);
    CHECK(r2.error.empty());
    CHECK(r2.long_orbit);
    CHECK(r2.verdict == "bounded");
}

TEST_CASE("reports serialize deterministically") {
    QuadraticCriterionResult q = quadratic_criterion_check(-2.0, 32);
    std::string a = to_json(q).dump();
    std::string b = to_json(quadratic_criterion_check(-2.0, 32)).dump();
    CHECK(a == b);

    RationalMap R = RationalMap::quadratic(-2.0);
    ColletEckmannResult ce1 = collet_eckmann_classify(R, 0.3, 24);
    ColletEckmannResult ce2 = collet_eckmann_classify(R, 0.3, 24);
    CHECK(to_json(ce1).dump() == to_json(ce2).dump());
}

TEST_CASE("map specification round trip") {
    RationalMap R = RationalMap::create(Polynomial({0.3, 0.1, 0.7, 2.0}),
                                        Polynomial({0.9, 0.0, 1.0}));
    ordered_json j = map_to_json(R);
    RationalMap back = map_from_json(j);
    CHECK(back.numerator().coeffs() == R.numerator().coeffs());
    CHECK(back.denominator().coeffs() == R.denominator().coeffs());
    RationalMap q = map_from_json(ordered_json{{"quadratic_c", {-2.0, 0.0}}});
    CHECK(q.quadratic_parameter().has_value());
}
