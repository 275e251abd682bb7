#ifndef RUELLE_DIAGNOSTICS_HPP
#define RUELLE_DIAGNOSTICS_HPP

#include <set>

#include "ruelle/measures.hpp"
#include "ruelle/resolvent.hpp"
#include "ruelle/series.hpp"

namespace ruelle {

// ---- quadratic criterion: derivative growth along the critical value orbit

struct QuadraticCriterionConfig {
    int min_subsequence = 10;
    double s_floor = 1e-3;            // limsup floor for |S_n| on the witnesses
    double band_halfwidth_log2 = 1.0; // "comparable to a constant" band
    double growth_min_log2 = 10.0;    // record growth demanded for "-> infinity"
    double s_growth_factor = 4.0;
    double degenerate_radius = 1e-12;
};

struct QuadraticCriterionResult {
    enum class Verdict { condition1, condition2, inconclusive, degenerate };
    Verdict verdict = Verdict::inconclusive;
    int N = 0;
    int failing_index = -1;          // first n with D_n = 0 (degenerate case)
    std::vector<double> log2_abs_D;  // index n = 0..N (0 for D_0 = 1)
    std::vector<cplx> S;             // S_n = sum_{j<=n} 1/D_j; frozen once
                                     // additions fall below one ulp
    std::vector<int> witness;        // indices backing the verdict
    int witness_suffix_start = -1;   // witness == all n >= this, when suffix-shaped
    double band_center_log2 = 0.0;   // condition 2 band center
    QuadraticCriterionConfig config;
};

const char* to_string(QuadraticCriterionResult::Verdict v);

// For R(z) = z^2 + c: D_n = (R^n)'(c) and S_n partial sums of 1/D_j.
// Condition 1: a subsequence with |D| -> infinity while |S| stays above the
// floor.  Condition 2: |D| confined to a narrow band while |S| grows.
// Escaped orbits continue in log magnitude, so N = 64 trails always complete.
QuadraticCriterionResult quadratic_criterion_check(
    cplx c, int N, const QuadraticCriterionConfig& cfg = {});

// ---- Collet-Eckmann classification --------------------------------------

struct ColletEckmannPair {
    cplx critical_point;
    cplx orbit_point;
    SeriesClassification rs_class;
    SeriesClassification rp_class;
    std::set<int> cases;  // which of the three conditions the pair satisfies
};

struct ColletEckmannResult {
    int overall_case = 0;  // 0 = none
    std::vector<ColletEckmannPair> pairs;
    std::vector<cplx> orbit_points;
    int N = 0;
};

// Collects the first 2d distinct orbit points of a (throws short_orbit_error
// when the orbit revisits itself too early), classifies the backward series
// at each critical point against each orbit point and the forward series at
// each critical point, and maps each pair onto the three cases.
ColletEckmannResult collet_eckmann_classify(const RationalMap& R, cplx a, int N,
                                            const ClassifyConfig& cfg = {});

// decision table used per pair (exposed for direct unit testing)
std::set<int> collet_eckmann_cases(const SeriesClassification& rs,
                                   const SeriesClassification& rp,
                                   const ClassifyConfig& cfg = {});

// ---- Cesaro-averaged pullback mass at critical points (condition (*)) ----

struct CesaroConditionConfig {
    double bound = 1e3;
    double trend_slack = 1.05;
};

struct CesaroConditionResult {
    struct Entry {
        int N;
        double value;       // A_N(x); capped at 2^1000 when enormous
        double value_log2;  // exact magnitude in log2
    };
    struct Row {
        cplx x;
        std::vector<Entry> values;
        std::vector<int> excluded_j;  // atom collisions excluded per term index
        bool bounded = false;
    };
    std::vector<Row> rows;
    bool bounded = false;
    double max_value = 0.0;
    CesaroConditionConfig config;
};

// A_N(x) = (1/N) sum_{j<N} sum_k |pullback^j(tau_x)(c_k)| /
//          (|R''(c_k)| |(R^{N-j-1})'(R(c_k))|), for x over the first 2d
// distinct orbit points of a and every N in Ns.
CesaroConditionResult cesaro_condition_check(const RationalMap& R, cplx a,
                                             const std::vector<int>& Ns,
                                             const CesaroConditionConfig& cfg = {});

// ---- resolvent mass s_n boundedness --------------------------------------

struct ResolventMassResult {
    std::vector<double> values;       // s_n(d), n = 1..computed
    std::vector<double> values_log2;
    int requested = 0;
    std::string verdict;              // "bounded" | "growing" | "short"
    std::string error;                // first failure (names n), empty if none
    int failed_at = -1;
    bool long_orbit = false;          // card of the orbit of d exceeds 2d-1
};

ResolventMassResult resolvent_mass_check(const RationalMap& R, cplx d_point,
                                         int n_max,
                                         const ResolventOptions& opt = {});

// ---- aggregate report -----------------------------------------------------

struct HypothesisChecks {
    bool simple_critical_points = false;
    bool no_critical_relations = false;
    int relation_depth = 0;
    std::string detail;
};

struct DiagnosticsReport {
    std::string map_description;
    HypothesisChecks hypotheses;
    std::optional<QuadraticCriterionResult> quadratic;
    std::optional<ColletEckmannResult> collet_eckmann;
    std::optional<CesaroConditionResult> cesaro_condition;
    std::optional<ResolventMassResult> resolvent_mass;
    std::optional<SeriesRelationReport> relations;
    std::optional<ProbeReport> probe;
    bool probe_consistent_with_certificate = true;  // soft expectation
    std::vector<std::string> notes;  // why skipped sections were skipped
    std::string overall;  // "certificate: ..." | "inconclusive" | "degenerate"
                          // | "hypotheses-violated"
};

}  // namespace ruelle

#endif
