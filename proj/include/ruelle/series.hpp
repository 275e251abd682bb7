#ifndef RUELLE_SERIES_HPP
#define RUELLE_SERIES_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "ruelle/ruelle_operator.hpp"

namespace ruelle {

enum class SeriesClass {
    absolutely_convergent,
    bounded_terms_divergent,
    slow_divergent,
    divergent,
    degenerate,
};

const char* to_string(SeriesClass c);

struct ClassifyConfig {
    double ratio_limsup_max = 0.95;
    double tail_fraction_max = 1e-6;
    int ratio_window = 10;
    double band_lo = 1e-3;
    double band_hi = 1e3;
    double logfit_r2_min = 0.99;
    double growth_floor = 1e-9;  // tail mass below this counts as settled
};

struct SeriesClassification {
    SeriesClass cls = SeriesClass::degenerate;
    double ratio_limsup = 0.0;
    double tail_fraction = 0.0;
    bool terms_in_band = false;
    double max_abs_term = 0.0;
    double logfit_coeff = 0.0;
    double logfit_r2 = 0.0;
    bool partial_sums_grow = false;
    int upto = 0;
    bool stable = true;  // unchanged when the window is extended by 50%
};

struct SeriesTrace {
    std::vector<ScaledComplex> terms;
    std::vector<ScaledComplex> partial_sums;
    std::vector<ScaledComplex> abs_partial_sums;  // real, nondecreasing
    std::optional<int> truncated_at;
    std::string truncation_reason;  // "critical-point" | "pole" |
                                    // "atom-collision" | "range"
    void push(const ScaledComplex& term);
    int size() const { return static_cast<int>(terms.size()); }
    bool degenerate_truncation() const {
        return truncated_at && truncation_reason != "range";
    }
};

struct ForwardSeries {
    SeriesTrace rp;  // signed terms 1/(R^n)'(R(x))
    SeriesTrace p;   // absolute values of the same terms
};

// One orbit pass of R(x) produces both forward series.
ForwardSeries forward_series(const RationalMap& R, cplx x, int N);

// Term n is the n-step kernel pullback of tau_a evaluated at x, computed
// incrementally by apply_star.
SeriesTrace backward_rs(const RationalMap& R, cplx x, cplx a, int N,
                        const ApplyStarOptions& opt = {});

// Term n sums 1/|(R^n)'(y)|^2 over the n-th preimages y of x.
SeriesTrace backward_s(const RationalMap& R, cplx x, int depth);

// Term n is 1/((R^n)'(a) (x - R^n(a))), from one orbit pass of a.
SeriesTrace modified_a(const RationalMap& R, cplx x, cplx a, int N);

// 1-based convolution c_i = sum_{j=1}^{i-1} a_j b_{i-j}; the product trace
// starts contributing at i = 2 (stored index 1).
SeriesTrace cauchy_product(const SeriesTrace& A, const SeriesTrace& B, int N);

SeriesClassification classify(const SeriesTrace& t, const ClassifyConfig& cfg = {},
                              int upto = -1);

// CSV columns: n, term_re, term_im, term_log2abs, psum_re, psum_im, abs_psum_log2
void export_trace_csv(const SeriesTrace& t, std::ostream& os);

// ---- formal relations between the series -------------------------------

enum class SignMode { all, plus_only, minus_only };

struct RelationVariant {
    int relation;          // 1 or 2
    char sign;             // '+' or '-'
    std::string argument;  // which argument reading this variant uses
    cplx lhs;
    cplx rhs;
    double residual_abs;
    double residual_rel;
};

struct SeriesRelationReport {
    std::vector<RelationVariant> variants;
    int best_relation1 = -1;  // index into variants
    int best_relation2 = -1;
    cplx a, x;
    int N = 0;
};

// Both printed forms of each relation disagree in a sign and in an inner
// argument; every reading is evaluated truncation-wise at N terms and the
// minimal-residual variant per relation is flagged.
//   relation 1:  sum_{n>=1} 1/(R^n)'(.) = sum_{n>=1} lambda^n
//                -+ sum_i (1/R''(c_i)) RS(c_i, ., pole) (x) RP(c_i)
//   relation 2:  RS(x, a) = A(x, a) +- sum_k (1/R''(c_k)) A(c_k, a) (x) RS(x, arg_k)
SeriesRelationReport verify_series_relations(const RationalMap& R, cplx a, cplx x,
                                             int N, SignMode mode = SignMode::all);

}  // namespace ruelle

#endif
