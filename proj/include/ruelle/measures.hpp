#ifndef RUELLE_MEASURES_HPP
#define RUELLE_MEASURES_HPP

#include <functional>
#include <string>

#include "ruelle/ruelle_operator.hpp"

namespace ruelle {

// Finite list of weighted delta atoms; the distributional d-bar image of a
// kernel combination (the pi normalization constant is dropped throughout,
// so weights equal kernel weights).
struct MeasureAtom {
    ScaledComplex location;
    ScaledComplex weight;
};

struct AtomicMeasure {
    std::vector<MeasureAtom> atoms;  // location-sorted, pairwise distinct
    ScaledComplex total_weight() const;
    ScaledComplex weight_near(cplx loc, double tol = 1e-8) const;
    AtomicMeasure& merge(double tol = 1e-12);
    AtomicMeasure scaled(const ScaledComplex& s) const;
    friend AtomicMeasure operator+(const AtomicMeasure& a, const AtomicMeasure& b);
};

AtomicMeasure measure_from_combo(const CauchyCombo& combo);

// mu_n for the i-th critical value: atoms of the n-step kernel pullback of
// tau_{d_i}.  mu_sequence returns mu_0..mu_{n_max} (shorter when the
// iteration leaves the exponent guard; `truncated` reports that).
AtomicMeasure mu_n(const RationalMap& R, int i, int n,
                   const ApplyStarOptions& opt = {});
struct MeasureSequence {
    std::vector<AtomicMeasure> measures;
    bool truncated = false;
};
MeasureSequence mu_sequence(const RationalMap& R, int i, int n_max,
                            const ApplyStarOptions& opt = {});

// The z^2 + c recursion
//   mu_n = (delta_{R^n(c)} - delta_c)/(R^n)'(c) - sum_{j=1}^{n-1} mu_j /(R^{n-j})'(c)
// (c doubles as the parameter and the critical value).  Throws
// degenerate_parameter_error naming the first failing index when the
// critical orbit meets 0.
AtomicMeasure mu_n_quadratic_recursive(cplx c, int n);

// Cesaro average (1/l) sum_{k<l} mu_k.
AtomicMeasure nu_l(const RationalMap& R, int i, int l,
                   const ApplyStarOptions& opt = {});
MeasureSequence nu_sequence(const RationalMap& R, int i, int l_max,
                            const ApplyStarOptions& opt = {});

// ---- essential neighborhoods -------------------------------------------

// Disk |z| <= outer_radius minus open disks around attracting and
// superattracting cycle points; backward invariant by construction.
struct EssentialNeighborhood {
    double outer_radius = 0.0;
    struct Disk {
        cplx center;
        double radius;
    };
    std::vector<Disk> excluded;
    bool contains(cplx z) const;
    bool contains(const ScaledComplex& z) const;
};

struct NeighborhoodOptions {
    int max_halvings = 20;
    int invariance_samples = 1000;
    int circle_samples = 64;
    double margin = 0.5;
    std::uint64_t seed = 7;
    int max_period = 6;
    int cycle_samples = 48;
};

// Excluded-disk radii start at eps and shrink (per cycle point) until the
// sampled image of each disk lands in the next disk of its cycle; the outer
// radius starts at a sampled forward-invariance radius plus margin.  Errors
// when invariance cannot be achieved within the halving budget.
EssentialNeighborhood build_essential_neighborhood(
    const RationalMap& R, double eps, const NeighborhoodOptions& opt = {});

// Julia-set proxy via inverse iteration from a repelling periodic point.
std::vector<cplx> sample_julia_points(const RationalMap& R, int count,
                                      std::uint64_t seed = 11);

// ---- test functions and the weak-* probe --------------------------------

struct TestFunction {
    std::string name;
    std::function<ScaledComplex(const ScaledComplex&)> fn;
    double dbar_bound;  // L-infinity bound of the distributional d-bar
};

using TestFunctionFamily = std::vector<TestFunction>;

// Cauchy kernels anchored outside U, polynomials up to degree 4, and radial
// bump functions supported in U.
TestFunctionFamily build_test_family(const EssentialNeighborhood& U,
                                     int kernel_count = 8, int bump_count = 4);

ScaledComplex pair_measure(const AtomicMeasure& mu, const TestFunction& h);

struct ProbeConfig {
    double cauchy_tol = 1e-4;
    double growth_factor = 4.0;
    std::vector<double> subsequence_ratios = {1.3, 1.5, 2.0};
};

struct FunctionTrail {
    std::string name;
    std::vector<cplx> values;             // <nu_l, h>, l = 1..L
    std::vector<double> values_log2_abs;  // -4000 marks zero
    std::string verdict;                  // "cauchy" | "oscillating" | "growing"
    double tail_max_diff = 0.0;
    double max_abs = 0.0;
    std::vector<std::string> subsequence_verdicts;  // aligned with ratios
};

struct ProbeReport {
    int L = 0;
    std::vector<FunctionTrail> trails;
    bool converges_on_family = false;
    std::string witness;                           // first non-Cauchy member
    std::vector<double> shared_subsequence_ratios;  // Cauchy for every member
    double atoms_in_U_fraction = 1.0;
    bool measures_truncated = false;
};

ProbeReport weak_star_probe(const std::function<AtomicMeasure(int)>& nu,
                            const TestFunctionFamily& family, int L,
                            const EssentialNeighborhood* U = nullptr,
                            const ProbeConfig& cfg = {});

}  // namespace ruelle

#endif
