#ifndef RUELLE_RATIONAL_MAP_HPP
#define RUELLE_RATIONAL_MAP_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "ruelle/polynomial.hpp"

namespace ruelle {

struct MapOptions {
    double coprime_tol = 1e-9;
    double critical_simple_tol = 1e-9;
    double root_tol = 1e-12;
};

// Orbit z0, R(z0), ... with chain-rule derivative products.
// cumulative_derivatives[n] = (R^n)'(z0); entry 0 is 1.
struct OrbitData {
    std::vector<cplx> points;
    std::vector<ScaledComplex> cumulative_derivatives;
    std::optional<int> escaped_at;  // first index with |z| > escape radius
    std::optional<int> pole_at;     // orbit landed on a pole; truncated there
};

struct Cycle {
    std::vector<cplx> points;
    cplx multiplier;
};

struct CriticalRelationReport {
    struct Witness {
        cplx c1, c2;
        int n, m;
        double distance;
    };
    bool passed = true;
    std::optional<Witness> witness;
    std::vector<Witness> near_collisions;  // within warn_tol but above tol
};

// Rational map R = P/Q fixing infinity (deg P > deg Q), with simple finite
// critical points.  Critical data is cached eagerly; instances are immutable
// and safe to share across threads.
class RationalMap {
public:
    static RationalMap create(Polynomial P, Polynomial Q, const MapOptions& opt = {});
    static RationalMap quadratic(cplx c);  // z^2 + c

    int degree() const { return deg_; }
    const Polynomial& numerator() const { return p_; }
    const Polynomial& denominator() const { return q_; }
    const std::vector<cplx>& critical_points() const { return crit_; }
    const std::vector<cplx>& critical_values() const { return critval_; }
    // b_i = 1/R''(c_i): residues of 1/R' at its simple poles
    const std::vector<cplx>& kernel_residues() const { return resid_; }
    cplx second_derivative_at_critical(int i) const { return d2crit_[i]; }

    // Multiplier of the fixed point at infinity (limit of 1/R' there);
    // exactly 0 when infinity is superattracting (deg P >= deg Q + 2).
    cplx infinity_multiplier() const { return lambda_; }
    bool superattracting_infinity() const { return super_inf_; }

    double escape_radius() const { return escape_radius_; }
    bool is_pole(cplx z) const;
    bool near_critical_point(cplx z, double tol, int* index = nullptr) const;

    // nullopt encodes the point at infinity (z hit a pole)
    std::optional<cplx> eval(cplx z) const;
    cplx eval_finite(cplx z) const;  // throws pole_error
    ScaledComplex eval_scaled(const ScaledComplex& z) const;

    cplx deriv(cplx z, int order = 1) const;  // order 1 or 2
    ScaledComplex deriv_scaled(const ScaledComplex& z) const;

    OrbitData orbit(cplx z0, int n, std::optional<double> escape_radius = {}) const;

    // the d solutions of R(y) = w, multiplicity included, Newton-polished
    std::vector<cplx> preimages(cplx w) const;

    std::optional<cplx> quadratic_parameter() const { return quad_c_; }

private:
    RationalMap() = default;
    Polynomial p_, q_, dp_, dq_, w_, dw_;  // w_ = P'Q - PQ' (zeros = critical pts)
    int deg_ = 0;
    std::vector<cplx> crit_, critval_, resid_, d2crit_;
    cplx lambda_ = 0.0;
    bool super_inf_ = false;
    double escape_radius_ = 4.0;
    std::optional<cplx> quad_c_;
};

struct QuadraticMap {
    cplx c;
    RationalMap to_rational() const { return RationalMap::quadratic(c); }
};

// Verifies |R^n(c1) - R^m(c2)| > tol for all pairs of distinct finite
// critical points and all n, m <= N.
CriticalRelationReport check_no_simple_critical_relations(const RationalMap& R,
                                                          int N, double tol,
                                                          double warn_tol = 1e-6);

// Conjugates P/Q by the Moebius map sending fixed_point to infinity
// (identity when fixed_point is absent, i.e. already infinity).  Returns
// the new (numerator, denominator); the result satisfies deg num > deg den.
std::pair<Polynomial, Polynomial> conjugate_to_fix_infinity(
    const Polynomial& P, const Polynomial& Q, std::optional<cplx> fixed_point,
    double tol = 1e-9);

// Newton refinement of R^p(z) = z seeded from critical-orbit tails and
// random samples; returns cycles with |multiplier| < 1.  Heuristic:
// completeness is not guaranteed.
std::vector<Cycle> find_attracting_cycles(const RationalMap& R, int max_period,
                                          int samples, std::uint64_t seed = 1);

}  // namespace ruelle

#endif
