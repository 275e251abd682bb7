#ifndef RUELLE_RUELLE_OPERATOR_HPP
#define RUELLE_RUELLE_OPERATOR_HPP

#include <functional>

#include "ruelle/rational_map.hpp"

namespace ruelle {

// Finite combination sum_k w_k / (z - a_k) + constant_part.  Closed under
// the pullback action of a rational map; poles are kept pairwise distinct
// by merging.  Poles are stored scaled so escaped forward orbits keep
// their atoms representable.
struct CauchyAtom {
    ScaledComplex pole;
    ScaledComplex weight;
};

class CauchyCombo {
public:
    std::vector<CauchyAtom> atoms;  // sorted by pole (re, im)
    cplx constant_part = 0.0;

    static CauchyCombo kernel(cplx a);  // tau_a = 1/(z - a)

    // Throws atom_collision_error when z is within 1e-10 of a pole.
    ScaledComplex value_at(cplx z) const;
    ScaledComplex value_at(const ScaledComplex& z) const;

    ScaledComplex total_weight() const;
    ScaledComplex weight_at(cplx pole, double tol = 1e-9) const;  // 0 if absent

    CauchyCombo& merge(double tol = 1e-12);
    CauchyCombo scaled(const ScaledComplex& s) const;
    friend CauchyCombo operator+(const CauchyCombo& a, const CauchyCombo& b);
};

struct ApplyStarOptions {
    double critical_snap_tol = 1e-10;  // pole this close to a critical point
                                       // is treated as sitting on it
    double merge_tol = 1e-12;
    long long exponent_guard = 1LL << 50;  // beyond this the iteration stops
};

// Single-step pullback in closed form:
//   tau_a -> tau_{R(a)}/R'(a) - sum_i (b_i/(a - c_i)) tau_{R(c_i)},
// extended linearly over atoms; b_i = 1/R''(c_i).  A pole sitting on a
// critical point c_i uses the limit form -sum_{j != i} (b_j/(c_i - c_j))
// tau_{R(c_j)} (the singular pair cancels).  Throws range_exhausted_error
// when atom exponents leave the guard range.
CauchyCombo apply_star(const RationalMap& R, const CauchyCombo& phi,
                       const ApplyStarOptions& opt = {});

// n-step closed form from the depth-n resolvent decomposition:
//   tau_a -> tau_{R^n(a)}/(R^n)'(a) - sum_i (b^n_i/(a - c^n_i)) tau_{R^n(c^n_i)}.
CauchyCombo apply_star_direct(const RationalMap& R, cplx a, int n);

using Field = std::function<cplx(cplx)>;

// Brute-force preimage sum: sum over the d^n solutions of R^n(y) = z of
// phi(y)/((R^n)'(y))^2.  The independent oracle for every closed form here.
cplx apply_star_oracle(const RationalMap& R, const Field& phi, cplx z, int n);

// mu(R(z)) * conj(R'(z)) / R'(z); preserves modulus pointwise.
cplx beltrami_eval(const RationalMap& R, const Field& mu, cplx z);

// T(F)(a) = F(R(a))/R'(a) - sum_i b_i F(R(c_i))/(a - c_i)
cplx apply_T(const RationalMap& R, const Field& F, cplx a);

struct CesaroTrail {
    std::vector<ScaledComplex> averages;       // A_m, m = 1..N
    std::vector<ScaledComplex> iterates_at_a;  // T^j(F)(a), j = 0..N-1
    bool truncated = false;                    // exponent guard tripped
    int computed = 0;                          // iterates actually available
    double sup_F_seen = 0.0;                   // max |F| over consumed points
};

// Cesaro averages (1/m) sum_{j<m} T^j(F)(a).  The recursion consumes only
// the values T^j(F)(d_i) at critical values; those rows are memoized, so a
// trail costs O(N * #critical) per extension step.
CesaroTrail cesaro_T(const RationalMap& R, const Field& F, cplx a, int N);

}  // namespace ruelle

#endif
