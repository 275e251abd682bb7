#ifndef RUELLE_RESOLVENT_HPP
#define RUELLE_RESOLVENT_HPP

#include "ruelle/rational_map.hpp"

namespace ruelle {

// One simple pole of 1/(R^n)': a depth-k preimage of a critical point.
struct ResolventPole {
    cplx location;          // y with R^k(y) = critical point
    int depth;              // k
    int base_index;         // index into R.critical_points()
    ScaledComplex residue;  // 1 / (R^n)''(y), evaluated in closed form
};

// 1/(R^n)'(z) = sum_i residue_i/(z - pole_i) + polynomial_part, where the
// polynomial part is the constant limit at infinity (lambda^n for maps
// fixing infinity).
struct ResolventDecomposition {
    int n = 0;
    std::vector<ResolventPole> poles;  // sorted by (re, im) of location
    cplx polynomial_part = 0.0;        // measured at large |z|
    cplx multiplier_power = 0.0;       // lambda^n, the cross-check value
    bool multiplier_consistent = true;

    ScaledComplex eval(cplx z) const;
};

struct ResolventOptions {
    int depth_cap = 10;
    double dedup_tol = 1e-10;
    long long node_cap = 2'000'000;
};

// Enumerates all k-th preimages of every finite critical point, k < n, and
// attaches the closed-form residue
//   b = 1 / (R''(c) * (R^(n-k-1))'(R(c)) * ((R^k)'(y))^2).
// Throws critical_relation_error when a preimage tree or a critical value
// orbit runs into a critical point (the poles would not be simple).
ResolventDecomposition decompose(const RationalMap& R, int n,
                                 const ResolventOptions& opt = {});

// s_n(a) = sum |b_i| / |a - c_i|; errors if a is within 1e-12 of a pole.
ScaledComplex resolvent_mass(const ResolventDecomposition& dec, cplx a);

// B_n = sum |b_i|
ScaledComplex residue_total(const ResolventDecomposition& dec);

// per-(critical point, depth) grouped absolute sums of residues
struct ResidueGroup {
    int base_index;
    int depth;
    ScaledComplex abs_sum;
};
std::vector<ResidueGroup> residue_groups(const ResolventDecomposition& dec);

}  // namespace ruelle

#endif
