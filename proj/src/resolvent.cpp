#include "ruelle/resolvent.hpp"

#include <algorithm>
#include <cmath>

namespace ruelle {

ScaledComplex ResolventDecomposition::eval(cplx z) const {
    ScaledComplex acc = ScaledComplex::from(polynomial_part);
    for (const auto& p : poles)
        acc = acc + p.residue / ScaledComplex::from(z - p.location);
    return acc;
}

namespace {

// 1/(R^n)'(z) at a scaled point, via the chain rule along the orbit of z.
ScaledComplex reciprocal_iterated_derivative(const RationalMap& R,
                                             ScaledComplex z, int n) {
    ScaledComplex der = ScaledComplex::one();
    for (int t = 0; t < n; ++t) {
        der = der * R.deriv_scaled(z);
        z = R.eval_scaled(z);
    }
    return der.reciprocal();
}

}  // namespace

ResolventDecomposition decompose(const RationalMap& R, int n,
                                 const ResolventOptions& opt) {
    if (n < 1) throw precondition_error("decompose: n must be >= 1");
    if (n > opt.depth_cap)
        throw precondition_error("decompose: n exceeds the depth cap");

    const auto& crit = R.critical_points();
    const auto& critval = R.critical_values();
    if (crit.empty())
        throw hypothesis_error("decompose: map has no finite critical points");

    ResolventDecomposition dec;
    dec.n = n;

    // (R^m)'(d_i) for m = 0..n-1, along each critical value orbit
    std::vector<std::vector<ScaledComplex>> val_derivs(crit.size());
    for (size_t i = 0; i < crit.size(); ++i) {
        ScaledComplex z = ScaledComplex::from(critval[i]);
        ScaledComplex der = ScaledComplex::one();
        std::vector<ScaledComplex> cum{der};
        for (int t = 0; t < n - 1; ++t) {
            int idx;
            if (z.representable() &&
                R.near_critical_point(z.to_complex(), opt.dedup_tol, &idx))
                throw critical_relation_error(
                    "critical value orbit hits a critical point",
                    R.critical_points()[idx], z.to_complex(), t);
            der = der * R.deriv_scaled(z);
            z = R.eval_scaled(z);
            cum.push_back(der);
        }
        val_derivs[i] = std::move(cum);
    }

    long long nodes = 0;
    for (size_t i = 0; i < crit.size(); ++i) {
        cplx d2 = R.second_derivative_at_critical(static_cast<int>(i));
        // depth-k fibers over the critical point, with (R^k)'(y) per node
        std::vector<std::pair<cplx, ScaledComplex>> level{{crit[i], ScaledComplex::one()}};
        for (int k = 0; k < n; ++k) {
            for (const auto& [y, kder] : level) {
                if (k > 0) {
                    int idx;
                    if (R.near_critical_point(y, opt.dedup_tol, &idx))
                        throw critical_relation_error(
                            "preimage tree hits a critical point",
                            R.critical_points()[idx], y, k);
                }
                // b = 1/(R''(c) (R^{n-k-1})'(d) ((R^k)'(y))^2)
                ScaledComplex denom = ScaledComplex::from(d2) *
                                      val_derivs[i][n - k - 1] * kder * kder;
                if (denom.is_zero())
                    throw critical_relation_error(
                        "vanishing derivative in residue denominator", crit[i], y, k);
                dec.poles.push_back({y, k, static_cast<int>(i), denom.reciprocal()});
            }
            if (k + 1 < n) {
                std::vector<std::pair<cplx, ScaledComplex>> next;
                for (const auto& [y, kder] : level) {
                    for (cplx pre : R.preimages(y)) {
                        nodes++;
                        if (nodes > opt.node_cap)
                            throw precondition_error("decompose: node cap exceeded");
                        next.emplace_back(pre,
                                          ScaledComplex::from(R.deriv(pre, 1)) * kder);
                    }
                }
                level = std::move(next);
            }
        }
    }

    std::sort(dec.poles.begin(), dec.poles.end(),
              [](const ResolventPole& a, const ResolventPole& b) {
                  if (a.location.real() != b.location.real())
                      return a.location.real() < b.location.real();
                  return a.location.imag() < b.location.imag();
              });
    for (size_t i = 0; i + 1 < dec.poles.size(); ++i) {
        if (std::abs(dec.poles[i].location - dec.poles[i + 1].location) <=
            opt.dedup_tol)
            throw critical_relation_error(
                "pole collision in the decomposition (critical relation)",
                crit[dec.poles[i].base_index], dec.poles[i].location,
                dec.poles[i].depth);
    }

    // polynomial part: Richardson-extrapolated limit of 1/(R^n)' at |z| = 1e6
    cplx dir = std::polar(1.0, 0.7330382858376184);
    ScaledComplex f1 = reciprocal_iterated_derivative(
        R, ScaledComplex::from(1e6 * dir), n);
    ScaledComplex f2 = reciprocal_iterated_derivative(
        R, ScaledComplex::from(2e6 * dir), n);
    dec.polynomial_part = (ScaledComplex::from(2.0) * f2 - f1).to_complex();
    if (std::abs(dec.polynomial_part) < 1e-10) dec.polynomial_part = 0.0;

    cplx lp = 1.0;
    for (int t = 0; t < n; ++t) lp *= R.infinity_multiplier();
    dec.multiplier_power = lp;
    dec.multiplier_consistent =
        std::abs(dec.polynomial_part - lp) <= std::max(1e-6, 1e-6 * std::abs(lp));
    return dec;
}

ScaledComplex resolvent_mass(const ResolventDecomposition& dec, cplx a) {
    ScaledComplex acc;
    for (const auto& p : dec.poles) {
        double dist = std::abs(a - p.location);
        if (dist <= 1e-12)
            throw atom_collision_error("resolvent_mass: point sits on a pole", a,
                                       p.location, dec.n);
        acc = acc + p.residue.abs() / ScaledComplex::from(dist);
    }
    return acc;
}

ScaledComplex residue_total(const ResolventDecomposition& dec) {
    ScaledComplex acc;
    for (const auto& p : dec.poles) acc = acc + p.residue.abs();
    return acc;
}

std::vector<ResidueGroup> residue_groups(const ResolventDecomposition& dec) {
    std::vector<ResidueGroup> out;
    for (const auto& p : dec.poles) {
        auto it = std::find_if(out.begin(), out.end(), [&](const ResidueGroup& g) {
            return g.base_index == p.base_index && g.depth == p.depth;
        });
        if (it == out.end()) {
            out.push_back({p.base_index, p.depth, p.residue.abs()});
        } else {
            it->abs_sum = it->abs_sum + p.residue.abs();
        }
    }
    std::sort(out.begin(), out.end(), [](const ResidueGroup& a, const ResidueGroup& b) {
        if (a.base_index != b.base_index) return a.base_index < b.base_index;
        return a.depth < b.depth;
    });
    return out;
}

}  // namespace ruelle
