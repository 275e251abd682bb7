#include "ruelle/ruelle_operator.hpp"

#include <algorithm>

#include "ruelle/resolvent.hpp"

namespace ruelle {

namespace {

bool pole_lex_less(const ScaledComplex& a, const ScaledComplex& b) {
    double la = a.is_zero() ? -1e18 : a.log2_abs();
    double lb = b.is_zero() ? -1e18 : b.log2_abs();
    cplx ca = a.to_complex(), cb = b.to_complex();
    if (std::isfinite(ca.real()) && std::isfinite(cb.real()) &&
        std::isfinite(ca.imag()) && std::isfinite(cb.imag()) && ca != cb) {
        if (ca.real() != cb.real()) return ca.real() < cb.real();
        return ca.imag() < cb.imag();
    }
    if (la != lb) return la < lb;
    cplx ma = a.mantissa(), mb = b.mantissa();
    if (ma.real() != mb.real()) return ma.real() < mb.real();
    return ma.imag() < mb.imag();
}

bool poles_close(const ScaledComplex& a, const ScaledComplex& b, double tol) {
    ScaledComplex diff = a - b;
    if (diff.is_zero()) return true;
    double scale = 0.0;
    if (!a.is_zero()) scale = std::max(scale, a.log2_abs());
    if (!b.is_zero()) scale = std::max(scale, b.log2_abs());
    return diff.log2_abs() <= std::log2(tol) + std::max(0.0, scale);
}

}  // namespace

CauchyCombo CauchyCombo::kernel(cplx a) {
    CauchyCombo c;
    c.atoms.push_back({ScaledComplex::from(a), ScaledComplex::one()});
    return c;
}

ScaledComplex CauchyCombo::value_at(const ScaledComplex& z) const {
    ScaledComplex acc = ScaledComplex::from(constant_part);
    for (const auto& at : atoms) {
        ScaledComplex diff = z - at.pole;
        if (diff.is_zero() || poles_close(z, at.pole, 1e-10))
            throw atom_collision_error("evaluation point collides with an atom",
                                       z.to_complex(), at.pole.to_complex());
        acc = acc + at.weight / diff;
    }
    return acc;
}

ScaledComplex CauchyCombo::value_at(cplx z) const {
    return value_at(ScaledComplex::from(z));
}

ScaledComplex CauchyCombo::total_weight() const {
    ScaledComplex acc;
    for (const auto& at : atoms) acc = acc + at.weight;
    return acc;
}

ScaledComplex CauchyCombo::weight_at(cplx pole, double tol) const {
    ScaledComplex p = ScaledComplex::from(pole);
    for (const auto& at : atoms)
        if (poles_close(at.pole, p, tol)) return at.weight;
    return ScaledComplex::zero();
}

CauchyCombo& CauchyCombo::merge(double tol) {
    std::sort(atoms.begin(), atoms.end(), [](const CauchyAtom& x, const CauchyAtom& y) {
        return pole_lex_less(x.pole, y.pole);
    });
    std::vector<CauchyAtom> out;
    for (const auto& at : atoms) {
        bool merged = false;
        for (auto it = out.rbegin(); it != out.rend(); ++it) {
            if (poles_close(it->pole, at.pole, tol)) {
                it->weight = it->weight + at.weight;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(at);
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const CauchyAtom& a) { return a.weight.is_zero(); }),
              out.end());
    atoms = std::move(out);
    return *this;
}

CauchyCombo CauchyCombo::scaled(const ScaledComplex& s) const {
    CauchyCombo out;
    out.constant_part = (s * constant_part).to_complex();
    for (const auto& at : atoms) out.atoms.push_back({at.pole, at.weight * s});
    out.merge();
    return out;
}

CauchyCombo operator+(const CauchyCombo& a, const CauchyCombo& b) {
    CauchyCombo out;
    out.constant_part = a.constant_part + b.constant_part;
    out.atoms = a.atoms;
    out.atoms.insert(out.atoms.end(), b.atoms.begin(), b.atoms.end());
    out.merge();
    return out;
}

CauchyCombo apply_star(const RationalMap& R, const CauchyCombo& phi,
                       const ApplyStarOptions& opt) {
    const auto& crit = R.critical_points();
    const auto& critval = R.critical_values();
    const auto& bres = R.kernel_residues();

    for (const auto& at : phi.atoms) {
        if (!at.pole.is_zero() && std::abs(at.pole.log2_abs()) > double(opt.exponent_guard))
            throw range_exhausted_error("apply_star: pole exponent beyond guard");
        if (!at.weight.is_zero() &&
            std::abs(at.weight.log2_abs()) > double(opt.exponent_guard))
            throw range_exhausted_error("apply_star: weight exponent beyond guard");
    }

    CauchyCombo out;
    for (const auto& at : phi.atoms) {
        bool on_critical = false;
        size_t crit_idx = 0;
        if (at.pole.representable()) {
            cplx a = at.pole.to_complex();
            for (size_t i = 0; i < crit.size(); ++i) {
                if (std::abs(a - crit[i]) <= opt.critical_snap_tol) {
                    on_critical = true;
                    crit_idx = i;
                    break;
                }
            }
        }
        if (on_critical) {
            // limit form at a = c_i: the singular pair leaves the finite part
            //   -(R'''(c_i)/(2 R''(c_i)^2)) tau_{d_i},
            // and the other poles contribute as usual
            cplx ci = crit[crit_idx];
            cplx d2 = R.deriv(ci, 2);
            cplx d3 = R.deriv(ci, 3);
            ScaledComplex own =
                -(at.weight * ScaledComplex::from(d3 / (2.0 * d2 * d2)));
            out.atoms.push_back({ScaledComplex::from(critval[crit_idx]), own});
            for (size_t j = 0; j < crit.size(); ++j) {
                if (j == crit_idx) continue;
                ScaledComplex w =
                    -(at.weight * ScaledComplex::from(bres[j] / (ci - crit[j])));
                out.atoms.push_back({ScaledComplex::from(critval[j]), w});
            }
            continue;
        }
        // image kernel tau_{R(a)} / R'(a); drops when a is a pole of R
        bool a_is_pole =
            at.pole.representable() && R.is_pole(at.pole.to_complex());
        if (!a_is_pole) {
            ScaledComplex da = R.deriv_scaled(at.pole);
            if (da.is_zero())
                throw critical_relation_error("apply_star: vanishing derivative",
                                              at.pole.to_complex(),
                                              at.pole.to_complex(), 0);
            out.atoms.push_back({R.eval_scaled(at.pole), at.weight / da});
        }
        for (size_t i = 0; i < crit.size(); ++i) {
            ScaledComplex diff = at.pole - ScaledComplex::from(crit[i]);
            ScaledComplex w = -(at.weight * ScaledComplex::from(bres[i]) / diff);
            out.atoms.push_back({ScaledComplex::from(critval[i]), w});
        }
    }

    if (phi.constant_part != 0.0) {
        // admissible only when the pullback of 1 is itself constant
        cplx probes[4] = {cplx(1.3, 0.4), cplx(-0.7, 1.1), cplx(2.2, -0.9),
                          cplx(-1.6, -1.2)};
        cplx first = 0.0;
        bool ok = true;
        for (int k = 0; k < 4; ++k) {
            cplx v = apply_star_oracle(R, [](cplx) { return cplx(1.0); }, probes[k], 1);
            if (k == 0)
                first = v;
            else if (std::abs(v - first) > 1e-9 * (1.0 + std::abs(first)))
                ok = false;
        }
        if (!ok)
            throw precondition_error(
                "apply_star: nonzero constant part but the pullback of 1 is not constant");
        out.constant_part = phi.constant_part * first;
    }
    out.merge(opt.merge_tol);
    return out;
}

CauchyCombo apply_star_direct(const RationalMap& R, cplx a, int n) {
    if (n == 0) return CauchyCombo::kernel(a);
    ResolventDecomposition dec = decompose(R, n);
    OrbitData oa = R.orbit(a, n, 1e300);
    if (oa.pole_at || static_cast<int>(oa.points.size()) <= n)
        throw pole_error(a, "apply_star_direct: orbit of the pole parameter truncated");

    CauchyCombo out;
    out.atoms.push_back({ScaledComplex::from(oa.points[n]),
                         oa.cumulative_derivatives[n].reciprocal()});
    for (const auto& p : dec.poles) {
        // forward image R^n(pole): R^{n-depth}(critical point)
        OrbitData oc = R.orbit(R.critical_points()[p.base_index], n - p.depth, 1e300);
        cplx image = oc.points.at(n - p.depth);
        ScaledComplex w = -(p.residue / ScaledComplex::from(a - p.location));
        out.atoms.push_back({ScaledComplex::from(image), w});
    }
    out.merge();
    return out;
}

namespace {

void fiber_sum(const RationalMap& R, const Field& phi, cplx z, int n,
               const ScaledComplex& deriv_to_z, ScaledComplex& acc) {
    if (n == 0) {
        acc = acc + ScaledComplex::from(phi(z)) / (deriv_to_z * deriv_to_z);
        return;
    }
    for (cplx y : R.preimages(z)) {
        cplx dy = R.deriv(y, 1);
        if (std::abs(dy) < 1e-12)
            throw critical_relation_error("oracle fiber passes through a critical point",
                                          y, z, n);
        fiber_sum(R, phi, y, n - 1, deriv_to_z * ScaledComplex::from(dy), acc);
    }
}

}  // namespace

cplx apply_star_oracle(const RationalMap& R, const Field& phi, cplx z, int n) {
    if (n < 0) throw precondition_error("apply_star_oracle: n must be >= 0");
    double cost = std::pow(double(R.degree()), double(n));
    if (cost > 2e5) throw precondition_error("apply_star_oracle: fiber too large");
    ScaledComplex acc;
    fiber_sum(R, phi, z, n, ScaledComplex::one(), acc);
    return acc.to_complex();
}

cplx beltrami_eval(const RationalMap& R, const Field& mu, cplx z) {
    cplx d = R.deriv(z, 1);
    if (std::abs(d) < 1e-14)
        throw precondition_error("beltrami_eval: z is a critical point");
    return mu(R.eval_finite(z)) * std::conj(d) / d;
}

cplx apply_T(const RationalMap& R, const Field& F, cplx a) {
    cplx d = R.deriv(a, 1);
    if (std::abs(d) < 1e-14)
        throw precondition_error("apply_T: a is a critical point");
    if (R.is_pole(a)) throw pole_error(a, "apply_T: a is a pole");
    cplx acc = F(R.eval_finite(a)) / d;
    const auto& crit = R.critical_points();
    const auto& critval = R.critical_values();
    const auto& bres = R.kernel_residues();
    for (size_t i = 0; i < crit.size(); ++i)
        acc -= bres[i] * F(critval[i]) / (a - crit[i]);
    return acc;
}

CesaroTrail cesaro_T(const RationalMap& R, const Field& F, cplx a, int N) {
    if (N < 1) throw precondition_error("cesaro_T: N must be >= 1");
    const auto& crit = R.critical_points();
    const auto& critval = R.critical_values();
    const auto& bres = R.kernel_residues();
    const size_t nc = crit.size();

    CesaroTrail trail;
    double supF = 0.0;
    auto Feval = [&](cplx z) {
        cplx v = F(z);
        supF = std::max(supF, std::abs(v));
        return v;
    };

    // orbits (points + cumulative derivatives) of a and of every critical value
    struct Orb {
        std::vector<ScaledComplex> pts;
        std::vector<ScaledComplex> der;
        bool alive = true;
    };
    auto make_orb = [&](cplx z0) {
        Orb o;
        o.pts.push_back(ScaledComplex::from(z0));
        o.der.push_back(ScaledComplex::one());
        return o;
    };
    auto extend = [&](Orb& o) {
        if (!o.alive) return;
        try {
            ScaledComplex z = o.pts.back();
            if (!z.is_zero() && std::abs(z.log2_abs()) > double(1LL << 50)) {
                o.alive = false;
                return;
            }
            ScaledComplex d = R.deriv_scaled(z);
            o.der.push_back(o.der.back() * d);
            o.pts.push_back(R.eval_scaled(z));
        } catch (const pole_error&) {
            o.alive = false;
        } catch (const scaled_overflow_error&) {
            o.alive = false;
        }
    };

    Orb orb_a = make_orb(a);
    std::vector<Orb> orb_d;
    for (cplx d : critval) orb_d.push_back(make_orb(d));

    // rows[j][i] = T^j(F)(d_i)
    std::vector<std::vector<ScaledComplex>> rows;
    rows.push_back({});
    for (size_t i = 0; i < nc; ++i)
        rows[0].push_back(ScaledComplex::from(Feval(critval[i])));

    // T^j(F)(x) = F(R^j x)/(R^j)'(x) - sum_{t<j} (1/(R^t)'(x)) *
    //             sum_i b_i T^{j-1-t}(F)(d_i) / (R^t x - c_i)
    auto t_iter = [&](const Orb& o, int j) -> ScaledComplex {
        if (!o.alive || static_cast<int>(o.pts.size()) <= j)
            throw range_exhausted_error("cesaro_T: orbit truncated");
        if (!o.pts[j].representable())
            throw range_exhausted_error("cesaro_T: orbit point out of range");
        ScaledComplex acc =
            ScaledComplex::from(Feval(o.pts[j].to_complex())) / o.der[j];
        for (int t = 0; t < j; ++t) {
            ScaledComplex inner;
            for (size_t i = 0; i < nc; ++i) {
                ScaledComplex diff = o.pts[t] - ScaledComplex::from(crit[i]);
                if (diff.is_zero())
                    throw critical_relation_error("cesaro_T: orbit hits a critical point",
                                                  crit[i], crit[i], t);
                inner = inner +
                        ScaledComplex::from(bres[i]) * rows[j - 1 - t][i] / diff;
            }
            acc = acc - inner / o.der[t];
        }
        return acc;
    };

    ScaledComplex sum;
    try {
        for (int j = 0; j < N; ++j) {
            if (j > 0) {
                extend(orb_a);
                for (auto& o : orb_d) extend(o);
                rows.push_back({});
                for (size_t i = 0; i < nc; ++i)
                    rows[j].push_back(t_iter(orb_d[i], j));
            }
            ScaledComplex tj = t_iter(orb_a, j);
            trail.iterates_at_a.push_back(tj);
            sum = sum + tj;
            trail.averages.push_back(sum / ScaledComplex::from(double(j + 1)));
        }
        trail.computed = N;
    } catch (const range_exhausted_error&) {
        trail.truncated = true;
        trail.computed = static_cast<int>(trail.averages.size());
    }
    trail.sup_F_seen = supF;
    return trail;
}

}  // namespace ruelle
