#include "ruelle/rational_map.hpp"

#include <algorithm>
#include <random>

namespace ruelle {

namespace {

bool lex_less(cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

}  // namespace

RationalMap RationalMap::create(Polynomial P, Polynomial Q, const MapOptions& opt) {
    P = P.trimmed(0.0);
    Q = Q.trimmed(0.0);
    if (Q.is_zero()) throw hypothesis_error("denominator is identically zero");
    if (P.degree() < 2) throw hypothesis_error("map degree must be at least 2");
    if (P.degree() <= Q.degree())
        throw hypothesis_error(
            "infinity is not fixed (deg P <= deg Q); conjugate_to_fix_infinity first");

    RationalMap R;
    R.p_ = P;
    R.q_ = Q;
    R.deg_ = std::max(P.degree(), Q.degree());
    R.dp_ = P.derivative();
    R.dq_ = Q.derivative();
    R.w_ = R.dp_ * Q - P * R.dq_;
    R.dw_ = R.w_.derivative();

    // coprimality: no root of Q may be a root of P
    if (Q.degree() >= 1) {
        for (cplx z : poly_roots(Q, opt.root_tol)) {
            double scale = std::max(P.magnitude_scale(std::abs(z)), 1e-300);
            if (std::abs(P(z)) <= opt.coprime_tol * scale)
                throw hypothesis_error("numerator and denominator share a root");
        }
        // poles must be simple (a multiple pole is a non-simple critical point)
        auto qc = cluster_roots(poly_roots(Q, opt.root_tol), opt.root_tol);
        for (const auto& c : qc)
            if (c.multiplicity > 1)
                throw hypothesis_error("denominator has a multiple root");
    }

    // finite critical points: zeros of W = P'Q - PQ', all required simple
    if (R.w_.degree() >= 1) {
        auto clusters = cluster_roots(poly_roots(R.w_, opt.root_tol), opt.root_tol);
        for (const auto& cl : clusters) {
            if (cl.multiplicity > 1)
                throw hypothesis_error("critical point is not simple");
            cplx c = cl.value;
            cplx d2 = R.deriv(c, 2);
            if (std::abs(d2) <= opt.critical_simple_tol)
                throw hypothesis_error("second derivative vanishes at a critical point");
            R.crit_.push_back(c);
        }
        std::sort(R.crit_.begin(), R.crit_.end(), lex_less);
        for (cplx c : R.crit_) {
            R.critval_.push_back(R.eval_finite(c));
            cplx d2 = R.deriv(c, 2);
            R.d2crit_.push_back(d2);
            R.resid_.push_back(1.0 / d2);
        }
    }

    if (P.degree() >= Q.degree() + 2) {
        R.super_inf_ = true;
        R.lambda_ = 0.0;
    } else {
        R.super_inf_ = false;
        R.lambda_ = Q.leading() / P.leading();
    }

    double lead = std::abs(P.leading());
    double bound = 1.0;
    for (int i = 0; i <= P.degree(); ++i)
        bound = std::max(bound, std::abs(P.coeff(i)) / lead);
    for (int i = 0; i <= Q.degree(); ++i)
        bound = std::max(bound, std::abs(Q.coeff(i)) / lead);
    R.escape_radius_ = 2.0 * bound;
    return R;
}

RationalMap RationalMap::quadratic(cplx c) {
    RationalMap R = create(Polynomial({c, 0.0, 1.0}), Polynomial::constant(1.0));
    R.quad_c_ = c;
    return R;
}

bool RationalMap::is_pole(cplx z) const {
    if (q_.degree() < 1) return false;
    double scale = std::max(q_.magnitude_scale(std::abs(z)), 1e-300);
    return std::abs(q_(z)) <= 1e-13 * scale;
}

bool RationalMap::near_critical_point(cplx z, double tol, int* index) const {
    for (size_t i = 0; i < crit_.size(); ++i) {
        if (std::abs(z - crit_[i]) <= tol) {
            if (index) *index = static_cast<int>(i);
            return true;
        }
    }
    return false;
}

std::optional<cplx> RationalMap::eval(cplx z) const {
    if (is_pole(z)) return std::nullopt;
    return p_(z) / q_(z);
}

cplx RationalMap::eval_finite(cplx z) const {
    if (is_pole(z)) throw pole_error(z);
    return p_(z) / q_(z);
}

ScaledComplex RationalMap::eval_scaled(const ScaledComplex& z) const {
    ScaledComplex num = p_.eval_scaled(z);
    ScaledComplex den = q_.eval_scaled(z);
    if (den.is_zero()) throw pole_error(z.to_complex());
    return num / den;
}

cplx RationalMap::deriv(cplx z, int order) const {
    if (is_pole(z)) throw pole_error(z, "derivative at a pole");
    cplx qv = q_(z);
    if (order == 1) {
        return w_(z) / (qv * qv);
    }
    if (order == 2) {
        cplx wv = w_(z);
        cplx dwv = dw_(z);
        cplx dqv = dq_(z);
        return (dwv * qv - 2.0 * wv * dqv) / (qv * qv * qv);
    }
    if (order == 3) {
        // R'' = A/Q^3 with A = W'Q - 2WQ'; R''' = (A'Q - 3AQ')/Q^4
        cplx wv = w_(z);
        cplx dwv = dw_(z);
        cplx ddwv = dw_.derivative()(z);
        cplx dqv = dq_(z);
        cplx ddqv = dq_.derivative()(z);
        cplx a = dwv * qv - 2.0 * wv * dqv;
        cplx da = ddwv * qv - dwv * dqv - 2.0 * wv * ddqv;
        return (da * qv - 3.0 * a * dqv) / (qv * qv * qv * qv);
    }
    throw precondition_error("deriv: order must be 1, 2, or 3");
}

ScaledComplex RationalMap::deriv_scaled(const ScaledComplex& z) const {
    ScaledComplex qv = q_.eval_scaled(z);
    if (qv.is_zero()) throw pole_error(z.to_complex(), "derivative at a pole");
    return w_.eval_scaled(z) / (qv * qv);
}

OrbitData RationalMap::orbit(cplx z0, int n, std::optional<double> escape_radius) const {
    if (n < 0) throw precondition_error("orbit: n must be >= 0");
    double esc = escape_radius.value_or(escape_radius_);
    OrbitData o;
    o.points.reserve(n + 1);
    o.cumulative_derivatives.reserve(n + 1);
    o.points.push_back(z0);
    o.cumulative_derivatives.push_back(ScaledComplex::one());
    for (int k = 0; k < n; ++k) {
        cplx z = o.points.back();
        if (is_pole(z)) {
            o.pole_at = k;
            break;
        }
        cplx dz = deriv(z, 1);
        cplx next = p_(z) / q_(z);
        o.cumulative_derivatives.push_back(o.cumulative_derivatives.back() *
                                           ScaledComplex::from(dz));
        o.points.push_back(next);
        if (std::abs(next) > esc) {
            o.escaped_at = k + 1;
            break;
        }
    }
    return o;
}

std::vector<cplx> RationalMap::preimages(cplx w) const {
    Polynomial f = p_ - (w * q_);
    std::vector<cplx> ys = poly_roots(f, 1e-13);
    Polynomial df = f.derivative();
    for (cplx& y : ys) {
        for (int it = 0; it < 3; ++it) {
            cplx fv = f(y);
            cplx dv = df(y);
            if (std::abs(dv) < 1e-12 * (1.0 + df.magnitude_scale(std::abs(y)) * 1e-4))
                break;  // multiple preimage: keep the cluster centroid
            cplx step = fv / dv;
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
            y -= step;
        }
    }
    std::sort(ys.begin(), ys.end(), lex_less);
    for (cplx y : ys) {
        auto back = eval(y);
        if (back && std::abs(*back - w) > 1e-8 * std::max(1.0, std::abs(w)))
            throw root_convergence_error("preimages: fiber residual too large", ys, {});
    }
    return ys;
}

CriticalRelationReport check_no_simple_critical_relations(const RationalMap& R,
                                                          int N, double tol,
                                                          double warn_tol) {
    CriticalRelationReport rep;
    const auto& crit = R.critical_points();
    if (crit.size() < 2) return rep;  // vacuously true

    std::vector<std::vector<cplx>> orbits;
    for (cplx c : crit) {
        OrbitData o = R.orbit(c, N, 1e12);
        orbits.push_back(o.points);
    }
    for (size_t i = 0; i < crit.size(); ++i) {
        for (size_t j = i + 1; j < crit.size(); ++j) {
            for (size_t n = 0; n < orbits[i].size(); ++n) {
                for (size_t m = 0; m < orbits[j].size(); ++m) {
                    double dist = std::abs(orbits[i][n] - orbits[j][m]);
                    CriticalRelationReport::Witness w{crit[i], crit[j],
                                                      static_cast<int>(n),
                                                      static_cast<int>(m), dist};
                    if (dist <= tol) {
                        rep.passed = false;
                        if (!rep.witness) rep.witness = w;
                    } else if (dist <= warn_tol) {
                        rep.near_collisions.push_back(w);
                    }
                }
            }
        }
    }
    return rep;
}

std::pair<Polynomial, Polynomial> conjugate_to_fix_infinity(
    const Polynomial& P, const Polynomial& Q, std::optional<cplx> fixed_point,
    double tol) {
    if (!fixed_point) return {P, Q};  // already normalized at infinity
    cplx p = *fixed_point;
    cplx qv = Q(p);
    if (qv == 0.0) throw precondition_error("conjugation point is a pole");
    cplx rv = P(p) / qv;
    if (std::abs(rv - p) > tol * (1.0 + std::abs(p)))
        throw precondition_error("conjugation point is not fixed");

    int m = std::max(P.degree(), Q.degree());
    Polynomial S = P - (p * Q);
    cplx rem;
    Polynomial S1 = S.deflate(p, rem);
    double sscale = std::max(S.max_coeff_abs(), 1e-300);
    if (std::abs(rem) > 1e-7 * sscale * (1.0 + std::abs(p)))
        throw precondition_error("conjugation point is not fixed (deflation residual)");

    // B(w) = w^m Q(p + 1/w), A(w) = w^(m-1) S1(p + 1/w); conjugate is B/A
    Polynomial moeb({1.0, p});  // 1 + p w
    auto expand = [&moeb](const Polynomial& coeffs, int top) {
        Polynomial acc;
        Polynomial pw = Polynomial::constant(1.0);
        for (int j = 0; j <= coeffs.degree(); ++j) {
            if (coeffs.coeff(j) != 0.0)
                acc = acc + coeffs.coeff(j) * (Polynomial::monomial(top - j) * pw);
            pw = pw * moeb;
        }
        return acc;
    };
    Polynomial B = expand(Q, m);
    Polynomial A = expand(S1, m - 1);
    B = B.trimmed(1e-13);
    A = A.trimmed(1e-13);
    if (A.is_zero()) throw precondition_error("degenerate conjugation");
    return {B, A};
}

std::vector<Cycle> find_attracting_cycles(const RationalMap& R, int max_period,
                                          int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double rad = R.escape_radius();

    std::vector<cplx> seeds;
    auto push_tail = [&](cplx z0) {
        OrbitData o = R.orbit(z0, 120);
        if (!o.escaped_at && !o.pole_at && !o.points.empty())
            seeds.push_back(o.points.back());
    };
    for (cplx c : R.critical_points()) push_tail(c);
    for (int i = 0; i < samples; ++i) {
        cplx z(rad * uni(rng), rad * uni(rng));
        seeds.push_back(z);
        push_tail(z);
    }

    auto iterate = [&](cplx z, int p, bool* ok) -> std::pair<cplx, cplx> {
        // returns (R^p(z), (R^p)'(z)); ok=false on pole/overflow
        cplx val = z, der = 1.0;
        *ok = true;
        for (int t = 0; t < p; ++t) {
            if (R.is_pole(val) || std::abs(val) > 1e8) {
                *ok = false;
                return {val, der};
            }
            der *= R.deriv(val, 1);
            val = R.eval_finite(val);
        }
        return {val, der};
    };

    std::vector<Cycle> found;
    // cycles are point sets; two are the same when every point of one has a
    // partner of the other within 1e-6
    auto already = [&](const std::vector<cplx>& pts) {
        for (const auto& cy : found) {
            if (cy.points.size() != pts.size()) continue;
            bool all_close = true;
            for (cplx a : pts) {
                double dm = 1e300;
                for (cplx b : cy.points) dm = std::min(dm, std::abs(a - b));
                all_close = all_close && dm < 1e-6;
            }
            if (all_close) return true;
        }
        return false;
    };

    for (int p = 1; p <= max_period; ++p) {
        for (cplx s : seeds) {
            cplx z = s;
            bool converged = false;
            for (int it = 0; it < 80; ++it) {
                bool ok;
                auto [val, der] = iterate(z, p, &ok);
                if (!ok) break;
                cplx g = val - z;
                cplx dg = der - 1.0;
                if (std::abs(dg) < 1e-14) break;
                cplx step = g / dg;
                z -= step;
                if (std::abs(step) < 1e-13 * (1.0 + std::abs(z))) {
                    converged = true;
                    break;
                }
            }
            if (!converged) continue;
            bool ok;
            auto [val, der] = iterate(z, p, &ok);
            (void)der;
            if (!ok || std::abs(val - z) > 1e-8 * (1.0 + std::abs(z))) continue;

            // minimal period and the forward cycle
            std::vector<cplx> pts{z};
            cplx cur = z;
            int p0 = p;
            bool bad = false;
            for (int t = 1; t <= p; ++t) {
                if (R.is_pole(cur)) {
                    bad = true;
                    break;
                }
                cur = R.eval_finite(cur);
                if (std::abs(cur - z) <= 1e-8 * (1.0 + std::abs(z))) {
                    p0 = t;
                    break;
                }
                pts.push_back(cur);
            }
            if (bad || static_cast<int>(pts.size()) != p0) continue;
            cplx mult = 1.0;
            for (cplx w : pts) mult *= R.deriv(w, 1);
            if (std::abs(mult) >= 1.0) continue;
            if (already(pts)) continue;
            std::sort(pts.begin(), pts.end(), lex_less);
            found.push_back({pts, mult});
        }
    }
    std::sort(found.begin(), found.end(), [](const Cycle& a, const Cycle& b) {
        if (a.points.size() != b.points.size()) return a.points.size() < b.points.size();
        return lex_less(a.points.front(), b.points.front());
    });
    return found;
}

}  // namespace ruelle
