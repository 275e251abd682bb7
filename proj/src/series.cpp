#include "ruelle/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace ruelle {

const char* to_string(SeriesClass c) {
    switch (c) {
        case SeriesClass::absolutely_convergent: return "absolutely-convergent";
        case SeriesClass::bounded_terms_divergent: return "bounded-terms-divergent";
        case SeriesClass::slow_divergent: return "slow-divergent";
        case SeriesClass::divergent: return "divergent";
        case SeriesClass::degenerate: return "degenerate";
    }
    return "?";
}

void SeriesTrace::push(const ScaledComplex& term) {
    terms.push_back(term);
    ScaledComplex prev_sum =
        partial_sums.empty() ? ScaledComplex::zero() : partial_sums.back();
    ScaledComplex prev_abs =
        abs_partial_sums.empty() ? ScaledComplex::zero() : abs_partial_sums.back();
    partial_sums.push_back(prev_sum + term);
    abs_partial_sums.push_back(prev_abs + term.abs());
}

ForwardSeries forward_series(const RationalMap& R, cplx x, int N) {
    ForwardSeries out;
    if (R.is_pole(x)) {
        out.rp.truncated_at = 0;
        out.rp.truncation_reason = "pole";
        out.p.truncated_at = 0;
        out.p.truncation_reason = "pole";
        return out;
    }
    ScaledComplex z = ScaledComplex::from(R.eval_finite(x));
    ScaledComplex der = ScaledComplex::one();
    for (int n = 0; n <= N; ++n) {
        if (n > 0) {
            ScaledComplex d;
            bool dead = false;
            std::string reason;
            try {
                if (!z.is_zero() && std::abs(z.log2_abs()) > double(1LL << 50)) {
                    dead = true;
                    reason = "range";
                } else if (z.representable() &&
                           R.near_critical_point(z.to_complex(), 1e-12)) {
                    dead = true;
                    reason = "critical-point";
                } else {
                    d = R.deriv_scaled(z);
                    if (d.is_zero()) {
                        dead = true;
                        reason = "critical-point";
                    }
                }
            } catch (const pole_error&) {
                dead = true;
                reason = "pole";
            } catch (const scaled_overflow_error&) {
                dead = true;
                reason = "range";
            }
            if (dead) {
                out.rp.truncated_at = n;
                out.rp.truncation_reason = reason;
                out.p.truncated_at = n;
                out.p.truncation_reason = reason;
                break;
            }
            der = der * d;
            z = R.eval_scaled(z);
        }
        ScaledComplex term = der.reciprocal();
        out.rp.push(term);
        out.p.push(term.abs());
    }
    return out;
}

SeriesTrace backward_rs(const RationalMap& R, cplx x, cplx a, int N,
                        const ApplyStarOptions& opt) {
    SeriesTrace t;
    CauchyCombo combo = CauchyCombo::kernel(a);
    for (int n = 0; n <= N; ++n) {
        try {
            if (n > 0) combo = apply_star(R, combo, opt);
            t.push(combo.value_at(x));
        } catch (const range_exhausted_error&) {
            t.truncated_at = n;
            t.truncation_reason = "range";
            break;
        } catch (const atom_collision_error& e) {
            throw atom_collision_error("backward series: evaluation point collides "
                                       "with an atom",
                                       e.point, e.atom, n);
        }
    }
    return t;
}

namespace {

void abs_fiber_sum(const RationalMap& R, cplx z, int n,
                   const ScaledComplex& deriv_to_z, ScaledComplex& acc) {
    if (n == 0) {
        acc = acc + (deriv_to_z * deriv_to_z).abs().reciprocal();
        return;
    }
    for (cplx y : R.preimages(z)) {
        cplx dy = R.deriv(y, 1);
        if (std::abs(dy) < 1e-12)
            throw critical_relation_error(
                "backward series fiber passes through a critical point", y, z, n);
        abs_fiber_sum(R, y, n - 1, deriv_to_z * ScaledComplex::from(dy), acc);
    }
}

}  // namespace

SeriesTrace backward_s(const RationalMap& R, cplx x, int depth) {
    double cost = std::pow(double(R.degree()), double(depth));
    if (cost > 2e5) throw precondition_error("backward_s: fiber too large");
    SeriesTrace t;
    for (int n = 0; n <= depth; ++n) {
        ScaledComplex acc;
        abs_fiber_sum(R, x, n, ScaledComplex::one(), acc);
        t.push(acc);
    }
    return t;
}

SeriesTrace modified_a(const RationalMap& R, cplx x, cplx a, int N) {
    SeriesTrace t;
    ScaledComplex z = ScaledComplex::from(a);
    ScaledComplex der = ScaledComplex::one();
    for (int n = 0; n <= N; ++n) {
        if (n > 0) {
            bool dead = false;
            std::string reason;
            try {
                if (!z.is_zero() && std::abs(z.log2_abs()) > double(1LL << 50)) {
                    dead = true;
                    reason = "range";
                } else if (z.representable() &&
                           R.near_critical_point(z.to_complex(), 1e-12)) {
                    dead = true;
                    reason = "critical-point";
                } else {
                    ScaledComplex d = R.deriv_scaled(z);
                    if (d.is_zero()) {
                        dead = true;
                        reason = "critical-point";
                    } else {
                        der = der * d;
                        z = R.eval_scaled(z);
                    }
                }
            } catch (const pole_error&) {
                dead = true;
                reason = "pole";
            } catch (const scaled_overflow_error&) {
                dead = true;
                reason = "range";
            }
            if (dead) {
                t.truncated_at = n;
                t.truncation_reason = reason;
                break;
            }
        }
        ScaledComplex diff = ScaledComplex::from(x) - z;
        if (diff.is_zero() || (diff.representable() &&
                               std::abs(diff.to_complex()) <= 1e-10)) {
            t.truncated_at = n;
            t.truncation_reason = "atom-collision";
            break;
        }
        t.push((der * diff).reciprocal());
    }
    return t;
}

SeriesTrace cauchy_product(const SeriesTrace& A, const SeriesTrace& B, int N) {
    if (A.size() < N - 1 || B.size() < N - 1)
        throw precondition_error("cauchy_product: traces too short for N");
    SeriesTrace t;
    t.push(ScaledComplex::zero());  // 1-based index 1 has no contributions
    for (int i = 2; i <= N; ++i) {
        ScaledComplex c;
        for (int j = 1; j <= i - 1; ++j)
            c = c + A.terms[j - 1] * B.terms[i - j - 1];
        t.push(c);
    }
    return t;
}

namespace {

double safe_log2_abs(const ScaledComplex& v) {
    return v.is_zero() ? -4000.0 : v.log2_abs();
}

}  // namespace

namespace {
SeriesClassification classify_impl(const SeriesTrace& t, const ClassifyConfig& cfg,
                                   int upto);
}

SeriesClassification classify(const SeriesTrace& t, const ClassifyConfig& cfg,
                              int upto) {
    SeriesClassification r = classify_impl(t, cfg, upto);
    if (r.upto >= 9) {
        SeriesClassification shorter = classify_impl(t, cfg, (2 * r.upto) / 3);
        r.stable = (shorter.cls == r.cls);
    }
    return r;
}

namespace {

SeriesClassification classify_impl(const SeriesTrace& t, const ClassifyConfig& cfg,
                                   int upto) {
    SeriesClassification r;
    int n = (upto < 0) ? t.size() : std::min(upto, t.size());
    r.upto = n;
    if (t.degenerate_truncation()) {
        r.cls = SeriesClass::degenerate;
        return r;
    }
    if (n < 4) {
        r.cls = SeriesClass::degenerate;
        return r;
    }

    std::vector<double> at(n), ap(n);
    for (int i = 0; i < n; ++i) {
        at[i] = t.terms[i].is_zero() ? 0.0
                                     : std::exp2(std::min(1000.0, t.terms[i].log2_abs()));
        ap[i] = t.abs_partial_sums[i].is_zero()
                    ? 0.0
                    : std::exp2(std::min(1000.0, t.abs_partial_sums[i].log2_abs()));
    }

    // windowed ratio test over the last terms
    int w = std::min(cfg.ratio_window, n / 2);
    double limsup = 0.0;
    for (int i = n - w; i < n; ++i) {
        if (i < 1) continue;
        if (at[i - 1] > 0.0 && at[i] > 0.0)
            limsup = std::max(limsup, at[i] / at[i - 1]);
    }
    r.ratio_limsup = limsup;

    double total = ap[n - 1];
    double tail = total - ap[(3 * n) / 4 - 1];
    r.tail_fraction = (total > 0.0) ? tail / total : 0.0;
    r.partial_sums_grow = (total > 0.0) && (tail > cfg.growth_floor * total);

    r.max_abs_term = 0.0;
    for (double v : at) r.max_abs_term = std::max(r.max_abs_term, v);
    bool band = true;
    for (int i = n / 2; i < n; ++i)
        band = band && at[i] >= cfg.band_lo && at[i] <= cfg.band_hi;
    r.terms_in_band = band;

    // fit abs partial sums against c * log k over the trace past a transient
    {
        int k0 = std::max(2, n / 8);
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        int m = 0;
        for (int k = k0; k < n; ++k) {
            double xlog = std::log(double(k + 1));
            double y = ap[k];
            sx += xlog;
            sy += y;
            sxx += xlog * xlog;
            sxy += xlog * y;
            syy += y * y;
            ++m;
        }
        double denom = m * sxx - sx * sx;
        if (m >= 4 && denom > 0.0) {
            double slope = (m * sxy - sx * sy) / denom;
            double ymean = sy / m;
            double ss_tot = syy - m * ymean * ymean;
            double ss_res = 0.0;
            double intercept = (sy - slope * sx) / m;
            for (int k = k0; k < n; ++k) {
                double pred = intercept + slope * std::log(double(k + 1));
                double e = ap[k] - pred;
                ss_res += e * e;
            }
            r.logfit_coeff = slope;
            r.logfit_r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
        }
    }

    if (limsup < cfg.ratio_limsup_max && r.tail_fraction < cfg.tail_fraction_max) {
        r.cls = SeriesClass::absolutely_convergent;
    } else if (band && r.partial_sums_grow) {
        r.cls = SeriesClass::bounded_terms_divergent;
    } else if (r.partial_sums_grow && r.logfit_coeff > 0.0 &&
               r.logfit_r2 >= cfg.logfit_r2_min) {
        r.cls = SeriesClass::slow_divergent;
    } else if (r.partial_sums_grow) {
        r.cls = SeriesClass::divergent;
    } else {
        // no tail growth but the ratio window never settled
        r.cls = SeriesClass::absolutely_convergent;
    }
    return r;
}

}  // namespace

void export_trace_csv(const SeriesTrace& t, std::ostream& os) {
    os << "n,term_re,term_im,term_log2abs,psum_re,psum_im,abs_psum_log2\n";
    char buf[512];
    for (int i = 0; i < t.size(); ++i) {
        cplx term = t.terms[i].to_complex();
        cplx ps = t.partial_sums[i].to_complex();
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", i,
                      term.real(), term.imag(), safe_log2_abs(t.terms[i]), ps.real(),
                      ps.imag(), safe_log2_abs(t.abs_partial_sums[i]));
        os << buf;
    }
}

namespace {

ScaledComplex partial_sum(const SeriesTrace& t, int from, int upto) {
    ScaledComplex acc;
    for (int i = from; i < upto && i < t.size(); ++i) acc = acc + t.terms[i];
    return acc;
}

// forward trace with terms 1/(R^n)'(b), n = 0..N
SeriesTrace forward_at_point(const RationalMap& R, cplx b, int N) {
    SeriesTrace t;
    ScaledComplex z = ScaledComplex::from(b);
    ScaledComplex der = ScaledComplex::one();
    t.push(ScaledComplex::one());
    for (int n = 1; n <= N; ++n) {
        ScaledComplex d = R.deriv_scaled(z);
        if (d.is_zero()) {
            t.truncated_at = n;
            t.truncation_reason = "critical-point";
            break;
        }
        der = der * d;
        z = R.eval_scaled(z);
        t.push(der.reciprocal());
    }
    return t;
}

}  // namespace

SeriesRelationReport verify_series_relations(const RationalMap& R, cplx a, cplx x,
                                             int N, SignMode mode) {
    SeriesRelationReport rep;
    rep.a = a;
    rep.x = x;
    rep.N = N;
    const auto& crit = R.critical_points();
    const auto& critval = R.critical_values();
    const auto& bres = R.kernel_residues();
    cplx lambda = R.infinity_multiplier();
    cplx Ra = R.eval_finite(a);

    auto want_sign = [&](char s) {
        if (mode == SignMode::all) return true;
        return (mode == SignMode::plus_only) ? (s == '+') : (s == '-');
    };

    // --- relation 1 ---------------------------------------------------
    // candidate argument readings for the forward side and the kernel pole
    struct R1Arg {
        std::string name;
        cplx forward_point;  // terms 1/(R^n)'(forward_point)
        cplx pole;           // kernel parameter of the backward factors
    };
    std::vector<R1Arg> r1args = {
        {"forward-image(as printed: lhs R(a), pole a)", Ra, a},
        {"pole-promoted(lhs R(a), pole R(a))", Ra, Ra},
        {"point-direct(lhs a, pole a)", a, a},
    };
    cplx lambda_sum = 0.0;
    {
        cplx lp = lambda;
        for (int i = 1; i <= N; ++i) {
            lambda_sum += lp;
            lp *= lambda;
        }
    }
    for (const auto& arg : r1args) {
        SeriesTrace fwd = forward_at_point(R, arg.forward_point, N);
        if (fwd.size() < N + 1) continue;  // degenerate reading: skip
        ScaledComplex lhs = partial_sum(fwd, 1, N + 1);

        ScaledComplex corr;
        bool ok = true;
        for (size_t i = 0; i < crit.size() && ok; ++i) {
            try {
                SeriesTrace rs = backward_rs(R, crit[i], arg.pole, N);
                SeriesTrace rp = forward_series(R, crit[i], N).rp;
                if (rs.size() < N || rp.size() < N) {
                    ok = false;
                    break;
                }
                SeriesTrace cp = cauchy_product(rs, rp, N + 1);
                ScaledComplex cp_sum = partial_sum(cp, 0, N + 1);
                corr = corr + ScaledComplex::from(bres[i]) * cp_sum;
            } catch (const atom_collision_error&) {
                ok = false;
            } catch (const range_exhausted_error&) {
                ok = false;
            }
        }
        if (!ok) continue;
        for (char s : {'-', '+'}) {
            if (!want_sign(s)) continue;
            ScaledComplex rhs = (s == '-')
                                    ? ScaledComplex::from(lambda_sum) - corr
                                    : ScaledComplex::from(lambda_sum) + corr;
            cplx l = lhs.to_complex(), r = rhs.to_complex();
            double res = std::abs(l - r);
            rep.variants.push_back({1, s, arg.name, l, r, res,
                                    res / std::max(std::abs(l), 1e-300)});
        }
    }

    // --- relation 2 ---------------------------------------------------
    try {
        SeriesTrace rs_main = backward_rs(R, x, a, N - 1);
        SeriesTrace a_main = modified_a(R, x, a, N - 1);
        if (rs_main.size() >= N && a_main.size() >= N) {
            ScaledComplex lhs = partial_sum(rs_main, 0, N);
            ScaledComplex abase = partial_sum(a_main, 0, N);
            for (const std::string& argname :
                 {std::string("critical-value"), std::string("critical-point")}) {
                ScaledComplex corr;
                bool ok = true;
                for (size_t k = 0; k < crit.size() && ok; ++k) {
                    try {
                        cplx inner_pole =
                            (argname == "critical-value") ? critval[k] : crit[k];
                        SeriesTrace ak = modified_a(R, crit[k], a, N - 1);
                        SeriesTrace rsk = backward_rs(R, x, inner_pole, N - 1);
                        if (ak.size() < N || rsk.size() < N) {
                            ok = false;
                            break;
                        }
                        SeriesTrace cp = cauchy_product(ak, rsk, N);
                        corr = corr + ScaledComplex::from(bres[k]) *
                                          partial_sum(cp, 0, N);
                    } catch (const atom_collision_error&) {
                        ok = false;
                    } catch (const range_exhausted_error&) {
                        ok = false;
                    }
                }
                if (!ok) continue;
                for (char s : {'+', '-'}) {
                    if (!want_sign(s)) continue;
                    ScaledComplex rhs =
                        (s == '+') ? abase + corr : abase - corr;
                    cplx l = lhs.to_complex(), r = rhs.to_complex();
                    double res = std::abs(l - r);
                    rep.variants.push_back({2, s, argname, l, r, res,
                                            res / std::max(std::abs(l), 1e-300)});
                }
            }
        }
    } catch (const atom_collision_error&) {
        // relation 2 unavailable at this (x, a); report carries relation 1 only
    }

    for (size_t i = 0; i < rep.variants.size(); ++i) {
        const auto& v = rep.variants[i];
        int& best = (v.relation == 1) ? rep.best_relation1 : rep.best_relation2;
        if (best < 0 || v.residual_rel < rep.variants[best].residual_rel)
            best = static_cast<int>(i);
    }
    return rep;
}

}  // namespace ruelle
