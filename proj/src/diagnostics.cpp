#include "ruelle/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace ruelle {

const char* to_string(QuadraticCriterionResult::Verdict v) {
    using V = QuadraticCriterionResult::Verdict;
    switch (v) {
        case V::condition1: return "condition-1-satisfied";
        case V::condition2: return "condition-2-satisfied";
        case V::inconclusive: return "inconclusive";
        case V::degenerate: return "degenerate";
    }
    return "?";
}

QuadraticCriterionResult quadratic_criterion_check(
    cplx c, int N, const QuadraticCriterionConfig& cfg) {
    QuadraticCriterionResult res;
    res.N = N;
    res.config = cfg;

    // orbit of the critical value c; log-magnitude continuation once the
    // orbit escapes double range
    res.log2_abs_D.assign(N + 1, 0.0);
    res.S.assign(N + 1, cplx(0.0));

    cplx z = c;
    double zlog = 0.0;
    bool log_mode = false;
    cplx D = 1.0;
    double dlog = 0.0;
    bool d_native = true;  // while |D| is still worth tracking as a complex
    cplx S = 1.0;          // j = 0 term
    res.S[0] = S;

    for (int n = 1; n <= N; ++n) {
        if (!log_mode && std::abs(z) <= cfg.degenerate_radius) {
            res.verdict = QuadraticCriterionResult::Verdict::degenerate;
            res.failing_index = n;
            res.log2_abs_D.resize(n);
            res.S.resize(n);
            return res;
        }
        // D_n = D_{n-1} * 2 z_{n-1}
        if (log_mode) {
            dlog += 1.0 + zlog;
        } else {
            dlog += 1.0 + std::log2(std::abs(z));
            if (d_native) {
                D *= 2.0 * z;
                if (std::abs(D) > 1e100) d_native = false;
            }
        }
        res.log2_abs_D[n] = dlog;
        if (d_native && dlog < 166.0) {  // additions above one ulp of S
            cplx term = 1.0 / D;
            if (std::isfinite(term.real()) && std::isfinite(term.imag())) {
                cplx cand = S + term;
                if (std::isfinite(cand.real()) && std::isfinite(cand.imag()))
                    S = cand;
            }
        }
        res.S[n] = S;
        // z_n = z_{n-1}^2 + c
        if (!log_mode) {
            z = z * z + c;
            if (std::abs(z) > 1e100) {
                log_mode = true;
                zlog = std::log2(std::abs(z));
            }
        } else {
            zlog = 2.0 * zlog;  // |c| correction below one ulp out here
        }
    }

    // condition 1: running-record growth of |D| with |S| above the floor
    std::vector<int> w1;
    double rec = 0.0;
    for (int n = 1; n <= N; ++n) {
        if (res.log2_abs_D[n] > rec + 1e-12) {
            rec = res.log2_abs_D[n];
            if (n < (N + 1) / 2 || std::abs(res.S[n]) >= cfg.s_floor)
                w1.push_back(n);
        }
    }
    {
        int late = 0;
        for (int n : w1)
            if (n >= (N + 1) / 2) ++late;
        double growth = w1.size() >= 2 ? res.log2_abs_D[w1.back()] -
                                             res.log2_abs_D[w1.front()]
                                       : 0.0;
        bool floor_ok = true;
        for (int n : w1)
            if (n >= (N + 1) / 2 && std::abs(res.S[n]) < cfg.s_floor) floor_ok = false;
        if (late >= cfg.min_subsequence && growth >= cfg.growth_min_log2 && floor_ok) {
            res.verdict = QuadraticCriterionResult::Verdict::condition1;
            res.witness = w1;
            int start = w1.back();
            for (int i = static_cast<int>(w1.size()) - 1; i > 0; --i) {
                if (w1[i] - w1[i - 1] == 1)
                    start = w1[i - 1];
                else
                    break;
            }
            if (!w1.empty() && w1.back() == N) res.witness_suffix_start = start;
            return res;
        }
    }

    // condition 2: |D| in a narrow band while |S| grows through it
    for (int pivot = std::max(1, N / 4); pivot <= N; ++pivot) {
        double center = res.log2_abs_D[pivot];
        std::vector<int> w2;
        for (int n = std::max(1, N / 4); n <= N; ++n)
            if (std::fabs(res.log2_abs_D[n] - center) <= cfg.band_halfwidth_log2)
                w2.push_back(n);
        if (static_cast<int>(w2.size()) < cfg.min_subsequence) continue;
        std::vector<double> s;
        for (int n : w2) s.push_back(std::abs(res.S[n]));
        double smax = *std::max_element(s.begin(), s.end());
        bool growing = s.back() >= cfg.s_growth_factor * std::max(s.front(), cfg.s_floor) &&
                       s.back() >= 0.75 * smax && smax >= 10.0;
        if (growing) {
            res.verdict = QuadraticCriterionResult::Verdict::condition2;
            res.witness = w2;
            res.band_center_log2 = center;
            return res;
        }
    }

    res.verdict = QuadraticCriterionResult::Verdict::inconclusive;
    return res;
}

// ---- Collet-Eckmann -------------------------------------------------------

namespace {

std::vector<cplx> distinct_orbit_points(const RationalMap& R, cplx a, int want,
                                        double sep) {
    std::vector<cplx> pts;
    cplx z = a;
    int steps = 8 * want + 64;
    for (int t = 0; t <= steps && static_cast<int>(pts.size()) < want; ++t) {
        bool fresh = true;
        for (cplx p : pts)
            if (std::abs(p - z) <= sep) fresh = false;
        if (fresh) pts.push_back(z);
        if (R.is_pole(z)) break;
        z = R.eval_finite(z);
        if (std::abs(z) > 1e150) break;  // escaped beyond the safe native range
    }
    return pts;
}

bool slowly_divergent(const SeriesClassification& c, const ClassifyConfig& cfg) {
    if (c.cls == SeriesClass::slow_divergent) return true;
    return c.cls == SeriesClass::bounded_terms_divergent &&
           c.logfit_r2 >= cfg.logfit_r2_min && c.logfit_coeff > 0.0;
}

}  // namespace

std::set<int> collet_eckmann_cases(const SeriesClassification& rs,
                                   const SeriesClassification& rp,
                                   const ClassifyConfig& cfg) {
    std::set<int> cases;
    if (rs.cls == SeriesClass::degenerate || rp.cls == SeriesClass::degenerate)
        return cases;
    bool rs_conv = rs.cls == SeriesClass::absolutely_convergent;
    bool rp_conv = rp.cls == SeriesClass::absolutely_convergent;
    auto bounded_elems = [&](const SeriesClassification& c) {
        return c.max_abs_term <= cfg.band_hi;
    };
    if (rs_conv && rp_conv) {
        cases.insert(1);
        cases.insert(2);  // the weaker statement also holds
    } else if ((rs_conv && bounded_elems(rp)) || (rp_conv && bounded_elems(rs))) {
        cases.insert(2);
    }
    if (slowly_divergent(rs, cfg) && slowly_divergent(rp, cfg)) cases.insert(3);
    return cases;
}

ColletEckmannResult collet_eckmann_classify(const RationalMap& R, cplx a, int N,
                                            const ClassifyConfig& cfg) {
    ColletEckmannResult res;
    res.N = N;
    int want = 2 * R.degree();
    res.orbit_points = distinct_orbit_points(R, a, want, 1e-8);
    if (static_cast<int>(res.orbit_points.size()) < want)
        throw short_orbit_error(
            "orbit of a has too few distinct points; pick a different base point");

    int Next = (3 * N) / 2;  // classify at N, stability against 1.5 N
    auto classify_stable = [&](const SeriesTrace& t) {
        SeriesClassification at_n = classify(t, cfg, N + 1);
        SeriesClassification extended = classify(t, cfg, Next + 1);
        at_n.stable = (at_n.cls == extended.cls);
        return at_n;
    };
    for (cplx c : R.critical_points()) {
        SeriesTrace rp_trace = forward_series(R, c, Next).rp;
        SeriesClassification rp_cls = classify_stable(rp_trace);
        for (cplx x : res.orbit_points) {
            ColletEckmannPair pair;
            pair.critical_point = c;
            pair.orbit_point = x;
            pair.rp_class = rp_cls;
            try {
                SeriesTrace rs_trace = backward_rs(R, c, x, Next);
                pair.rs_class = classify_stable(rs_trace);
            } catch (const atom_collision_error&) {
                pair.rs_class.cls = SeriesClass::degenerate;
            }
            pair.cases = collet_eckmann_cases(pair.rs_class, pair.rp_class, cfg);
            res.pairs.push_back(std::move(pair));
        }
    }

    // overall: strongest case every pair satisfies
    for (int cse : {1, 2, 3}) {
        bool all = true;
        for (const auto& p : res.pairs) all = all && p.cases.count(cse) > 0;
        if (all && !res.pairs.empty()) {
            res.overall_case = cse;
            break;
        }
    }
    return res;
}

// ---- Cesaro condition -----------------------------------------------------

CesaroConditionResult cesaro_condition_check(const RationalMap& R, cplx a,
                                             const std::vector<int>& Ns,
                                             const CesaroConditionConfig& cfg) {
    CesaroConditionResult res;
    res.config = cfg;
    if (Ns.empty()) throw precondition_error("cesaro_condition_check: Ns empty");
    int nmax = *std::max_element(Ns.begin(), Ns.end());
    int want = 2 * R.degree();
    std::vector<cplx> xs = distinct_orbit_points(R, a, want, 1e-8);
    if (static_cast<int>(xs.size()) < want)
        throw short_orbit_error("orbit of a has too few distinct points");

    const auto& crit = R.critical_points();
    const auto& critval = R.critical_values();
    size_t nc = crit.size();

    // |(R^m)'(d_k)| for m = 0..nmax-1
    std::vector<std::vector<double>> dlog(nc);
    for (size_t k = 0; k < nc; ++k) {
        ScaledComplex z = ScaledComplex::from(critval[k]);
        ScaledComplex der = ScaledComplex::one();
        dlog[k].push_back(0.0);
        for (int m = 1; m < nmax; ++m) {
            der = der * R.deriv_scaled(z);
            z = R.eval_scaled(z);
            if (der.is_zero())
                throw critical_relation_error(
                    "critical value orbit hits a critical point", critval[k],
                    z.to_complex(), m);
            dlog[k].push_back(der.log2_abs());
        }
    }

    res.bounded = true;
    for (cplx x : xs) {
        CesaroConditionResult::Row row;
        row.x = x;
        // |pullback^j(tau_x)(c_k)| for j = 0..nmax-1
        std::vector<std::vector<double>> vlog(nmax,
                                              std::vector<double>(nc, -4000.0));
        std::vector<bool> excluded(nmax, false);
        CauchyCombo combo = CauchyCombo::kernel(x);
        for (int j = 0; j < nmax; ++j) {
            if (j > 0) {
                try {
                    combo = apply_star(R, combo);
                } catch (const range_exhausted_error&) {
                    for (int t = j; t < nmax; ++t) excluded[t] = true;
                    break;
                }
            }
            for (size_t k = 0; k < nc; ++k) {
                try {
                    ScaledComplex v = combo.value_at(crit[k]);
                    vlog[j][k] = v.is_zero() ? -4000.0 : v.log2_abs();
                } catch (const atom_collision_error&) {
                    excluded[j] = true;
                }
            }
        }
        for (int j = 0; j < nmax; ++j)
            if (excluded[j]) row.excluded_j.push_back(j);

        auto scaled_from_log2 = [](double l2) {
            double fl = std::floor(l2);
            return ScaledComplex(cplx(std::exp2(l2 - fl), 0.0),
                                 static_cast<long long>(fl));
        };
        for (int N : Ns) {
            ScaledComplex acc;
            for (int j = 0; j < N; ++j) {
                if (excluded[j]) continue;
                for (size_t k = 0; k < nc; ++k) {
                    if (vlog[j][k] <= -4000.0) continue;
                    double num_log2 = vlog[j][k];
                    double den_log2 = std::log2(std::abs(
                                          R.second_derivative_at_critical(int(k)))) +
                                      dlog[k][N - j - 1];
                    acc = acc + scaled_from_log2(num_log2 - den_log2);
                }
            }
            acc = acc / ScaledComplex::from(double(N));
            double vlog2 = acc.is_zero() ? -4000.0 : acc.log2_abs();
            double val = acc.is_zero() ? 0.0 : std::exp2(std::min(1000.0, vlog2));
            row.values.push_back({N, val, vlog2});
            res.max_value = std::max(res.max_value, val);
        }
        // bounded: below the bound and non-increasing over the last half
        bool ok = true;
        for (const auto& e : row.values) ok = ok && e.value < cfg.bound;
        int half = static_cast<int>(row.values.size()) / 2;
        for (size_t t = half; t + 1 < row.values.size(); ++t)
            ok = ok && row.values[t + 1].value <=
                           cfg.trend_slack * row.values[t].value + 1e-12;
        row.bounded = ok;
        res.bounded = res.bounded && ok;
        res.rows.push_back(std::move(row));
    }
    return res;
}

// ---- resolvent mass -------------------------------------------------------

ResolventMassResult resolvent_mass_check(const RationalMap& R, cplx d_point,
                                         int n_max, const ResolventOptions& opt) {
    ResolventMassResult res;
    res.requested = n_max;
    int want = 2 * R.degree();
    res.long_orbit =
        static_cast<int>(distinct_orbit_points(R, d_point, want, 1e-8).size()) >=
        want;
    for (int n = 1; n <= n_max; ++n) {
        try {
            ResolventDecomposition dec = decompose(R, n, opt);
            ScaledComplex s = resolvent_mass(dec, d_point);
            double l2 = s.is_zero() ? -4000.0 : s.log2_abs();
            res.values.push_back(s.is_zero() ? 0.0 : std::exp2(std::min(1000.0, l2)));
            res.values_log2.push_back(l2);
        } catch (const std::exception& e) {
            res.error = std::string(e.what()) + " (n=" + std::to_string(n) + ")";
            res.failed_at = n;
            break;
        }
    }
    if (res.values.size() < 2) {
        res.verdict = "short";
        return res;
    }
    size_t half = res.values.size() / 2;
    double first = *std::max_element(res.values.begin(), res.values.begin() + half);
    double last = *std::max_element(res.values.begin() + half, res.values.end());
    res.verdict = (last <= 1.25 * first + 1e-9) ? "bounded" : "growing";
    return res;
}

}  // namespace ruelle
