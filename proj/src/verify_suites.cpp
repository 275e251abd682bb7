#include "ruelle/verify_suites.hpp"

#include <algorithm>

#include "ruelle/series.hpp"

namespace ruelle {

ordered_json SuiteResult::to_json() const {
    return ordered_json{{"suite", name},
                        {"total", total},
                        {"failed", failed},
                        {"max_error", max_error},
                        {"passed", passed()},
                        {"failures", failures}};
}

namespace {

// g = (R^n)'(z) and g' = (R^n)''(z), both by product differentiation
// along the orbit of z
void iterated_derivative_pair(const RationalMap& R, cplx z, int n,
                              ScaledComplex& g, ScaledComplex& gp) {
    std::vector<cplx> orbit{z};
    for (int t = 1; t < n; ++t) orbit.push_back(R.eval_finite(orbit.back()));
    std::vector<ScaledComplex> partial(n + 1);  // (R^t)'(z)
    partial[0] = ScaledComplex::one();
    for (int t = 0; t < n; ++t)
        partial[t + 1] = partial[t] * ScaledComplex::from(R.deriv(orbit[t], 1));
    g = partial[n];
    gp = ScaledComplex::zero();
    // sum_t R''(z_t) (R^t)'(z) prod_{s != t} R'(z_s)
    for (int t = 0; t < n; ++t) {
        ScaledComplex others = ScaledComplex::one();
        for (int s = 0; s < n; ++s)
            if (s != t) others = others * ScaledComplex::from(R.deriv(orbit[s], 1));
        gp = gp + ScaledComplex::from(R.deriv(orbit[t], 2)) * partial[t] * others;
    }
}

cplx rand_disk(std::mt19937_64& rng, double radius) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (;;) {
        cplx z(uni(rng), uni(rng));
        if (std::norm(z) <= 1.0) return z * radius;
    }
}

double min_dist(cplx z, const std::vector<cplx>& pts) {
    double d = 1e300;
    for (cplx p : pts) d = std::min(d, std::abs(z - p));
    return d;
}

}  // namespace

cplx random_point_avoiding(std::mt19937_64& rng, const std::vector<cplx>& avoid,
                           double md, double radius) {
    for (int tries = 0; tries < 4000; ++tries) {
        cplx z = rand_disk(rng, radius);
        if (min_dist(z, avoid) > md) return z;
    }
    throw precondition_error("random_point_avoiding: no admissible point found");
}

std::vector<cplx> postcritical_points(const RationalMap& R, int depth) {
    std::vector<cplx> pts;
    for (cplx d : R.critical_values()) {
        cplx z = d;
        for (int t = 0; t <= depth; ++t) {
            pts.push_back(z);
            if (R.is_pole(z) || std::abs(z) > 1e100) break;
            z = R.eval_finite(z);
        }
    }
    return pts;
}

cplx sample_reconstruction_point(std::mt19937_64& rng, const RationalMap& R,
                                 const ResolventDecomposition& dec,
                                 double min_dist, double cond_cap) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int tries = 0; tries < 5000; ++tries) {
        cplx z;
        if (tries % 3 == 0) {
            z = rand_disk(rng, 3.0);
        } else {
            // ring around a random pole: one term dominates there
            const auto& p = dec.poles[rng() % dec.poles.size()];
            z = p.location +
                std::polar(min_dist * (1.2 + 3.0 * uni(rng)), 2.0 * M_PI * uni(rng));
        }
        bool clear = true;
        for (const auto& p : dec.poles)
            if (std::abs(z - p.location) <= min_dist) clear = false;
        if (!clear || R.is_pole(z)) continue;
        try {
            ScaledComplex zz = ScaledComplex::from(z);
            ScaledComplex der = ScaledComplex::one();
            for (int t = 0; t < dec.n; ++t) {
                der = der * R.deriv_scaled(zz);
                zz = R.eval_scaled(zz);
            }
            if (der.is_zero()) continue;
            ScaledComplex cond = resolvent_mass(dec, z) * der.abs();
            if (cond.is_zero() || cond.log2_abs() <= std::log2(cond_cap)) return z;
        } catch (const std::exception&) {
            continue;
        }
    }
    throw precondition_error("sample_reconstruction_point: starved");
}

RationalMap random_admissible_map(std::mt19937_64& rng, int degree_min,
                                  int degree_max, bool allow_rational) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::uniform_int_distribution<int> degd(degree_min, degree_max);
    for (int tries = 0; tries < 400; ++tries) {
        int d = degd(rng);
        std::vector<cplx> pc(d + 1);
        for (int i = 0; i < d; ++i) pc[i] = rand_disk(rng, 1.0);
        pc[d] = std::polar(0.5 + 0.75 * std::abs(uni(rng)), M_PI * uni(rng));
        Polynomial P(pc);
        Polynomial Q = Polynomial::constant(1.0);
        int style = static_cast<int>(rng() % 4);
        if (allow_rational && style == 0 && d >= 3) {
            // superattracting infinity with a finite pole
            Q = Polynomial({rand_disk(rng, 1.0), 1.0});
        } else if (allow_rational && style == 1) {
            // deg P = deg Q + 1: nonzero multiplier at infinity
            std::vector<cplx> qc(d);
            for (int i = 0; i + 1 < d; ++i) qc[i] = rand_disk(rng, 0.6);
            qc[d - 1] = std::polar(0.25 + 0.25 * std::abs(uni(rng)), M_PI * uni(rng));
            // keep infinity attracting: |lambda| = |q_lead / p_lead| < 1
            if (std::abs(qc[d - 1] / pc[d]) >= 0.8) continue;
            Q = Polynomial(qc);
        }
        try {
            RationalMap R = RationalMap::create(P, Q);
            if (R.critical_points().empty()) continue;
            // spaced critical data keeps the randomized tolerances meaningful
            const auto& crit = R.critical_points();
            const auto& cval = R.critical_values();
            bool spaced = true;
            for (size_t i = 0; i < crit.size(); ++i) {
                if (std::abs(crit[i]) > 6.0 || std::abs(cval[i]) > 8.0) spaced = false;
                for (size_t j = i + 1; j < crit.size(); ++j) {
                    if (std::abs(crit[i] - crit[j]) < 0.15) spaced = false;
                    if (std::abs(cval[i] - cval[j]) < 0.15) spaced = false;
                }
            }
            if (!spaced) continue;
            auto rel = check_no_simple_critical_relations(R, 6, 1e-5);
            if (!rel.passed) continue;
            decompose(R, 2);  // probes early pole collisions / self-relations
            return R;
        } catch (const std::exception&) {
            continue;
        }
    }
    throw precondition_error("random_admissible_map: generation starved");
}

SuiteResult run_oracle_suite(std::uint64_t seed, int instances, double tol) {
    SuiteResult res;
    res.name = "oracle";
    std::mt19937_64 rng(seed);
    for (int inst = 0; inst < instances; ++inst) {
        RationalMap R = random_admissible_map(rng);
        std::vector<cplx> avoid = postcritical_points(R, 5);
        for (cplx c : R.critical_points()) avoid.push_back(c);
        if (R.denominator().degree() >= 1)
            for (cplx p : poly_roots(R.denominator(), 1e-12)) avoid.push_back(p);
        cplx a = random_point_avoiding(rng, avoid, 0.05, 2.0);
        std::vector<cplx> avoid_z = avoid;
        avoid_z.push_back(a);
        {
            // atoms of the iterates: forward orbit of a as well
            cplx z = a;
            for (int t = 0; t < 5 && std::abs(z) < 1e6; ++t) {
                if (R.is_pole(z)) break;
                z = R.eval_finite(z);
                avoid_z.push_back(z);
            }
        }
        cplx zpt = random_point_avoiding(rng, avoid_z, 0.05, 2.0);
        int n = 1 + static_cast<int>(rng() % 4);
        ++res.total;
        try {
            CauchyCombo combo = CauchyCombo::kernel(a);
            for (int t = 0; t < n; ++t) combo = apply_star(R, combo);
            cplx closed = combo.value_at(zpt).to_complex();
            cplx oracle = apply_star_oracle(
                R, [a](cplx y) { return 1.0 / (y - a); }, zpt, n);
            double err = std::abs(closed - oracle) / std::max(1.0, std::abs(oracle));
            res.max_error = std::max(res.max_error, err);
            if (!(err <= tol)) {
                ++res.failed;
                res.failures.push_back(ordered_json{{"map", map_to_json(R)},
                                                    {"a", json_complex(a)},
                                                    {"z", json_complex(zpt)},
                                                    {"n", n},
                                                    {"error", err}});
            }
        } catch (const std::exception& e) {
            ++res.failed;
            res.failures.push_back(ordered_json{{"map", map_to_json(R)},
                                                {"a", json_complex(a)},
                                                {"z", json_complex(zpt)},
                                                {"n", n},
                                                {"exception", e.what()}});
        }
    }
    return res;
}

SuiteResult run_duality_suite(std::uint64_t seed, int samples, double tol) {
    SuiteResult res;
    res.name = "duality";
    std::mt19937_64 rng(seed);
    for (int inst = 0; inst < samples; ++inst) {
        RationalMap R = random_admissible_map(rng);
        std::vector<cplx> avoid = R.critical_values();
        if (R.denominator().degree() >= 1)
            for (cplx p : poly_roots(R.denominator(), 1e-12)) avoid.push_back(p);
        cplx z = random_point_avoiding(rng, avoid, 0.05, 2.0);
        cplx w0 = rand_disk(rng, 0.5);
        cplx w1 = rand_disk(rng, 0.5);
        Field phi = [w0, w1](cplx y) { return w0 + y + w1 * y * y; };
        Field pushed = [&R, phi](cplx y) {
            cplx d = R.deriv(y, 1);
            return phi(R.eval_finite(y)) * d * d;
        };
        ++res.total;
        try {
            cplx got = apply_star_oracle(R, pushed, z, 1);
            cplx want = double(R.degree()) * phi(z);
            double err = std::abs(got - want) / std::max(1.0, std::abs(want));
            res.max_error = std::max(res.max_error, err);
            if (!(err <= tol)) {
                ++res.failed;
                res.failures.push_back(ordered_json{{"map", map_to_json(R)},
                                                    {"z", json_complex(z)},
                                                    {"error", err}});
            }
        } catch (const std::exception& e) {
            ++res.failed;
            res.failures.push_back(
                ordered_json{{"map", map_to_json(R)}, {"exception", e.what()}});
        }
    }
    return res;
}

SuiteResult run_residue_suite(std::uint64_t seed, int instances, double residue_tol,
                              double recon_tol) {
    SuiteResult res;
    res.name = "residues";
    std::mt19937_64 rng(seed);
    cplx dir = std::polar(1.0, 0.9272952180016122);
    for (int inst = 0; inst < instances; ++inst) {
        RationalMap R = random_admissible_map(rng);
        for (int n = 1; n <= 4; ++n) {
            ++res.total;
            try {
                ResolventDecomposition dec = decompose(R, n);
                double worst = 0.0;
                for (const auto& pole : dec.poles) {
                    // Newton-polish the pole against (R^n)' itself so the
                    // probe distances are measured from the true zero
                    cplx loc = pole.location;
                    for (int it = 0; it < 3; ++it) {
                        ScaledComplex g, gp;
                        iterated_derivative_pair(R, loc, n, g, gp);
                        if (gp.is_zero()) break;
                        ScaledComplex step = g / gp;
                        if (!step.representable()) break;
                        loc -= step.to_complex();
                    }
                    // numeric residue limit h/(R^n)'(c+h); two Richardson
                    // levels in h, probing well inside the gap to the
                    // nearest other pole
                    double gap = 1e300;
                    for (const auto& other : dec.poles)
                        if (&other != &pole)
                            gap = std::min(gap,
                                           std::abs(other.location - pole.location));
                    double h1 = std::min(1e-3, gap / 100.0);
                    auto probe = [&](double h) {
                        ScaledComplex z = ScaledComplex::from(loc + h * dir);
                        ScaledComplex der = ScaledComplex::one();
                        for (int t = 0; t < n; ++t) {
                            der = der * R.deriv_scaled(z);
                            z = R.eval_scaled(z);
                        }
                        return ScaledComplex::from(h * dir) / der;
                    };
                    const double r = 10.0;
                    ScaledComplex g0 = probe(h1);
                    ScaledComplex g1 = probe(h1 / r);
                    ScaledComplex g2 = probe(h1 / (r * r));
                    ScaledComplex l1a =
                        (ScaledComplex::from(r) * g1 - g0) / ScaledComplex::from(r - 1.0);
                    ScaledComplex l1b =
                        (ScaledComplex::from(r) * g2 - g1) / ScaledComplex::from(r - 1.0);
                    ScaledComplex est = (ScaledComplex::from(r * r) * l1b - l1a) /
                                        ScaledComplex::from(r * r - 1.0);
                    ScaledComplex diff = est - pole.residue;
                    double rel = diff.is_zero()
                                     ? 0.0
                                     : std::exp2(std::min(1000.0, diff.log2_abs() -
                                                                       pole.residue.log2_abs()));
                    worst = std::max(worst, rel);
                }
                // pointwise reconstruction away from the poles
                for (int s = 0; s < 4; ++s) {
                    cplx z = sample_reconstruction_point(rng, R, dec);
                    ScaledComplex direct;
                    {
                        ScaledComplex zz = ScaledComplex::from(z);
                        ScaledComplex der = ScaledComplex::one();
                        for (int t = 0; t < n; ++t) {
                            der = der * R.deriv_scaled(zz);
                            zz = R.eval_scaled(zz);
                        }
                        direct = der.reciprocal();
                    }
                    ScaledComplex recon = dec.eval(z);
                    ScaledComplex diff = recon - direct;
                    double rel = diff.is_zero()
                                     ? 0.0
                                     : std::exp2(std::min(1000.0, diff.log2_abs() -
                                                                       direct.log2_abs()));
                    if (!(rel <= recon_tol)) {
                        ++res.failed;
                        res.failures.push_back(ordered_json{{"map", map_to_json(R)},
                                                            {"n", n},
                                                            {"z", json_complex(z)},
                                                            {"recon_rel", rel}});
                        break;
                    }
                }
                res.max_error = std::max(res.max_error, worst);
                if (!(worst <= residue_tol)) {
                    ++res.failed;
                    res.failures.push_back(ordered_json{
                        {"map", map_to_json(R)}, {"n", n}, {"residue_rel", worst}});
                }
            } catch (const std::exception& e) {
                ++res.failed;
                res.failures.push_back(ordered_json{
                    {"map", map_to_json(R)}, {"n", n}, {"exception", e.what()}});
            }
        }
    }
    return res;
}

SuiteResult run_identities_suite(std::uint64_t seed, double tol) {
    SuiteResult res;
    res.name = "identities";
    std::mt19937_64 rng(seed);
    std::vector<std::tuple<RationalMap, cplx, cplx, int>> cases;
    cases.emplace_back(RationalMap::quadratic(-2.0), cplx(10.0), cplx(11.0), 8);
    for (int i = 0; i < 4; ++i) {
        RationalMap R = random_admissible_map(rng);
        std::vector<cplx> avoid = postcritical_points(R, 10);
        for (cplx c : R.critical_points()) avoid.push_back(c);
        cplx a = random_point_avoiding(rng, avoid, 0.2, 4.0);
        cplx x = random_point_avoiding(rng, avoid, 0.2, 4.0);
        cases.emplace_back(R, a, x, 8);
    }
    for (auto& [R, a, x, N] : cases) {
        ++res.total;
        try {
            SeriesRelationReport rep = verify_series_relations(R, a, x, N);
            bool ok = rep.best_relation1 >= 0 && rep.best_relation2 >= 0 &&
                      rep.variants[rep.best_relation1].residual_rel <= tol &&
                      rep.variants[rep.best_relation2].residual_rel <= tol;
            double worst = 0.0;
            if (rep.best_relation1 >= 0)
                worst = std::max(worst, rep.variants[rep.best_relation1].residual_rel);
            if (rep.best_relation2 >= 0)
                worst = std::max(worst, rep.variants[rep.best_relation2].residual_rel);
            res.max_error = std::max(res.max_error, worst);
            if (!ok) {
                ++res.failed;
                res.failures.push_back(ordered_json{{"map", map_to_json(R)},
                                                    {"a", json_complex(a)},
                                                    {"x", json_complex(x)},
                                                    {"report", to_json(rep)}});
            }
        } catch (const std::exception& e) {
            ++res.failed;
            res.failures.push_back(
                ordered_json{{"map", map_to_json(R)}, {"exception", e.what()}});
        }
    }
    return res;
}

SuiteResult run_measures_suite(std::uint64_t seed, int instances, double atom_tol,
                               double weight_tol) {
    SuiteResult res;
    res.name = "measures";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int inst = 0; inst < instances; ++inst) {
        // non-degenerate quadratic parameter with a tame critical orbit
        cplx c;
        bool good = false;
        for (int t = 0; t < 200 && !good; ++t) {
            c = cplx(1.2 * uni(rng), 1.2 * uni(rng));
            good = true;
            cplx z = c;
            for (int j = 0; j < 9; ++j) {
                double az = std::abs(z);
                if (az < 0.2 || az > 4.0) {
                    good = false;
                    break;
                }
                z = z * z + c;
            }
        }
        if (!good) continue;
        RationalMap R = RationalMap::quadratic(c);
        for (int n = 1; n <= 8; ++n) {
            ++res.total;
            try {
                AtomicMeasure general = mu_n(R, 0, n);
                AtomicMeasure recursive = mu_n_quadratic_recursive(c, n);
                double worst = 0.0;
                double wscale = 0.0;
                for (const auto& at : general.atoms)
                    wscale = std::max(wscale, std::exp2(std::min(
                                                  1000.0, at.weight.log2_abs())));
                for (const auto& at : general.atoms) {
                    ScaledComplex other =
                        recursive.weight_near(at.location.to_complex(), 1e-7);
                    ScaledComplex diff = at.weight - other;
                    double err = diff.is_zero()
                                     ? 0.0
                                     : std::exp2(std::min(1000.0, diff.log2_abs())) /
                                           std::max(wscale, 1e-300);
                    worst = std::max(worst, err);
                }
                if (general.atoms.size() != recursive.atoms.size())
                    worst = std::max(worst, 1.0);
                ScaledComplex tw = general.total_weight();
                double twabs =
                    tw.is_zero() ? 0.0 : std::exp2(std::min(1000.0, tw.log2_abs()));
                res.max_error = std::max(res.max_error, std::max(worst, twabs));
                if (!(worst <= atom_tol) || !(twabs <= weight_tol)) {
                    ++res.failed;
                    res.failures.push_back(ordered_json{{"c", json_complex(c)},
                                                        {"n", n},
                                                        {"atom_err", worst},
                                                        {"total_weight", twabs}});
                }
            } catch (const std::exception& e) {
                ++res.failed;
                res.failures.push_back(ordered_json{
                    {"c", json_complex(c)}, {"n", n}, {"exception", e.what()}});
            }
        }
        if (res.total >= instances * 8) break;
    }
    return res;
}

SuiteResult run_probe_controls_suite() {
    SuiteResult res;
    res.name = "probe-controls";
    EssentialNeighborhood U;
    U.outer_radius = 3.0;
    TestFunctionFamily fam = build_test_family(U, 6, 2);

    // constant sequence: every pairing trail is constant
    {
        ++res.total;
        AtomicMeasure m;
        m.atoms.push_back({ScaledComplex::from(cplx(0.4, 0.1)), ScaledComplex::one()});
        ProbeReport rep = weak_star_probe([&](int) { return m; }, fam, 48, &U);
        if (!rep.converges_on_family) {
            ++res.failed;
            res.failures.push_back(ordered_json{{"control", "constant"},
                                                {"witness", rep.witness}});
        }
    }
    // injected oscillation: weight 1 + 0.5 (-1)^l never settles
    {
        ++res.total;
        ProbeReport rep = weak_star_probe(
            [&](int l) {
                AtomicMeasure m;
                double w = 1.0 + 0.5 * ((l % 2 == 0) ? 1.0 : -1.0);
                m.atoms.push_back(
                    {ScaledComplex::from(cplx(0.4, 0.1)), ScaledComplex::from(w)});
                return m;
            },
            fam, 48, &U);
        if (rep.converges_on_family || rep.witness.empty()) {
            ++res.failed;
            res.failures.push_back(ordered_json{{"control", "oscillating"}});
        }
    }
    return res;
}

}  // namespace ruelle
