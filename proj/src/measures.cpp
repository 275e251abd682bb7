#include "ruelle/measures.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ruelle {

namespace {

bool locs_close(const ScaledComplex& a, const ScaledComplex& b, double tol) {
    ScaledComplex diff = a - b;
    if (diff.is_zero()) return true;
    double scale = 0.0;
    if (!a.is_zero()) scale = std::max(scale, a.log2_abs());
    if (!b.is_zero()) scale = std::max(scale, b.log2_abs());
    return diff.log2_abs() <= std::log2(tol) + std::max(0.0, scale);
}

bool loc_lex_less(const ScaledComplex& a, const ScaledComplex& b) {
    cplx ca = a.to_complex(), cb = b.to_complex();
    if (std::isfinite(ca.real()) && std::isfinite(cb.real()) &&
        std::isfinite(ca.imag()) && std::isfinite(cb.imag()) && ca != cb) {
        if (ca.real() != cb.real()) return ca.real() < cb.real();
        return ca.imag() < cb.imag();
    }
    double la = a.is_zero() ? -1e18 : a.log2_abs();
    double lb = b.is_zero() ? -1e18 : b.log2_abs();
    return la < lb;
}

}  // namespace

ScaledComplex AtomicMeasure::total_weight() const {
    ScaledComplex acc;
    for (const auto& a : atoms) acc = acc + a.weight;
    return acc;
}

ScaledComplex AtomicMeasure::weight_near(cplx loc, double tol) const {
    ScaledComplex l = ScaledComplex::from(loc);
    for (const auto& a : atoms)
        if (locs_close(a.location, l, tol)) return a.weight;
    return ScaledComplex::zero();
}

AtomicMeasure& AtomicMeasure::merge(double tol) {
    std::sort(atoms.begin(), atoms.end(), [](const MeasureAtom& x, const MeasureAtom& y) {
        return loc_lex_less(x.location, y.location);
    });
    std::vector<MeasureAtom> out;
    for (const auto& a : atoms) {
        bool merged = false;
        for (auto it = out.rbegin(); it != out.rend(); ++it) {
            if (locs_close(it->location, a.location, tol)) {
                it->weight = it->weight + a.weight;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(a);
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const MeasureAtom& a) { return a.weight.is_zero(); }),
              out.end());
    atoms = std::move(out);
    return *this;
}

AtomicMeasure AtomicMeasure::scaled(const ScaledComplex& s) const {
    AtomicMeasure m;
    for (const auto& a : atoms) m.atoms.push_back({a.location, a.weight * s});
    m.merge();
    return m;
}

AtomicMeasure operator+(const AtomicMeasure& a, const AtomicMeasure& b) {
    AtomicMeasure m;
    m.atoms = a.atoms;
    m.atoms.insert(m.atoms.end(), b.atoms.begin(), b.atoms.end());
    m.merge();
    return m;
}

AtomicMeasure measure_from_combo(const CauchyCombo& combo) {
    AtomicMeasure m;
    for (const auto& at : combo.atoms) m.atoms.push_back({at.pole, at.weight});
    m.merge();
    return m;
}

AtomicMeasure mu_n(const RationalMap& R, int i, int n, const ApplyStarOptions& opt) {
    if (i < 0 || i >= static_cast<int>(R.critical_values().size()))
        throw precondition_error("mu_n: critical value index out of range");
    CauchyCombo combo = CauchyCombo::kernel(R.critical_values()[i]);
    for (int k = 0; k < n; ++k) combo = apply_star(R, combo, opt);
    return measure_from_combo(combo);
}

MeasureSequence mu_sequence(const RationalMap& R, int i, int n_max,
                            const ApplyStarOptions& opt) {
    if (i < 0 || i >= static_cast<int>(R.critical_values().size()))
        throw precondition_error("mu_sequence: critical value index out of range");
    MeasureSequence seq;
    CauchyCombo combo = CauchyCombo::kernel(R.critical_values()[i]);
    seq.measures.push_back(measure_from_combo(combo));
    for (int k = 1; k <= n_max; ++k) {
        try {
            combo = apply_star(R, combo, opt);
        } catch (const range_exhausted_error&) {
            seq.truncated = true;
            break;
        }
        seq.measures.push_back(measure_from_combo(combo));
    }
    return seq;
}

AtomicMeasure mu_n_quadratic_recursive(cplx c, int n) {
    // orbit of the critical value c and (R^j)'(c) under z^2 + c
    std::vector<cplx> orbit{c};
    std::vector<ScaledComplex> der{ScaledComplex::one()};
    for (int j = 1; j <= n; ++j) {
        cplx z = orbit[j - 1];
        if (std::abs(z) <= 1e-12)
            throw degenerate_parameter_error(
                "quadratic recursion: critical orbit meets 0", j);
        der.push_back(der[j - 1] * ScaledComplex::from(2.0 * z));
        orbit.push_back(z * z + c);
    }
    std::vector<AtomicMeasure> mus(n + 1);
    mus[0].atoms.push_back({ScaledComplex::from(c), ScaledComplex::one()});
    for (int m = 1; m <= n; ++m) {
        AtomicMeasure acc;
        ScaledComplex inv = der[m].reciprocal();
        acc.atoms.push_back({ScaledComplex::from(orbit[m]), inv});
        acc.atoms.push_back({ScaledComplex::from(c), -inv});
        acc.merge();
        for (int j = 1; j <= m - 1; ++j) {
            // der of (R^{m-j})'(c)
            ScaledComplex dm = der[m - j];
            acc = acc + mus[j].scaled(-(dm.reciprocal()));
        }
        mus[m] = acc;
    }
    return mus[n];
}

AtomicMeasure nu_l(const RationalMap& R, int i, int l, const ApplyStarOptions& opt) {
    if (l < 1) throw precondition_error("nu_l: l must be >= 1");
    MeasureSequence seq = mu_sequence(R, i, l - 1, opt);
    if (static_cast<int>(seq.measures.size()) < l)
        throw range_exhausted_error("nu_l: mu sequence truncated before l");
    AtomicMeasure acc;
    for (int k = 0; k < l; ++k) acc = acc + seq.measures[k];
    return acc.scaled(ScaledComplex::from(1.0 / double(l)));
}

MeasureSequence nu_sequence(const RationalMap& R, int i, int l_max,
                            const ApplyStarOptions& opt) {
    MeasureSequence mus = mu_sequence(R, i, l_max - 1, opt);
    MeasureSequence out;
    out.truncated = mus.truncated;
    AtomicMeasure acc;
    for (int l = 1; l <= static_cast<int>(mus.measures.size()); ++l) {
        acc = acc + mus.measures[l - 1];
        out.measures.push_back(acc.scaled(ScaledComplex::from(1.0 / double(l))));
    }
    return out;
}

// ---- essential neighborhoods -------------------------------------------

bool EssentialNeighborhood::contains(cplx z) const {
    if (std::abs(z) > outer_radius) return false;
    for (const auto& d : excluded)
        if (std::abs(z - d.center) < d.radius) return false;
    return true;
}

bool EssentialNeighborhood::contains(const ScaledComplex& z) const {
    if (!z.representable() && !z.is_zero()) return false;
    return contains(z.to_complex());
}

std::vector<cplx> sample_julia_points(const RationalMap& R, int count,
                                      std::uint64_t seed) {
    // repelling periodic point: fixed points first, then period 2
    std::optional<cplx> start;
    for (int period : {1, 2}) {
        Polynomial it_num = R.numerator(), it_den = R.denominator();
        if (period == 2) {
            // numerator/denominator of R(R(z))
            Polynomial Pn, Qn;
            int m = std::max(R.numerator().degree(), R.denominator().degree());
            // compose: R2 = P(R)/Q(R) with common denominator Q^m
            Polynomial num = Polynomial::zero(), den = Polynomial::zero();
            Polynomial ppow = Polynomial::constant(1.0);
            std::vector<Polynomial> qpow(m + 1);
            qpow[0] = Polynomial::constant(1.0);
            for (int k = 1; k <= m; ++k) qpow[k] = qpow[k - 1] * R.denominator();
            for (int k = 0; k <= m; ++k) {
                if (k <= R.numerator().degree())
                    num = num + R.numerator().coeff(k) * (ppow * qpow[m - k]);
                if (k <= R.denominator().degree())
                    den = den + R.denominator().coeff(k) * (ppow * qpow[m - k]);
                ppow = ppow * R.numerator();
            }
            it_num = num;
            it_den = den;
        }
        Polynomial fixed_eq = it_num - (Polynomial::monomial(1) * it_den);
        if (fixed_eq.degree() < 1) continue;
        std::vector<cplx> pts;
        try {
            pts = poly_roots(fixed_eq, 1e-12);
        } catch (const root_convergence_error& e) {
            pts = e.best_roots;
        }
        for (cplx z : pts) {
            cplx d = 1.0;
            cplx w = z;
            bool ok = true;
            for (int t = 0; t < period && ok; ++t) {
                if (R.is_pole(w)) ok = false;
                else {
                    d *= R.deriv(w, 1);
                    w = R.eval_finite(w);
                }
            }
            if (ok && std::abs(d) > 1.0 + 1e-9) {
                start = z;
                break;
            }
        }
        if (start) break;
    }
    if (!start)
        throw hypothesis_error("sample_julia_points: no repelling periodic point found");

    std::mt19937_64 rng(seed);
    std::vector<cplx> out;
    cplx z = *start;
    int burn = 64;
    while (static_cast<int>(out.size()) < count) {
        std::vector<cplx> pre = R.preimages(z);
        z = pre[rng() % pre.size()];
        if (burn > 0)
            --burn;
        else
            out.push_back(z);
    }
    return out;
}

EssentialNeighborhood build_essential_neighborhood(const RationalMap& R, double eps,
                                                   const NeighborhoodOptions& opt) {
    if (!(eps > 0.0)) throw precondition_error("eps must be positive");
    if (!R.superattracting_infinity() &&
        std::abs(R.infinity_multiplier()) >= 1.0 - 1e-12)
        throw hypothesis_error(
            "essential neighborhood requires infinity attracting or superattracting");

    std::vector<Cycle> cycles =
        find_attracting_cycles(R, opt.max_period, opt.cycle_samples, opt.seed);
    std::vector<cplx> julia = sample_julia_points(R, 400, opt.seed + 1);

    // outer radius: smallest sampled radius with |R| > |z| on the circle, + margin
    double julia_rad = 0.0;
    for (cplx j : julia) julia_rad = std::max(julia_rad, std::abs(j));
    double lo = julia_rad + 1e-9, hi = std::max(R.escape_radius(), lo * 2.0) + 1.0;
    auto circle_invariant = [&](double r) {
        for (int k = 0; k < opt.circle_samples; ++k) {
            cplx z = std::polar(r, 2.0 * M_PI * (k + 0.31) / opt.circle_samples);
            auto w = R.eval(z);
            if (!w) continue;  // poles map to infinity: outside everything
            if (std::abs(*w) <= r) return false;
        }
        return true;
    };
    double router = hi;
    for (int it = 0; it < 40; ++it) {
        double mid = 0.5 * (lo + hi);
        if (circle_invariant(mid) && circle_invariant(mid * 1.02) &&
            circle_invariant(mid * 1.3))
            hi = mid;
        else
            lo = mid;
        router = hi;
    }

    EssentialNeighborhood U;
    U.outer_radius = router + opt.margin;
    // exterior must stay forward invariant at the chosen radius
    for (int g = 0; g < 8 && !circle_invariant(U.outer_radius); ++g)
        U.outer_radius *= 1.5;

    // per-point exclusion radii: image of each disk must land in the next
    // disk along its cycle
    struct Node {
        cplx p;
        cplx next;
        double r;
    };
    std::vector<Node> nodes;
    for (const auto& cy : cycles) {
        for (cplx p : cy.points) {
            cplx next = R.eval_finite(p);
            nodes.push_back({p, next, eps});
        }
    }
    // keep exclusions clear of the sampled Julia set
    for (auto& nd : nodes) {
        for (cplx j : julia) {
            double d = std::abs(j - nd.p);
            int guard = 0;
            while (nd.r >= d && guard++ < opt.max_halvings) nd.r *= 0.5;
        }
    }
    auto find_node = [&](cplx q) -> Node* {
        for (auto& nd : nodes)
            if (std::abs(nd.p - q) < 1e-6) return &nd;
        return nullptr;
    };
    auto image_radius = [&](const Node& nd) {
        double worst = 0.0;
        for (int k = 0; k < opt.circle_samples; ++k) {
            cplx z = nd.p + std::polar(nd.r, 2.0 * M_PI * k / opt.circle_samples);
            auto w = R.eval(z);
            if (!w) return 1e300;
            worst = std::max(worst, std::abs(*w - nd.next));
        }
        // small sampling margin; anything larger falsely rejects slowly
        // attracting cycles whose contraction is close to 1
        return worst * 1.03;
    };
    bool settled = false;
    std::vector<int> halvings(nodes.size(), 0);
    for (int pass = 0; pass < 200 && !settled; ++pass) {
        settled = true;
        for (size_t i = 0; i < nodes.size(); ++i) {
            Node* nxt = find_node(nodes[i].next);
            double target = nxt ? nxt->r : 0.0;
            if (!nxt) continue;  // next point refined away (should not happen)
            while (image_radius(nodes[i]) > target) {
                nodes[i].r *= 0.5;
                settled = false;
                if (++halvings[i] > opt.max_halvings)
                    throw hypothesis_error(
                        "essential neighborhood: cycle disks would not stabilize");
            }
        }
    }
    for (const auto& nd : nodes) U.excluded.push_back({nd.p, nd.r});
    std::sort(U.excluded.begin(), U.excluded.end(),
              [](const EssentialNeighborhood::Disk& a,
                 const EssentialNeighborhood::Disk& b) {
                  if (a.center.real() != b.center.real())
                      return a.center.real() < b.center.real();
                  return a.center.imag() < b.center.imag();
              });

    // sampled backward invariance: preimages of U points stay in U
    std::mt19937_64 rng(opt.seed + 2);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    int done = 0, budget = 0;
    while (done < opt.invariance_samples) {
        if (++budget > opt.invariance_samples * 20)
            throw hypothesis_error("essential neighborhood: sampling starvation");
        cplx w(U.outer_radius * uni(rng), U.outer_radius * uni(rng));
        if (!U.contains(w)) continue;
        ++done;
        double radius_floor = eps * std::exp2(-double(opt.max_halvings));
        for (cplx y : R.preimages(w)) {
            if (!U.contains(y)) {
                // shrink the disk the preimage fell into and restart sampling
                bool fixed = false;
                for (size_t i = 0; i < U.excluded.size(); ++i) {
                    if (std::abs(y - U.excluded[i].center) < U.excluded[i].radius) {
                        U.excluded[i].radius *= 0.5;
                        if (U.excluded[i].radius < radius_floor)
                            throw hypothesis_error(
                                "essential neighborhood: exclusion radius "
                                "exhausted the halving budget");
                        fixed = true;
                    }
                }
                if (!fixed)
                    throw hypothesis_error(
                        "essential neighborhood: backward invariance violated "
                        "outside exclusion disks");
                done = 0;
            }
        }
    }
    // Julia samples must lie in U
    for (cplx j : julia)
        if (!U.contains(j))
            throw hypothesis_error("essential neighborhood excludes Julia samples");
    return U;
}

// ---- test functions -------------------------------------------------------

TestFunctionFamily build_test_family(const EssentialNeighborhood& U,
                                     int kernel_count, int bump_count) {
    TestFunctionFamily fam;
    char buf[128];
    // Cauchy kernels h_w(z) = 1/(w - z) anchored outside U
    double rk = U.outer_radius + 1.5;
    for (int k = 0; k < kernel_count; ++k) {
        cplx w = std::polar(rk, 2.0 * M_PI * (k + 0.17) / kernel_count);
        std::snprintf(buf, sizeof buf, "cauchy(w=%.6g%+.6gi)", w.real(), w.imag());
        fam.push_back({buf,
                       [w](const ScaledComplex& z) {
                           return (ScaledComplex::from(w) - z).reciprocal();
                       },
                       0.0});
    }
    // kernels anchored at the excluded attracting centers
    for (const auto& d : U.excluded) {
        cplx w = d.center;
        std::snprintf(buf, sizeof buf, "cauchy(w=%.6g%+.6gi)", w.real(), w.imag());
        fam.push_back({buf,
                       [w](const ScaledComplex& z) {
                           ScaledComplex diff = ScaledComplex::from(w) - z;
                           if (diff.is_zero())
                               throw atom_collision_error("kernel anchored on atom", w, w);
                           return diff.reciprocal();
                       },
                       0.0});
    }
    // polynomials in z up to degree 4, plus conj z
    for (int dgr = 0; dgr <= 4; ++dgr) {
        std::snprintf(buf, sizeof buf, "poly(z^%d)", dgr);
        fam.push_back({buf,
                       [dgr](const ScaledComplex& z) {
                           ScaledComplex acc = ScaledComplex::one();
                           for (int t = 0; t < dgr; ++t) acc = acc * z;
                           return acc;
                       },
                       0.0});
    }
    fam.push_back({"conj(z)",
                   [](const ScaledComplex& z) { return z.conj(); },
                   1.0});
    // radial bumps (1 - |z-z0|^2/r^2)^2 supported in U
    double rb = std::max(U.outer_radius * 0.45, 0.2);
    for (int k = 0; k < bump_count; ++k) {
        cplx z0 = (k == 0) ? cplx(0.0)
                           : std::polar(U.outer_radius * 0.5,
                                        2.0 * M_PI * (k - 1) / std::max(1, bump_count - 1));
        std::snprintf(buf, sizeof buf, "bump(z0=%.6g%+.6gi,r=%.4g)", z0.real(),
                      z0.imag(), rb);
        double r2 = rb * rb;
        fam.push_back({buf,
                       [z0, r2](const ScaledComplex& z) {
                           if (!z.representable() && !z.is_zero())
                               return ScaledComplex::zero();
                           cplx d = z.to_complex() - z0;
                           double q = 1.0 - std::norm(d) / r2;
                           if (q <= 0.0) return ScaledComplex::zero();
                           return ScaledComplex::from(q * q);
                       },
                       4.0 / rb});
    }
    return fam;
}

ScaledComplex pair_measure(const AtomicMeasure& mu, const TestFunction& h) {
    ScaledComplex acc;
    for (const auto& a : mu.atoms) acc = acc + a.weight * h.fn(a.location);
    return acc;
}

namespace {

std::string trail_verdict(const std::vector<ScaledComplex>& v, const ProbeConfig& cfg,
                          double* tail_max_diff, double* max_abs,
                          const std::vector<int>* subset = nullptr) {
    std::vector<ScaledComplex> xs;
    if (subset) {
        for (int idx : *subset) xs.push_back(v[idx]);
    } else {
        xs = v;
    }
    int L = static_cast<int>(xs.size());
    if (L < 3) return "cauchy";
    double mx = 0.0;
    for (const auto& s : xs)
        if (!s.is_zero()) mx = std::max(mx, std::exp2(std::min(1000.0, s.log2_abs())));
    int tail = std::max(2, L / 4);
    double md = 0.0;
    for (int i = L - tail; i < L; ++i)
        for (int j = i + 1; j < L; ++j) {
            ScaledComplex d = xs[i] - xs[j];
            if (!d.is_zero())
                md = std::max(md, std::exp2(std::min(1000.0, d.log2_abs())));
        }
    if (max_abs) *max_abs = mx;
    if (tail_max_diff) *tail_max_diff = md;
    if (md < cfg.cauchy_tol * (1.0 + mx)) return "cauchy";
    // growing: the late absolute values dominate the early ones
    auto amp = [&](int i) {
        return xs[i].is_zero() ? 0.0 : std::exp2(std::min(1000.0, xs[i].log2_abs()));
    };
    double early = 0.0, late = 0.0;
    for (int i = 0; i < L / 2; ++i) early = std::max(early, amp(i));
    for (int i = L - tail; i < L; ++i) late = std::max(late, amp(i));
    if (late > cfg.growth_factor * (early + cfg.cauchy_tol)) return "growing";
    return "oscillating";
}

}  // namespace

ProbeReport weak_star_probe(const std::function<AtomicMeasure(int)>& nu,
                            const TestFunctionFamily& family, int L,
                            const EssentialNeighborhood* U, const ProbeConfig& cfg) {
    ProbeReport rep;
    rep.L = L;
    std::vector<AtomicMeasure> seq;
    for (int l = 1; l <= L; ++l) {
        try {
            seq.push_back(nu(l));
        } catch (const range_exhausted_error&) {
            rep.measures_truncated = true;
            break;
        }
    }
    rep.L = static_cast<int>(seq.size());

    long long atoms_total = 0, atoms_in = 0;
    if (U) {
        for (const auto& m : seq)
            for (const auto& a : m.atoms) {
                ++atoms_total;
                if (U->contains(a.location)) ++atoms_in;
            }
        rep.atoms_in_U_fraction =
            atoms_total ? double(atoms_in) / double(atoms_total) : 1.0;
    }

    std::vector<std::vector<int>> subs;
    for (double r : cfg.subsequence_ratios) {
        std::vector<int> idx;
        double v = 1.0;
        int last = -1;
        while (true) {
            int k = static_cast<int>(std::floor(v)) - 1;
            if (k >= rep.L) break;
            if (k > last) {
                idx.push_back(k);
                last = k;
            }
            v *= r;
            if (v > 1e9) break;
        }
        subs.push_back(idx);
    }

    bool all_cauchy = true;
    std::vector<bool> ratio_ok(cfg.subsequence_ratios.size(), true);
    for (const auto& h : family) {
        FunctionTrail tr;
        tr.name = h.name;
        std::vector<ScaledComplex> vals;
        for (const auto& m : seq) {
            ScaledComplex v = pair_measure(m, h);
            vals.push_back(v);
            tr.values.push_back(v.to_complex());
            tr.values_log2_abs.push_back(v.is_zero() ? -4000.0 : v.log2_abs());
        }
        tr.verdict = trail_verdict(vals, cfg, &tr.tail_max_diff, &tr.max_abs);
        for (size_t s = 0; s < subs.size(); ++s) {
            std::string v = trail_verdict(vals, cfg, nullptr, nullptr, &subs[s]);
            tr.subsequence_verdicts.push_back(v);
            if (v != "cauchy") ratio_ok[s] = false;
        }
        if (tr.verdict != "cauchy") {
            all_cauchy = false;
            if (rep.witness.empty()) rep.witness = tr.name;
        }
        rep.trails.push_back(std::move(tr));
    }
    rep.converges_on_family = all_cauchy;
    for (size_t s = 0; s < ratio_ok.size(); ++s)
        if (ratio_ok[s]) rep.shared_subsequence_ratios.push_back(cfg.subsequence_ratios[s]);
    return rep;
}

}  // namespace ruelle
