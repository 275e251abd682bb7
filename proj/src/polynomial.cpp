#include "ruelle/polynomial.hpp"

#include <algorithm>
#include <random>

namespace ruelle {

Polynomial::Polynomial(std::vector<cplx> coeffs) : c_(std::move(coeffs)) {
    strip_exact_zeros();
}

void Polynomial::strip_exact_zeros() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

Polynomial Polynomial::constant(cplx c) {
    if (c == 0.0) return Polynomial();
    return Polynomial({c});
}

Polynomial Polynomial::monomial(int degree, cplx c) {
    if (c == 0.0) return Polynomial();
    std::vector<cplx> v(degree + 1, 0.0);
    v.back() = c;
    return Polynomial(std::move(v));
}

cplx Polynomial::leading() const {
    return c_.empty() ? cplx(0.0) : c_.back();
}

cplx Polynomial::operator()(cplx z) const {
    cplx acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

ScaledComplex Polynomial::eval_scaled(const ScaledComplex& z) const {
    ScaledComplex acc;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it)
        acc = acc * z + ScaledComplex::from(*it);
    return acc;
}

double Polynomial::magnitude_scale(double r) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * r + std::abs(*it);
    return acc;
}

double Polynomial::max_coeff_abs() const {
    double m = 0.0;
    for (const auto& c : c_) m = std::max(m, std::abs(c));
    return m;
}

Polynomial Polynomial::derivative() const {
    if (c_.size() <= 1) return Polynomial();
    std::vector<cplx> d(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = double(i) * c_[i];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::trimmed(double eps) const {
    double scale = max_coeff_abs();
    std::vector<cplx> v = c_;
    while (!v.empty() && std::abs(v.back()) <= eps * scale) v.pop_back();
    return Polynomial(std::move(v));
}

Polynomial Polynomial::deflate(cplx root, cplx& rem) const {
    if (c_.empty()) {
        rem = 0.0;
        return Polynomial();
    }
    std::vector<cplx> q(c_.size() - 1);
    cplx carry = c_.back();
    for (int i = static_cast<int>(c_.size()) - 2; i >= 0; --i) {
        q[i] = carry;
        carry = c_[i] + carry * root;
    }
    rem = carry;
    return Polynomial(std::move(q));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<cplx> v(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) v[i] += b.c_[i];
    return Polynomial(std::move(v));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    return a + (cplx(-1.0) * b);
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial();
    std::vector<cplx> v(a.c_.size() + b.c_.size() - 1, 0.0);
    for (size_t i = 0; i < a.c_.size(); ++i)
        for (size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(v));
}

Polynomial operator*(cplx s, const Polynomial& p) {
    if (s == 0.0) return Polynomial();
    std::vector<cplx> v = p.c_;
    for (auto& c : v) c *= s;
    return Polynomial(std::move(v));
}

namespace {

std::vector<cplx> quadratic_roots(cplx a, cplx b, cplx c) {
    // z = 2c / (-b -+ sqrt(disc)) picks the stable branch
    cplx disc = std::sqrt(b * b - 4.0 * a * c);
    cplx q = (std::real(std::conj(b) * disc) >= 0.0) ? -(b + disc) * 0.5
                                                     : -(b - disc) * 0.5;
    std::vector<cplx> r;
    if (q != 0.0) {
        r.push_back(q / a);
        r.push_back(c / q);
    } else {
        r.push_back(0.0);
        r.push_back(-b / a);
    }
    return r;
}

double residual_at(const Polynomial& p, cplx z) {
    double scale = p.magnitude_scale(std::abs(z));
    if (scale == 0.0) return 0.0;
    return std::abs(p(z)) / scale;
}

void sort_roots(std::vector<cplx>& r) {
    std::sort(r.begin(), r.end(), [](cplx x, cplx y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
}

}  // namespace

std::vector<cplx> poly_roots(const Polynomial& p, double tol) {
    int deg = p.degree();
    if (deg < 1) throw precondition_error("poly_roots: degree must be >= 1");

    // exact zero roots come off first
    std::vector<cplx> coeffs = p.coeffs();
    std::vector<cplx> roots;
    size_t nz = 0;
    while (nz < coeffs.size() - 1 && coeffs[nz] == 0.0) ++nz;
    for (size_t i = 0; i < nz; ++i) roots.push_back(0.0);
    coeffs.erase(coeffs.begin(), coeffs.begin() + nz);
    Polynomial q{std::vector<cplx>(coeffs)};
    int d = q.degree();

    if (d == 1) {
        roots.push_back(-q.coeff(0) / q.coeff(1));
    } else if (d == 2) {
        for (cplx r : quadratic_roots(q.coeff(2), q.coeff(1), q.coeff(0)))
            roots.push_back(r);
    } else if (d >= 3) {
        double radius = 0.0;
        for (int i = 0; i < d; ++i)
            radius = std::max(radius, std::abs(q.coeff(i) / q.leading()));
        radius = 1.0 + radius;

        std::mt19937_64 rng(0x5eedULL);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        std::vector<cplx> z(d);
        for (int i = 0; i < d; ++i) {
            double th = 2.0 * M_PI * (i + 0.37) / d + 0.5;
            double rr = radius * (0.6 + 0.05 * (i % 5));
            z[i] = std::polar(rr, th);
        }

        Polynomial dq = q.derivative();
        std::vector<bool> done(d, false);
        double best_max_resid = 1e300;
        std::vector<cplx> best = z;
        int stall = 0;
        int restarts = 0;
        const int max_iter = 900;
        bool converged = false;

        for (int iter = 0; iter < max_iter; ++iter) {
            double max_resid = 0.0;
            bool all = true;
            for (int i = 0; i < d; ++i) {
                double res = residual_at(q, z[i]);
                max_resid = std::max(max_resid, res);
                done[i] = (res <= tol);
                all = all && done[i];
            }
            if (max_resid < best_max_resid * 0.999) {
                best_max_resid = max_resid;
                best = z;
                stall = 0;
            } else {
                ++stall;
            }
            if (all) {
                converged = true;
                break;
            }
            if (stall > 120) {
                if (++restarts > 4) break;
                for (int i = 0; i < d; ++i)
                    if (!done[i])
                        z[i] *= cplx(1.0 + 1e-3 * uni(rng), 1e-3 * uni(rng));
                stall = 0;
            }
            for (int i = 0; i < d; ++i) {
                if (done[i]) continue;
                cplx pv = q(z[i]);
                cplx dv = dq(z[i]);
                if (dv == 0.0) {
                    z[i] += cplx(1e-6 * uni(rng), 1e-6 * uni(rng)) * (1.0 + radius);
                    continue;
                }
                cplx newton = pv / dv;
                cplx s = 0.0;
                bool collide = false;
                for (int j = 0; j < d; ++j) {
                    if (j == i) continue;
                    cplx diff = z[i] - z[j];
                    if (std::abs(diff) < 1e-14 * (1.0 + radius)) {
                        collide = true;
                        break;
                    }
                    s += 1.0 / diff;
                }
                if (collide) {
                    z[i] += cplx(1e-5 * uni(rng), 1e-5 * uni(rng)) * (1.0 + radius);
                    continue;
                }
                cplx denom = 1.0 - newton * s;
                cplx w = (std::abs(denom) < 1e-14) ? newton : newton / denom;
                z[i] -= w;
            }
        }
        if (!converged) {
            // final residual sweep: restarts may have landed on the target
            bool ok = true;
            for (int i = 0; i < d; ++i)
                if (residual_at(q, best[i]) > tol) ok = false;
            if (!ok) {
                std::vector<double> res(d);
                for (int i = 0; i < d; ++i) res[i] = residual_at(q, best[i]);
                throw root_convergence_error("poly_roots: iteration cap reached",
                                             best, res);
            }
            z = best;
        }
        for (cplx r : z) roots.push_back(r);
    }

    // centroid-average clustered multiple roots
    std::vector<RootCluster> clusters = cluster_roots(roots, tol);
    roots.clear();
    for (const auto& cl : clusters)
        for (int i = 0; i < cl.multiplicity; ++i) roots.push_back(cl.value);
    sort_roots(roots);
    return roots;
}

std::vector<RootCluster> cluster_roots(const std::vector<cplx>& roots, double tol) {
    struct Group {
        cplx sum;
        int count;
        cplx centroid() const { return sum / double(count); }
    };
    std::vector<Group> gs;
    for (cplx r : roots) gs.push_back({r, 1});

    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < gs.size() && !changed; ++i) {
            for (size_t j = i + 1; j < gs.size() && !changed; ++j) {
                int k = gs[i].count + gs[j].count;
                double reach = 10.0 * std::pow(tol, 1.0 / k);
                if (std::abs(gs[i].centroid() - gs[j].centroid()) <= reach) {
                    gs[i].sum += gs[j].sum;
                    gs[i].count += gs[j].count;
                    gs.erase(gs.begin() + j);
                    changed = true;
                }
            }
        }
    }
    std::vector<RootCluster> out;
    for (const auto& g : gs) out.push_back({g.centroid(), g.count});
    std::sort(out.begin(), out.end(), [](const RootCluster& a, const RootCluster& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
    return out;
}

}  // namespace ruelle
