#ifndef RUELLE_POLYNOMIAL_HPP
#define RUELLE_POLYNOMIAL_HPP

#include <vector>

#include "ruelle/scaled_complex.hpp"

namespace ruelle {

// Dense polynomial, coefficients ascending by degree, leading coefficient
// nonzero unless the polynomial is zero (empty coefficient list).
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<cplx> coeffs);

    static Polynomial zero() { return Polynomial(); }
    static Polynomial constant(cplx c);
    static Polynomial monomial(int degree, cplx c = 1.0);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<cplx>& coeffs() const { return c_; }
    cplx coeff(int k) const {
        return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : cplx(0.0);
    }
    cplx leading() const;

    cplx operator()(cplx z) const;
    ScaledComplex eval_scaled(const ScaledComplex& z) const;
    // sum |c_i| r^i, the natural residual scale at |z| = r
    double magnitude_scale(double r) const;
    double max_coeff_abs() const;

    Polynomial derivative() const;
    // strips leading coefficients below eps * max|coeff|
    Polynomial trimmed(double eps) const;

    // quotient by (z - root); remainder returned through rem
    Polynomial deflate(cplx root, cplx& rem) const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(cplx s, const Polynomial& p);

private:
    std::vector<cplx> c_;
    void strip_exact_zeros();
};

// All complex roots with multiplicity (Aberth simultaneous iteration with
// deterministic perturbation restarts).  Each returned root r satisfies
// |p(r)| <= tol * sum_i |c_i| |r|^i; clustered multiple roots are replaced
// by their centroid repeated multiplicity times.  Throws
// root_convergence_error with the best iterates on failure.
std::vector<cplx> poly_roots(const Polynomial& p, double tol = 1e-12);

struct RootCluster {
    cplx value;
    int multiplicity;
};

// Groups roots within 10 * tol^(1/multiplicity) of each other.
std::vector<RootCluster> cluster_roots(const std::vector<cplx>& roots, double tol);

}  // namespace ruelle

#endif
