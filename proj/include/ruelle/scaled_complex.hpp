#ifndef RUELLE_SCALED_COMPLEX_HPP
#define RUELLE_SCALED_COMPLEX_HPP

#include <cmath>
#include <complex>
#include <cstdint>

#include "ruelle/errors.hpp"

namespace ruelle {

// Complex value mantissa * 2^exponent with |mantissa| in [1,2), or the
// canonical zero (0, 0).  Derivative products along orbits reach magnitudes
// like 4^n and beyond double range; everything downstream accumulates here.
class ScaledComplex {
public:
    ScaledComplex() : m_(0.0), e_(0) {}
    ScaledComplex(cplx mantissa, long long exponent) { assign(mantissa, exponent); }

    static ScaledComplex from(cplx z) { return ScaledComplex(z, 0); }
    static ScaledComplex from(double x) { return ScaledComplex(cplx(x, 0.0), 0); }
    static ScaledComplex one() { return from(1.0); }
    static ScaledComplex zero() { return ScaledComplex(); }

    cplx mantissa() const { return m_; }
    long long exponent() const { return e_; }
    bool is_zero() const { return m_ == 0.0; }

    // log2 |value|; domain error on zero.
    double log2_abs() const {
        if (is_zero()) throw std::domain_error("log2_abs of zero");
        return std::log2(std::abs(m_)) + static_cast<double>(e_);
    }

    // Saturates to inf/0 outside double range.
    cplx to_complex() const {
        if (is_zero()) return 0.0;
        long long e = e_;
        if (e > 3000) e = 3000;
        if (e < -3000) e = -3000;
        int ie = static_cast<int>(e);
        return cplx(std::ldexp(m_.real(), ie), std::ldexp(m_.imag(), ie));
    }

    bool representable() const {
        return is_zero() || (e_ > -1020 && e_ < 1020);
    }

    ScaledComplex operator-() const {
        ScaledComplex r;
        r.m_ = -m_;
        r.e_ = e_;
        return r;
    }

    friend ScaledComplex operator*(const ScaledComplex& a, const ScaledComplex& b) {
        if (a.is_zero() || b.is_zero()) return ScaledComplex();
        return ScaledComplex(a.m_ * b.m_, checked_add(a.e_, b.e_));
    }

    friend ScaledComplex operator/(const ScaledComplex& a, const ScaledComplex& b) {
        if (b.is_zero()) throw std::domain_error("ScaledComplex division by zero");
        if (a.is_zero()) return ScaledComplex();
        return ScaledComplex(a.m_ / b.m_, checked_add(a.e_, -b.e_));
    }

    friend ScaledComplex operator+(const ScaledComplex& a, const ScaledComplex& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        const ScaledComplex& hi = (a.e_ >= b.e_) ? a : b;
        const ScaledComplex& lo = (a.e_ >= b.e_) ? b : a;
        long long shift = hi.e_ - lo.e_;
        if (shift > 2100) return hi;  // lo is below one ulp of hi
        int is = static_cast<int>(shift);
        cplx lom(std::ldexp(lo.m_.real(), -is), std::ldexp(lo.m_.imag(), -is));
        return ScaledComplex(hi.m_ + lom, hi.e_);
    }

    friend ScaledComplex operator-(const ScaledComplex& a, const ScaledComplex& b) {
        return a + (-b);
    }

    friend bool operator==(const ScaledComplex& a, const ScaledComplex& b) {
        return a.m_ == b.m_ && a.e_ == b.e_;
    }
    friend bool operator!=(const ScaledComplex& a, const ScaledComplex& b) {
        return !(a == b);
    }

    ScaledComplex conj() const {
        ScaledComplex r;
        r.m_ = std::conj(m_);
        r.e_ = e_;
        return r;
    }

    // |value| as a real-valued ScaledComplex.
    ScaledComplex abs() const {
        if (is_zero()) return ScaledComplex();
        return ScaledComplex(cplx(std::abs(m_), 0.0), e_);
    }

    ScaledComplex reciprocal() const { return one() / *this; }

private:
    cplx m_;
    long long e_;

    static long long checked_add(long long a, long long b) {
        long long r;
        if (__builtin_add_overflow(a, b, &r))
            throw scaled_overflow_error("ScaledComplex exponent overflow");
        if (r > (1LL << 62) || r < -(1LL << 62))
            throw scaled_overflow_error("ScaledComplex exponent out of range");
        return r;
    }

    void assign(cplx m, long long e) {
        if (m == 0.0) {
            m_ = 0.0;
            e_ = 0;
            return;
        }
        if (!std::isfinite(m.real()) || !std::isfinite(m.imag()))
            throw scaled_overflow_error("ScaledComplex mantissa not finite");
        double peak = std::max(std::fabs(m.real()), std::fabs(m.imag()));
        int k = std::ilogb(peak);
        m = cplx(std::ldexp(m.real(), -k), std::ldexp(m.imag(), -k));
        e = checked_add(e, k);
        double a = std::abs(m);
        while (a >= 2.0) {
            m *= 0.5;
            a *= 0.5;
            e = checked_add(e, 1);
        }
        while (a < 1.0) {
            m *= 2.0;
            a *= 2.0;
            e = checked_add(e, -1);
        }
        m_ = m;
        e_ = e;
    }
};

inline ScaledComplex operator*(const ScaledComplex& a, cplx b) {
    return a * ScaledComplex::from(b);
}
inline ScaledComplex operator*(cplx a, const ScaledComplex& b) {
    return ScaledComplex::from(a) * b;
}
inline ScaledComplex operator/(const ScaledComplex& a, cplx b) {
    return a / ScaledComplex::from(b);
}
inline ScaledComplex operator/(cplx a, const ScaledComplex& b) {
    return ScaledComplex::from(a) / b;
}

// log2 |a|, the operation the series traces log.
inline double scaled_abs_log2(const ScaledComplex& a) { return a.log2_abs(); }

}  // namespace ruelle

#endif
