#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace moyal {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational number, always stored in lowest terms with positive
// denominator (cpp_rational maintains both invariants).
using Rational = boost::multiprecision::cpp_rational;

inline std::string rational_to_string(const Rational& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) {
        s += "/" + denominator(r).str();
    }
    return s;
}

inline Rational rational_pow(const Rational& base, unsigned exp) {
    Rational out = 1;
    for (unsigned k = 0; k < exp; ++k) out *= base;
    return out;
}

// Gaussian rational a + b*i. The coefficient field for every polynomial in
// the project; the imaginary unit carries the i of the star-product
// exponent and of the lambda -> -i*d/dphi realization.
struct ComplexRational {
    Rational re{0};
    Rational im{0};

    ComplexRational() = default;
    ComplexRational(Rational r) : re(std::move(r)) {}  // NOLINT implicit
    ComplexRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    ComplexRational(long r) : re(r) {}  // NOLINT implicit
    ComplexRational(long r, long i) : re(r), im(i) {}

    static ComplexRational unit_i() { return {Rational(0), Rational(1)}; }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    ComplexRational conj() const { return {re, -im}; }

    ComplexRational& operator+=(const ComplexRational& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    ComplexRational& operator-=(const ComplexRational& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    ComplexRational& operator*=(const ComplexRational& o) {
        Rational r = re * o.re - im * o.im;
        Rational i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }

    friend ComplexRational operator+(ComplexRational a, const ComplexRational& b) { return a += b; }
    friend ComplexRational operator-(ComplexRational a, const ComplexRational& b) { return a -= b; }
    friend ComplexRational operator*(ComplexRational a, const ComplexRational& b) { return a *= b; }
    friend ComplexRational operator-(const ComplexRational& a) { return {-a.re, -a.im}; }
    friend bool operator==(const ComplexRational& a, const ComplexRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const ComplexRational& a, const ComplexRational& b) { return !(a == b); }

    ComplexRational pow(unsigned k) const {
        ComplexRational out{Rational(1)};
        for (unsigned j = 0; j < k; ++j) out *= *this;
        return out;
    }
};

inline ComplexRational i_power(unsigned k) {
    switch (k % 4) {
        case 0: return {Rational(1), Rational(0)};
        case 1: return {Rational(0), Rational(1)};
        case 2: return {Rational(-1), Rational(0)};
        default: return {Rational(0), Rational(-1)};
    }
}

}  // namespace moyal
