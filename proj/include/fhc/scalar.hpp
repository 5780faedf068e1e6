#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

namespace fhc {

using Complex = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

template <typename S>
inline constexpr bool is_rational_v = std::is_same_v<S, Rational>;

// Scalar helpers used by the templated containers. Every supported scalar
// (double, Complex, Rational) gets the same small vocabulary.

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const Complex& x) { return x == Complex{}; }
inline bool is_zero(const Rational& x) { return x.is_zero(); }

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const Complex& x) { return std::abs(x); }
inline double magnitude(const Rational& x) { return std::abs(x.convert_to<double>()); }

inline Rational exact_magnitude(const Rational& x) { return x < 0 ? Rational(-x) : x; }

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

inline Complex to_complex(double x) { return {x, 0.0}; }
inline Complex to_complex(const Complex& x) { return x; }
inline Complex to_complex(const Rational& x) { return {x.convert_to<double>(), 0.0}; }

template <typename S>
S from_double(double x) {
    if constexpr (is_rational_v<S>) {
        return Rational(x);  // exact binary expansion of the double
    } else {
        return S(x);
    }
}

/// Integer power for any supported scalar; negative exponents invert.
template <typename S>
S ipow(const S& base, long long e) {
    S result(1);
    S b = base;
    bool invert = e < 0;
    unsigned long long u = invert ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
    while (u) {
        if (u & 1ULL) result *= b;
        b *= b;
        u >>= 1;
    }
    if (invert) return S(1) / result;
    return result;
}

std::string rational_to_string(const Rational& q);
Rational rational_from_string(const std::string& s);

}  // namespace fhc
