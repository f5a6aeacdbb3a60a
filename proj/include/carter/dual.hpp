#pragma once

#include <cmath>
#include <cstdlib>

#include "carter/errors.hpp"

namespace carter {

/// Forward-mode dual number: value plus one directional derivative.
/// Arithmetic follows the product and chain rules exactly, so derivatives
/// carry no truncation error.
struct Dual {
    double v = 0.0;
    double d = 0.0;

    Dual() = default;
    Dual(double value) : v(value) {}
    Dual(double value, double deriv) : v(value), d(deriv) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }

inline Dual operator/(Dual a, Dual b) {
    if (b.v == 0.0) throw EvalError("division by zero");
    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}

inline Dual sin(Dual a) { return {std::sin(a.v), std::cos(a.v) * a.d}; }
inline Dual cos(Dual a) { return {std::cos(a.v), -std::sin(a.v) * a.d}; }

inline Dual tan(Dual a) {
    double t = std::tan(a.v);
    return {t, (1.0 + t * t) * a.d};
}

inline Dual sqrt(Dual a) {
    if (a.v < 0.0) throw EvalError("sqrt of negative value");
    double s = std::sqrt(a.v);
    // derivative is infinite at 0; propagate only when seeded
    return {s, a.d == 0.0 ? 0.0 : a.d / (2.0 * s)};
}

inline Dual exp(Dual a) {
    double e = std::exp(a.v);
    return {e, e * a.d};
}

inline Dual log(Dual a) {
    if (a.v <= 0.0) throw EvalError("log of non-positive value");
    return {std::log(a.v), a.d / a.v};
}

inline Dual abs(Dual a) { return {std::fabs(a.v), a.v >= 0.0 ? a.d : -a.d}; }

/// True when x is within 1e-12 of an integer (the integer-exponent test).
inline bool nearly_integer(double x) {
    return std::fabs(x - std::round(x)) < 1e-12;
}

namespace detail {
/// b^k for integer k by squaring, valid for negative bases.
template <class T>
T int_pow(T base, long long k) {
    bool invert = k < 0;
    unsigned long long n = invert ? static_cast<unsigned long long>(-k)
                                  : static_cast<unsigned long long>(k);
    T result(1.0);
    T acc = base;
    while (n > 0) {
        if (n & 1ULL) result = result * acc;
        n >>= 1;
        if (n) acc = acc * acc;
    }
    if (invert) return T(1.0) / result;
    return result;
}
} // namespace detail

/// Power with the integer-exponent rule: an exponent within 1e-12 of an
/// integer is computed by repeated multiplication (legal on negative bases,
/// e.g. sig^4 at sig < 0); otherwise the base must be positive.
inline Dual pow(Dual b, Dual e) {
    if (e.d == 0.0 && nearly_integer(e.v)) {
        long long k = static_cast<long long>(std::llround(e.v));
        if (b.v == 0.0 && k < 0) throw EvalError("division by zero");
        return detail::int_pow(b, k);
    }
    if (b.v <= 0.0) throw EvalError("non-integer power of non-positive base");
    double p = std::pow(b.v, e.v);
    return {p, p * (e.d * std::log(b.v) + e.v * b.d / b.v)};
}

inline double pow_checked(double b, double e) {
    if (nearly_integer(e)) {
        long long k = static_cast<long long>(std::llround(e));
        if (b == 0.0 && k < 0) throw EvalError("division by zero");
        return detail::int_pow(b, k);
    }
    if (b <= 0.0) throw EvalError("non-integer power of non-positive base");
    return std::pow(b, e);
}

} // namespace carter
