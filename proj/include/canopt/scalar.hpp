// Copyright 2026 canopt developers
// SPDX-License-Identifier: MIT
//
// Scalar backends. All algorithms are templates over a scalar type S that is
// either `double` (fast path used by the optimizer) or `Rational`
// (arbitrary-precision exact path used by the cross-checking oracles and the
// exact tests). This header centralizes the few operations whose meaning
// differs between the two: zero tests, closeness tests, and conversions.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>

#include "canopt/errors.hpp"

namespace canopt {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

template <class S>
inline constexpr bool is_rational_v = std::is_same_v<S, Rational>;

// Exact zero for rationals; tiny-magnitude for doubles. `tol` only applies to
// the floating path (denominator guards in the recurrence sweeps).
template <class S>
bool near_zero(const S& x, double tol = 1e-13) {
    if constexpr (is_rational_v<S>) {
        (void)tol;
        return x == 0;
    } else {
        return std::abs(x) < tol;
    }
}

template <class S>
bool near(const S& a, const S& b, double tol = 1e-12) {
    if constexpr (is_rational_v<S>) {
        (void)tol;
        return a == b;
    } else {
        return std::abs(a - b) <= tol;
    }
}

template <class S>
double to_double(const S& x) {
    if constexpr (is_rational_v<S>) {
        return x.template convert_to<double>();
    } else {
        return x;
    }
}

template <class S>
S scalar_from_int(long long v) {
    return S(v);
}

// Integer power with nonnegative exponent.
template <class S>
S ipow(S base, unsigned long long e) {
    S acc(1);
    while (e > 0) {
        if (e & 1ULL) acc *= base;
        base *= base;
        e >>= 1ULL;
    }
    return acc;
}

// Exact square root of a rational, for mapping measures on [0,1] to their
// symmetric counterparts on [-1,1]. Errors when the value is not a perfect
// square of a rational (the exact backend cannot represent the result).
inline Rational exact_sqrt(const Rational& x) {
    if (x < 0) fail(Errc::NonRepresentable, "square root of a negative value");
    BigInt num = boost::multiprecision::numerator(x);
    BigInt den = boost::multiprecision::denominator(x);
    BigInt rn = boost::multiprecision::sqrt(num);
    BigInt rd = boost::multiprecision::sqrt(den);
    if (rn * rn != num || rd * rd != den)
        fail(Errc::NonRepresentable, "square root is not rational");
    return Rational(rn, rd);
}

template <class S>
S scalar_sqrt(const S& x) {
    if constexpr (is_rational_v<S>) {
        return exact_sqrt(x);
    } else {
        if (x < 0) fail(Errc::NonRepresentable, "square root of a negative value");
        return std::sqrt(x);
    }
}

inline std::string scalar_str(const Rational& x) { return x.str(); }
inline std::string scalar_str(double x) { return std::to_string(x); }

}  // namespace canopt
