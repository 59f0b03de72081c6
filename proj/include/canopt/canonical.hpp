// Copyright 2026 canopt developers
// SPDX-License-Identifier: MIT
//
// Canonical-moment calculus on [0,1]: Hankel determinants, the extremal
// moment bounds, conversions between ordinary moments, canonical moments p_k
// and the product variables zeta_k, and the product formula for the leading
// Hankel determinant.

#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "canopt/errors.hpp"
#include "canopt/linalg.hpp"
#include "canopt/scalar.hpp"

namespace canopt {

// Canonical moments p_1..p_{N-1} strictly inside (0,1), plus an optional
// terminal p_N in {0,1}. A terminal entry marks a finitely supported measure;
// entries past it are not free parameters.
template <class S>
struct CanonicalSeq {
    std::vector<S> interior;
    std::optional<int> terminal;  // 0 or 1 when present

    std::size_t depth() const { return interior.size() + (terminal ? 1u : 0u); }

    // 1-based accessor over the full sequence.
    S at(std::size_t k) const {
        if (k >= 1 && k <= interior.size()) return interior[k - 1];
        if (terminal && k == interior.size() + 1) return S(*terminal);
        fail(Errc::InsufficientDepth, "canonical index out of range");
    }
};

template <class S>
CanonicalSeq<S> make_canonical(std::vector<S> interior, std::optional<int> terminal) {
    for (const S& p : interior) {
        bool ok;
        if constexpr (is_rational_v<S>) {
            ok = p > S(0) && p < S(1);
        } else {
            ok = p > 1e-14 && p < 1.0 - 1e-14;
        }
        if (!ok) fail(Errc::InvalidInput, "interior canonical moments must lie strictly in (0,1)");
    }
    if (terminal && *terminal != 0 && *terminal != 1)
        fail(Errc::InvalidInput, "terminal canonical moment must be 0 or 1");
    return CanonicalSeq<S>{std::move(interior), terminal};
}

// Hankel determinant of dimension k over entries c_{i+j+n}; the barred
// variant uses first differences c_{i+j+n} - c_{i+j+n+1}. Dimension 0 is 1
// and negative dimensions are 0 by convention.
template <class S>
S hankel(const std::vector<S>& c, long k, std::size_t n, bool barred = false) {
    if (k < 0) return S(0);
    if (k == 0) return S(1);
    const std::size_t dim = static_cast<std::size_t>(k);
    const std::size_t top = 2 * (dim - 1) + n + (barred ? 1 : 0);
    if (top >= c.size()) fail(Errc::InsufficientMoments, "moment sequence too short for Hankel determinant");
    std::vector<std::vector<S>> a(dim, std::vector<S>(dim));
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            const std::size_t idx = i + j + n;
            a[i][j] = barred ? c[idx] - c[idx + 1] : c[idx];
        }
    return determinant(std::move(a));
}

namespace detail {

// The k-th moment enters each bounding determinant exactly once, in the
// bottom-right corner, so the determinant is linear in it: evaluate at
// c_k = 0 and c_k = 1 and solve for the root.
template <class S>
S corner_root(const std::vector<S>& c, std::size_t k, long dim, std::size_t n, bool barred) {
    std::vector<S> padded(c.begin(), c.begin() + static_cast<long>(k));
    padded.resize(k + 1, S(0));
    S d0 = hankel(padded, dim, n, barred);
    padded[k] = S(1);
    S d1 = hankel(padded, dim, n, barred);
    S slope = d1 - d0;
    if (near_zero<S>(slope, 1e-13))
        fail(Errc::BoundaryMomentPoint, "moment prefix lies on the moment-space boundary");
    return -d0 / slope;
}

}  // namespace detail

// Extremal values (c_k^-, c_k^+) of the k-th moment given c_0..c_{k-1}: the
// roots, in the corner entry, of the plain and the barred bounding Hankel
// determinants respectively.
template <class S>
std::pair<S, S> moment_bounds(const std::vector<S>& c, std::size_t k) {
    if (k == 0 || c.size() < k) fail(Errc::InsufficientMoments, "need c_0..c_{k-1} for moment bounds");
    S lo, hi;
    if (k % 2 == 1) {
        const long j = static_cast<long>((k + 1) / 2);
        lo = detail::corner_root(c, k, j, 1, false);
        hi = detail::corner_root(c, k, j, 0, true);
    } else {
        const long j = static_cast<long>(k / 2);
        lo = detail::corner_root(c, k, j + 1, 0, false);
        hi = detail::corner_root(c, k, j, 1, true);
    }
    if constexpr (is_rational_v<S>) {
        if (hi < lo) fail(Errc::InvalidMomentSequence, "upper moment bound fell below lower bound");
    } else {
        // Tolerate bound inversion below the floating-point noise floor.
        if (hi - lo < -1e-9) fail(Errc::InvalidMomentSequence, "upper moment bound fell below lower bound");
    }
    return {lo, hi};
}

// Definitional conversion: p_k is the relative position of c_k between its
// extremal values. Stops with a terminal entry when c_k hits a bound.
template <class S>
CanonicalSeq<S> moments_to_canonical(const std::vector<S>& c) {
    if constexpr (is_rational_v<S>) {
        if (c.empty() || c[0] != S(1))
            fail(Errc::InvalidMomentSequence, "moment sequence must start with c_0 = 1");
    } else {
        if (c.empty() || std::abs(c[0] - 1.0) > 1e-9)
            fail(Errc::InvalidMomentSequence, "moment sequence must start with c_0 = 1");
    }
    CanonicalSeq<S> out;
    for (std::size_t k = 1; k < c.size(); ++k) {
        std::pair<S, S> bounds;
        if constexpr (is_rational_v<S>) {
            bounds = moment_bounds(c, k);
        } else {
            // A bounding determinant whose corner slope is below the noise
            // floor means the prefix is numerically terminated: the remaining
            // band is unresolvable in double precision, and every choice of
            // continuation reproduces the input moments to working accuracy.
            try {
                bounds = moment_bounds(c, k);
            } catch (const Error& e) {
                if (e.code() == Errc::BoundaryMomentPoint) {
                    out.terminal = 0;
                    return out;
                }
                throw;
            }
        }
        auto [lo, hi] = bounds;
        S width = hi - lo;
        if constexpr (is_rational_v<S>) {
            if (width == S(0))
                fail(Errc::BoundaryMomentPoint, "moment bounds collapsed before a terminal was seen");
            S p = (c[k] - lo) / width;
            if (p == S(0) || p == S(1)) {
                out.terminal = static_cast<int>(p == S(1));
                return out;
            }
            if (p < S(0) || p > S(1)) fail(Errc::InvalidMomentSequence, "moment outside its extremal range");
            out.interior.push_back(p);
        } else {
            // Violations are judged on the absolute moment scale: honest
            // floating-point moments never miss their band by 1e-9, while a
            // genuinely inconsistent sequence does.
            if (c[k] - lo < -1e-9 || c[k] - hi > 1e-9)
                fail(Errc::InvalidMomentSequence, "moment outside its extremal range");
            if (width <= 1e-15) {
                // The band is below noise; classify by the nearer endpoint.
                out.terminal = std::abs(c[k] - lo) <= std::abs(hi - c[k]) ? 0 : 1;
                return out;
            }
            S p = (c[k] - lo) / width;
            if (p <= 1e-9) {
                out.terminal = 0;
                return out;
            }
            if (p >= 1.0 - 1e-9) {
                out.terminal = 1;
                return out;
            }
            out.interior.push_back(p);
        }
    }
    return out;
}

// Alternate conversion through Hankel determinant ratios; used to cross-check
// the definitional path. Produces interior values only (stops at the first
// vanishing denominator).
template <class S>
std::vector<S> canonical_via_hankel_ratios(const std::vector<S>& c, std::size_t count) {
    std::vector<S> p;
    for (std::size_t idx = 1; idx <= count; ++idx) {
        S num, den;
        if (idx % 2 == 1) {
            const long k = static_cast<long>((idx + 1) / 2);
            num = hankel(c, k, 1) * hankel(c, k - 1, 0, true);
            den = hankel(c, k, 0) * hankel(c, k - 1, 1, true);
        } else {
            const long k = static_cast<long>(idx / 2);
            num = hankel(c, k + 1, 0) * hankel(c, k - 1, 1, true);
            den = hankel(c, k, 1) * hankel(c, k, 0, true);
        }
        if (near_zero<S>(den, 1e-300)) break;
        p.push_back(num / den);
    }
    return p;
}

// zeta_1 = p_1, zeta_k = (1 - p_{k-1}) p_k, with zero extension past a
// terminal entry (a terminated sequence has zeta_k = 0 for all deeper k,
// which is exactly the cut Jacobi recurrence of a finitely supported
// measure).
template <class S>
std::vector<S> zeta_of(const CanonicalSeq<S>& p, std::size_t K) {
    const std::size_t N = p.depth();
    if (!p.terminal && K > N) fail(Errc::InsufficientDepth, "canonical sequence too short");
    std::vector<S> z;
    z.reserve(K);
    S prev(0);
    for (std::size_t k = 1; k <= K; ++k) {
        if (k <= N) {
            S cur = p.at(k);
            z.push_back((S(1) - prev) * cur);
            prev = cur;
        } else {
            z.push_back(S(0));
        }
    }
    return z;
}

template <class S>
std::vector<S> canonical_to_zeta(const CanonicalSeq<S>& p) {
    return zeta_of(p, p.depth());
}

// Inverse transform. Recovers p by the forward recursion and classifies a
// final boundary value as terminal.
template <class S>
CanonicalSeq<S> zeta_to_canonical(const std::vector<S>& z) {
    CanonicalSeq<S> out;
    S prev(0);
    for (std::size_t k = 0; k < z.size(); ++k) {
        S denom = S(1) - prev;
        if (near_zero<S>(denom, 1e-300)) {
            if (k + 1 < z.size()) fail(Errc::InvalidZeta, "sequence continues past a terminal value");
            break;
        }
        S p = z[k] / denom;
        bool boundary_lo, boundary_hi;
        if constexpr (is_rational_v<S>) {
            if (p < S(0) || p > S(1)) fail(Errc::InvalidZeta, "recovered canonical moment outside [0,1]");
            boundary_lo = p == S(0);
            boundary_hi = p == S(1);
        } else {
            if (p < -1e-12 || p > 1.0 + 1e-12) fail(Errc::InvalidZeta, "recovered canonical moment outside [0,1]");
            boundary_lo = std::abs(p) <= 1e-12;
            boundary_hi = std::abs(1.0 - p) <= 1e-12;
        }
        if (boundary_lo || boundary_hi) {
            if (k + 1 < z.size()) fail(Errc::InvalidZeta, "sequence continues past a terminal value");
            out.terminal = boundary_hi ? 1 : 0;
            return out;
        }
        out.interior.push_back(p);
        prev = p;
    }
    return out;
}

// Moments of the unique measure with canonical moments p, read off as the
// (0,0) entries of powers of the monic three-term-recurrence operator
// (diagonal a_0 = zeta_1, a_j = zeta_{2j} + zeta_{2j+1}; products
// b_j = zeta_{2j-1} zeta_{2j}).
template <class S>
std::vector<S> canonical_to_moments(const CanonicalSeq<S>& p, std::size_t K) {
    const std::size_t N = p.depth();
    if (!p.terminal && N < K) fail(Errc::InsufficientDepth, "need canonical depth K for K moments");
    // c_k depends on zeta_1..zeta_k only, so depth K suffices when the
    // sequence does not terminate; terminated sequences zero-extend exactly.
    std::vector<S> z = zeta_of(p, p.terminal ? K + 2 : K);

    const std::size_t L = K / 2 + 2;  // operator truncation; powers <= K never reach deeper
    auto zz = [&](std::size_t k) { return k >= 1 && k <= z.size() ? z[k - 1] : S(0); };
    std::vector<S> diag(L), prod(L, S(0));
    for (std::size_t j = 0; j < L; ++j)
        diag[j] = j == 0 ? zz(1) : zz(2 * j) + zz(2 * j + 1);
    for (std::size_t j = 1; j < L; ++j) prod[j] = zz(2 * j - 1) * zz(2 * j);

    std::vector<S> v(L, S(0)), nv(L, S(0));
    v[0] = S(1);
    std::vector<S> c;
    c.reserve(K + 1);
    c.push_back(S(1));
    for (std::size_t k = 1; k <= K; ++k) {
        for (std::size_t i = 0; i < L; ++i) {
            S acc = diag[i] * v[i];
            if (i > 0) acc += v[i - 1];
            if (i + 1 < L) acc += prod[i + 1] * v[i + 1];
            nv[i] = acc;
        }
        std::swap(v, nv);
        c.push_back(v[0]);
    }
    return c;
}

// Product form of the leading Hankel determinant of dimension m.
template <class S>
S hankel_product(const CanonicalSeq<S>& p, std::size_t m) {
    if (m <= 1) return S(1);
    std::vector<S> z = zeta_of(p, 2 * m - 2);
    S acc(1);
    for (std::size_t k = 1; k + 1 <= m; ++k) {
        S pair = z[2 * k - 2] * z[2 * k - 1];
        acc *= ipow(pair, m - k);
    }
    return acc;
}

}  // namespace canopt
