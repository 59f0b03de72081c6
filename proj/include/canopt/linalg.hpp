// Copyright 2026 canopt developers
// SPDX-License-Identifier: MIT
//
// Small dense linear algebra over either scalar backend: determinants and
// linear solves by Gaussian elimination. Exact division pivoting (first
// nonzero) for rationals, partial pivoting for doubles. Matrices here are by
// construction tiny (dimension <= a few dozen), so no factorization reuse.

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "canopt/errors.hpp"
#include "canopt/scalar.hpp"

namespace canopt {

template <class S>
using Mat = std::vector<std::vector<S>>;

template <class S>
S determinant(Mat<S> a) {
    const std::size_t n = a.size();
    if (n == 0) return S(1);
    S det(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        if constexpr (is_rational_v<S>) {
            while (piv < n && a[piv][col] == 0) ++piv;
            if (piv == n) return S(0);
        } else {
            for (std::size_t r = col + 1; r < n; ++r)
                if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
            if (a[piv][col] == 0.0) return S(0);
        }
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            if (a[r][col] == S(0)) continue;
            S f = a[r][col] / a[col][col];
            for (std::size_t cc = col; cc < n; ++cc) a[r][cc] -= f * a[col][cc];
        }
    }
    return det;
}

// Solves a x = rhs; errors on a singular matrix.
template <class S>
std::vector<S> linsolve(Mat<S> a, std::vector<S> rhs) {
    const std::size_t n = a.size();
    if (rhs.size() != n) fail(Errc::InvalidInput, "linsolve dimension mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        if constexpr (is_rational_v<S>) {
            while (piv < n && a[piv][col] == 0) ++piv;
            if (piv == n) fail(Errc::SingularInformationMatrix, "singular linear system");
        } else {
            for (std::size_t r = col + 1; r < n; ++r)
                if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
            if (a[piv][col] == 0.0) fail(Errc::SingularInformationMatrix, "singular linear system");
        }
        if (piv != col) {
            std::swap(a[piv], a[col]);
            std::swap(rhs[piv], rhs[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            if (a[r][col] == S(0)) continue;
            S f = a[r][col] / a[col][col];
            rhs[r] -= f * rhs[col];
            for (std::size_t cc = col; cc < n; ++cc) a[r][cc] -= f * a[col][cc];
        }
    }
    std::vector<S> x(n, S(0));
    for (std::size_t i = n; i-- > 0;) {
        S acc = rhs[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= a[i][j] * x[j];
        x[i] = acc / a[i][i];
    }
    return x;
}

}  // namespace canopt
