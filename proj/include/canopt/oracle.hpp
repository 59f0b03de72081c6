// Copyright 2026 canopt developers
// SPDX-License-Identifier: MIT
//
// Slow, independent ground truth used to validate the recurrence pipeline:
// generalized Hankel determinants evaluated directly, determinant-form
// generalized canonical moments, weighted information-matrix determinants,
// and a grid exchange search for D-optimal designs. Nothing here shares code
// with the sweeps it checks.

#pragma once

#include <cstddef>
#include <vector>

#include "canopt/canonical.hpp"
#include "canopt/errors.hpp"
#include "canopt/linalg.hpp"
#include "canopt/measure.hpp"
#include "canopt/scalar.hpp"
#include "canopt/toda.hpp"

namespace canopt {

// H_k^(T): plain Hankel determinant of the generalized moments.
template <class S>
S gen_hankel(const std::vector<S>& c, const PriorMultiset<S>& T, long k) {
    if (k < 0) return S(0);
    if (k == 0) return S(1);
    return hankel(gen_moments(c, T), k, 0);
}

// Determinant form of the generalized zeta values at stage T, shift s:
//   zeta_{2k}^(T,s)   = H_{k+1}^(T) H_{k-1}^(T+{s}) / (H_k^(T+{s}) H_k^(T))
//   zeta_{2k+1}^(T,s) = H_{k+1}^(T+{s}) H_k^(T) / (H_{k+1}^(T) H_k^(T+{s}))
// Index n is 1-based over the zeta sequence.
template <class S>
S gen_zeta_det(const std::vector<S>& c, const PriorMultiset<S>& T, const S& s, std::size_t n) {
    if (n == 0) fail(Errc::InvalidInput, "zeta index starts at 1");
    const PriorMultiset<S> Ts = T.with(s);
    const long k = static_cast<long>(n / 2);
    S num, den;
    if (n % 2 == 0) {
        num = gen_hankel(c, T, k + 1) * gen_hankel(c, Ts, k - 1);
        den = gen_hankel(c, Ts, k) * gen_hankel(c, T, k);
    } else {
        num = gen_hankel(c, Ts, k + 1) * gen_hankel(c, T, k);
        den = gen_hankel(c, T, k + 1) * gen_hankel(c, Ts, k);
    }
    if (near_zero<S>(den, 1e-300)) fail(Errc::ZeroDenominator, "vanishing Hankel determinant");
    return num / den;
}

// Determinant form of the generalized canonical moments at stage T:
//   p_{2k}^(T)   = -H_{k+1}^(T) H_{k-1}^(T+{0,1}) / (H_k^(T+{0}) H_k^(T+{1}))
//   p_{2k+1}^(T) =  H_{k+1}^(T+{0}) H_k^(T+{1}) / (H_{k+1}^(T) H_k^(T+{0,1}))
// These extend p_k = (c_k - c_k^-)/(c_k^+ - c_k^-) and satisfy
// zeta_k^(T,0) = (1 - p_{k-1}^(T)) p_k^(T).
template <class S>
S gen_p_det(const std::vector<S>& c, const PriorMultiset<S>& T, std::size_t n) {
    if (n == 0) fail(Errc::InvalidInput, "canonical index starts at 1");
    const PriorMultiset<S> T0 = T.with(S(0));
    const PriorMultiset<S> T1 = T.with(S(1));
    const PriorMultiset<S> T01 = T0.with(S(1));
    const long k = static_cast<long>(n / 2);
    S num, den;
    if (n % 2 == 0) {
        num = -gen_hankel(c, T, k + 1) * gen_hankel(c, T01, k - 1);
        den = gen_hankel(c, T0, k) * gen_hankel(c, T1, k);
    } else {
        num = gen_hankel(c, T0, k + 1) * gen_hankel(c, T1, k);
        den = gen_hankel(c, T, k + 1) * gen_hankel(c, T01, k);
    }
    if (near_zero<S>(den, 1e-300)) fail(Errc::ZeroDenominator, "vanishing Hankel determinant");
    return num / den;
}

// Basis vector for the weighted model: f(x) = prod_j (x-beta_j)^(b_j) *
// (1, x, ..., x^{m-1})^T.
template <class S>
std::vector<S> weighted_basis(const S& x, const ModelSpec<S>& spec) {
    S w(1);
    for (std::size_t j = 0; j < spec.beta.size(); ++j)
        w *= ipow<S>(S(x - spec.beta[j]), static_cast<unsigned long long>(spec.b[j]));
    std::vector<S> f(static_cast<std::size_t>(spec.m));
    S p = w;
    for (int k = 0; k < spec.m; ++k) {
        f[static_cast<std::size_t>(k)] = p;
        p *= x;
    }
    return f;
}

// det of the information matrix sum_i w_i f(x_i) f(x_i)^T.
template <class S>
S info_matrix_det(const Measure<S>& mu, const ModelSpec<S>& spec) {
    validate_model(spec);
    const std::size_t m = static_cast<std::size_t>(spec.m);
    Mat<S> M(m, std::vector<S>(m, S(0)));
    for (std::size_t i = 0; i < mu.size(); ++i) {
        std::vector<S> f = weighted_basis(mu.support[i], spec);
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t c = 0; c < m; ++c) M[r][c] += mu.weights[i] * f[r] * f[c];
    }
    return determinant(std::move(M));
}

namespace detail {

struct ExchangeState {
    std::vector<double> support;
    std::vector<double> weights;
    double det = 0.0;
};

// Multiplicative weight iteration for fixed support; returns the optimized
// determinant. Each update multiplies w_i by f_i^T M^{-1} f_i / m, which is
// monotone for the determinant criterion.
inline double optimize_weights(std::vector<double>& w, const std::vector<double>& support,
                               const ModelSpec<double>& spec, int max_iters = 2000) {
    const std::size_t n = support.size();
    const std::size_t m = static_cast<std::size_t>(spec.m);
    std::vector<std::vector<double>> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = weighted_basis(support[i], spec);
    double prev_det = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        Mat<double> M(m, std::vector<double>(m, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t r = 0; r < m; ++r)
                for (std::size_t c = 0; c < m; ++c) M[r][c] += w[i] * f[i][r] * f[i][c];
        double det = determinant(M);
        if (!(det > 0.0)) return det;
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> y = linsolve(M, f[i]);
            double acc = 0.0;
            for (std::size_t r = 0; r < m; ++r) acc += f[i][r] * y[r];
            d[i] = acc;
        }
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] *= d[i] / static_cast<double>(spec.m);
            total += w[i];
        }
        for (std::size_t i = 0; i < n; ++i) w[i] /= total;
        if (it > 0 && std::abs(det - prev_det) <= 1e-12 * std::abs(det)) return det;
        prev_det = det;
    }
    return prev_det;
}

}  // namespace detail

// Deterministic ground-truth maximizer: exchange search over a uniform grid.
// Alternates multiplicative weight optimization with single-point support
// exchanges, accepting the best improving swap per round.
inline Measure<double> brute_force_design(const ModelSpec<double>& spec, std::size_t grid_size,
                                          std::size_t support_count) {
    validate_model(spec);
    if (support_count < static_cast<std::size_t>(spec.m) || grid_size < support_count)
        fail(Errc::InvalidInput, "need grid_size >= support_count >= m");

    std::vector<double> grid(grid_size);
    for (std::size_t g = 0; g < grid_size; ++g)
        grid[g] = static_cast<double>(g) / static_cast<double>(grid_size - 1);

    detail::ExchangeState best;
    best.support.resize(support_count);
    for (std::size_t i = 0; i < support_count; ++i) {
        std::size_t g = support_count == 1
                            ? grid_size / 2
                            : (i * (grid_size - 1)) / (support_count - 1);
        best.support[i] = grid[g];
    }
    best.weights.assign(support_count, 1.0 / static_cast<double>(support_count));
    best.det = detail::optimize_weights(best.weights, best.support, spec);
    if (!(best.det > 0.0))
        fail(Errc::SingularInformationMatrix, "no feasible starting design on the grid");

    bool improved = true;
    while (improved) {
        improved = false;
        detail::ExchangeState cand_best = best;
        for (std::size_t i = 0; i < support_count; ++i) {
            for (std::size_t g = 0; g < grid_size; ++g) {
                bool taken = false;
                for (double s : best.support)
                    if (s == grid[g]) taken = true;
                if (taken) continue;
                detail::ExchangeState cand;
                cand.support = best.support;
                cand.support[i] = grid[g];
                cand.weights.assign(support_count, 1.0 / static_cast<double>(support_count));
                cand.det = detail::optimize_weights(cand.weights, cand.support, spec);
                if (cand.det > cand_best.det * (1.0 + 1e-12) && cand.det > 0.0) {
                    cand_best = cand;
                }
            }
        }
        if (cand_best.det > best.det * (1.0 + 1e-12)) {
            best = cand_best;
            improved = true;
        }
    }

    // Drop negligible mass so the returned measure satisfies the positive-
    // weight invariant even when the optimum needs fewer points than asked.
    std::vector<double> support, weights;
    for (std::size_t i = 0; i < support_count; ++i) {
        if (best.weights[i] > 1e-9) {
            support.push_back(best.support[i]);
            weights.push_back(best.weights[i]);
        }
    }
    double total = 0.0;
    for (double w : weights) total += w;
    for (double& w : weights) w /= total;
    return make_measure<double>(Domain::Unit, std::move(support), std::move(weights));
}

}  // namespace canopt
