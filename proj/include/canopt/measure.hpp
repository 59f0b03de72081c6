// Copyright 2026 canopt developers
// SPDX-License-Identifier: MIT
//
// Finitely supported probability measures on [0,1] or [-1,1], their ordinary
// moments, and the bijection between measures on [0,1] and symmetric measures
// on [-1,1] given by mapping mass at t to equal mass at +-sqrt(t).

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "canopt/errors.hpp"
#include "canopt/scalar.hpp"

namespace canopt {

enum class Domain { Unit, Symmetric };

inline const char* domain_name(Domain d) { return d == Domain::Unit ? "unit" : "symmetric"; }

// Support points are kept sorted ascending; weights are parallel to support.
// Constructed via make_measure, which merges near-duplicate atoms and checks
// the probability-measure invariants.
template <class S>
struct Measure {
    Domain domain = Domain::Unit;
    std::vector<S> support;
    std::vector<S> weights;

    std::size_t size() const { return support.size(); }
};

namespace detail {

// Duplicate-atom merge radius. Reconstruction from eigenvalue problems can
// emit clusters of numerically identical points; exact inputs merge only on
// exact equality.
template <class S>
bool same_atom(const S& a, const S& b) {
    return near<S>(a, b, 1e-10);
}

}  // namespace detail

template <class S>
Measure<S> make_measure(Domain domain, std::vector<S> support, std::vector<S> weights) {
    if (support.size() != weights.size())
        fail(Errc::InvalidInput, "support and weights must have the same length");
    if (support.empty()) fail(Errc::InvalidInput, "measure needs at least one atom");

    std::vector<std::size_t> order(support.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return support[i] < support[j]; });

    Measure<S> mu;
    mu.domain = domain;
    for (std::size_t idx : order) {
        const S& x = support[idx];
        const S& w = weights[idx];
        if (!mu.support.empty() && detail::same_atom(mu.support.back(), x)) {
            mu.weights.back() += w;
            continue;
        }
        mu.support.push_back(x);
        mu.weights.push_back(w);
    }

    const S lo = domain == Domain::Unit ? S(0) : S(-1);
    const S hi = S(1);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu.support[i] < lo || mu.support[i] > hi)
            fail(Errc::InvalidInput, "support point outside the domain interval");
        if (!(mu.weights[i] > S(0))) fail(Errc::InvalidInput, "weights must be positive");
    }

    S total(0);
    for (const S& w : mu.weights) total += w;
    if constexpr (is_rational_v<S>) {
        if (total != S(1)) fail(Errc::InvalidInput, "weights must sum to 1");
    } else {
        if (std::abs(total - S(1)) > 1e-12) fail(Errc::InvalidInput, "weights must sum to 1");
        for (S& w : mu.weights) w /= total;
    }
    return mu;
}

// Ordinary moments c_0..c_K.
template <class S>
std::vector<S> moments(const Measure<S>& mu, std::size_t K) {
    std::vector<S> c(K + 1, S(0));
    for (std::size_t i = 0; i < mu.size(); ++i) {
        S p(1);
        for (std::size_t k = 0; k <= K; ++k) {
            c[k] += mu.weights[i] * p;
            p *= mu.support[i];
        }
    }
    return c;
}

// Mass w at t > 0 splits into w/2 at each of -sqrt(t), +sqrt(t); mass at 0
// stays put. In the exact backend this requires every support point to be a
// perfect rational square.
template <class S>
Measure<S> symmetrize(const Measure<S>& mu) {
    if (mu.domain != Domain::Unit) fail(Errc::InvalidInput, "symmetrize expects a measure on [0,1]");
    std::vector<S> support, weights;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (near_zero<S>(mu.support[i], 1e-15)) {
            support.push_back(S(0));
            weights.push_back(mu.weights[i]);
        } else {
            S r = scalar_sqrt<S>(mu.support[i]);
            S half = mu.weights[i] / S(2);
            support.push_back(-r);
            weights.push_back(half);
            support.push_back(r);
            weights.push_back(half);
        }
    }
    return make_measure<S>(Domain::Symmetric, std::move(support), std::move(weights));
}

// Inverse of symmetrize: atoms at +-x merge to one atom at x^2.
template <class S>
Measure<S> desymmetrize(const Measure<S>& xi) {
    if (xi.domain != Domain::Symmetric)
        fail(Errc::InvalidInput, "desymmetrize expects a measure on [-1,1]");
    std::vector<S> support, weights;
    std::vector<bool> used(xi.size(), false);
    for (std::size_t i = 0; i < xi.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        const S& x = xi.support[i];
        if (near_zero<S>(x, 1e-12)) {
            support.push_back(S(0));
            weights.push_back(xi.weights[i]);
            continue;
        }
        S nx = -x;
        std::optional<std::size_t> mate;
        for (std::size_t j = 0; j < xi.size(); ++j) {
            if (!used[j] && near<S>(xi.support[j], nx, 1e-12)) {
                mate = j;
                break;
            }
        }
        if (!mate) fail(Errc::AsymmetricInput, "support is not symmetric about 0");
        if (!near<S>(xi.weights[i], xi.weights[*mate], 1e-12))
            fail(Errc::AsymmetricInput, "weights are not symmetric about 0");
        used[*mate] = true;
        support.push_back(x * x);
        weights.push_back(xi.weights[i] + xi.weights[*mate]);
    }
    return make_measure<S>(Domain::Unit, std::move(support), std::move(weights));
}

}  // namespace canopt
