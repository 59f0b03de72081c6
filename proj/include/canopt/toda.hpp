// Copyright 2026 canopt developers
// SPDX-License-Identifier: MIT
//
// The recurrence evaluation pipeline for the prior-information objective:
// generalized moments, the parameter-shift sweep, the nonautonomous
// discrete-time Toda step, and the product-form evaluation of the objective
// determinant H_m^(T) directly from canonical moments.
//
// Index bookkeeping: every sweep consumes one index (output length K-1), so
// evaluating H_m^(T) needs zeta_1..zeta_K0 with K0 = 2m-2+|T|+1; the final
// input index is padding whose value cannot affect the result (consecutive
// pair products and sums telescope through both sweeps), which is asserted by
// tests rather than assumed.

#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "canopt/canonical.hpp"
#include "canopt/errors.hpp"
#include "canopt/scalar.hpp"

namespace canopt {

// Multiset of prior roots; value -> multiplicity, kept sorted by value.
template <class S>
struct PriorMultiset {
    std::vector<std::pair<S, int>> entries;

    int total() const {
        int t = 0;
        for (const auto& e : entries) t += e.second;
        return t;
    }

    bool empty() const { return entries.empty(); }

    void add(const S& value, int multiplicity = 1) {
        auto it = std::lower_bound(entries.begin(), entries.end(), value,
                                   [](const auto& e, const S& v) { return e.first < v; });
        if (it != entries.end() && it->first == value)
            it->second += multiplicity;
        else
            entries.insert(it, {value, multiplicity});
    }

    PriorMultiset with(const S& value, int multiplicity = 1) const {
        PriorMultiset out = *this;
        out.add(value, multiplicity);
        return out;
    }

    // Expanded element list, ascending, repeated per multiplicity.
    std::vector<S> elements() const {
        std::vector<S> out;
        out.reserve(static_cast<std::size_t>(total()));
        for (const auto& e : entries)
            for (int i = 0; i < e.second; ++i) out.push_back(e.first);
        return out;
    }
};

// Regression model with prior information: m free parameters, prior roots
// beta_j with multiplicities b_j (each contributing 2 b_j to the multiset).
template <class S>
struct ModelSpec {
    int m = 1;
    std::vector<S> beta;
    std::vector<int> b;

    int S_total() const {
        int s = 0;
        for (int v : b) s += v;
        return s;
    }
};

template <class S>
void validate_model(const ModelSpec<S>& spec) {
    if (spec.m < 1) fail(Errc::InvalidInput, "model needs m >= 1");
    if (spec.beta.size() != spec.b.size())
        fail(Errc::InvalidInput, "beta and b must have the same length");
    for (std::size_t i = 0; i < spec.beta.size(); ++i) {
        if (spec.b[i] < 1) fail(Errc::InvalidInput, "prior multiplicities must be >= 1");
        for (std::size_t j = i + 1; j < spec.beta.size(); ++j)
            if (spec.beta[i] == spec.beta[j]) fail(Errc::InvalidInput, "prior roots must be distinct");
    }
}

template <class S>
PriorMultiset<S> multiset_from_model(const ModelSpec<S>& spec) {
    validate_model(spec);
    PriorMultiset<S> T;
    for (std::size_t i = 0; i < spec.beta.size(); ++i) T.add(spec.beta[i], 2 * spec.b[i]);
    return T;
}

// One application of the shifted-difference operator per multiset element:
// c_k -> c_{k+1} - lambda c_k. Element order is mathematically irrelevant;
// ascending order is used for determinism.
template <class S>
std::vector<S> gen_moments(const std::vector<S>& c, const PriorMultiset<S>& T) {
    std::vector<S> cur = c;
    for (const S& lam : T.elements()) {
        if (cur.size() < 2) fail(Errc::InsufficientMoments, "moment sequence exhausted by the multiset");
        std::vector<S> next(cur.size() - 1);
        for (std::size_t k = 0; k + 1 < cur.size(); ++k) next[k] = cur[k + 1] - lam * cur[k];
        cur = std::move(next);
    }
    return cur;
}

// A zeta table at multiset stage T and shift parameter s, with the tracked
// leading generalized moment c0 = c_0^(T).
template <class S>
struct ZetaTable {
    PriorMultiset<S> stage;
    S shift = S(0);
    std::vector<S> zetas;
    S c0 = S(1);
};

namespace detail {

// A division arising in either sweep. 0/0 is resolved to 0: it occurs exactly
// when a terminated (finitely supported) input zero-extends, where both the
// pair product and the previous output vanish identically. A genuinely
// nonzero numerator over a vanishing denominator is a degenerate step.
template <class S>
S sweep_divide(const S& num, const S& den) {
    if (near_zero<S>(den, 1e-13)) {
        if (near_zero<S>(num, 1e-13)) return S(0);
        fail(Errc::DegenerateStep, "vanishing denominator in recurrence sweep");
    }
    return num / den;
}

// Alternating sum/product sweep shared by the shift and Toda recurrences.
// With 1-based input z_1..z_K and seed out_0 = 0:
//   odd j:  out_j = base_(j) + z_j + delta - out_{j-1}
//   even j: out_j = z_j * z_{j+1}-style pair product / out_{j-1}
// where the two recurrences differ only in which input pair feeds each
// output index. `off` = 0 gives the same-index pairing (shift sweep),
// `off` = 1 the successor pairing (Toda step). Output length K-1.
template <class S>
std::vector<S> alternating_sweep(const std::vector<S>& z, const S& delta, int off) {
    const std::size_t K = z.size();
    // A single-entry input legitimately sweeps to an empty table: the final
    // chain stages of a first-order objective consume every zeta and leave
    // only the tracked leading moment.
    if (K < 1) fail(Errc::InsufficientDepth, "sweep needs a nonempty input table");
    std::vector<S> out;
    out.reserve(K - 1);
    auto in = [&](std::size_t j) { return z[j - 1]; };  // 1-based
    S prev(0);
    for (std::size_t j = 1; j + 1 <= K; ++j) {
        S cur;
        if (j % 2 == 1) {
            cur = (off == 0 ? (j >= 2 ? in(j - 1) : S(0)) : in(j)) + in(j + off) + delta - prev;
        } else {
            cur = sweep_divide<S>(in(j + off - 1) * in(j + off), prev);
        }
        out.push_back(cur);
        prev = cur;
    }
    return out;
}

}  // namespace detail

// Reparameterize the shift: same stage T, shift lambda2 -> lambda1. Sum
// relation (same indices on both sides): new_{2k} + new_{2k+1} + lambda1 =
// old_{2k} + old_{2k+1} + lambda2; product relation: new_{2k+1} new_{2k+2} =
// old_{2k+1} old_{2k+2}. Consumes one index.
template <class S>
ZetaTable<S> reparam_shift(const ZetaTable<S>& table, const S& lambda1) {
    ZetaTable<S> out;
    out.stage = table.stage;
    out.shift = lambda1;
    out.c0 = table.c0;
    out.zetas = detail::alternating_sweep<S>(table.zetas, S(table.shift - lambda1), 0);
    return out;
}

// c_0^(T + {s}) = zeta_1^(T,s) * c_0^(T).
template <class S>
S c0_propagate(const S& c0, const S& zeta1) {
    return zeta1 * c0;
}

// Advance the multiset stage: (T, lambda1) -> (T + {lambda1}, lambda2). Sum
// relation: new_{2k} + new_{2k+1} + lambda2 = old_{2k+1} + old_{2k+2} +
// lambda1; product relation: new_{2k+1} new_{2k+2} = old_{2k+2} old_{2k+3}.
// c0 advances by the pre-step zeta_1. Consumes one index.
template <class S>
ZetaTable<S> toda_step(const ZetaTable<S>& table, const S& lambda2) {
    if (table.zetas.empty()) fail(Errc::InsufficientDepth, "empty zeta table");
    ZetaTable<S> out;
    out.stage = table.stage.with(table.shift);
    out.shift = lambda2;
    out.c0 = c0_propagate(table.c0, table.zetas[0]);
    out.zetas = detail::alternating_sweep<S>(table.zetas, S(table.shift - lambda2), 1);
    return out;
}

// Required input depth for evaluating H_m^(T).
template <class S>
std::size_t required_depth(int m, const PriorMultiset<S>& T) {
    return static_cast<std::size_t>(2 * m - 2 + T.total() + 1);
}

// Run the full stepping chain from the base table (stage empty, shift 0,
// zetas z) to stage T at shift 0. Elements are visited in ascending order;
// when the smallest element is 0 the initial reparameterization is a no-op
// and is skipped. Consumes one index per sweep.
template <class S>
ZetaTable<S> chain_to_stage(std::vector<S> z, const PriorMultiset<S>& T) {
    ZetaTable<S> table;
    table.zetas = std::move(z);
    const std::vector<S> elems = T.elements();
    if (!elems.empty()) {
        if (!(elems.front() == S(0)))
            table.zetas = detail::alternating_sweep<S>(table.zetas, S(S(0) - elems.front()), 0);
        for (std::size_t i = 0; i < elems.size(); ++i) {
            const S& lam1 = elems[i];
            const S lam2 = i + 1 < elems.size() ? elems[i + 1] : S(0);
            if (table.zetas.empty())
                fail(Errc::InsufficientDepth, "zeta table exhausted before the chain finished");
            table.c0 = c0_propagate(table.c0, table.zetas[0]);
            table.zetas = detail::alternating_sweep<S>(table.zetas, S(lam1 - lam2), 1);
        }
    }
    table.stage = T;
    table.shift = S(0);
    return table;
}

// Core evaluation on a raw zeta sequence (z_1..z_{K0} and deeper entries are
// ignored). Runs the stepping chain and finishes with the product formula
// H_m^(T) = c0^m * prod_k (zeta_{2k-1} zeta_{2k})^(m-k) at shift 0.
template <class S>
S objective_from_zeta(std::vector<S> z, int m, const PriorMultiset<S>& T) {
    const std::size_t K0 = required_depth(m, T);
    if (z.size() < K0) fail(Errc::InsufficientDepth, "zeta sequence shorter than the pipeline needs");
    z.resize(K0);
    ZetaTable<S> table = chain_to_stage(std::move(z), T);

    S acc = ipow(table.c0, static_cast<unsigned long long>(m));
    for (int k = 1; k + 1 <= m; ++k) {
        S pair = table.zetas[static_cast<std::size_t>(2 * k - 2)] *
                 table.zetas[static_cast<std::size_t>(2 * k - 1)];
        acc *= ipow(pair, static_cast<unsigned long long>(m - k));
    }
    return acc;
}

// Objective value H_m^(T) for a canonical sequence.
template <class S>
S evaluate_objective(const CanonicalSeq<S>& p, const ModelSpec<S>& spec) {
    validate_model(spec);
    const PriorMultiset<S> T = multiset_from_model(spec);
    return objective_from_zeta(zeta_of(p, required_depth(spec.m, T)), spec.m, T);
}

}  // namespace canopt
