// Copyright 2026 canopt developers
// SPDX-License-Identifier: MIT
//
// Application solvers built on the core pipeline: robust designs under a
// bounded-bias constraint on symmetric measures, and maximin designs for
// estimating functions of the parameters via a p-mean homotopy.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "canopt/canonical.hpp"
#include "canopt/errors.hpp"
#include "canopt/measure.hpp"
#include "canopt/optimize.hpp"
#include "canopt/toda.hpp"

namespace canopt {

// Robust design problem: protect the first m polynomial coefficients against
// contamination bounded by |x|^alpha, with bias budget d, under symmetric
// prior roots at +-beta_j (multiplicity b_j each).
template <class S>
struct RobustSpec {
    int m = 1;
    int alpha = 0;
    double d = 1.0;
    std::vector<S> beta;
    std::vector<int> b;
};

template <class S>
void validate_robust(const RobustSpec<S>& spec) {
    if (spec.m < 1) fail(Errc::InvalidInput, "robust spec needs m >= 1");
    if (spec.alpha < 0) fail(Errc::InvalidInput, "contamination exponent must be nonnegative");
    if (!(spec.d > 0)) fail(Errc::InvalidInput, "bias budget must be positive");
    if (spec.beta.size() != spec.b.size())
        fail(Errc::InvalidInput, "roots and multiplicities must have the same length");
    for (std::size_t i = 0; i < spec.beta.size(); ++i) {
        if (spec.b[i] < 1) fail(Errc::InvalidInput, "multiplicities must be positive");
        if (spec.beta[i] == S(0)) fail(Errc::InvalidInput, "symmetric roots must be nonzero");
        for (std::size_t j = i + 1; j < spec.beta.size(); ++j)
            if (spec.beta[i] == spec.beta[j] || spec.beta[i] == S(-spec.beta[j]))
                fail(Errc::InvalidInput, "symmetric roots must be distinct");
    }
}

// Maximin design problem: m univariate polynomials g_0..g_{m-1} (coefficient
// lists, ascending degree), a parameter box, and the homotopy exponents.
struct MaximinSpec {
    int m = 1;
    std::vector<double> beta;
    std::vector<int> b;
    std::vector<std::vector<double>> g;
    std::vector<std::pair<double, double>> theta_box;
    std::vector<double> p_schedule = {-1, -2, -4, -8, -16, -32};
};

inline void validate_maximin(const MaximinSpec& spec) {
    if (spec.m < 1) fail(Errc::InvalidInput, "maximin spec needs m >= 1");
    if (spec.beta.size() != spec.b.size())
        fail(Errc::InvalidInput, "roots and multiplicities must have the same length");
    if (spec.g.size() != static_cast<std::size_t>(spec.m))
        fail(Errc::InvalidInput, "need one polynomial per parameter");
    if (spec.theta_box.size() != static_cast<std::size_t>(spec.m))
        fail(Errc::InvalidInput, "need one parameter interval per coordinate");
    for (const auto& [s, t] : spec.theta_box)
        if (!(s < t)) fail(Errc::InvalidInput, "parameter intervals must be nondegenerate");
    if (spec.p_schedule.empty()) fail(Errc::InvalidInput, "empty exponent schedule");
    for (std::size_t i = 0; i < spec.p_schedule.size(); ++i) {
        if (!(spec.p_schedule[i] < 0)) fail(Errc::InvalidInput, "exponents must be negative");
        if (i > 0 && !(spec.p_schedule[i] < spec.p_schedule[i - 1]))
            fail(Errc::InvalidInput, "exponent schedule must be strictly decreasing");
    }
}

// Combinatorial recursion over a zeta sequence (1-based):
//   S_{i,j} = 0 for j < i;  S_{0,j} = 1 for j > 0;
//   S_{i,j} = S_{i,j-1} + zeta_{j-i+1} S_{i-1,j}.
template <class S>
S s_recursion(const std::vector<S>& z, int i, int j) {
    if (i < 0 || j < 0) fail(Errc::InvalidInput, "recursion indices must be nonnegative");
    if (j < i) return S(0);
    if (i == 0) return j > 0 ? S(1) : S(0);
    if (static_cast<std::size_t>(j) > z.size())
        fail(Errc::InsufficientDepth, "recursion needs zeta values up to index j");
    // Row-by-row dynamic program over i' <= i, j' <= j.
    std::vector<S> prev(static_cast<std::size_t>(j) + 1, S(1));  // row i' = 0
    prev[0] = S(0);
    std::vector<S> cur(static_cast<std::size_t>(j) + 1);
    for (int ii = 1; ii <= i; ++ii) {
        for (int jj = 0; jj <= j; ++jj) {
            if (jj < ii) {
                cur[static_cast<std::size_t>(jj)] = S(0);
                continue;
            }
            cur[static_cast<std::size_t>(jj)] =
                cur[static_cast<std::size_t>(jj - 1)] +
                z[static_cast<std::size_t>(jj - ii)] * prev[static_cast<std::size_t>(jj)];
        }
        std::swap(prev, cur);
    }
    return prev[static_cast<std::size_t>(j)];
}

namespace detail {

// The squared-weight multiset on the [0,1] side: each root beta contributes
// beta^2 with multiplicity 2b.
template <class S>
PriorMultiset<S> squared_multiset(const std::vector<S>& beta, const std::vector<int>& b) {
    PriorMultiset<S> T;
    for (std::size_t i = 0; i < beta.size(); ++i) T.add(S(beta[i] * beta[i]), 2 * b[i]);
    return T;
}

// Zeta depth consumed by chain_to_stage on top of a target table length: one
// index per multiset element plus one for the initial shift when the chain
// does not already start at 0.
template <class S>
std::size_t chain_budget(std::size_t target, const PriorMultiset<S>& T) {
    const auto elems = T.elements();
    const bool shifted = !elems.empty() && !(elems.front() == S(0));
    return target + static_cast<std::size_t>(T.total()) + (shifted ? 1u : 0u);
}

}  // namespace detail

// Worst-case squared-bias value at the design whose [0,1]-side canonical
// sequence is p: c_0^(T) * sum_i S_{i,m+alpha-i}^2 prod_{j<=m+alpha-2i}
// zeta_j, everything at stage T = squared prior multiset, shift 0.
template <class S>
S robust_constraint(const CanonicalSeq<S>& p, const RobustSpec<S>& spec) {
    validate_robust(spec);
    const int lo = spec.alpha / 2 + 1;
    const int hi = (spec.m + spec.alpha) / 2;
    if (hi < lo) return S(0);

    const PriorMultiset<S> T = detail::squared_multiset(spec.beta, spec.b);
    const std::size_t target = static_cast<std::size_t>(spec.m + spec.alpha);
    auto table = chain_to_stage(zeta_of(p, detail::chain_budget(target, T)), T);

    S total(0);
    for (int i = lo; i <= hi; ++i) {
        const S s = s_recursion(table.zetas, i, spec.m + spec.alpha - i);
        S prod(1);
        for (int j = 1; j <= spec.m + spec.alpha - 2 * i; ++j)
            prod *= table.zetas[static_cast<std::size_t>(j - 1)];
        total += s * s * prod;
    }
    return S(table.c0 * total);
}

// Hankel ratio psi_k = H_{k+1}^(T) / H_k^(T) through the pipeline partial
// products: psi_k = c_0^(T) prod_{j<=k} zeta_{2j-1}^(T,0) zeta_{2j}^(T,0).
template <class S>
S psi_k(const CanonicalSeq<S>& p, const ModelSpec<S>& spec, int k) {
    validate_model(spec);
    if (k < 0) fail(Errc::InvalidInput, "psi index must be nonnegative");
    const PriorMultiset<S> T = multiset_from_model(spec);
    auto table = chain_to_stage(
        zeta_of(p, detail::chain_budget(static_cast<std::size_t>(2 * k), T)), T);

    // The denominator H_k vanishes iff c0 = 0 or a pair product below k does.
    if (k > 0 && near_zero<S>(table.c0, 1e-300))
        fail(Errc::ZeroDenominator, "vanishing Hankel determinant in psi ratio");
    S value = table.c0;
    for (int j = 1; j <= k; ++j) {
        S pair = table.zetas[static_cast<std::size_t>(2 * j - 2)] *
                 table.zetas[static_cast<std::size_t>(2 * j - 1)];
        if (j < k && near_zero<S>(pair, 1e-300))
            fail(Errc::ZeroDenominator, "vanishing Hankel determinant in psi ratio");
        value *= pair;
    }
    return value;
}

namespace detail {

inline std::vector<double> poly_derivative(const std::vector<double>& coeffs) {
    std::vector<double> d;
    for (std::size_t k = 1; k < coeffs.size(); ++k)
        d.push_back(static_cast<double>(k) * coeffs[k]);
    if (d.empty()) d.push_back(0.0);
    return d;
}

inline double poly_eval(const std::vector<double>& coeffs, double x) {
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * x + coeffs[k];
    return acc;
}

inline int poly_degree(const std::vector<double>& coeffs) {
    for (std::size_t k = coeffs.size(); k-- > 0;)
        if (coeffs[k] != 0.0) return static_cast<int>(k);
    return 0;
}

// Parameter-measure density factor: h_k = d/dt (g_k')^2 when deg g_k >= 2,
// else 1.
inline double density_factor(const std::vector<double>& g, double t) {
    if (poly_degree(g) < 2) return 1.0;
    const auto d = poly_derivative(g);
    return 2.0 * poly_eval(d, t) * poly_eval(poly_derivative(d), t);
}

// Gauss-Legendre nodes and weights on [-1,1]; cached per order.
inline const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    std::vector<double> nodes(static_cast<std::size_t>(n)), weights(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        constexpr double pi = 3.14159265358979323846;
        double x = std::cos(pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[static_cast<std::size_t>(i)] = -x;
        nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[static_cast<std::size_t>(i)] = w;
        weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return cache.emplace(n, std::make_pair(std::move(nodes), std::move(weights))).first->second;
}

inline ModelSpec<double> maximin_model(const MaximinSpec& spec) {
    return ModelSpec<double>{spec.m, spec.beta, spec.b};
}

}  // namespace detail

// Inverse asymptotic variance of the plug-in estimate at parameter theta.
inline double gamma_value(const CanonicalSeq<double>& p, const MaximinSpec& spec,
                          const std::vector<double>& theta) {
    validate_maximin(spec);
    if (theta.size() != static_cast<std::size_t>(spec.m))
        fail(Errc::InvalidInput, "theta must have one coordinate per parameter");
    const auto model = detail::maximin_model(spec);
    double total = 0.0;
    for (int k = 0; k < spec.m; ++k) {
        const double dg =
            detail::poly_eval(detail::poly_derivative(spec.g[static_cast<std::size_t>(k)]),
                              theta[static_cast<std::size_t>(k)]);
        total += dg * dg * psi_k(p, model, k);
    }
    return total;
}

// Tensor Gauss-Legendre cubature of gamma^pexp against the parameter measure
// with per-axis density factors. Returns the raw integral value.
inline double p_mean_objective(const CanonicalSeq<double>& p, const MaximinSpec& spec, double pexp,
                               int nodes_per_axis = 16) {
    validate_maximin(spec);
    if (!(pexp < 0)) fail(Errc::InvalidInput, "p-mean exponent must be negative");
    if (nodes_per_axis < 1) fail(Errc::InvalidInput, "need at least one cubature node");
    const auto model = detail::maximin_model(spec);
    const std::size_t m = static_cast<std::size_t>(spec.m);

    std::vector<double> psi(m);
    for (std::size_t k = 0; k < m; ++k) psi[k] = psi_k(p, model, static_cast<int>(k));

    const auto& [gl_nodes, gl_weights] = detail::gauss_legendre(nodes_per_axis);
    std::vector<std::vector<double>> derivsq(m), dens(m);
    for (std::size_t k = 0; k < m; ++k) {
        const auto [s, t] = spec.theta_box[k];
        const double mid = 0.5 * (s + t), half = 0.5 * (t - s);
        const auto dcoef = detail::poly_derivative(spec.g[k]);
        for (int i = 0; i < nodes_per_axis; ++i) {
            const double theta = mid + half * gl_nodes[static_cast<std::size_t>(i)];
            const double dg = detail::poly_eval(dcoef, theta);
            derivsq[k].push_back(dg * dg);
            dens[k].push_back(detail::density_factor(spec.g[k], theta) * half *
                              gl_weights[static_cast<std::size_t>(i)]);
        }
    }

    std::vector<int> idx(m, 0);
    double integral = 0.0;
    while (true) {
        double gam = 0.0, weight = 1.0;
        for (std::size_t k = 0; k < m; ++k) {
            gam += derivsq[k][static_cast<std::size_t>(idx[k])] * psi[k];
            weight *= dens[k][static_cast<std::size_t>(idx[k])];
        }
        if (!(gam > 0.0))
            fail(Errc::NonfinitePower, "nonpositive variance ratio on the cubature grid");
        integral += weight * std::pow(gam, pexp);

        std::size_t axis = 0;
        while (axis < m && ++idx[axis] == nodes_per_axis) {
            idx[axis] = 0;
            ++axis;
        }
        if (axis == m) break;
    }
    return integral;
}

namespace detail {

// Shared snapped-sequence evaluation wrapper for the app solvers.
inline CanonicalSeq<double> interior_sequence(const std::vector<double>& x) {
    return make_canonical<double>(std::vector<double>(x.begin(), x.end()), std::nullopt);
}

}  // namespace detail

// Robust solve: maximize the determinant objective for the symmetric design
// over the [0,1]-side canonical moments subject to the bias budget. The
// symmetric measure has odd canonical moments 1/2; only the even ones (the
// [0,1]-side sequence) are free.
inline DesignResult solve_robust(const RobustSpec<double>& spec, const SolveOptions& opts) {
    validate_robust(spec);
    validate_options(opts);
    const PriorMultiset<double> T = detail::squared_multiset(spec.beta, spec.b);
    const PriorMultiset<double> T0 = T.with(0.0);
    const int m_hi = (spec.m + 1) / 2, m_lo = spec.m / 2;
    const std::size_t D = std::max({required_depth(m_hi, T), required_depth(m_lo, T0),
                                    detail::chain_budget(
                                        static_cast<std::size_t>(spec.m + spec.alpha), T)});

    auto objective_of = [&](const CanonicalSeq<double>& p) -> double {
        const double ha = objective_from_zeta(zeta_of(p, required_depth(m_hi, T)), m_hi, T);
        const double hb = m_lo >= 1
                              ? objective_from_zeta(zeta_of(p, required_depth(m_lo, T0)), m_lo, T0)
                              : 1.0;
        return ha * hb;
    };
    RobustSpec<double> cspec = spec;

    auto penalized = [&](const std::vector<double>& x, double factor) -> double {
        try {
            const auto p = detail::interior_sequence(x);
            const double h = objective_of(p);
            if (!(h > 0.0)) return -std::numeric_limits<double>::infinity();
            const double g = robust_constraint(p, cspec);
            const double viol = std::max(0.0, g - spec.d);
            return std::log(h) - factor * viol * viol;
        } catch (const Error&) {
            return -std::numeric_limits<double>::infinity();
        }
    };

    // Constraint and objective are judged on the snapped sequence that would
    // be reported, so the returned design satisfies the budget exactly.
    const double lo = opts.epsilon, hi = 1.0 - opts.epsilon;
    auto seq_of = [&](const std::vector<double>& x) {
        return detail::snap_to_canonical(x, opts.epsilon, nullptr);
    };
    auto constraint_of = [&](const std::vector<double>& x) -> double {
        return robust_constraint(seq_of(x), cspec);
    };

    // Strictly feasible anchor for the pullback: at the lower box face the
    // sequence snaps to the point mass at 0, whose constraint value is 0 < d.
    const std::vector<double> anchor(D, lo);
    bool anchor_ok = false;
    try {
        anchor_ok = constraint_of(anchor) <= spec.d;
    } catch (const Error&) {
    }

    // Pull an infeasible iterate back along the segment toward the anchor
    // until the budget holds; the returned point always satisfies it.
    auto pull_back = [&](std::vector<double> x) -> std::optional<std::vector<double>> {
        try {
            if (constraint_of(x) <= spec.d) return x;
        } catch (const Error&) {
        }
        if (!anchor_ok) return std::nullopt;
        double t_lo = 0.0, t_hi = 1.0;
        std::vector<double> mix(D);
        for (int it = 0; it < 80; ++it) {
            const double t = 0.5 * (t_lo + t_hi);
            for (std::size_t i = 0; i < D; ++i) mix[i] = anchor[i] + t * (x[i] - anchor[i]);
            bool ok = false;
            try {
                ok = constraint_of(mix) <= spec.d;
            } catch (const Error&) {
            }
            (ok ? t_lo : t_hi) = t;
        }
        for (std::size_t i = 0; i < D; ++i) mix[i] = anchor[i] + t_lo * (x[i] - anchor[i]);
        return mix;
    };

    double factor = 1e4;
    std::optional<std::vector<double>> best_x;
    double best_value = -std::numeric_limits<double>::infinity();
    std::optional<std::vector<double>> last_infeasible;
    SolveDiagnostics diag;
    for (int r = 0; r < opts.restarts; ++r) {
        std::vector<double> start;
        if (r == 0) {
            start.assign(D, 0.5);
        } else if (last_infeasible) {
            start = *last_infeasible;  // refine with the escalated penalty
        } else {
            std::mt19937_64 rng(opts.seed * 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(r));
            std::uniform_real_distribution<double> dist(0.1, 0.9);
            start.resize(D);
            for (auto& v : start) v = dist(rng);
        }
        const double f = factor;
        auto nm = detail::nelder_mead([&](const std::vector<double>& x) { return penalized(x, f); },
                                      start, lo, hi, opts.max_iters, opts.tol);
        diag.iterations += nm.iterations;
        diag.restart_objectives.push_back(nm.value);
        ++diag.restarts_used;
        if (!std::isfinite(nm.value)) continue;

        bool was_feasible = false;
        try {
            was_feasible = constraint_of(nm.x) <= spec.d;
        } catch (const Error&) {
        }
        if (!was_feasible) {
            factor *= 10.0;
            last_infeasible = nm.x;
        } else {
            last_infeasible.reset();
        }

        auto fixed = pull_back(std::move(nm.x));
        if (!fixed) continue;
        double value = -std::numeric_limits<double>::infinity();
        try {
            const double h = objective_of(seq_of(*fixed));
            if (h > 0.0) value = std::log(h);
        } catch (const Error&) {
        }
        if (std::isfinite(value) && value > best_value) {
            best_value = value;
            best_x = std::move(*fixed);
        }
    }
    if (!best_x) fail(Errc::InfeasibleBudget, "no restart produced a feasible design");

    DesignResult res;
    res.diagnostics = std::move(diag);
    auto pmu = detail::snap_to_canonical(*best_x, opts.epsilon, &res.diagnostics.snapped_indices);
    res.objective = objective_of(pmu);

    // The symmetric design on [-1,1] and its [0,1]-image canonical sequence
    // (odd entries 1/2 interleaved with the optimized even entries).
    res.measure = symmetrize(reconstruct_design(pmu));
    std::vector<double> interleaved;
    for (std::size_t k = 0; k < pmu.interior.size(); ++k) {
        interleaved.push_back(0.5);
        interleaved.push_back(pmu.interior[k]);
    }
    if (pmu.terminal) {
        interleaved.push_back(0.5);
        res.p_star = make_canonical<double>(std::move(interleaved), pmu.terminal);
    } else {
        res.p_star = make_canonical<double>(std::move(interleaved), std::nullopt);
    }
    return res;
}

// Homotopy maximin solve: one stage per exponent in the schedule, each warm
// started from the previous maximizer. The final stage's design is the
// maximin approximation.
inline std::vector<DesignResult> solve_maximin(const MaximinSpec& spec, const SolveOptions& opts,
                                               int nodes_per_axis = 16) {
    validate_maximin(spec);
    validate_options(opts);
    const auto model = detail::maximin_model(spec);
    const PriorMultiset<double> T = multiset_from_model(model);
    const std::size_t D = required_depth(spec.m, T);

    std::vector<DesignResult> path;
    std::vector<double> warm;
    for (std::size_t stage = 0; stage < spec.p_schedule.size(); ++stage) {
        const double pexp = spec.p_schedule[stage];
        auto objective = [&](const std::vector<double>& x) -> double {
            try {
                const double raw =
                    p_mean_objective(detail::interior_sequence(x), spec, pexp, nodes_per_axis);
                return raw > 0.0 ? std::log(raw) / pexp
                                 : -std::numeric_limits<double>::infinity();
            } catch (const Error&) {
                return -std::numeric_limits<double>::infinity();
            }
        };

        std::vector<std::vector<double>> seeds;
        if (stage == 0)
            seeds.push_back(detail::analytic_start(spec.m, D));
        else
            seeds.push_back(warm);
        auto outcomes = detail::multistart(objective, D, opts, seeds);

        DesignResult res;
        int best = -1;
        for (int r = 0; r < static_cast<int>(outcomes.size()); ++r) {
            const auto& o = outcomes[static_cast<std::size_t>(r)];
            res.diagnostics.iterations += o.iterations;
            res.diagnostics.restart_objectives.push_back(o.value);
            if (best < 0 || o.value > outcomes[static_cast<std::size_t>(best)].value) best = r;
        }
        res.diagnostics.restarts_used = static_cast<int>(outcomes.size());
        if (best < 0 || !std::isfinite(outcomes[static_cast<std::size_t>(best)].value))
            fail(Errc::NoFeasiblePoint, "every restart ended degenerate in the maximin stage");
        warm = outcomes[static_cast<std::size_t>(best)].x;

        res.p_star =
            detail::snap_to_canonical(warm, opts.epsilon, &res.diagnostics.snapped_indices);
        // Report the p-mean itself rather than the raw integral: it stays on
        // the scale of gamma and tends to the worst case as the exponent
        // grows, so stage objectives are comparable along the schedule.
        const double raw = p_mean_objective(res.p_star, spec, pexp, nodes_per_axis);
        res.objective = raw > 0.0 ? std::pow(raw, 1.0 / pexp) : 0.0;
        res.measure = reconstruct_design(res.p_star);
        path.push_back(std::move(res));
    }
    return path;
}

}  // namespace canopt
