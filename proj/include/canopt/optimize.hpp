// Copyright 2026 canopt developers
// SPDX-License-Identifier: MIT
//
// Step 4 of the pipeline: maximize the objective over the canonical-moment
// box with a multistart Nelder-Mead search, then reconstruct the optimal
// design measure from its canonical moments via the Jacobi-matrix
// eigendecomposition.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "canopt/canonical.hpp"
#include "canopt/errors.hpp"
#include "canopt/measure.hpp"
#include "canopt/oracle.hpp"
#include "canopt/toda.hpp"

namespace canopt {

struct SolveOptions {
    int restarts = 8;            // multistart count, >= 1
    int max_iters = 2500;        // Nelder-Mead iterations per restart
    double epsilon = 1e-7;       // box margin, in (0, 0.1)
    double tol = 1e-12;          // convergence tolerance on the log objective
    std::uint64_t seed = 0;      // restart initialization seed
    std::size_t oracle_grid = 0; // when > 0, compute the gap to a grid-exchange search
};

inline void validate_options(const SolveOptions& opts) {
    if (!(opts.epsilon > 0.0 && opts.epsilon < 0.1))
        fail(Errc::InvalidInput, "box margin must lie in (0, 0.1)");
    if (opts.restarts < 1) fail(Errc::InvalidInput, "need at least one restart");
    if (opts.max_iters < 1) fail(Errc::InvalidInput, "need at least one iteration");
}

struct SolveDiagnostics {
    long long iterations = 0;                 // Nelder-Mead iterations across restarts
    int restarts_used = 0;
    std::vector<std::size_t> snapped_indices; // 1-based coordinates snapped to {0,1}
    std::vector<double> restart_objectives;   // best objective per restart (dispersion)
    std::optional<double> oracle_gap;         // objective/oracle - 1 when requested
};

struct DesignResult {
    CanonicalSeq<double> p_star;
    Measure<double> measure;
    double objective = 0.0;
    SolveDiagnostics diagnostics;
};

namespace detail {

// Nelder-Mead maximization of fn over [lo, hi]^D with box clamping.
struct NelderMeadResult {
    std::vector<double> x;
    double value = -std::numeric_limits<double>::infinity();
    int iterations = 0;
};

inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                                    std::vector<double> x0, double lo, double hi, int max_iters,
                                    double tol) {
    const std::size_t D = x0.size();
    auto clamp = [&](std::vector<double>& x) {
        for (auto& v : x) v = std::min(hi, std::max(lo, v));
    };
    clamp(x0);

    std::vector<std::vector<double>> pts;
    pts.push_back(x0);
    for (std::size_t i = 0; i < D; ++i) {
        auto x = x0;
        x[i] += (x[i] + 0.1 <= hi) ? 0.1 : -0.1;
        clamp(x);
        pts.push_back(std::move(x));
    }
    std::vector<double> vals(D + 1);
    for (std::size_t i = 0; i <= D; ++i) vals[i] = fn(pts[i]);

    NelderMeadResult res;
    std::vector<std::size_t> order(D + 1);
    for (int it = 0; it < max_iters; ++it) {
        ++res.iterations;
        for (std::size_t i = 0; i <= D; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
        const std::size_t best = order[0], lousy = order[D - (D ? 1 : 0)], worst = order[D];
        if (std::isfinite(vals[best]) && std::isfinite(vals[worst]) &&
            vals[best] - vals[worst] < tol)
            break;

        std::vector<double> cen(D, 0.0);
        for (std::size_t i = 0; i < D; ++i) {
            for (std::size_t d = 0; d < D; ++d) cen[d] += pts[order[i]][d];
        }
        for (auto& v : cen) v /= static_cast<double>(D);

        auto make_point = [&](double coef) {
            std::vector<double> x(D);
            for (std::size_t d = 0; d < D; ++d) x[d] = cen[d] + coef * (cen[d] - pts[worst][d]);
            clamp(x);
            return x;
        };

        auto xr = make_point(1.0);
        double fr = fn(xr);
        if (fr > vals[best]) {
            auto xe = make_point(2.0);
            double fe = fn(xe);
            if (fe > fr) {
                pts[worst] = std::move(xe);
                vals[worst] = fe;
            } else {
                pts[worst] = std::move(xr);
                vals[worst] = fr;
            }
        } else if (fr > vals[lousy]) {
            pts[worst] = std::move(xr);
            vals[worst] = fr;
        } else {
            auto xc = make_point(-0.5);  // contraction toward the worst point
            double fc = fn(xc);
            if (fc > vals[worst]) {
                pts[worst] = std::move(xc);
                vals[worst] = fc;
            } else {
                for (std::size_t i = 1; i <= D; ++i) {
                    auto& x = pts[order[i]];
                    for (std::size_t d = 0; d < D; ++d)
                        x[d] = pts[best][d] + 0.5 * (x[d] - pts[best][d]);
                    clamp(x);
                    vals[order[i]] = fn(x);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= D; ++i)
        if (vals[i] > vals[best]) best = i;
    res.x = pts[best];
    res.value = vals[best];
    return res;
}

// First-start pattern: the no-prior optimum. Odd coordinates 1/2; even
// coordinate 2j maximizes p^(m-j) (1-p)^(m-j-1), giving (m-j)/(2(m-j)-1).
inline std::vector<double> analytic_start(int m, std::size_t D) {
    std::vector<double> x(D, 0.5);
    for (std::size_t i = 1; i < D; i += 2) {  // 0-based index i holds p_{i+1}
        const int j = static_cast<int>(i + 1) / 2;
        if (j < m)
            x[i] = static_cast<double>(m - j) / static_cast<double>(2 * (m - j) - 1);
        else
            x[i] = 0.5;
    }
    return x;
}

struct RestartOutcome {
    std::vector<double> x;
    double value = -std::numeric_limits<double>::infinity();
    int iterations = 0;
};

// Run a deterministic multistart search over [eps, 1-eps]^D. The objective
// callback must be safe to call concurrently.
inline std::vector<RestartOutcome> multistart(
    const std::function<double(const std::vector<double>&)>& fn, std::size_t D,
    const SolveOptions& opts, const std::vector<std::vector<double>>& seeds_x) {
    std::vector<std::vector<double>> starts = seeds_x;
    for (int r = static_cast<int>(starts.size()); r < opts.restarts; ++r) {
        std::mt19937_64 rng(opts.seed * 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(r));
        std::uniform_real_distribution<double> dist(0.1, 0.9);
        std::vector<double> x(D);
        for (auto& v : x) v = dist(rng);
        starts.push_back(std::move(x));
    }
    starts.resize(static_cast<std::size_t>(opts.restarts));

    const double lo = opts.epsilon, hi = 1.0 - opts.epsilon;
    std::vector<std::future<RestartOutcome>> futs;
    futs.reserve(starts.size());
    for (auto& s : starts) {
        futs.push_back(std::async(std::launch::async, [&, start = s]() {
            RestartOutcome out;
            auto nm = nelder_mead(fn, start, lo, hi, opts.max_iters, opts.tol);
            out.x = std::move(nm.x);
            out.value = nm.value;
            out.iterations = nm.iterations;
            return out;
        }));
    }
    std::vector<RestartOutcome> outcomes;
    outcomes.reserve(futs.size());
    for (auto& f : futs) outcomes.push_back(f.get());
    return outcomes;
}

// Snap coordinates within snap_tol of a box face to {0,1}, then terminate the
// sequence at the first boundary coordinate. Unterminated sequences get an
// appended terminal 1 so that reconstruction always applies.
inline CanonicalSeq<double> snap_to_canonical(const std::vector<double>& x, double eps,
                                              std::vector<std::size_t>* snapped) {
    constexpr double snap_tol = 1e-6;
    std::vector<double> interior;
    std::optional<int> terminal;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= eps + snap_tol) {
            if (snapped) snapped->push_back(i + 1);
            terminal = 0;
            break;
        }
        if (x[i] >= 1.0 - eps - snap_tol) {
            if (snapped) snapped->push_back(i + 1);
            terminal = 1;
            break;
        }
        interior.push_back(x[i]);
    }
    if (!terminal) terminal = 1;
    return make_canonical<double>(std::move(interior), terminal);
}

}  // namespace detail

// Reconstruct the design measure whose canonical moments are p: build the
// monic three-term recurrence in symmetric form (diagonal zeta_1,
// zeta_{2k}+zeta_{2k+1}; off-diagonal sqrt(zeta_{2k-1} zeta_{2k})); the
// support is the eigenvalue set and the weights are the squared first
// eigenvector components.
inline Measure<double> reconstruct_design(const CanonicalSeq<double>& p) {
    if (!p.terminal) fail(Errc::NonTerminatingSequence, "reconstruction needs a terminating sequence");
    const std::size_t N = p.depth();
    const std::size_t n = N / 2 + 1;  // support-size upper bound
    auto z = zeta_of(p, 2 * n);       // zero-extended past the terminal
    auto zat = [&](std::size_t k) { return k <= z.size() ? z[k - 1] : 0.0; };  // 1-based

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    J(0, 0) = zat(1);
    for (std::size_t k = 1; k < n; ++k) {
        const auto ik = static_cast<Eigen::Index>(k);
        J(ik, ik) = zat(2 * k) + zat(2 * k + 1);
        const double off = std::sqrt(std::max(0.0, zat(2 * k - 1) * zat(2 * k)));
        J(ik, ik - 1) = off;
        J(ik - 1, ik) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    if (es.info() != Eigen::Success) fail(Errc::Internal, "eigendecomposition failed");

    std::vector<double> support, weights;
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double w = es.eigenvectors()(0, ii) * es.eigenvectors()(0, ii);
        if (w <= 1e-12) continue;
        support.push_back(std::min(1.0, std::max(0.0, es.eigenvalues()(ii))));
        weights.push_back(w);
    }
    double total = 0.0;
    for (double w : weights) total += w;
    for (auto& w : weights) w /= total;
    return make_measure<double>(Domain::Unit, std::move(support), std::move(weights));
}

inline Measure<double> reconstruct_design(const CanonicalSeq<Rational>& p) {
    CanonicalSeq<double> pd;
    for (const auto& v : p.interior) pd.interior.push_back(to_double(v));
    pd.terminal = p.terminal;
    return reconstruct_design(pd);
}

namespace detail {

struct MaximizeOutcome {
    CanonicalSeq<double> p_star;
    SolveDiagnostics diagnostics;
};

inline MaximizeOutcome maximize_with_diagnostics(const ModelSpec<double>& spec,
                                                 const SolveOptions& opts) {
    validate_model(spec);
    validate_options(opts);
    const PriorMultiset<double> T = multiset_from_model(spec);
    const std::size_t K0 = required_depth(spec.m, T);
    const std::size_t D = K0 - 1;  // padding coordinate p_{K0} is fixed at 1/2

    auto objective = [&](const std::vector<double>& x) -> double {
        std::vector<double> z;
        z.reserve(K0);
        double qprev = 1.0;
        for (std::size_t i = 0; i < K0; ++i) {
            const double pi = i < x.size() ? x[i] : 0.5;
            z.push_back(qprev * pi);
            qprev = 1.0 - pi;
        }
        try {
            const double h = objective_from_zeta(std::move(z), spec.m, T);
            return h > 0.0 ? std::log(h) : -std::numeric_limits<double>::infinity();
        } catch (const Error&) {
            return -std::numeric_limits<double>::infinity();
        }
    };

    MaximizeOutcome out;
    if (D == 0) {
        out.p_star = detail::snap_to_canonical({}, opts.epsilon, &out.diagnostics.snapped_indices);
        out.diagnostics.restarts_used = 0;
        return out;
    }

    std::vector<std::vector<double>> seeds{detail::analytic_start(spec.m, D)};
    auto outcomes = detail::multistart(objective, D, opts, seeds);

    int best = -1;
    for (int r = 0; r < static_cast<int>(outcomes.size()); ++r) {
        out.diagnostics.iterations += outcomes[static_cast<std::size_t>(r)].iterations;
        out.diagnostics.restart_objectives.push_back(outcomes[static_cast<std::size_t>(r)].value);
        if (best < 0 || outcomes[static_cast<std::size_t>(r)].value >
                            outcomes[static_cast<std::size_t>(best)].value)
            best = r;
    }
    out.diagnostics.restarts_used = static_cast<int>(outcomes.size());
    if (best < 0 || !std::isfinite(outcomes[static_cast<std::size_t>(best)].value))
        fail(Errc::NoFeasiblePoint, "every restart ended degenerate or with nonpositive objective");

    out.p_star = detail::snap_to_canonical(outcomes[static_cast<std::size_t>(best)].x, opts.epsilon,
                                           &out.diagnostics.snapped_indices);
    return out;
}

}  // namespace detail

// Best canonical sequence found by the multistart box search.
inline CanonicalSeq<double> maximize_objective(const ModelSpec<double>& spec,
                                               const SolveOptions& opts) {
    return detail::maximize_with_diagnostics(spec, opts).p_star;
}

// Full solve: maximize, reconstruct the measure, attach diagnostics.
inline DesignResult solve(const ModelSpec<double>& spec, const SolveOptions& opts) {
    auto mo = detail::maximize_with_diagnostics(spec, opts);
    DesignResult res;
    res.p_star = std::move(mo.p_star);
    res.diagnostics = std::move(mo.diagnostics);
    res.objective = evaluate_objective(res.p_star, spec);
    res.measure = reconstruct_design(res.p_star);
    if (opts.oracle_grid > 0) {
        auto ref = brute_force_design(spec, opts.oracle_grid,
                                      static_cast<std::size_t>(spec.m));
        const double oracle = info_matrix_det(ref, spec);
        res.diagnostics.oracle_gap = res.objective / oracle - 1.0;
    }
    return res;
}

}  // namespace canopt
