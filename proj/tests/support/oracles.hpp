// Copyright 2026 canopt developers
// SPDX-License-Identifier: MIT
//
// Independent reference computations used only by the tests: a small exact
// multivariate polynomial type, a lattice-path expansion of the combinatorial
// recursion, exact rational linear algebra, and brute-force worst-case bias
// oracles evaluated directly on finite symmetric measures.

#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <vector>

#include "canopt/measure.hpp"
#include "canopt/oracle.hpp"
#include "canopt/scalar.hpp"
#include "canopt/toda.hpp"

namespace testsupport {

using canopt::Measure;
using canopt::PriorMultiset;
using canopt::Rational;

// Sparse multivariate polynomial with rational coefficients. The monomial key
// is an exponent vector (trailing zeros trimmed so keys are canonical).
class Poly {
  public:
    Poly() = default;
    explicit Poly(int v) {
        if (v != 0) terms_[{}] = Rational(v);
    }
    explicit Poly(const Rational& v) {
        if (v != 0) terms_[{}] = v;
    }
    static Poly variable(std::size_t index) {
        Poly p;
        std::vector<int> key(index + 1, 0);
        key[index] = 1;
        p.terms_[std::move(key)] = Rational(1);
        return p;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly out = a;
        for (const auto& [key, coef] : b.terms_) {
            auto [it, fresh] = out.terms_.emplace(key, coef);
            if (!fresh) {
                it->second += coef;
                if (it->second == 0) out.terms_.erase(it);
            }
        }
        return out;
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly out;
        for (const auto& [ka, ca] : a.terms_) {
            for (const auto& [kb, cb] : b.terms_) {
                std::vector<int> key(std::max(ka.size(), kb.size()), 0);
                for (std::size_t i = 0; i < ka.size(); ++i) key[i] += ka[i];
                for (std::size_t i = 0; i < kb.size(); ++i) key[i] += kb[i];
                while (!key.empty() && key.back() == 0) key.pop_back();
                auto [it, fresh] = out.terms_.emplace(std::move(key), ca * cb);
                if (!fresh) {
                    it->second += ca * cb;
                    if (it->second == 0) out.terms_.erase(it);
                }
            }
        }
        return out;
    }
    bool operator==(const Poly& other) const { return terms_ == other.terms_; }

    Rational eval(const std::vector<Rational>& vals) const {
        Rational total(0);
        for (const auto& [key, coef] : terms_) {
            Rational term = coef;
            for (std::size_t i = 0; i < key.size(); ++i)
                for (int e = 0; e < key[i]; ++e) term *= vals.at(i);
            total += term;
        }
        return total;
    }
    std::size_t term_count() const { return terms_.size(); }

  private:
    std::map<std::vector<int>, Rational> terms_;
};

// Independent expansion of the combinatorial recursion as a sum over lattice
// paths: sequences b_1..b_i with b_t >= 1, b_{t+1} >= b_t - 1, b_t <= j-t+1,
// contributing the monomial zeta_{b_1} ... zeta_{b_i}.
inline Poly s_expansion_paths(int i, int j) {
    if (j < i) return Poly(0);
    if (i == 0) return j > 0 ? Poly(1) : Poly(0);
    Poly total(0);
    std::vector<int> b(static_cast<std::size_t>(i), 0);
    auto rec = [&](auto&& self, int t, Poly prod) -> void {
        if (t > i) {
            total = total + prod;
            return;
        }
        const int lo = t == 1 ? 1 : std::max(1, b[static_cast<std::size_t>(t - 2)] - 1);
        const int hi = j - t + 1;
        for (int v = lo; v <= hi; ++v) {
            b[static_cast<std::size_t>(t - 1)] = v;
            self(self, t + 1, prod * Poly::variable(static_cast<std::size_t>(v - 1)));
        }
    };
    rec(rec, 1, Poly(1));
    return total;
}

// Exact inverse by Gauss-Jordan elimination; nullopt when singular.
inline std::optional<std::vector<std::vector<Rational>>> invert(
    std::vector<std::vector<Rational>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<Rational>> inv(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = Rational(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        const Rational d = a[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            const Rational f = a[r][col];
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

inline Rational rational_abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }

// Worst-case squared standardized bias by direct enumeration of contamination
// sign patterns on the atoms of a finite symmetric measure (no prior). The
// admissible patterns respect the symmetry class fixed by the parity of the
// contamination exponent: even exponents force equal signs at +-x, odd
// exponents force opposite signs.
inline Rational sup_sign_oracle(const Measure<Rational>& xi, int m, int alpha) {
    const auto c = canopt::moments(xi, static_cast<std::size_t>(2 * m - 2));
    std::vector<std::vector<Rational>> B(static_cast<std::size_t>(m),
                                         std::vector<Rational>(static_cast<std::size_t>(m)));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            B[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                c[static_cast<std::size_t>(i + j)];
    const auto Binv = invert(std::move(B));
    if (!Binv) std::abort();  // oracle precondition: enough support points

    const std::size_t npts = xi.support.size();
    const bool even_mode = alpha % 2 == 0;
    Rational best;
    bool first = true;
    for (std::size_t mask = 0; mask < (1u << npts); ++mask) {
        bool admissible = true;
        for (std::size_t i = 0; i < npts && admissible; ++i) {
            for (std::size_t j = 0; j < npts && admissible; ++j) {
                if (!(xi.support[i] == Rational(-xi.support[j]))) continue;
                const int si = mask >> i & 1 ? 1 : -1;
                const int sj = mask >> j & 1 ? 1 : -1;
                if (even_mode) {
                    if (si != sj) admissible = false;
                } else if (xi.support[i] != 0 && si != -sj) {
                    admissible = false;
                }
            }
        }
        if (!admissible) continue;

        std::vector<Rational> r(static_cast<std::size_t>(m), Rational(0));
        for (std::size_t i = 0; i < npts; ++i) {
            const int s = mask >> i & 1 ? 1 : -1;
            Rational base = canopt::ipow<Rational>(xi.support[i],
                                                   static_cast<unsigned long long>(m)) *
                            canopt::ipow<Rational>(rational_abs(xi.support[i]),
                                                   static_cast<unsigned long long>(alpha)) *
                            xi.weights[i] * Rational(s);
            for (int k = 0; k < m; ++k) {
                r[static_cast<std::size_t>(k)] += base;
                base *= xi.support[i];
            }
        }
        Rational q(0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                q += r[static_cast<std::size_t>(i)] *
                     (*Binv)[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                     r[static_cast<std::size_t>(j)];
        if (first || q > best) {
            best = q;
            first = false;
        }
    }
    if (first) std::abort();
    return best;
}

// Unrestricted variant (every sign pattern admissible); an upper envelope of
// the parity-restricted supremum.
inline Rational sup_sign_oracle_unrestricted(const Measure<Rational>& xi, int m, int alpha) {
    const auto c = canopt::moments(xi, static_cast<std::size_t>(2 * m - 2));
    std::vector<std::vector<Rational>> B(static_cast<std::size_t>(m),
                                         std::vector<Rational>(static_cast<std::size_t>(m)));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            B[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                c[static_cast<std::size_t>(i + j)];
    const auto Binv = invert(std::move(B));
    if (!Binv) std::abort();
    const std::size_t npts = xi.support.size();
    Rational best;
    bool first = true;
    for (std::size_t mask = 0; mask < (1u << npts); ++mask) {
        std::vector<Rational> r(static_cast<std::size_t>(m), Rational(0));
        for (std::size_t i = 0; i < npts; ++i) {
            const int s = mask >> i & 1 ? 1 : -1;
            Rational base = canopt::ipow<Rational>(xi.support[i],
                                                   static_cast<unsigned long long>(m)) *
                            canopt::ipow<Rational>(rational_abs(xi.support[i]),
                                                   static_cast<unsigned long long>(alpha)) *
                            xi.weights[i] * Rational(s);
            for (int k = 0; k < m; ++k) {
                r[static_cast<std::size_t>(k)] += base;
                base *= xi.support[i];
            }
        }
        Rational q(0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                q += r[static_cast<std::size_t>(i)] *
                     (*Binv)[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                     r[static_cast<std::size_t>(j)];
        if (first || q > best) {
            best = q;
            first = false;
        }
    }
    return best;
}

// Exact quadratic-form value of the worst-case bias with a symmetric prior:
// with the prior-weighted moment sequence cT of the symmetric measure (roots
// +-beta_j, multiplicity 2 b_j each), the value is r^T B^{-1} r where
// r_k = cT_{k+m+alpha} and B = (cT_{i+j}).
inline std::optional<Rational> quadratic_bias_oracle(const Measure<Rational>& xi, int m, int alpha,
                                                     const std::vector<Rational>& beta,
                                                     const std::vector<int>& b) {
    PriorMultiset<Rational> prior;
    for (std::size_t i = 0; i < beta.size(); ++i) {
        prior.add(beta[i], 2 * b[i]);
        prior.add(Rational(-beta[i]), 2 * b[i]);
    }
    const std::size_t need = static_cast<std::size_t>(2 * m + alpha - 1 + prior.total());
    const auto cT = canopt::gen_moments(canopt::moments(xi, need), prior);

    std::vector<std::vector<Rational>> B(static_cast<std::size_t>(m),
                                         std::vector<Rational>(static_cast<std::size_t>(m)));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            B[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                cT[static_cast<std::size_t>(i + j)];
    const auto Binv = invert(std::move(B));
    if (!Binv) return std::nullopt;

    Rational q(0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            q += cT[static_cast<std::size_t>(i + m + alpha)] *
                 (*Binv)[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                 cT[static_cast<std::size_t>(j + m + alpha)];
    return q;
}

}  // namespace testsupport
