// Copyright 2026 canopt developers
// SPDX-License-Identifier: MIT

#include <vector>

#include "canopt/canonical.hpp"
#include "canopt/measure.hpp"
#include "canopt/toda.hpp"
#include "doctest.h"
#include "support/instances.hpp"

using canopt::CanonicalSeq;
using canopt::Error;
using canopt::ModelSpec;
using canopt::PriorMultiset;
using canopt::Rational;
using canopt::ZetaTable;
namespace ts = testsupport;

namespace {
std::vector<Rational> lebesgue_moments(int K) {
    std::vector<Rational> c;
    for (int k = 0; k <= K; ++k) c.push_back(Rational(1, k + 1));
    return c;
}

std::vector<Rational> lebesgue_zetas(std::size_t K) {
    auto p = canopt::moments_to_canonical(lebesgue_moments(static_cast<int>(K)));
    return canopt::zeta_of(p, K);
}
}  // namespace

TEST_CASE("prior multisets from model specs") {
    ModelSpec<Rational> a{3, {Rational(2)}, {1}};
    auto Ta = canopt::multiset_from_model(a);
    CHECK(Ta.elements() == std::vector<Rational>{2, 2});
    CHECK(Ta.total() == 2);

    ModelSpec<Rational> bspec{2, {Rational(0), Rational(3)}, {1, 2}};
    auto Tb = canopt::multiset_from_model(bspec);
    CHECK(Tb.elements() == std::vector<Rational>{0, 0, 3, 3, 3, 3});

    ModelSpec<Rational> plain{4, {}, {}};
    CHECK(canopt::multiset_from_model(plain).empty());

    ModelSpec<Rational> bad{2, {Rational(1), Rational(1)}, {1, 1}};
    CHECK_THROWS_AS(canopt::multiset_from_model(bad), Error);
    ModelSpec<Rational> bad2{0, {}, {}};
    CHECK_THROWS_AS(canopt::multiset_from_model(bad2), Error);
}

TEST_CASE("generalized moments by sequential differences") {
    std::vector<Rational> c{1, Rational(1, 2), Rational(1, 3), Rational(1, 4)};
    PriorMultiset<Rational> T;
    T.add(Rational(2));
    auto g = canopt::gen_moments(c, T);
    CHECK(g == std::vector<Rational>{Rational(-3, 2), Rational(-2, 3), Rational(-5, 12)});

    PriorMultiset<Rational> empty;
    CHECK(canopt::gen_moments(c, empty) == c);

    PriorMultiset<Rational> zero;
    zero.add(Rational(0));
    CHECK(canopt::gen_moments(c, zero) ==
          std::vector<Rational>{Rational(1, 2), Rational(1, 3), Rational(1, 4)});

    PriorMultiset<Rational> deep;
    deep.add(Rational(2), 4);
    CHECK_THROWS_AS(canopt::gen_moments(c, deep), Error);
}

TEST_CASE("generalized moments do not depend on elimination order") {
    ts::Rng rng(301);
    for (int t = 0; t < 20; ++t) {
        auto mu = ts::random_measure(rng);
        auto c = canopt::moments(mu, 6);
        PriorMultiset<Rational> T;
        T.add(Rational(2));
        T.add(Rational(-1));
        // Manual chains in both orders.
        PriorMultiset<Rational> first2, firstm1;
        first2.add(Rational(2));
        firstm1.add(Rational(-1));
        auto ab = canopt::gen_moments(canopt::gen_moments(c, first2), firstm1);
        auto ba = canopt::gen_moments(canopt::gen_moments(c, firstm1), first2);
        CHECK(ab == ba);
        CHECK(canopt::gen_moments(c, T) == ab);
    }
}

TEST_CASE("shift reparameterization on the uniform-measure table") {
    ZetaTable<Rational> table;
    table.zetas = lebesgue_zetas(5);
    auto shifted = canopt::reparam_shift(table, Rational(-1));
    CHECK(shifted.zetas == std::vector<Rational>{Rational(3, 2), Rational(1, 18), Rational(13, 9),
                                                 Rational(3, 65)});
    CHECK(shifted.shift == Rational(-1));
    CHECK(shifted.c0 == 1);

    // Shifting to the current shift consumes one index but keeps values.
    auto same = canopt::reparam_shift(table, Rational(0));
    for (std::size_t k = 0; k < same.zetas.size(); ++k) CHECK(same.zetas[k] == table.zetas[k]);
}

TEST_CASE("shift reparameterization is involutive") {
    ts::Rng rng(302);
    for (int t = 0; t < 25; ++t) {
        ZetaTable<Rational> table;
        table.zetas = canopt::canonical_to_zeta(ts::random_canonical(rng, 8));
        auto there = canopt::reparam_shift(table, Rational(-1));
        auto back = canopt::reparam_shift(there, Rational(0));
        for (std::size_t k = 0; k < back.zetas.size(); ++k) CHECK(back.zetas[k] == table.zetas[k]);
    }
}

TEST_CASE("toda step advances stage and leading moment") {
    // Uniform measure, T = {} at shift 0; step to T = {0}.
    ZetaTable<Rational> table;
    table.zetas = lebesgue_zetas(6);
    auto stepped = canopt::toda_step(table, Rational(0));
    CHECK(stepped.stage.elements() == std::vector<Rational>{0});
    CHECK(stepped.c0 == Rational(1, 2));  // zeta_1 of the uniform measure

    // Oracle: zetas of the moment sequence shifted once at 0, i.e. of
    // x d-mu / c_1 ... realized through generalized moments directly.
    auto c = lebesgue_moments(7);
    PriorMultiset<Rational> T0;
    T0.add(Rational(0));
    auto g = canopt::gen_moments(c, T0);
    Rational g0 = g[0];
    std::vector<Rational> norm;
    for (const auto& v : g) norm.push_back(v / g0);
    auto pz = canopt::moments_to_canonical(norm);
    auto oz = canopt::zeta_of(pz, 5);
    for (std::size_t k = 0; k < stepped.zetas.size(); ++k) CHECK(stepped.zetas[k] == oz[k]);
}

TEST_CASE("degenerate sweeps are reported") {
    ZetaTable<Rational> table;
    table.zetas = {Rational(1), Rational(1), Rational(1)};
    CHECK_THROWS_AS(canopt::reparam_shift(table, Rational(1)), Error);
    try {
        canopt::reparam_shift(table, Rational(1));
    } catch (const Error& e) {
        CHECK(e.code() == canopt::Errc::DegenerateStep);
    }
}

TEST_CASE("required depth bookkeeping") {
    PriorMultiset<Rational> empty;
    CHECK(canopt::required_depth(2, empty) == 3);
    CHECK(canopt::required_depth(4, empty) == 7);
    PriorMultiset<Rational> T;
    T.add(Rational(2), 2);
    CHECK(canopt::required_depth(3, T) == 7);
}

TEST_CASE("objective on frozen designs") {
    // Two-point design with equal weights at {0,1}, plain model m=2: H = 1/4.
    auto p01 = canopt::make_canonical<Rational>({Rational(1, 2)}, 1);
    ModelSpec<Rational> plain2{2, {}, {}};
    CHECK(canopt::evaluate_objective(p01, plain2) == Rational(1, 4));

    // Same design under a double prior root at 2: H = 1.
    ModelSpec<Rational> prior2{2, {Rational(2)}, {1}};
    CHECK(canopt::evaluate_objective(p01, prior2) == Rational(1));

    // Uniform design on {0, 1/2, 1}, plain model m=3: H = (1/2)^2 (1/3)^2 / 16... frozen
    // via the determinant in the cross-check suite; here check positivity and
    // the exact product formula value.
    auto p3 = canopt::make_canonical<Rational>({Rational(1, 2), Rational(2, 3), Rational(1, 2)}, 1);
    ModelSpec<Rational> plain3{3, {}, {}};
    auto c = canopt::canonical_to_moments(p3, 6);
    CHECK(canopt::evaluate_objective(p3, plain3) == canopt::hankel(c, 3, 0));
}

TEST_CASE("objective matches generalized Hankel determinant on the uniform measure") {
    // Model with a root at -1 (multiset multiplicity two): H_2 = 97/240,
    // from moments of (x+1)^2 dx: (7/3, 17/12, 31/30).
    auto p = canopt::moments_to_canonical(lebesgue_moments(7));
    ModelSpec<Rational> spec{2, {Rational(-1)}, {1}};
    CHECK(canopt::evaluate_objective(p, spec) == Rational(97, 240));

    // Raw multiset with a single copy of -1: H_2 = 13/72, from moments of
    // (x+1) dx: (3/2, 5/6, 7/12).
    PriorMultiset<Rational> T;
    T.add(Rational(-1));
    auto z = canopt::zeta_of(p, canopt::required_depth(2, T));
    CHECK(canopt::objective_from_zeta(z, 2, T) == Rational(13, 72));
}

TEST_CASE("padding coordinates beyond the pipeline depth are inert") {
    ts::Rng rng(303);
    for (int t = 0; t < 40; ++t) {
        ModelSpec<Rational> spec = ts::prior_family(2 + t % 3)[t % 4];
        auto T = canopt::multiset_from_model(spec);
        std::size_t K0 = canopt::required_depth(spec.m, T);
        auto p = ts::random_canonical(rng, K0);
        auto v = canopt::evaluate_objective(p, spec);

        auto q = p.interior;
        q.back() = ts::rand_frac(rng);
        auto p2 = canopt::make_canonical<Rational>(std::move(q), std::nullopt);
        CHECK(canopt::evaluate_objective(p2, spec) == v);
    }
}
