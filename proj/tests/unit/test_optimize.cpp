// Copyright 2026 canopt developers
// SPDX-License-Identifier: MIT

#include <cmath>
#include <optional>
#include <vector>

#include "canopt/canonical.hpp"
#include "canopt/measure.hpp"
#include "canopt/optimize.hpp"
#include "canopt/oracle.hpp"
#include "doctest.h"
#include "support/instances.hpp"

using canopt::CanonicalSeq;
using canopt::Errc;
using canopt::Error;
using canopt::Measure;
using canopt::ModelSpec;
using canopt::Rational;
using canopt::SolveOptions;
namespace ts = testsupport;

TEST_CASE("reconstruction of frozen designs") {
    SUBCASE("(1/2 | t1) is the equal mass on {0,1}") {
        auto mu = canopt::reconstruct_design(
            canopt::make_canonical<double>({0.5}, 1));
        REQUIRE(mu.support.size() == 2);
        CHECK(mu.support[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(mu.support[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(mu.weights[0] == doctest::Approx(0.5));
        CHECK(mu.weights[1] == doctest::Approx(0.5));
    }
    SUBCASE("terminal-only sequences are point masses") {
        auto one = canopt::reconstruct_design(canopt::make_canonical<double>({}, 1));
        REQUIRE(one.support.size() == 1);
        CHECK(one.support[0] == doctest::Approx(1.0));
        CHECK(one.weights[0] == doctest::Approx(1.0));
        auto zero = canopt::reconstruct_design(canopt::make_canonical<double>({}, 0));
        REQUIRE(zero.support.size() == 1);
        CHECK(zero.support[0] == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("(1/2, 2/3, 1/2 | t1) is the uniform three-point design") {
        auto mu = canopt::reconstruct_design(
            canopt::make_canonical<double>({0.5, 2.0 / 3.0, 0.5}, 1));
        REQUIRE(mu.support.size() == 3);
        CHECK(mu.support[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(mu.support[1] == doctest::Approx(0.5));
        CHECK(mu.support[2] == doctest::Approx(1.0));
        for (double w : mu.weights) CHECK(w == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("rational input goes through the double path") {
        auto mu = canopt::reconstruct_design(
            canopt::make_canonical<Rational>({Rational(1, 2)}, 1));
        REQUIRE(mu.support.size() == 2);
        CHECK(mu.weights[0] == doctest::Approx(0.5));
    }
    SUBCASE("a sequence without terminal cannot be reconstructed") {
        try {
            canopt::reconstruct_design(canopt::make_canonical<double>({0.5, 0.5}, std::nullopt));
            FAIL("expected NonTerminatingSequence");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::NonTerminatingSequence);
        }
    }
}

TEST_CASE("canonical -> measure -> canonical round trip") {
    ts::Rng rng(4242);
    for (int rep = 0; rep < 40; ++rep) {
        std::vector<double> interior;
        const std::size_t depth = 1 + static_cast<std::size_t>(rng() % 4);
        for (std::size_t k = 0; k < depth; ++k)
            interior.push_back(canopt::to_double(ts::rand_frac(rng)));
        const int terminal = rng() % 2 ? 1 : 0;
        auto p = canopt::make_canonical<double>(std::move(interior), terminal);

        auto mu = canopt::reconstruct_design(p);
        auto c = canopt::moments(mu, p.depth() + 2);
        auto q = canopt::moments_to_canonical(c);

        REQUIRE(q.interior.size() >= p.interior.size());
        for (std::size_t k = 0; k < p.interior.size(); ++k)
            CHECK(q.interior[k] == doctest::Approx(p.interior[k]).epsilon(1e-8));
    }
}

TEST_CASE("plain solve recovers the two classical designs") {
    SolveOptions opts;
    opts.restarts = 6;
    opts.seed = 11;

    SUBCASE("m = 2: mass 1/2 on {0,1}, objective 1/4") {
        auto res = canopt::solve(ModelSpec<double>{2, {}, {}}, opts);
        CHECK(res.objective == doctest::Approx(0.25).epsilon(1e-6));
        REQUIRE(res.p_star.interior.size() >= 1);
        CHECK(res.p_star.interior[0] == doctest::Approx(0.5).epsilon(1e-5));
        REQUIRE(res.p_star.terminal.has_value());
        CHECK(*res.p_star.terminal == 1);
        REQUIRE(res.measure.support.size() == 2);
        CHECK(res.measure.support[0] == doctest::Approx(0.0).epsilon(1e-4));
        CHECK(res.measure.support[1] == doctest::Approx(1.0).epsilon(1e-4));
    }
    SUBCASE("m = 3: mass 1/3 on {0, 1/2, 1}") {
        auto res = canopt::solve(ModelSpec<double>{3, {}, {}}, opts);
        REQUIRE(res.measure.support.size() == 3);
        CHECK(res.measure.support[0] == doctest::Approx(0.0).epsilon(1e-3));
        CHECK(res.measure.support[1] == doctest::Approx(0.5).epsilon(1e-3));
        CHECK(res.measure.support[2] == doctest::Approx(1.0).epsilon(1e-3));
        for (double w : res.measure.weights)
            CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
    }
}

TEST_CASE("solve with a prior root is self-consistent and beats the grid") {
    SolveOptions opts;
    opts.restarts = 6;
    opts.seed = 3;
    opts.oracle_grid = 101;
    ModelSpec<double> spec{2, {2.0}, {1}};
    auto res = canopt::solve(spec, opts);

    // The reported objective must equal the information determinant of the
    // reconstructed measure.
    const double direct = canopt::info_matrix_det(res.measure, spec);
    CHECK(res.objective == doctest::Approx(direct).epsilon(1e-6));

    // And it can only beat a grid-restricted search (up to tolerance).
    REQUIRE(res.diagnostics.oracle_gap.has_value());
    CHECK(*res.diagnostics.oracle_gap >= -1e-4);
    CHECK(res.diagnostics.restarts_used == 6);
    CHECK(res.diagnostics.iterations > 0);
}

TEST_CASE("option validation") {
    SolveOptions opts;
    opts.restarts = 0;
    CHECK_THROWS_AS(canopt::validate_options(opts), Error);
    opts.restarts = 1;
    opts.epsilon = 0.5;
    CHECK_THROWS_AS(canopt::validate_options(opts), Error);
    opts.epsilon = 1e-7;
    opts.max_iters = 0;
    CHECK_THROWS_AS(canopt::validate_options(opts), Error);
}

TEST_CASE("boundary snapping terminates the sequence") {
    std::vector<std::size_t> snapped;
    auto p = canopt::detail::snap_to_canonical({0.4, 1.0 - 1e-9, 0.7}, 1e-7, &snapped);
    CHECK(p.interior == std::vector<double>{0.4});
    REQUIRE(p.terminal.has_value());
    CHECK(*p.terminal == 1);
    REQUIRE(snapped.size() == 1);
    CHECK(snapped[0] == 2);

    snapped.clear();
    auto q = canopt::detail::snap_to_canonical({0.4, 0.6}, 1e-7, &snapped);
    CHECK(q.interior == std::vector<double>{0.4, 0.6});
    REQUIRE(q.terminal.has_value());
    CHECK(*q.terminal == 1);
    CHECK(snapped.empty());

    auto z = canopt::detail::snap_to_canonical({1e-8}, 1e-7, nullptr);
    CHECK(z.interior.empty());
    REQUIRE(z.terminal.has_value());
    CHECK(*z.terminal == 0);
}
