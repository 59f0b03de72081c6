// Copyright 2026 canopt developers
// SPDX-License-Identifier: MIT

#include "canopt/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "canopt/apps.hpp"
#include "canopt/canonical.hpp"
#include "canopt/errors.hpp"
#include "canopt/measure.hpp"
#include "canopt/optimize.hpp"
#include "canopt/oracle.hpp"
#include "canopt/toda.hpp"
#include "json.hpp"

namespace canopt::runner {

namespace {

using nlohmann::json;

Status status_of(Errc code) {
    switch (code) {
        case Errc::InfeasibleBudget:
        case Errc::NoFeasiblePoint:
        case Errc::DegenerateStep:
        case Errc::ZeroDenominator:
        case Errc::NonTerminatingSequence:
        case Errc::SingularInformationMatrix:
        case Errc::NonfinitePower:
            return Status::Infeasible;
        case Errc::InvalidInput:
        case Errc::InvalidMomentSequence:
        case Errc::InvalidZeta:
        case Errc::InsufficientMoments:
        case Errc::InsufficientDepth:
        case Errc::BoundaryMomentPoint:
        case Errc::AsymmetricInput:
        case Errc::NonRepresentable:
            return Status::Invalid;
        default:
            return Status::Internal;
    }
}

RunOutput error_output(Status status, const std::string& name, const std::string& message) {
    json doc;
    doc["error"] = {{"name", name}, {"message", message}};
    return {status, doc.dump(2) + "\n"};
}

json measure_json(const Measure<double>& mu) {
    return json{{"domain", domain_name(mu.domain)},
                {"support", mu.support},
                {"weights", mu.weights}};
}

// Canonical sequence as a flat array: interior values followed by the 0/1
// terminal when the sequence terminates.
json canonical_json(const CanonicalSeq<double>& p) {
    std::vector<double> flat = p.interior;
    if (p.terminal) flat.push_back(static_cast<double>(*p.terminal));
    return json(flat);
}

json diagnostics_json(const SolveDiagnostics& d) {
    json out{{"iterations", d.iterations},
             {"restarts_used", d.restarts_used},
             {"snapped_indices", d.snapped_indices},
             {"restart_objectives", d.restart_objectives}};
    if (d.oracle_gap) out["oracle_gap"] = *d.oracle_gap;
    return out;
}

SolveOptions options_from(const json& req) {
    SolveOptions opts;
    if (!req.contains("options")) return opts;
    const json& o = req.at("options");
    if (!o.is_object()) fail(Errc::InvalidInput, "options must be an object");
    if (o.contains("restarts")) opts.restarts = o.at("restarts").get<int>();
    if (o.contains("max_iters")) opts.max_iters = o.at("max_iters").get<int>();
    if (o.contains("epsilon")) opts.epsilon = o.at("epsilon").get<double>();
    if (o.contains("tol")) opts.tol = o.at("tol").get<double>();
    if (o.contains("seed")) opts.seed = o.at("seed").get<std::uint64_t>();
    if (o.contains("oracle_grid")) opts.oracle_grid = o.at("oracle_grid").get<std::size_t>();
    return opts;
}

const json& spec_of(const json& req) {
    if (!req.contains("spec") || !req.at("spec").is_object())
        fail(Errc::InvalidInput, "request needs a spec object");
    return req.at("spec");
}

ModelSpec<double> model_from(const json& spec) {
    ModelSpec<double> out;
    if (!spec.contains("m")) fail(Errc::InvalidInput, "spec needs m");
    out.m = spec.at("m").get<int>();
    if (spec.contains("beta")) out.beta = spec.at("beta").get<std::vector<double>>();
    if (spec.contains("b")) out.b = spec.at("b").get<std::vector<int>>();
    validate_model(out);
    return out;
}

json result_json(const DesignResult& res) {
    return json{{"design", measure_json(res.measure)},
                {"canonical_moments", canonical_json(res.p_star)},
                {"objective", res.objective},
                {"diagnostics", diagnostics_json(res.diagnostics)}};
}

RunOutput run_dopt(const json& req) {
    const auto spec = model_from(spec_of(req));
    const auto opts = options_from(req);
    auto res = solve(spec, opts);
    json doc = result_json(res);
    doc["kind"] = "dopt";
    return {Status::Ok, doc.dump(2) + "\n"};
}

RunOutput run_robust(const json& req) {
    const json& s = spec_of(req);
    RobustSpec<double> spec;
    if (!s.contains("m")) fail(Errc::InvalidInput, "spec needs m");
    spec.m = s.at("m").get<int>();
    if (s.contains("alpha")) spec.alpha = s.at("alpha").get<int>();
    if (!s.contains("d")) fail(Errc::InvalidInput, "robust spec needs the bias budget d");
    spec.d = s.at("d").get<double>();
    if (s.contains("beta")) spec.beta = s.at("beta").get<std::vector<double>>();
    if (s.contains("b")) spec.b = s.at("b").get<std::vector<int>>();
    validate_robust(spec);
    auto res = solve_robust(spec, options_from(req));
    json doc = result_json(res);
    doc["kind"] = "robust";
    return {Status::Ok, doc.dump(2) + "\n"};
}

RunOutput run_maximin(const json& req) {
    const json& s = spec_of(req);
    MaximinSpec spec;
    if (!s.contains("m")) fail(Errc::InvalidInput, "spec needs m");
    spec.m = s.at("m").get<int>();
    if (s.contains("beta")) spec.beta = s.at("beta").get<std::vector<double>>();
    if (s.contains("b")) spec.b = s.at("b").get<std::vector<int>>();
    if (!s.contains("g")) fail(Errc::InvalidInput, "maximin spec needs the polynomials g");
    spec.g = s.at("g").get<std::vector<std::vector<double>>>();
    if (!s.contains("theta_box")) fail(Errc::InvalidInput, "maximin spec needs theta_box");
    for (const auto& iv : s.at("theta_box")) {
        if (!iv.is_array() || iv.size() != 2)
            fail(Errc::InvalidInput, "theta_box entries must be [lo, hi]");
        spec.theta_box.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
    }
    if (s.contains("p_schedule"))
        spec.p_schedule = s.at("p_schedule").get<std::vector<double>>();
    validate_maximin(spec);
    int nodes = 16;
    if (req.contains("nodes")) nodes = req.at("nodes").get<int>();

    auto path = solve_maximin(spec, options_from(req), nodes);
    json stages = json::array();
    for (std::size_t i = 0; i < path.size(); ++i) {
        json st = result_json(path[i]);
        st["exponent"] = spec.p_schedule[i];
        stages.push_back(std::move(st));
    }
    json doc = result_json(path.back());
    doc["kind"] = "maximin";
    doc["stages"] = std::move(stages);
    return {Status::Ok, doc.dump(2) + "\n"};
}

RunOutput run_oracle(const json& req) {
    const auto spec = model_from(spec_of(req));
    std::size_t grid = 101;
    if (req.contains("grid")) grid = req.at("grid").get<std::size_t>();
    std::string mode = "float";
    if (req.contains("mode")) mode = req.at("mode").get<std::string>();
    if (mode != "float" && mode != "rational")
        fail(Errc::InvalidInput, "mode must be float or rational");

    auto mu = brute_force_design(spec, grid, static_cast<std::size_t>(spec.m));
    json doc{{"kind", "oracle"},
             {"design", measure_json(mu)},
             {"objective", info_matrix_det(mu, spec)},
             {"grid", grid},
             {"mode", mode}};
    if (mode == "rational") {
        // Exact re-evaluation of the grid design: support points are grid
        // fractions and the double weights convert to rationals exactly.
        Measure<Rational> xr;
        xr.domain = mu.domain;
        for (std::size_t i = 0; i < mu.size(); ++i) {
            const auto num = static_cast<long long>(
                mu.support[i] * static_cast<double>(grid - 1) + 0.5);
            xr.support.push_back(Rational(num, static_cast<long long>(grid - 1)));
            xr.weights.push_back(Rational(mu.weights[i]));
        }
        ModelSpec<Rational> sr;
        sr.m = spec.m;
        for (double v : spec.beta) sr.beta.push_back(Rational(v));
        sr.b = spec.b;
        const Rational exact = info_matrix_det(xr, sr);
        std::ostringstream os;
        os << exact;
        doc["objective_exact"] = os.str();
        doc["objective"] = to_double(exact);
    }
    return {Status::Ok, doc.dump(2) + "\n"};
}

// Deterministic invariant suite over randomly generated rational measures.
struct CheckCounter {
    json rows = json::array();
    int passed = 0;
    int failed = 0;
    void add(const std::string& name, int pass, int fail) {
        rows.push_back(json{{"name", name}, {"passed", pass}, {"failed", fail}});
        passed += pass;
        failed += fail;
    }
};

Measure<Rational> random_rational_measure(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nd(2, 5);
    std::uniform_int_distribution<int> den(2, 12);
    std::uniform_int_distribution<int> wd(1, 9);
    const int n = nd(rng);
    std::vector<Rational> support;
    while (static_cast<int>(support.size()) < n) {
        const int q = den(rng);
        std::uniform_int_distribution<int> num(0, q);
        const Rational x(num(rng), q);
        bool dup = false;
        for (const auto& s : support) dup = dup || s == x;
        if (!dup) support.push_back(x);
    }
    std::vector<Rational> weights;
    Rational total(0);
    for (int i = 0; i < n; ++i) {
        weights.push_back(Rational(wd(rng)));
        total += weights.back();
    }
    for (auto& w : weights) w /= total;
    return make_measure<Rational>(Domain::Unit, std::move(support), std::move(weights));
}

RunOutput run_check(const json& req) {
    std::uint64_t seed = 0;
    int count = 20;
    if (req.contains("seed")) seed = req.at("seed").get<std::uint64_t>();
    if (req.contains("count")) count = req.at("count").get<int>();
    if (count < 1) fail(Errc::InvalidInput, "count must be positive");
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 1);

    CheckCounter counter;
    const std::vector<ModelSpec<Rational>> specs = {
        {2, {}, {}},
        {3, {Rational(2)}, {1}},
        {2, {Rational(-1)}, {1}},
    };

    {
        // Pipeline value equals the weighted Hankel determinant, exactly.
        int pass = 0, fail_count = 0;
        for (int i = 0; i < count; ++i) {
            auto mu = random_rational_measure(rng);
            const auto& spec = specs[static_cast<std::size_t>(i) % specs.size()];
            const auto T = multiset_from_model(spec);
            const auto need = 2 * mu.size() + 2 + static_cast<std::size_t>(T.total());
            const auto c = moments(mu, need);
            const auto p = moments_to_canonical(c);
            (evaluate_objective(p, spec) == gen_hankel(c, T, spec.m)) ? ++pass : ++fail_count;
        }
        counter.add("pipeline-vs-determinant", pass, fail_count);
    }
    {
        // Moments -> canonical -> moments round trip, exactly.
        int pass = 0, fail_count = 0;
        for (int i = 0; i < count; ++i) {
            auto mu = random_rational_measure(rng);
            const auto c = moments(mu, 2 * mu.size() + 2);
            const auto p = moments_to_canonical(c);
            (canonical_to_moments(p, c.size() - 1) == c) ? ++pass : ++fail_count;
        }
        counter.add("moment-round-trip", pass, fail_count);
    }
    {
        // Canonical -> measure -> canonical round trip in floating point.
        int pass = 0, fail_count = 0;
        std::uniform_real_distribution<double> ud(0.1, 0.9);
        for (int i = 0; i < count; ++i) {
            std::vector<double> interior;
            const std::size_t depth = 1 + rng() % 4;
            for (std::size_t k = 0; k < depth; ++k) interior.push_back(ud(rng));
            auto p = make_canonical<double>(std::move(interior), rng() % 2 ? 1 : 0);
            auto mu = reconstruct_design(p);
            auto q = moments_to_canonical(moments(mu, p.depth() + 2));
            bool ok = q.interior.size() >= p.interior.size();
            for (std::size_t k = 0; ok && k < p.interior.size(); ++k)
                ok = std::abs(q.interior[k] - p.interior[k]) <= 1e-8;
            ok ? ++pass : ++fail_count;
        }
        counter.add("canonical-round-trip", pass, fail_count);
    }
    {
        // The padding coordinate never changes the objective.
        int pass = 0, fail_count = 0;
        std::uniform_real_distribution<double> ud(0.1, 0.9);
        for (int i = 0; i < count; ++i) {
            ModelSpec<double> spec{2 + static_cast<int>(rng() % 2), {}, {}};
            const auto K0 = required_depth(spec.m, multiset_from_model(spec));
            std::vector<double> interior;
            for (std::size_t k = 0; k < K0; ++k) interior.push_back(ud(rng));
            auto p = make_canonical<double>(interior, std::nullopt);
            const double base = evaluate_objective(p, spec);
            interior.back() = ud(rng);
            auto q = make_canonical<double>(interior, std::nullopt);
            const double perturbed = evaluate_objective(q, spec);
            (std::abs(perturbed - base) <= 1e-9 * std::max(1.0, std::abs(base)))
                ? ++pass
                : ++fail_count;
        }
        counter.add("padding-independence", pass, fail_count);
    }

    json doc{{"kind", "check"},
             {"seed", seed},
             {"count", count},
             {"passed", counter.passed},
             {"failed", counter.failed},
             {"checks", counter.rows}};
    return {Status::Ok, doc.dump(2) + "\n"};
}

}  // namespace

RunOutput run(const std::string& request_json) {
    json req;
    try {
        req = json::parse(request_json);
    } catch (const std::exception& e) {
        return error_output(Status::Invalid, "InvalidInput",
                            std::string("request is not valid JSON: ") + e.what());
    }
    try {
        if (!req.is_object() || !req.contains("kind") || !req.at("kind").is_string())
            fail(Errc::InvalidInput, "request needs a string kind");
        const std::string kind = req.at("kind").get<std::string>();
        if (kind == "dopt") return run_dopt(req);
        if (kind == "robust") return run_robust(req);
        if (kind == "maximin") return run_maximin(req);
        if (kind == "oracle") return run_oracle(req);
        if (kind == "check") return run_check(req);
        fail(Errc::InvalidInput, "unknown kind: " + kind);
    } catch (const Error& e) {
        return error_output(status_of(e.code()), errc_name(e.code()), e.what());
    } catch (const json::exception& e) {
        return error_output(Status::Invalid, "InvalidInput", e.what());
    } catch (const std::exception& e) {
        return error_output(Status::Internal, "Internal", e.what());
    }
}

const char* status_name(Status s) {
    switch (s) {
        case Status::Ok: return "ok";
        case Status::Infeasible: return "infeasible";
        case Status::Invalid: return "invalid";
        case Status::Internal: return "internal";
    }
    return "unknown";
}

const char* version() { return "1.0.0"; }

}  // namespace canopt::runner
