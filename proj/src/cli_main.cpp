// Copyright 2026 canopt developers
// SPDX-License-Identifier: MIT
//
// Command-line front end. Builds a JSON request from flags or a problem
// file, submits it through the C API, and prints the response document.

#include <cctype>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "canopt/capi.h"
#include "json.hpp"

namespace {

using nlohmann::json;

[[noreturn]] void die_invalid(const std::string& message) {
    json doc;
    doc["error"] = {{"name", "InvalidInput"}, {"message", message}};
    std::cerr << doc.dump(2) << "\n";
    std::exit(CANOPT_INVALID);
}

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
                ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            die_invalid("could not parse '" + item + "' in " + what);
        }
    }
    if (out.empty()) die_invalid(what + " must be a comma-separated list of numbers");
    return out;
}

std::vector<std::vector<double>> parse_groups(const std::string& text, const std::string& what) {
    std::vector<std::vector<double>> out;
    std::stringstream ss(text);
    std::string group;
    while (std::getline(ss, group, ';')) out.push_back(parse_numbers(group, what));
    if (out.empty()) die_invalid(what + " must hold at least one ';'-separated group");
    return out;
}

std::vector<int> parse_ints(const std::string& text, const std::string& what) {
    std::vector<int> out;
    for (double v : parse_numbers(text, what)) {
        const int n = static_cast<int>(v);
        if (static_cast<double>(n) != v) die_invalid(what + " entries must be integers");
        out.push_back(n);
    }
    return out;
}

json load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) die_invalid("could not open problem file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        die_invalid("problem file is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_object()) die_invalid("problem file must hold a JSON object");
    return doc;
}

// Flag values shared by the solver subcommands. Each field is only written
// into the request when the user actually supplied the flag, so problem-file
// values survive unless overridden.
struct OptionFlags {
    std::optional<std::uint64_t> seed;
    std::optional<int> restarts;
    std::optional<int> max_iters;
    std::optional<double> epsilon;
    std::optional<double> tol;

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "RNG seed for the multistart (default 0)");
        cmd->add_option("--restarts", restarts, "number of optimizer restarts (default 8)");
        cmd->add_option("--max-iters", max_iters, "iteration cap per restart (default 2500)");
        cmd->add_option("--epsilon", epsilon, "box margin for canonical moments (default 1e-7)");
        cmd->add_option("--tol", tol, "optimizer convergence tolerance (default 1e-12)");
    }

    void apply(json& request) const {
        json& o = request["options"];
        if (!o.is_object()) o = json::object();
        if (seed) o["seed"] = *seed;
        if (restarts) o["restarts"] = *restarts;
        if (max_iters) o["max_iters"] = *max_iters;
        if (epsilon) o["epsilon"] = *epsilon;
        if (tol) o["tol"] = *tol;
    }
};

int run_request(const json& request, const std::string& out_path) {
    canopt_result* result = nullptr;
    const int status = canopt_run_json(request.dump().c_str(), &result);
    std::string body = result ? canopt_result_json(result) : "";
    canopt_result_free(result);

    if (status != CANOPT_OK) {
        std::cerr << body;
        // The public contract distinguishes success (0), infeasible (1) and
        // invalid input (2); internal failures surface as a generic failure.
        return status == CANOPT_INTERNAL ? 1 : status;
    }
    if (out_path.empty()) {
        std::cout << body;
    } else {
        std::ofstream out(out_path);
        if (!out) die_invalid("could not open output file: " + out_path);
        out << body;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("canopt ") + canopt_version() +
                 " - D-optimal designs for polynomial regression with prior information"};
    app.require_subcommand(1);

    std::string problem_file;
    std::string out_path;
    std::string beta_text;
    std::string b_text;
    std::string g_text;
    std::string theta_text;
    std::string pschedule_text;
    std::string mode = "float";
    std::optional<int> m;
    std::optional<int> alpha;
    std::optional<double> d_budget;
    std::optional<int> nodes;
    std::optional<std::size_t> grid;
    std::optional<std::uint64_t> check_seed;
    std::optional<int> check_count;
    OptionFlags options;

    const auto add_model_flags = [&](CLI::App* cmd) {
        cmd->add_option("--m", m, "number of regression parameters");
        cmd->add_option("--beta", beta_text, "prior root locations, comma-separated");
        cmd->add_option("--b", b_text, "prior sample-size exponents, comma-separated");
    };
    const auto add_io_flags = [&](CLI::App* cmd, bool with_file = true) {
        if (with_file)
            cmd->add_option("file", problem_file, "JSON problem file (flags override its fields)");
        cmd->add_option("--out", out_path, "write the result document to this path");
    };

    CLI::App* solve = app.add_subcommand("solve", "maximize the design determinant");
    add_model_flags(solve);
    add_io_flags(solve);
    options.attach(solve);
    solve->add_option("--grid", grid, "compare against a grid-search oracle of this size");

    CLI::App* robust = app.add_subcommand("robust", "bias-constrained design on [-1, 1]");
    add_model_flags(robust);
    add_io_flags(robust);
    options.attach(robust);
    robust->add_option("--alpha", alpha, "contamination degree offset (default 0)");
    robust->add_option("--d", d_budget, "bias budget (required unless the file provides it)");

    CLI::App* maximin = app.add_subcommand("maximin", "worst-case efficient design via p-means");
    add_model_flags(maximin);
    add_io_flags(maximin);
    options.attach(maximin);
    maximin->add_option("--g", g_text,
                        "link polynomials, ascending coefficients, axes split by ';'");
    maximin->add_option("--theta", theta_text, "parameter box, 'lo,hi' pairs split by ';'");
    maximin->add_option("--pschedule", pschedule_text,
                        "decreasing negative exponents, comma-separated");
    maximin->add_option("--nodes", nodes, "quadrature nodes per axis (default 16)");

    CLI::App* oracle = app.add_subcommand("oracle", "grid-search reference design");
    add_model_flags(oracle);
    add_io_flags(oracle);
    oracle->add_option("--grid", grid, "grid resolution (default 101)");
    oracle->add_option("--mode", mode, "objective arithmetic: float or rational")
        ->check(CLI::IsMember({"float", "rational"}));

    CLI::App* check = app.add_subcommand("check", "run the randomized invariant suite");
    add_io_flags(check, false);
    check->add_option("--seed", check_seed, "RNG seed (default 0)");
    check->add_option("--count", check_count, "instances per invariant (default 20)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e, std::cout, std::cerr);
        return CANOPT_INVALID;
    }

    json request = problem_file.empty() ? json::object() : load_problem_file(problem_file);
    if (!request.contains("spec") || !request["spec"].is_object())
        request["spec"] = json::object();
    json& spec = request["spec"];
    if (m) spec["m"] = *m;
    if (!beta_text.empty()) spec["beta"] = parse_numbers(beta_text, "--beta");
    if (!b_text.empty()) spec["b"] = parse_ints(b_text, "--b");

    if (solve->parsed()) {
        request["kind"] = "dopt";
        options.apply(request);
        if (grid) request["options"]["oracle_grid"] = *grid;
    } else if (robust->parsed()) {
        request["kind"] = "robust";
        options.apply(request);
        if (alpha) spec["alpha"] = *alpha;
        if (d_budget) spec["d"] = *d_budget;
    } else if (maximin->parsed()) {
        request["kind"] = "maximin";
        options.apply(request);
        if (!g_text.empty()) spec["g"] = parse_groups(g_text, "--g");
        if (!theta_text.empty()) spec["theta_box"] = parse_groups(theta_text, "--theta");
        if (!pschedule_text.empty())
            spec["p_schedule"] = parse_numbers(pschedule_text, "--pschedule");
        if (nodes) request["nodes"] = *nodes;
    } else if (oracle->parsed()) {
        request["kind"] = "oracle";
        if (grid) request["grid"] = *grid;
        if (oracle->count("--mode") > 0) request["mode"] = mode;
    } else if (check->parsed()) {
        request["kind"] = "check";
        if (check_seed) request["seed"] = *check_seed;
        if (check_count) request["count"] = *check_count;
        request.erase("spec");
    }

    return run_request(request, out_path);
}
