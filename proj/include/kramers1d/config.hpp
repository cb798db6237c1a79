#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "kramers1d/errors.hpp"
#include "kramers1d/montecarlo.hpp"
#include "kramers1d/potential.hpp"

namespace kramers1d {

enum class ReportFormat { Json, Csv };

/// A full batch-run description. Parsed from a JSON document with blocks
/// potential / grid / kramers / simulate / validate / output; unknown keys
/// are rejected so typos cannot silently change a run.
struct RunConfig {
    // potential
    PotentialKind kind = PotentialKind::DoubleWell;
    std::vector<double> coefficients;
    double gamma = 1.0;
    BoundaryCondition bc = BoundaryCondition::Neumann;
    // grid
    std::vector<int> grid_n{16};
    // kramers
    int source = 0;
    std::optional<std::vector<int>> targets; // nullopt = "lower"
    double eta = 1e-8;                       // saddle band, scaled by (1 + |S-hat|)
    // simulate
    std::vector<double> epsilons;
    std::optional<double> rho;
    double dt = 1e-3;
    Scheme scheme = Scheme::SemiImplicit;
    int samples = 0;
    std::uint64_t seed = 42;
    std::optional<double> max_time;
    // validate verdict tolerances
    double slope_rel_tol = 0.20;
    double prefactor_factor = 3.0;
    double ks_alpha = 0.01;
    // output
    ReportFormat format = ReportFormat::Json;
    std::optional<std::string> output_path;

    Potential make_potential() const {
        if (kind == PotentialKind::DoubleWell) return Potential::double_well(gamma, bc);
        return Potential::polynomial(coefficients, gamma, bc);
    }
};

namespace detail {

inline void require_keys(const nlohmann::ordered_json& obj, const std::string& block,
                         std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("unknown key '" + block + it.key() + "'");
    }
}

template <typename T>
T fetch(const nlohmann::ordered_json& obj, const std::string& block, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad value for '" + block + key + "': " + e.what());
    }
}

} // namespace detail

inline RunConfig parse_config(const std::string& text) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object");
    detail::require_keys(doc, "", {"potential", "grid", "kramers", "simulate", "validate", "output"});
    if (!doc.contains("potential")) throw ConfigError("missing required 'potential' block");

    RunConfig cfg;
    {
        const auto& p = doc.at("potential");
        detail::require_keys(p, "potential.", {"kind", "coefficients", "gamma", "bc"});
        std::string kind = detail::fetch<std::string>(p, "potential.", "kind", "double_well");
        if (kind == "double_well")
            cfg.kind = PotentialKind::DoubleWell;
        else if (kind == "polynomial")
            cfg.kind = PotentialKind::Polynomial;
        else
            throw ConfigError("potential.kind must be 'double_well' or 'polynomial'");
        cfg.coefficients = detail::fetch<std::vector<double>>(p, "potential.", "coefficients", {});
        if (cfg.kind == PotentialKind::Polynomial && cfg.coefficients.empty())
            throw ConfigError("potential.coefficients required for a polynomial potential");
        cfg.gamma = detail::fetch<double>(p, "potential.", "gamma", 1.0);
        if (!(cfg.gamma > 0.0)) throw ConfigError("potential.gamma must be positive");
        std::string bc = detail::fetch<std::string>(p, "potential.", "bc", "neumann");
        if (bc == "neumann")
            cfg.bc = BoundaryCondition::Neumann;
        else if (bc == "dirichlet")
            cfg.bc = BoundaryCondition::Dirichlet;
        else
            throw ConfigError("potential.bc must be 'neumann' or 'dirichlet'");
        try {
            cfg.make_potential(); // surfaces polynomial-shape violations at parse time
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("potential block invalid: ") + e.what());
        }
    }
    if (doc.contains("grid")) {
        const auto& g = doc.at("grid");
        detail::require_keys(g, "grid.", {"n"});
        if (g.contains("n")) {
            cfg.grid_n.clear();
            if (g.at("n").is_array())
                cfg.grid_n = g.at("n").get<std::vector<int>>();
            else
                cfg.grid_n.push_back(g.at("n").get<int>());
        }
        if (cfg.grid_n.empty()) throw ConfigError("grid.n must name at least one size");
        for (int n : cfg.grid_n)
            if (n < 1) throw ConfigError("grid.n entries must be >= 1");
    }
    if (doc.contains("kramers")) {
        const auto& k = doc.at("kramers");
        detail::require_keys(k, "kramers.", {"source", "targets", "eta"});
        cfg.source = detail::fetch<int>(k, "kramers.", "source", 0);
        if (cfg.source < 0) throw ConfigError("kramers.source must be a vertex rank >= 0");
        if (k.contains("targets")) {
            if (k.at("targets").is_string()) {
                if (k.at("targets").get<std::string>() != "lower")
                    throw ConfigError("kramers.targets must be 'lower' or a list of vertex ranks");
                cfg.targets = std::nullopt;
            } else {
                cfg.targets = k.at("targets").get<std::vector<int>>();
                if (cfg.targets->empty()) throw ConfigError("kramers.targets list must not be empty");
                for (int t : *cfg.targets)
                    if (t < 0) throw ConfigError("kramers.targets entries must be >= 0");
            }
        }
        cfg.eta = detail::fetch<double>(k, "kramers.", "eta", 1e-8);
        if (!(cfg.eta > 0.0)) throw ConfigError("kramers.eta must be positive");
    }
    if (doc.contains("simulate")) {
        const auto& s = doc.at("simulate");
        detail::require_keys(s, "simulate.",
                             {"epsilon", "rho", "dt", "scheme", "samples", "seed", "max_time"});
        if (s.contains("epsilon")) {
            if (s.at("epsilon").is_array())
                cfg.epsilons = s.at("epsilon").get<std::vector<double>>();
            else
                cfg.epsilons.push_back(s.at("epsilon").get<double>());
            for (double e : cfg.epsilons)
                if (!(e > 0.0)) throw ConfigError("simulate.epsilon entries must be positive");
        }
        if (s.contains("rho")) {
            cfg.rho = s.at("rho").get<double>();
            if (!(*cfg.rho > 0.0)) throw ConfigError("simulate.rho must be positive");
        }
        cfg.dt = detail::fetch<double>(s, "simulate.", "dt", 1e-3);
        if (!(cfg.dt > 0.0)) throw ConfigError("simulate.dt must be positive");
        std::string scheme = detail::fetch<std::string>(s, "simulate.", "scheme", "semi_implicit");
        if (scheme == "semi_implicit")
            cfg.scheme = Scheme::SemiImplicit;
        else if (scheme == "explicit")
            cfg.scheme = Scheme::Explicit;
        else
            throw ConfigError("simulate.scheme must be 'semi_implicit' or 'explicit'");
        if (s.contains("samples")) {
            cfg.samples = s.at("samples").get<int>();
            if (cfg.samples < 2) throw ConfigError("simulate.samples must be >= 2");
        }
        cfg.seed = detail::fetch<std::uint64_t>(s, "simulate.", "seed", cfg.seed);
        if (s.contains("max_time")) {
            cfg.max_time = s.at("max_time").get<double>();
            if (!(*cfg.max_time > 0.0)) throw ConfigError("simulate.max_time must be positive");
        }
    }
    if (doc.contains("validate")) {
        const auto& v = doc.at("validate");
        detail::require_keys(v, "validate.", {"slope_rel_tol", "prefactor_factor", "ks_alpha"});
        cfg.slope_rel_tol = detail::fetch<double>(v, "validate.", "slope_rel_tol", cfg.slope_rel_tol);
        cfg.prefactor_factor = detail::fetch<double>(v, "validate.", "prefactor_factor", cfg.prefactor_factor);
        cfg.ks_alpha = detail::fetch<double>(v, "validate.", "ks_alpha", cfg.ks_alpha);
        if (!(cfg.slope_rel_tol > 0.0) || !(cfg.prefactor_factor >= 1.0) || !(cfg.ks_alpha > 0.0 && cfg.ks_alpha < 1.0))
            throw ConfigError("validate tolerances out of range");
    }
    if (doc.contains("output")) {
        const auto& o = doc.at("output");
        detail::require_keys(o, "output.", {"format", "path"});
        std::string fmt = detail::fetch<std::string>(o, "output.", "format", "json");
        if (fmt == "json")
            cfg.format = ReportFormat::Json;
        else if (fmt == "csv")
            cfg.format = ReportFormat::Csv;
        else
            throw ConfigError("output.format must be 'json' or 'csv'");
        if (o.contains("path")) cfg.output_path = o.at("path").get<std::string>();
    }
    return cfg;
}

/// Normalized JSON image of a config: every default materialized, stable key
/// order. parse(serialize(cfg)) == cfg.
inline nlohmann::ordered_json serialize_config(const RunConfig& cfg) {
    nlohmann::ordered_json doc;
    doc["potential"] = {{"kind", cfg.kind == PotentialKind::DoubleWell ? "double_well" : "polynomial"},
                        {"gamma", cfg.gamma},
                        {"bc", to_string(cfg.bc)}};
    if (cfg.kind == PotentialKind::Polynomial) doc["potential"]["coefficients"] = cfg.coefficients;
    doc["grid"] = {{"n", cfg.grid_n}};
    doc["kramers"] = {{"source", cfg.source}, {"eta", cfg.eta}};
    if (cfg.targets)
        doc["kramers"]["targets"] = *cfg.targets;
    else
        doc["kramers"]["targets"] = "lower";
    nlohmann::ordered_json sim;
    sim["epsilon"] = cfg.epsilons;
    if (cfg.rho) sim["rho"] = *cfg.rho;
    sim["dt"] = cfg.dt;
    sim["scheme"] = cfg.scheme == Scheme::SemiImplicit ? "semi_implicit" : "explicit";
    if (cfg.samples > 0) sim["samples"] = cfg.samples;
    sim["seed"] = cfg.seed;
    if (cfg.max_time) sim["max_time"] = *cfg.max_time;
    doc["simulate"] = std::move(sim);
    doc["validate"] = {{"slope_rel_tol", cfg.slope_rel_tol},
                       {"prefactor_factor", cfg.prefactor_factor},
                       {"ks_alpha", cfg.ks_alpha}};
    doc["output"] = {{"format", cfg.format == ReportFormat::Json ? "json" : "csv"}};
    if (cfg.output_path) doc["output"]["path"] = *cfg.output_path;
    return doc;
}

} // namespace kramers1d
