#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kramers1d/config.hpp"
#include "kramers1d/version.hpp"

namespace kramers1d {

struct StationaryRow {
    int id = 0;
    int n = 0;
    double energy = 0.0;
    int index = 0;
    std::optional<double> lambda_minus;
    double grad_norm = 0.0;
    std::optional<int> vertex_rank; // rank among minima, when index == 0
};

struct DeterminantRow {
    int id = 0;
    int n = 0;
    double value = 0.0;
};

struct PredictionRow {
    int n = 0;
    std::string variant; // "continuum" | "discrete"
    double epsilon = 0.0;
    double activation_energy = 0.0;
    double prefactor = 0.0;
    double predicted_mean = 0.0;
};

struct SimulationRow {
    int n = 0;
    double epsilon = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    int samples = 0;
    int capped = 0;
    std::optional<double> ks_statistic;
    std::optional<double> ks_p_value;
};

struct FitRow {
    double activation_energy = 0.0;
    double ln_prefactor = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
};

struct VerdictRow {
    bool slope_ok = false;
    bool prefactor_ok = false;
    bool ks_ok = false;
    bool passed = false;
};

struct DetRatioRow {
    int n = 0;
    int saddle_id = 0;
    double discrete_ratio = 0.0;   // det((1/h) H S_N(saddle)) / det((1/h) H S_N(source))
    double shooting_ratio = 0.0;   // Det(H_saddle S) / Det(H_source S)
    double truncated_product = 0.0;
    int truncation_k = 0;
};

struct Report {
    std::string mode;
    RunConfig config;
    std::string timestamp;
    std::vector<StationaryRow> stationary_points;
    std::vector<DeterminantRow> determinants;
    std::vector<PredictionRow> predictions;
    std::vector<SimulationRow> simulation;
    std::optional<FitRow> fit;
    std::optional<VerdictRow> verdict;
    std::vector<DetRatioRow> detratio;
};

inline nlohmann::ordered_json report_to_json(const Report& r) {
    nlohmann::ordered_json doc;
    doc["metadata"] = {{"tool", "kramers1d"},
                       {"version", KRAMERS1D_VERSION},
                       {"mode", r.mode},
                       {"timestamp", r.timestamp},
                       {"config", serialize_config(r.config)}};
    doc["stationary_points"] = nlohmann::ordered_json::array();
    for (const auto& p : r.stationary_points) {
        nlohmann::ordered_json row{{"id", p.id},       {"n", p.n},
                                   {"energy", p.energy}, {"index", p.index},
                                   {"grad_norm", p.grad_norm}};
        row["lambda_minus"] = p.lambda_minus ? nlohmann::ordered_json(*p.lambda_minus) : nlohmann::ordered_json(nullptr);
        row["vertex_rank"] = p.vertex_rank ? nlohmann::ordered_json(*p.vertex_rank) : nlohmann::ordered_json(nullptr);
        doc["stationary_points"].push_back(std::move(row));
    }
    doc["determinants"] = nlohmann::ordered_json::array();
    for (const auto& d : r.determinants)
        doc["determinants"].push_back({{"id", d.id}, {"n", d.n}, {"value", d.value}});
    doc["predictions"] = nlohmann::ordered_json::array();
    for (const auto& p : r.predictions)
        doc["predictions"].push_back({{"n", p.n},
                                      {"variant", p.variant},
                                      {"epsilon", p.epsilon},
                                      {"activation_energy", p.activation_energy},
                                      {"prefactor", p.prefactor},
                                      {"predicted_mean", p.predicted_mean}});
    doc["simulation"] = nlohmann::ordered_json::array();
    for (const auto& s : r.simulation) {
        nlohmann::ordered_json row{{"n", s.n},        {"epsilon", s.epsilon}, {"mean", s.mean},
                                   {"std_error", s.std_error}, {"samples", s.samples}, {"capped", s.capped}};
        row["ks_statistic"] = s.ks_statistic ? nlohmann::ordered_json(*s.ks_statistic) : nlohmann::ordered_json(nullptr);
        row["ks_p_value"] = s.ks_p_value ? nlohmann::ordered_json(*s.ks_p_value) : nlohmann::ordered_json(nullptr);
        doc["simulation"].push_back(std::move(row));
    }
    if (r.fit)
        doc["fit"] = {{"activation_energy", r.fit->activation_energy},
                      {"ln_prefactor", r.fit->ln_prefactor},
                      {"prefactor", r.fit->prefactor},
                      {"r_squared", r.fit->r_squared}};
    if (r.verdict)
        doc["verdict"] = {{"slope_ok", r.verdict->slope_ok},
                          {"prefactor_ok", r.verdict->prefactor_ok},
                          {"ks_ok", r.verdict->ks_ok},
                          {"passed", r.verdict->passed}};
    if (!r.detratio.empty()) {
        doc["detratio"] = nlohmann::ordered_json::array();
        for (const auto& d : r.detratio)
            doc["detratio"].push_back({{"n", d.n},
                                       {"saddle_id", d.saddle_id},
                                       {"discrete_ratio", d.discrete_ratio},
                                       {"shooting_ratio", d.shooting_ratio},
                                       {"truncated_product", d.truncated_product},
                                       {"truncation_k", d.truncation_k}});
    }
    return doc;
}

/// Flat CSV mirror: one row per (section, quantity, n, epsilon, id).
inline std::string report_to_csv(const Report& r) {
    std::ostringstream os;
    os.precision(17);
    os << "section,quantity,n,epsilon,id,value\n";
    auto row = [&os](const std::string& section, const std::string& quantity, const std::string& n,
                     const std::string& eps, const std::string& id, double value) {
        os << section << ',' << quantity << ',' << n << ',' << eps << ',' << id << ',' << value << '\n';
    };
    for (const auto& p : r.stationary_points) {
        std::string n = std::to_string(p.n), id = std::to_string(p.id);
        row("stationary", "energy", n, "", id, p.energy);
        row("stationary", "index", n, "", id, p.index);
        row("stationary", "grad_norm", n, "", id, p.grad_norm);
        if (p.lambda_minus) row("stationary", "lambda_minus", n, "", id, *p.lambda_minus);
    }
    for (const auto& d : r.determinants)
        row("determinant", "value", std::to_string(d.n), "", std::to_string(d.id), d.value);
    for (const auto& p : r.predictions) {
        std::string n = std::to_string(p.n);
        std::ostringstream eps;
        eps.precision(17);
        eps << p.epsilon;
        row("prediction_" + p.variant, "activation_energy", n, eps.str(), "", p.activation_energy);
        row("prediction_" + p.variant, "prefactor", n, eps.str(), "", p.prefactor);
        row("prediction_" + p.variant, "predicted_mean", n, eps.str(), "", p.predicted_mean);
    }
    for (const auto& s : r.simulation) {
        std::string n = std::to_string(s.n);
        std::ostringstream eps;
        eps.precision(17);
        eps << s.epsilon;
        row("simulation", "mean", n, eps.str(), "", s.mean);
        row("simulation", "std_error", n, eps.str(), "", s.std_error);
        row("simulation", "samples", n, eps.str(), "", s.samples);
        row("simulation", "capped", n, eps.str(), "", s.capped);
        if (s.ks_statistic) row("simulation", "ks_statistic", n, eps.str(), "", *s.ks_statistic);
        if (s.ks_p_value) row("simulation", "ks_p_value", n, eps.str(), "", *s.ks_p_value);
    }
    if (r.fit) {
        row("fit", "activation_energy", "", "", "", r.fit->activation_energy);
        row("fit", "ln_prefactor", "", "", "", r.fit->ln_prefactor);
        row("fit", "prefactor", "", "", "", r.fit->prefactor);
        row("fit", "r_squared", "", "", "", r.fit->r_squared);
    }
    if (r.verdict) {
        row("verdict", "slope_ok", "", "", "", r.verdict->slope_ok ? 1 : 0);
        row("verdict", "prefactor_ok", "", "", "", r.verdict->prefactor_ok ? 1 : 0);
        row("verdict", "ks_ok", "", "", "", r.verdict->ks_ok ? 1 : 0);
        row("verdict", "passed", "", "", "", r.verdict->passed ? 1 : 0);
    }
    for (const auto& d : r.detratio) {
        std::string n = std::to_string(d.n), id = std::to_string(d.saddle_id);
        row("detratio", "discrete_ratio", n, "", id, d.discrete_ratio);
        row("detratio", "shooting_ratio", n, "", id, d.shooting_ratio);
        row("detratio", "truncated_product", n, "", id, d.truncated_product);
        row("detratio", "truncation_k", n, "", id, d.truncation_k);
    }
    return os.str();
}

} // namespace kramers1d
