#pragma once

#include <chrono>
#include <cmath>
#include <ctime>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kramers1d/config.hpp"
#include "kramers1d/errors.hpp"
#include "kramers1d/landscape.hpp"
#include "kramers1d/montecarlo.hpp"
#include "kramers1d/rates.hpp"
#include "kramers1d/report.hpp"

namespace kramers1d {

enum class RunMode { Analyze, Predict, Simulate, Validate, DetRatio };

inline std::string to_string(RunMode m) {
    switch (m) {
        case RunMode::Analyze: return "analyze";
        case RunMode::Predict: return "predict";
        case RunMode::Simulate: return "simulate";
        case RunMode::Validate: return "validate";
        case RunMode::DetRatio: return "detratio";
    }
    return "?";
}

namespace detail {

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct LandscapeData {
    Grid grid;
    std::vector<StationaryPoint> points;
    std::vector<StationaryPoint> minima; // sorted by (energy, profile)
};

inline LandscapeData analyze_landscape(const Potential& pot, int n, const LandscapeOptions& opt) {
    LandscapeData d;
    d.grid = make_grid(pot.bc(), n);
    d.points = find_stationary_points(pot, d.grid, nullptr, opt);
    for (const auto& p : d.points)
        if (p.index == 0) d.minima.push_back(p);
    return d;
}

inline void append_stationary_rows(Report& report, const Potential& pot, const LandscapeData& d) {
    for (const auto& p : d.points) {
        StationaryRow row;
        row.id = p.id;
        row.n = d.grid.n;
        row.energy = p.energy;
        row.index = p.index;
        row.lambda_minus = p.neg_eigenvalue;
        row.grad_norm = p.grad_norm;
        if (p.index == 0)
            for (std::size_t r = 0; r < d.minima.size(); ++r)
                if (d.minima[r].id == p.id) row.vertex_rank = static_cast<int>(r);
        report.stationary_points.push_back(row);
        DeterminantRow det;
        det.id = p.id;
        det.n = d.grid.n;
        det.value = functional_determinant(pot, p.profile).value;
        report.determinants.push_back(det);
    }
}

inline std::set<int> resolve_targets(const RunConfig& cfg, const LandscapeData& d) {
    if (cfg.source < 0 || static_cast<std::size_t>(cfg.source) >= d.minima.size())
        throw ConfigError("kramers.source rank " + std::to_string(cfg.source) + " does not exist (found " +
                          std::to_string(d.minima.size()) + " minima)");
    std::set<int> targets;
    if (cfg.targets) {
        for (int t : *cfg.targets) {
            if (t < 0 || static_cast<std::size_t>(t) >= d.minima.size())
                throw ConfigError("kramers.targets rank " + std::to_string(t) + " does not exist");
            targets.insert(t);
        }
    } else {
        const double src_energy = d.minima[static_cast<std::size_t>(cfg.source)].energy;
        const double tie = 1e-9 * (1.0 + std::abs(src_energy));
        for (std::size_t r = 0; r < d.minima.size(); ++r)
            if (d.minima[r].energy < src_energy - tie) targets.insert(static_cast<int>(r));
        if (targets.empty())
            throw ConfigError("kramers.targets = 'lower' selected no minima strictly below the source");
    }
    if (targets.count(cfg.source)) throw ConfigError("kramers.source must not be among the targets");
    return targets;
}

} // namespace detail

/// Dispatch one batch run. Stage errors propagate as exceptions; the CLI maps
/// them to exit codes.
inline Report run_pipeline(const RunConfig& cfg, RunMode mode, int jobs = 1) {
    Report report;
    report.mode = to_string(mode);
    report.config = cfg;
    report.timestamp = detail::utc_timestamp();

    const Potential pot = cfg.make_potential();
    LandscapeOptions opt;
    opt.saddle_band = cfg.eta;

    if (mode == RunMode::Validate && cfg.grid_n.size() != 1)
        throw ConfigError("validate mode needs exactly one grid size");
    if ((mode == RunMode::Simulate || mode == RunMode::Validate)) {
        if (cfg.epsilons.empty()) throw ConfigError("simulate.epsilon is required for this mode");
        if (!cfg.rho) throw ConfigError("simulate.rho is required for this mode");
        if (cfg.samples < 2) throw ConfigError("simulate.samples (>= 2) is required for this mode");
        if (mode == RunMode::Validate && cfg.epsilons.size() < 3)
            throw ConfigError("validate mode needs at least 3 epsilon values for the Arrhenius fit");
    }

    for (int n : cfg.grid_n) {
        auto land = detail::analyze_landscape(pot, n, opt);
        detail::append_stationary_rows(report, pot, land);

        if (mode == RunMode::Analyze) continue;

        if (mode == RunMode::DetRatio) {
            if (cfg.source < 0 || static_cast<std::size_t>(cfg.source) >= land.minima.size())
                throw ConfigError("kramers.source rank does not exist");
            const auto& src = land.minima[static_cast<std::size_t>(cfg.source)];
            TridiagonalOperator src_scaled = discrete_hessian(pot, src.profile, true);
            LogScalar src_det = tridiagonal_log_det(src_scaled);
            constexpr int kTruncation = 200;
            for (const auto& p : land.points) {
                if (p.index != 1) continue;
                TridiagonalOperator sad_scaled = discrete_hessian(pot, p.profile, true);
                LogScalar ratio = tridiagonal_log_det(sad_scaled) / src_det;
                auto dr = determinant_ratio(pot, p.profile, src.profile, kTruncation);
                DetRatioRow row;
                row.n = n;
                row.saddle_id = p.id;
                row.discrete_ratio = ratio.value();
                row.shooting_ratio = dr.ratio;
                row.truncated_product = *dr.truncated_product;
                row.truncation_k = kTruncation;
                report.detratio.push_back(row);
            }
            continue;
        }

        const std::set<int> targets = detail::resolve_targets(cfg, land);

        std::optional<SkeletonGraph> graph;
        std::optional<TransitionEstimate> continuum_ref;
        if (mode == RunMode::Predict || mode == RunMode::Validate) {
            if (cfg.epsilons.empty()) throw ConfigError("simulate.epsilon is required to form predictions");
            graph.emplace(build_skeleton(pot, land.grid, land.points, opt));
            for (double eps : cfg.epsilons) {
                auto cont = transition_time_continuum(pot, *graph, cfg.source, targets, eps, opt);
                auto disc = transition_time_discrete(pot, land.grid, *graph, cfg.source, targets, eps, opt);
                if (!continuum_ref) continuum_ref = cont;
                report.predictions.push_back(
                    {n, "continuum", eps, cont.activation_energy, cont.prefactor, cont.predicted_mean});
                report.predictions.push_back(
                    {n, "discrete", eps, disc.activation_energy, disc.prefactor, disc.predicted_mean});
            }
        }

        if (mode == RunMode::Simulate || mode == RunMode::Validate) {
            const auto& start = land.minima[static_cast<std::size_t>(cfg.source)].profile;
            std::vector<FieldProfile> target_profiles;
            for (int t : targets) target_profiles.push_back(land.minima[static_cast<std::size_t>(t)].profile);
            double sup_bound = 0.0;
            for (const auto& m : land.minima) sup_bound = std::max(sup_bound, inf_norm(m.profile.values));
            std::vector<std::pair<double, double>> fit_points;
            for (double eps : cfg.epsilons) {
                SimulationConfig sim;
                sim.potential = pot;
                sim.grid = land.grid;
                sim.epsilon = eps;
                sim.dt = cfg.dt;
                sim.rho = *cfg.rho;
                sim.scheme = cfg.scheme;
                sim.seed = cfg.seed;
                sim.sup_cap = 10.0 * (1.0 + sup_bound);
                if (cfg.max_time)
                    sim.max_time = *cfg.max_time;
                else if (continuum_ref)
                    sim.max_time = 50.0 * continuum_ref->prefactor *
                                   std::exp(continuum_ref->activation_energy / eps);
                else
                    sim.max_time = 1e6;
                auto est = estimate_mean(sim, start, target_profiles, cfg.samples, jobs);
                SimulationRow row;
                row.n = n;
                row.epsilon = eps;
                row.mean = est.mean;
                row.std_error = est.std_error;
                row.samples = cfg.samples;
                row.capped = est.capped;
                std::vector<double> uncapped;
                for (const auto& s : est.samples)
                    if (!s.capped) uncapped.push_back(s.tau);
                if (uncapped.size() >= 50) {
                    auto ks = exponentiality_test(uncapped);
                    row.ks_statistic = ks.statistic;
                    row.ks_p_value = ks.p_value;
                }
                report.simulation.push_back(row);
                fit_points.emplace_back(eps, est.mean);
            }
            if (mode == RunMode::Validate) {
                auto fit = arrhenius_fit(fit_points);
                FitRow frow;
                frow.activation_energy = fit.activation_energy;
                frow.ln_prefactor = fit.ln_prefactor;
                frow.prefactor = std::exp(fit.ln_prefactor);
                frow.r_squared = fit.r_squared;
                report.fit = frow;

                VerdictRow v;
                const double e_pred = continuum_ref->activation_energy;
                const double a_pred = continuum_ref->prefactor;
                v.slope_ok = std::abs(fit.activation_energy - e_pred) <= cfg.slope_rel_tol * std::abs(e_pred);
                const double factor = frow.prefactor / a_pred;
                v.prefactor_ok = factor >= 1.0 / cfg.prefactor_factor && factor <= cfg.prefactor_factor;
                double eps_min = cfg.epsilons.front();
                for (double e : cfg.epsilons) eps_min = std::min(eps_min, e);
                v.ks_ok = false;
                for (const auto& row : report.simulation)
                    if (row.n == n && row.epsilon == eps_min && row.ks_p_value)
                        v.ks_ok = *row.ks_p_value >= cfg.ks_alpha;
                v.passed = v.slope_ok && v.prefactor_ok && v.ks_ok;
                report.verdict = v;
            }
        }
    }
    return report;
}

inline std::string render_report(const Report& report) {
    if (report.config.format == ReportFormat::Csv) return report_to_csv(report);
    return report_to_json(report).dump(2) + "\n";
}

} // namespace kramers1d
