#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kramers1d/errors.hpp"
#include "kramers1d/landscape.hpp"
#include "kramers1d/log_scalar.hpp"
#include "kramers1d/spectral.hpp"

namespace kramers1d {

enum class WeightVariant { Continuum, Discrete };

/// Edge of the transition graph with its Eyring-Kramers weight.
/// Continuum: w = |lambda^-| / sqrt|Det H S| from the Sturm-Liouville data.
/// Discrete:  w = |lambda^-_N| e^{-S_N(z)/eps} / sqrt|det H S_N(z)| from the
/// unscaled Hessian matrix. Carried in log form; discrete weights underflow
/// doubles long before N reaches useful sizes.
struct WeightedEdge {
    int saddle_id = -1;
    int a = -1, b = -1;
    double log_weight = 0.0;
    WeightVariant variant = WeightVariant::Continuum;
    std::optional<double> epsilon; // set for the discrete variant

    double weight() const { return std::exp(log_weight); }
};

inline std::vector<WeightedEdge> continuum_edge_weights(const Potential& pot,
                                                        const std::vector<SkeletonGraph::Edge>& edges) {
    std::vector<WeightedEdge> out;
    out.reserve(edges.size());
    for (const auto& e : edges) {
        auto spectrum = sturm_liouville_eigen(pot, e.saddle.profile, 1);
        const double lam = spectrum.eigenvalues.front();
        if (!(lam < 0.0)) throw DegenerateLandscapeError("saddle lacks a negative Sturm-Liouville eigenvalue");
        const double det = functional_determinant(pot, e.saddle.profile).value;
        WeightedEdge w;
        w.saddle_id = e.saddle.id;
        w.a = e.a;
        w.b = e.b;
        w.variant = WeightVariant::Continuum;
        w.log_weight = std::log(std::abs(lam)) - 0.5 * std::log(std::abs(det));
        out.push_back(w);
    }
    return out;
}

inline std::vector<WeightedEdge> discrete_edge_weights(const Potential& pot, const Grid& grid,
                                                       const std::vector<SkeletonGraph::Edge>& edges,
                                                       double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    std::vector<WeightedEdge> out;
    out.reserve(edges.size());
    for (const auto& e : edges) {
        if (e.saddle.index != 1 || !e.saddle.neg_eigenvalue)
            throw DegenerateLandscapeError("edge saddle is not index 1 with a negative eigenvalue");
        // unscaled quantities from the scaled ones: lambda(H) = h lambda(H/h),
        // log|det H| = dim log h + log|det (H/h)|
        TridiagonalOperator scaled = discrete_hessian(pot, e.saddle.profile, true);
        LogScalar det_scaled = tridiagonal_log_det(scaled);
        if (det_scaled.is_zero()) throw DegenerateLandscapeError("singular Hessian at saddle");
        const double log_det_unscaled = det_scaled.log_abs + static_cast<double>(scaled.dim) * std::log(grid.h);
        const double lam_unscaled = grid.h * *e.saddle.neg_eigenvalue;
        WeightedEdge w;
        w.saddle_id = e.saddle.id;
        w.a = e.a;
        w.b = e.b;
        w.variant = WeightVariant::Discrete;
        w.epsilon = epsilon;
        w.log_weight = std::log(std::abs(lam_unscaled)) - e.saddle.energy / epsilon - 0.5 * log_det_unscaled;
        out.push_back(w);
    }
    return out;
}

/// Result of minimizing Q(a) = sum_e w_e (a_+ - a_-)^2 with a(source) = 1 and
/// a(target) = 0: the equivalent conductance and the minimizing potentials.
struct ConductanceResult {
    double log_value = 0.0;
    std::vector<double> minimizer;
    int source = -1;
    std::set<int> targets;

    double value() const { return std::exp(log_value); }
};

/// Equivalent conductance by the graph-Laplacian linear system on the free
/// vertices (dense solve with partial pivoting; vertex counts are tiny).
/// Weights are rescaled by their maximum first, so only the log of the
/// conductance is exact when weights span extreme ranges.
inline ConductanceResult conductance(const std::vector<WeightedEdge>& edges, int n_vertices, int source,
                                     const std::set<int>& targets) {
    if (targets.empty()) throw std::invalid_argument("conductance needs at least one target");
    if (targets.count(source)) throw std::invalid_argument("source must not be a target");
    if (source < 0 || source >= n_vertices) throw std::invalid_argument("source id out of range");
    for (int t : targets)
        if (t < 0 || t >= n_vertices) throw std::invalid_argument("target id out of range");

    // connectivity check over the edge set
    {
        std::vector<char> seen(static_cast<std::size_t>(n_vertices), 0);
        std::vector<int> stack{source};
        seen[static_cast<std::size_t>(source)] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (const auto& e : edges) {
                if (e.a == e.b) continue;
                int other = e.a == v ? e.b : (e.b == v ? e.a : v);
                if (other != v && !seen[static_cast<std::size_t>(other)]) {
                    seen[static_cast<std::size_t>(other)] = 1;
                    stack.push_back(other);
                }
            }
        }
        bool reached = false;
        for (int t : targets) reached = reached || seen[static_cast<std::size_t>(t)];
        if (!reached) throw DisconnectedGraphError("infinite resistance: source does not reach any target");
    }

    double log_max = -std::numeric_limits<double>::infinity();
    for (const auto& e : edges)
        if (e.a != e.b) log_max = std::max(log_max, e.log_weight);

    std::vector<int> vertex_to_free(static_cast<std::size_t>(n_vertices), -1);
    std::vector<int> free_vertices;
    for (int v = 0; v < n_vertices; ++v)
        if (v != source && !targets.count(v)) {
            vertex_to_free[static_cast<std::size_t>(v)] = static_cast<int>(free_vertices.size());
            free_vertices.push_back(v);
        }
    const std::size_t nf = free_vertices.size();
    std::vector<double> a(static_cast<std::size_t>(n_vertices), 0.0);
    a[static_cast<std::size_t>(source)] = 1.0;

    if (nf > 0) {
        std::vector<std::vector<double>> lap(nf, std::vector<double>(nf, 0.0));
        std::vector<double> rhs(nf, 0.0);
        for (const auto& e : edges) {
            if (e.a == e.b) continue;
            const double w = std::exp(e.log_weight - log_max);
            int fa = vertex_to_free[static_cast<std::size_t>(e.a)];
            int fb = vertex_to_free[static_cast<std::size_t>(e.b)];
            if (fa >= 0) lap[static_cast<std::size_t>(fa)][static_cast<std::size_t>(fa)] += w;
            if (fb >= 0) lap[static_cast<std::size_t>(fb)][static_cast<std::size_t>(fb)] += w;
            if (fa >= 0 && fb >= 0) {
                lap[static_cast<std::size_t>(fa)][static_cast<std::size_t>(fb)] -= w;
                lap[static_cast<std::size_t>(fb)][static_cast<std::size_t>(fa)] -= w;
            }
            if (fa >= 0 && e.b == source) rhs[static_cast<std::size_t>(fa)] += w;
            if (fb >= 0 && e.a == source) rhs[static_cast<std::size_t>(fb)] += w;
        }
        // Gaussian elimination with partial pivoting
        for (std::size_t col = 0; col < nf; ++col) {
            std::size_t piv = col;
            for (std::size_t r = col + 1; r < nf; ++r)
                if (std::abs(lap[r][col]) > std::abs(lap[piv][col])) piv = r;
            std::swap(lap[col], lap[piv]);
            std::swap(rhs[col], rhs[piv]);
            if (lap[col][col] == 0.0) continue; // isolated free vertex; potential stays 0
            for (std::size_t r = col + 1; r < nf; ++r) {
                double m = lap[r][col] / lap[col][col];
                if (m == 0.0) continue;
                for (std::size_t c = col; c < nf; ++c) lap[r][c] -= m * lap[col][c];
                rhs[r] -= m * rhs[col];
            }
        }
        for (std::size_t r = nf; r-- > 0;) {
            if (lap[r][r] == 0.0) {
                rhs[r] = 0.0;
                continue;
            }
            double s = rhs[r];
            for (std::size_t c = r + 1; c < nf; ++c) s -= lap[r][c] * rhs[c];
            rhs[r] = s / lap[r][r];
        }
        for (std::size_t i = 0; i < nf; ++i) a[static_cast<std::size_t>(free_vertices[i])] = rhs[i];
    }

    double q = 0.0;
    for (const auto& e : edges) {
        if (e.a == e.b) continue;
        double d = a[static_cast<std::size_t>(e.a)] - a[static_cast<std::size_t>(e.b)];
        q += std::exp(e.log_weight - log_max) * d * d;
    }
    if (!(q > 0.0)) throw DisconnectedGraphError("conductance vanished: no current-carrying path");

    ConductanceResult r;
    r.log_value = std::log(q) + log_max;
    r.minimizer = std::move(a);
    r.source = source;
    r.targets = targets;
    return r;
}

enum class EstimateProvenance { ContinuumFormula, DiscreteFormula };

/// Arrhenius-form prediction E[tau] = A exp(E / eps).
struct TransitionEstimate {
    double activation_energy = 0.0;
    double prefactor = 0.0;
    double epsilon = 0.0;
    double predicted_mean = 0.0;
    EstimateProvenance provenance = EstimateProvenance::ContinuumFormula;
    int n = 0; // grid size for the discrete formula
};

/// Sharp transition-time asymptotics from the continuum data: activation
/// energy E = S-hat(source, targets) - S(source) and prefactor
/// A = 2 pi / (C* sqrt(Det H_source S)); for a single saddle this reduces to
/// (2 pi / |lambda^-|) sqrt(|Det H_saddle| / Det H_source) e^{E/eps}.
inline TransitionEstimate transition_time_continuum(const Potential& pot, const SkeletonGraph& graph, int source,
                                                    const std::set<int>& targets, double epsilon,
                                                    const LandscapeOptions& opt = {}) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    const auto& src = graph.vertices.at(static_cast<std::size_t>(source));
    for (int t : targets)
        if (graph.vertices.at(static_cast<std::size_t>(t)).energy > src.energy + 1e-12)
            throw std::invalid_argument("metastable ordering violated: target above source energy");
    double height = std::numeric_limits<double>::infinity();
    for (int t : targets) height = std::min(height, graph.minimax[static_cast<std::size_t>(source)][static_cast<std::size_t>(t)]);
    const double eta = opt.saddle_band * (1.0 + std::abs(height));
    auto edges = relevant_saddles(graph, source, targets, eta);
    if (edges.empty()) throw DisconnectedGraphError("no admissible saddles between source and targets");
    auto weights = continuum_edge_weights(pot, edges);
    auto cond = conductance(weights, static_cast<int>(graph.vertices.size()), source, targets);
    const double det_source = functional_determinant(pot, src.profile).value;
    if (!(det_source > 0.0)) throw DegenerateLandscapeError("source minimum has non-positive determinant");

    TransitionEstimate est;
    est.provenance = EstimateProvenance::ContinuumFormula;
    est.epsilon = epsilon;
    est.n = src.profile.grid.n;
    est.activation_energy = height - src.energy;
    est.prefactor = 2.0 * M_PI * std::exp(-cond.log_value - 0.5 * std::log(det_source));
    est.predicted_mean = est.prefactor * std::exp(est.activation_energy / epsilon);
    return est;
}

/// Physical-time prediction from the finite-N formula
///   E[tau] = 2 pi h e^{-S_N(source)/eps} / (C*(N,eps) sqrt(det H S_N(source)))
/// with C*(N,eps) built from the discrete weights (which carry their own
/// e^{-S_N(saddle)/eps}); reported as prefactor and activation energy
/// E = S-hat_0 - S_N(source) so that predicted_mean = A e^{E/eps} exactly.
inline TransitionEstimate transition_time_discrete(const Potential& pot, const Grid& grid, const SkeletonGraph& graph,
                                                   int source, const std::set<int>& targets, double epsilon,
                                                   const LandscapeOptions& opt = {}) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    const auto& src = graph.vertices.at(static_cast<std::size_t>(source));
    for (int t : targets)
        if (graph.vertices.at(static_cast<std::size_t>(t)).energy > src.energy + 1e-12)
            throw std::invalid_argument("metastable ordering violated: target above source energy");
    double height = std::numeric_limits<double>::infinity();
    for (int t : targets) height = std::min(height, graph.minimax[static_cast<std::size_t>(source)][static_cast<std::size_t>(t)]);
    const double eta = opt.saddle_band * (1.0 + std::abs(height));
    auto edges = relevant_saddles(graph, source, targets, eta);
    if (edges.empty()) throw DisconnectedGraphError("no admissible saddles between source and targets");
    auto weights = discrete_edge_weights(pot, grid, edges, epsilon);
    auto cond = conductance(weights, static_cast<int>(graph.vertices.size()), source, targets);

    TridiagonalOperator scaled = discrete_hessian(pot, src.profile, true);
    LogScalar det_scaled = tridiagonal_log_det(scaled);
    if (det_scaled.sign <= 0) throw DegenerateLandscapeError("source minimum has non-positive determinant");
    const double log_det_src = det_scaled.log_abs + static_cast<double>(scaled.dim) * std::log(grid.h);

    const double log_mean =
        std::log(2.0 * M_PI) + std::log(grid.h) - src.energy / epsilon - cond.log_value - 0.5 * log_det_src;

    TransitionEstimate est;
    est.provenance = EstimateProvenance::DiscreteFormula;
    est.epsilon = epsilon;
    est.n = grid.n;
    est.activation_energy = height - src.energy;
    est.prefactor = std::exp(log_mean - est.activation_energy / epsilon);
    est.predicted_mean = est.prefactor * std::exp(est.activation_energy / epsilon);
    return est;
}

} // namespace kramers1d
