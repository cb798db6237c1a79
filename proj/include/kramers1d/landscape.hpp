#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kramers1d/errors.hpp"
#include "kramers1d/potential.hpp"
#include "kramers1d/spectral.hpp"
#include "kramers1d/tridiagonal.hpp"

namespace kramers1d {

struct LandscapeOptions {
    double newton_tol_factor = 1e-10; // tol = factor * (1 + |grad at seed|_inf)
    int newton_max_iter = 200;
    double dedup_tol = 1e-6;      // sup-norm merge distance
    double degeneracy_tol = 1e-8; // |eigenvalue| below this rejects the point
    double descent_delta = 1e-3;  // offset along the unit negative eigenvector
    double capture_radius = 1e-3; // discrete L2 capture distance
    double max_flow_time = 1e3;
    double saddle_band = 1e-8; // eta in relevant_saddles, scaled by (1 + |height|)
};

/// A converged critical point of S_N with its spectral classification.
struct StationaryPoint {
    FieldProfile profile;
    double energy = 0.0;
    double grad_norm = 0.0;
    int index = 0;                            // Morse index of the scaled Hessian
    std::optional<double> neg_eigenvalue;     // lambda^- of (1/h) H S_N when index == 1
    int id = -1;
};

/// Morse index and, for index 1, the negative eigenvalue of the scaled
/// Hessian (1/h) H S_N. Rejects near-degenerate spectra.
inline std::pair<int, std::optional<double>> classify_point(const Potential& pot, const FieldProfile& profile,
                                                            const LandscapeOptions& opt = {}) {
    TridiagonalOperator scaled = discrete_hessian(pot, profile, true);
    const double lo = tridiagonal_eigenvalue(scaled, 0);
    if (std::abs(lo) < opt.degeneracy_tol)
        throw DegenerateLandscapeError("stationary point has eigenvalue " + std::to_string(lo) +
                                       " within degeneracy tolerance of zero");
    int index = inertia_negative(scaled);
    if (index > 0) {
        // highest negative eigenvalue guards the hyperbolicity margin
        const double hi_neg = tridiagonal_eigenvalue(scaled, index - 1);
        if (std::abs(hi_neg) < opt.degeneracy_tol)
            throw DegenerateLandscapeError("stationary point has eigenvalue " + std::to_string(hi_neg) +
                                           " within degeneracy tolerance of zero");
        if (static_cast<std::size_t>(index) < scaled.dim) {
            const double first_pos = tridiagonal_eigenvalue(scaled, index);
            if (std::abs(first_pos) < opt.degeneracy_tol)
                throw DegenerateLandscapeError("stationary point has eigenvalue " + std::to_string(first_pos) +
                                               " within degeneracy tolerance of zero");
        }
    }
    std::optional<double> neg;
    if (index == 1) neg = lo;
    return {index, neg};
}

namespace detail {

/// Damped Newton iteration on grad S_N = 0. Returns the converged profile or
/// nullopt; tol = newton_tol_factor * (1 + |grad(seed)|_inf).
inline std::optional<FieldProfile> newton_stationary(const Potential& pot, FieldProfile u,
                                                     const LandscapeOptions& opt) {
    std::vector<double> g = discrete_gradient(pot, u);
    const double tol = opt.newton_tol_factor * (1.0 + inf_norm(g));
    for (int it = 0; it < opt.newton_max_iter; ++it) {
        double gn = inf_norm(g);
        if (gn <= tol) return u;
        TridiagonalOperator hess = discrete_hessian(pot, u, false);
        std::vector<double> rhs(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = -g[i];
        std::vector<double> step = tridiagonal_solve(hess, std::move(rhs));
        double alpha = 1.0;
        for (int back = 0; back < 60; ++back) {
            FieldProfile trial = u;
            bool finite = true;
            for (std::size_t i = 0; i < trial.values.size(); ++i) {
                trial.values[i] += alpha * step[i];
                if (!std::isfinite(trial.values[i])) finite = false;
            }
            if (finite) {
                std::vector<double> gt = discrete_gradient(pot, trial);
                if (inf_norm(gt) < gn) {
                    u = std::move(trial);
                    g = std::move(gt);
                    break;
                }
            }
            alpha *= 0.5;
            if (back == 59) return std::nullopt; // stalled
        }
    }
    return inf_norm(g) <= tol ? std::optional<FieldProfile>(u) : std::nullopt;
}

} // namespace detail

/// Default seed set: constant profiles at every real critical point of V,
/// plus those constants perturbed by +-0.1 cos(k pi x), k = 1..4.
inline std::vector<FieldProfile> default_seeds(const Potential& pot, const Grid& grid) {
    std::vector<FieldProfile> seeds;
    for (double c : pot.critical_points()) {
        seeds.push_back(constant_profile(grid, c));
        for (int k = 1; k <= 4; ++k) {
            for (double sgn : {1.0, -1.0}) {
                FieldProfile p = constant_profile(grid, c);
                for (int i = 0; i < grid.n; ++i)
                    p.values[static_cast<std::size_t>(i)] +=
                        sgn * 0.1 * std::cos(k * M_PI * grid.nodes[static_cast<std::size_t>(i) + 1]);
                seeds.push_back(std::move(p));
            }
        }
    }
    return seeds;
}

/// Newton search from every seed, deduplicated (sup distance < dedup_tol)
/// and classified; sorted by energy then lexicographically, ids assigned in
/// that order.
inline std::vector<StationaryPoint> find_stationary_points(const Potential& pot, const Grid& grid,
                                                           const std::vector<FieldProfile>* seeds = nullptr,
                                                           const LandscapeOptions& opt = {}) {
    std::vector<FieldProfile> seed_set = seeds ? *seeds : default_seeds(pot, grid);
    std::vector<StationaryPoint> points;
    for (const FieldProfile& s : seed_set) {
        auto converged = detail::newton_stationary(pot, s, opt);
        if (!converged) continue;
        bool duplicate = false;
        for (const StationaryPoint& p : points)
            if (sup_distance(p.profile.values, converged->values) < opt.dedup_tol) {
                duplicate = true;
                break;
            }
        if (duplicate) continue;
        StationaryPoint p;
        p.profile = std::move(*converged);
        p.energy = discrete_energy(pot, p.profile);
        p.grad_norm = inf_norm(discrete_gradient(pot, p.profile));
        auto [index, neg] = classify_point(pot, p.profile, opt);
        p.index = index;
        p.neg_eigenvalue = neg;
        points.push_back(std::move(p));
    }
    std::sort(points.begin(), points.end(), [](const StationaryPoint& a, const StationaryPoint& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        return a.profile.values < b.profile.values;
    });
    for (std::size_t i = 0; i < points.size(); ++i) points[i].id = static_cast<int>(i);
    return points;
}

/// Endpoints of the heteroclinic orbits leaving an index-1 saddle: integrates
/// du/dt = -(1/h) grad S_N(u) from saddle +- delta v^- with adaptive explicit
/// stepping until capture by a known minimum in discrete L2.
inline std::pair<int, int> descend_connections(const Potential& pot, const Grid& grid, const StationaryPoint& saddle,
                                               const std::vector<StationaryPoint>& minima,
                                               const LandscapeOptions& opt = {}) {
    if (saddle.index != 1) throw std::invalid_argument("descend_connections requires an index-1 saddle");
    if (minima.empty()) throw std::invalid_argument("descend_connections requires candidate minima");
    TridiagonalOperator scaled = discrete_hessian(pot, saddle.profile, true);
    const double lam = saddle.neg_eigenvalue ? *saddle.neg_eigenvalue : tridiagonal_eigenvalue(scaled, 0);
    std::vector<double> v = tridiagonal_eigenvector(scaled, lam);

    auto flow_to_minimum = [&](double sgn) -> int {
        FieldProfile u = saddle.profile;
        for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] += sgn * opt.descent_delta * v[i];
        // stability-limited explicit step, grown/halved on energy monotonicity
        double vpp_max = 0.0;
        for (double y : u.values) vpp_max = std::max(vpp_max, std::abs(pot.eval(y, 2)));
        double dt = 1.0 / (4.0 * pot.gamma() / (grid.h * grid.h) + vpp_max + 1.0);
        double t = 0.0;
        double energy = discrete_energy(pot, u);
        while (t < opt.max_flow_time) {
            for (std::size_t m = 0; m < minima.size(); ++m)
                if (discrete_l2_distance(u.values, minima[m].profile.values) <= opt.capture_radius)
                    return static_cast<int>(m);
            std::vector<double> g = discrete_gradient(pot, u);
            FieldProfile trial = u;
            bool ok = true;
            for (std::size_t i = 0; i < trial.values.size(); ++i) {
                trial.values[i] -= dt / grid.h * g[i];
                if (!std::isfinite(trial.values[i])) ok = false;
            }
            double trial_energy = ok ? discrete_energy(pot, trial) : 0.0;
            if (!ok || trial_energy > energy) {
                dt *= 0.5;
                if (dt < 1e-14) throw ConnectionFailureError("descent step collapsed before capture");
                continue;
            }
            u = std::move(trial);
            energy = trial_energy;
            t += dt;
            dt *= 1.05;
        }
        throw ConnectionFailureError("descent exceeded max flow time without reaching a minimum");
    };

    return {flow_to_minimum(1.0), flow_to_minimum(-1.0)};
}

/// Minima as vertices (sorted by energy), index-1 saddles as edges, pairwise
/// saddle heights by bottleneck path search.
struct SkeletonGraph {
    struct Edge {
        StationaryPoint saddle;
        int a = -1, b = -1;
        bool self_loop = false;
    };
    std::vector<StationaryPoint> vertices;
    std::vector<Edge> edges;
    std::vector<std::vector<double>> minimax; // S-hat
    bool connected = true;
};

/// Bottleneck (minimax) heights over the edge set; diagonal holds the vertex
/// energies, unreachable pairs stay +inf and clear the connected flag.
inline void finalize_minimax(SkeletonGraph& g) {
    const std::size_t m = g.vertices.size();
    const double inf = std::numeric_limits<double>::infinity();
    g.connected = true;
    g.minimax.assign(m, std::vector<double>(m, inf));
    for (std::size_t i = 0; i < m; ++i) g.minimax[i][i] = g.vertices[i].energy;
    for (const auto& e : g.edges) {
        if (e.self_loop) continue;
        auto a = static_cast<std::size_t>(e.a), b = static_cast<std::size_t>(e.b);
        g.minimax[a][b] = std::min(g.minimax[a][b], e.saddle.energy);
        g.minimax[b][a] = g.minimax[a][b];
    }
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                double via = std::max(g.minimax[i][k], g.minimax[k][j]);
                if (via < g.minimax[i][j]) g.minimax[i][j] = via;
            }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (i != j && !std::isfinite(g.minimax[i][j])) g.connected = false;
}

inline SkeletonGraph build_skeleton(const Potential& pot, const Grid& grid,
                                    const std::vector<StationaryPoint>& points, const LandscapeOptions& opt = {}) {
    SkeletonGraph g;
    for (const StationaryPoint& p : points)
        if (p.index == 0) g.vertices.push_back(p);
    std::sort(g.vertices.begin(), g.vertices.end(), [](const StationaryPoint& a, const StationaryPoint& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        return a.profile.values < b.profile.values;
    });
    for (const StationaryPoint& p : points) {
        if (p.index != 1) continue;
        auto [ia, ib] = descend_connections(pot, grid, p, g.vertices, opt);
        SkeletonGraph::Edge e;
        e.saddle = p;
        e.a = ia;
        e.b = ib;
        e.self_loop = (ia == ib);
        g.edges.push_back(std::move(e));
    }
    finalize_minimax(g);
    return g;
}

/// Edges whose saddle lies within eta of the bottleneck height S-hat_0 between
/// source and the nearest target and which sit on some source->target path of
/// maximal height S-hat_0.
inline std::vector<SkeletonGraph::Edge> relevant_saddles(const SkeletonGraph& g, int source,
                                                         const std::set<int>& targets, double eta) {
    if (targets.empty()) throw std::invalid_argument("relevant_saddles needs at least one target");
    if (targets.count(source)) throw std::invalid_argument("source must not be a target");
    const std::size_t m = g.vertices.size();
    auto s = static_cast<std::size_t>(source);
    double height = std::numeric_limits<double>::infinity();
    for (int t : targets) {
        if (t < 0 || static_cast<std::size_t>(t) >= m) throw std::invalid_argument("target id out of range");
        if (!std::isfinite(g.minimax[s][static_cast<std::size_t>(t)]))
            throw DisconnectedGraphError("target " + std::to_string(t) + " unreachable from source");
        height = std::min(height, g.minimax[s][static_cast<std::size_t>(t)]);
    }
    // admissible subgraph: edges not above the bottleneck height
    const double pass = height + 1e-12 * (1.0 + std::abs(height));
    std::vector<char> from_source(m, 0), from_target(m, 0);
    auto sweep = [&](std::vector<char>& mark, std::vector<std::size_t> frontier) {
        for (std::size_t v : frontier) mark[v] = 1;
        while (!frontier.empty()) {
            std::size_t v = frontier.back();
            frontier.pop_back();
            for (const auto& e : g.edges) {
                if (e.self_loop || e.saddle.energy > pass) continue;
                auto a = static_cast<std::size_t>(e.a), b = static_cast<std::size_t>(e.b);
                std::size_t other = a == v ? b : (b == v ? a : v);
                if (other != v && !mark[other]) {
                    mark[other] = 1;
                    frontier.push_back(other);
                }
            }
        }
    };
    sweep(from_source, {s});
    std::vector<std::size_t> tset;
    for (int t : targets) tset.push_back(static_cast<std::size_t>(t));
    sweep(from_target, tset);

    std::vector<SkeletonGraph::Edge> out;
    for (const auto& e : g.edges) {
        if (e.self_loop || std::abs(e.saddle.energy - height) >= eta || e.saddle.energy > pass) continue;
        auto a = static_cast<std::size_t>(e.a), b = static_cast<std::size_t>(e.b);
        if ((from_source[a] && from_target[b]) || (from_source[b] && from_target[a])) out.push_back(e);
    }
    return out;
}

} // namespace kramers1d
