#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "kramers1d/errors.hpp"
#include "kramers1d/potential.hpp"
#include "kramers1d/rng.hpp"
#include "kramers1d/tridiagonal.hpp"

namespace kramers1d {

enum class Scheme { SemiImplicit, Explicit };

/// Parameters of the lattice SDE
///   dX_i = [gamma (Lap X)_i - V'(X_i)] dt + sqrt(2 eps / h) dB_i.
/// SemiImplicit treats the stiff Laplacian part implicitly (one tridiagonal
/// solve per step, unconditionally stable); Explicit requires
/// dt <= h^2 / (4 gamma).
struct SimulationConfig {
    Potential potential = Potential::double_well(1.0, BoundaryCondition::Neumann);
    Grid grid;
    double epsilon = 0.1;
    double dt = 1e-3;
    double rho = 0.1;           // target-ball radius, discrete L2
    Scheme scheme = Scheme::SemiImplicit;
    std::uint64_t seed = 0;
    double max_time = 1e6;
    double sup_cap = 0.0; // blow-up guard; 0 disables

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
        if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
        if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");
        if (!(max_time > 0.0)) throw std::invalid_argument("max_time must be positive");
        if (scheme == Scheme::Explicit) {
            double stable = grid.h * grid.h / (4.0 * potential.gamma());
            if (dt > stable)
                throw std::invalid_argument("explicit scheme unstable: dt must be <= h^2/(4 gamma) = " +
                                            std::to_string(stable));
        }
    }
};

/// One trajectory outcome.
struct HittingSample {
    double tau = 0.0;
    std::uint64_t steps = 0;
    std::uint64_t seed = 0;
    std::uint64_t trajectory = 0;
    bool capped = false;
};

namespace detail {

/// Precomputed LU of I - dt gamma Lap (diagonally dominant, no pivoting).
struct SemiImplicitSolver {
    std::vector<double> diag, lower, upper;

    SemiImplicitSolver(const Potential& pot, const Grid& grid, double dt) {
        const std::size_t n = static_cast<std::size_t>(grid.n);
        const double c = dt * pot.gamma() / (grid.h * grid.h);
        diag.assign(n, 1.0 + 2.0 * c);
        lower.assign(n > 1 ? n - 1 : 0, -c);
        upper = lower;
        if (grid.bc == BoundaryCondition::Neumann) {
            diag.front() = 1.0 + (n == 1 ? 0.0 : c);
            diag.back() = 1.0 + (n == 1 ? 0.0 : c);
        }
        for (std::size_t i = 0; i + 1 < n; ++i) { // LU factorization in place
            lower[i] /= diag[i];
            diag[i + 1] -= lower[i] * upper[i];
        }
    }

    void solve(std::vector<double>& b) const {
        const std::size_t n = diag.size();
        for (std::size_t i = 1; i < n; ++i) b[i] -= lower[i - 1] * b[i - 1];
        b[n - 1] /= diag[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) b[i] = (b[i] - upper[i] * b[i + 1]) / diag[i];
    }
};

inline void apply_laplacian(const Grid& grid, const std::vector<double>& y, std::vector<double>& out) {
    const std::size_t n = y.size();
    const double inv_h2 = 1.0 / (grid.h * grid.h);
    const bool dirichlet = grid.bc == BoundaryCondition::Dirichlet;
    for (std::size_t i = 0; i < n; ++i) {
        double left = i > 0 ? y[i - 1] : (dirichlet ? 0.0 : y[0]);
        double right = i + 1 < n ? y[i + 1] : (dirichlet ? 0.0 : y[n - 1]);
        out[i] = (left - 2.0 * y[i] + right) * inv_h2;
    }
}

} // namespace detail

/// Single stepper bound to a config and a trajectory noise stream.
class FieldStepper {
public:
    FieldStepper(const SimulationConfig& cfg, std::uint64_t trajectory)
        : cfg_(cfg), noise_(cfg.seed, trajectory), trajectory_(trajectory) {
        cfg_.validate();
        if (cfg_.scheme == Scheme::SemiImplicit)
            solver_.emplace(cfg_.potential, cfg_.grid, cfg_.dt);
        scratch_.resize(static_cast<std::size_t>(cfg_.grid.n));
    }

    /// Advance the state by one step of size dt.
    void step(std::vector<double>& y, std::uint64_t step_index) const {
        const std::size_t n = y.size();
        const double dt = cfg_.dt;
        const double noise_scale = std::sqrt(2.0 * cfg_.epsilon * dt / cfg_.grid.h);
        if (cfg_.scheme == Scheme::SemiImplicit) {
            for (std::size_t i = 0; i < n; ++i) {
                double xi = cfg_.epsilon > 0.0 ? noise_.normal(step_index, static_cast<std::uint32_t>(i)) : 0.0;
                scratch_[i] = y[i] - dt * cfg_.potential.eval(y[i], 1) + noise_scale * xi;
            }
            solver_->solve(scratch_);
            y.swap(scratch_);
        } else {
            detail::apply_laplacian(cfg_.grid, y, scratch_);
            for (std::size_t i = 0; i < n; ++i) {
                double xi = cfg_.epsilon > 0.0 ? noise_.normal(step_index, static_cast<std::uint32_t>(i)) : 0.0;
                scratch_[i] = y[i] + dt * (cfg_.potential.gamma() * scratch_[i] - cfg_.potential.eval(y[i], 1)) +
                              noise_scale * xi;
            }
            y.swap(scratch_);
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!std::isfinite(y[i]))
                throw BlowUpError("non-finite state at step " + std::to_string(step_index) + " of trajectory " +
                                  std::to_string(trajectory_));
    }

    const SimulationConfig& config() const { return cfg_; }

private:
    SimulationConfig cfg_;
    NoiseStream noise_;
    std::uint64_t trajectory_;
    std::optional<detail::SemiImplicitSolver> solver_;
    mutable std::vector<double> scratch_;
};

/// One step of the field SDE (convenience wrapper over FieldStepper).
inline FieldProfile step_field(const FieldProfile& state, const SimulationConfig& cfg, std::uint64_t trajectory,
                               std::uint64_t step_index) {
    FieldStepper stepper(cfg, trajectory);
    FieldProfile next = state;
    stepper.step(next.values, step_index);
    return next;
}

/// Run one trajectory until the discrete L2 distance to some target drops
/// below rho, reporting physical time; capped at max_time.
inline HittingSample sample_hitting_time(const SimulationConfig& cfg, const FieldProfile& start,
                                         const std::vector<FieldProfile>& targets, std::uint64_t trajectory = 0) {
    cfg.validate();
    if (targets.empty()) throw std::invalid_argument("need at least one target profile");
    for (const auto& t : targets)
        if (discrete_l2_distance(start.values, t.values) <= cfg.rho)
            throw std::invalid_argument("start lies inside a target ball");

    FieldStepper stepper(cfg, trajectory);
    std::vector<double> y = start.values;
    const auto max_steps = static_cast<std::uint64_t>(std::ceil(cfg.max_time / cfg.dt));
    HittingSample out;
    out.seed = cfg.seed;
    out.trajectory = trajectory;
    for (std::uint64_t s = 0; s < max_steps; ++s) {
        stepper.step(y, s);
        if (cfg.sup_cap > 0.0 && inf_norm(y) > cfg.sup_cap)
            throw BlowUpError("state exceeded the sup-norm guard at step " + std::to_string(s));
        for (const auto& t : targets)
            if (discrete_l2_distance(y, t.values) <= cfg.rho) {
                out.steps = s + 1;
                out.tau = static_cast<double>(s + 1) * cfg.dt;
                return out;
            }
    }
    out.steps = max_steps;
    out.tau = static_cast<double>(max_steps) * cfg.dt;
    out.capped = true;
    return out;
}

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::vector<HittingSample> samples; // all, including capped
    int capped = 0;
};

/// Sample mean and standard error over `count` independent trajectories.
/// Trajectory j draws from the (seed, j) noise stream, so results are
/// identical for any worker count; capped runs are excluded from the mean
/// and more than 20% of them is an error.
inline MeanEstimate estimate_mean(const SimulationConfig& cfg, const FieldProfile& start,
                                  const std::vector<FieldProfile>& targets, int count, int jobs = 1) {
    if (count < 2) throw std::invalid_argument("need at least two samples");
    if (jobs < 1) jobs = 1;
    std::vector<HittingSample> samples(static_cast<std::size_t>(count));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&](int begin, int stride) {
        try {
            for (int j = begin; j < count; j += stride)
                samples[static_cast<std::size_t>(j)] =
                    sample_hitting_time(cfg, start, targets, static_cast<std::uint64_t>(j));
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    if (jobs == 1) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int w = 0; w < jobs; ++w) pool.emplace_back(worker, w, jobs);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    MeanEstimate est;
    est.samples = std::move(samples);
    double sum = 0.0;
    int used = 0;
    for (const auto& s : est.samples) {
        if (s.capped) {
            ++est.capped;
            continue;
        }
        sum += s.tau;
        ++used;
    }
    if (est.capped * 5 > count)
        throw UnreliableEstimateError(std::to_string(est.capped) + " of " + std::to_string(count) +
                                      " trajectories hit the time cap");
    if (used < 2) throw UnreliableEstimateError("fewer than two uncapped samples");
    est.mean = sum / used;
    double ss = 0.0;
    for (const auto& s : est.samples)
        if (!s.capped) ss += (s.tau - est.mean) * (s.tau - est.mean);
    est.std_error = std::sqrt(ss / (static_cast<double>(used) * (used - 1)));
    return est;
}

// ---------------------------------------------------------------------------
// Statistical validation
// ---------------------------------------------------------------------------

/// Asymptotic Kolmogorov distribution Q(t) = P(sup > t); the two standard
/// theta-series branches keep it accurate for both tails.
inline double kolmogorov_q(double t) {
    if (t <= 0.0) return 1.0;
    if (t < 1.18) {
        const double y = std::exp(-M_PI * M_PI / (8.0 * t * t));
        const double series =
            std::sqrt(2.0 * M_PI) / t * (y + std::pow(y, 9.0) + std::pow(y, 25.0) + std::pow(y, 49.0));
        return std::max(0.0, std::min(1.0, 1.0 - series));
    }
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        double term = 2.0 * (j % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * j * j * t * t);
        sum += term;
        if (std::abs(term) < 1e-16) break;
    }
    return std::max(0.0, std::min(1.0, sum));
}

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
    int n = 0;
};

/// One-sample KS test of samples/mean against the unit exponential law.
inline KsResult exponentiality_test(const std::vector<double>& samples) {
    if (samples.size() < 50) throw std::invalid_argument("exponentiality test needs at least 50 samples");
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= static_cast<double>(samples.size());
    if (!(mean > 0.0)) throw std::invalid_argument("samples must have positive mean");
    std::vector<double> x(samples);
    for (double& v : x) v /= mean;
    std::sort(x.begin(), x.end());
    const auto n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double cdf = 1.0 - std::exp(-x[i]);
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - cdf);
        d = std::max(d, cdf - static_cast<double>(i) / n);
    }
    KsResult r;
    r.statistic = d;
    r.n = static_cast<int>(x.size());
    r.p_value = kolmogorov_q(std::sqrt(n) * d);
    return r;
}

struct ArrheniusFit {
    double activation_energy = 0.0; // slope over 1/eps
    double ln_prefactor = 0.0;
    double r_squared = 1.0;
};

/// Least squares ln(mean) = ln A + E / eps; duplicate eps collapse by
/// averaging their means.
inline ArrheniusFit arrhenius_fit(std::vector<std::pair<double, double>> points) {
    std::sort(points.begin(), points.end());
    std::vector<std::pair<double, double>> merged; // (eps, mean of means)
    std::vector<int> counts;
    for (const auto& [eps, mean] : points) {
        if (!(eps > 0.0) || !(mean > 0.0)) throw std::invalid_argument("arrhenius_fit needs positive eps and means");
        if (!merged.empty() && merged.back().first == eps) {
            merged.back().second += mean;
            ++counts.back();
        } else {
            merged.emplace_back(eps, mean);
            counts.push_back(1);
        }
    }
    for (std::size_t i = 0; i < merged.size(); ++i) merged[i].second /= counts[i];
    if (merged.size() < 3) throw std::invalid_argument("arrhenius_fit needs at least 3 distinct epsilon values");
    const auto n = static_cast<double>(merged.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [eps, mean] : merged) {
        double x = 1.0 / eps, y = std::log(mean);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    ArrheniusFit fit;
    const double denom = n * sxx - sx * sx;
    fit.activation_energy = (n * sxy - sx * sy) / denom;
    fit.ln_prefactor = (sy - fit.activation_energy * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (const auto& [eps, mean] : merged) {
        double pred = fit.ln_prefactor + fit.activation_energy / eps;
        double resid = std::log(mean) - pred;
        ss_res += resid * resid;
    }
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

} // namespace kramers1d
