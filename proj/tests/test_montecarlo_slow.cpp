#include <doctest.h>

#include <cmath>

#include "kramers1d/landscape.hpp"
#include "kramers1d/montecarlo.hpp"
#include "kramers1d/rates.hpp"

// Statistical checks of the sampler against the sharp-asymptotics prediction.
// Seeds are fixed; each case runs a few thousand transitions.

using namespace kramers1d;

namespace {

struct Setup {
    Potential pot = Potential::double_well(1.0, BoundaryCondition::Neumann);
    Grid grid = make_grid(BoundaryCondition::Neumann, 16);
    FieldProfile start;
    std::vector<FieldProfile> targets;
    double a_pred = 0.0, e_pred = 0.0;

    Setup() {
        auto graph = build_skeleton(pot, grid, find_stationary_points(pot, grid));
        start = graph.vertices[0].profile;
        targets = {graph.vertices[1].profile};
        auto est = transition_time_continuum(pot, graph, 0, {1}, 0.1);
        a_pred = est.prefactor;
        e_pred = est.activation_energy;
    }

    SimulationConfig config(double eps, std::uint64_t seed, double dt = 1e-3,
                            Scheme scheme = Scheme::SemiImplicit) const {
        SimulationConfig cfg;
        cfg.potential = pot;
        cfg.grid = grid;
        cfg.epsilon = eps;
        cfg.dt = dt;
        cfg.rho = 0.4;
        cfg.scheme = scheme;
        cfg.seed = seed;
        cfg.max_time = 50.0 * a_pred * std::exp(e_pred / eps);
        cfg.sup_cap = 20.0;
        return cfg;
    }
};

} // namespace

TEST_CASE("sample mean sits within a factor 3 of the sharp prediction") {
    Setup s;
    const double eps = 0.12;
    auto est = estimate_mean(s.config(eps, 814), s.start, s.targets, 500);
    const double predicted = s.a_pred * std::exp(s.e_pred / eps);
    CHECK(est.mean >= predicted / 3.0);
    CHECK(est.mean <= predicted * 3.0);
    CHECK(est.capped == 0);
}

TEST_CASE("standard error shrinks by sqrt(2) when the sample count doubles") {
    Setup s;
    auto half = estimate_mean(s.config(0.14, 271), s.start, s.targets, 250);
    auto full = estimate_mean(s.config(0.14, 271), s.start, s.targets, 500);
    const double ratio = full.std_error / half.std_error;
    const double want = 1.0 / std::sqrt(2.0);
    CHECK(ratio >= want * 0.7);
    CHECK(ratio <= want * 1.3);
}

TEST_CASE("halving dt leaves the mean within two combined standard errors") {
    Setup s;
    auto coarse = estimate_mean(s.config(0.12, 99), s.start, s.targets, 500);
    auto fine = estimate_mean(s.config(0.12, 99, 5e-4), s.start, s.targets, 500);
    const double band = 2.0 * std::sqrt(coarse.std_error * coarse.std_error + fine.std_error * fine.std_error);
    CHECK(std::abs(coarse.mean - fine.mean) <= band);
}

TEST_CASE("explicit and semi-implicit schemes agree at the stable step") {
    Setup s;
    const double dt_stable = s.grid.h * s.grid.h / (4.0 * s.pot.gamma()) * 0.95;
    auto semi = estimate_mean(s.config(0.12, 4242), s.start, s.targets, 500);
    auto expl = estimate_mean(s.config(0.12, 4242, dt_stable, Scheme::Explicit), s.start, s.targets, 500);
    const double band = 2.0 * std::sqrt(semi.std_error * semi.std_error + expl.std_error * expl.std_error);
    CHECK(std::abs(semi.mean - expl.mean) <= band);
}

TEST_CASE("transitions complete within the time cap at eps = 0.12") {
    Setup s;
    auto cfg = s.config(0.12, 31337);
    cfg.max_time = 1e4;
    int finite = 0;
    for (std::uint64_t traj = 0; traj < 100; ++traj) {
        auto sample = sample_hitting_time(cfg, s.start, s.targets, traj);
        if (!sample.capped && sample.tau > 0.0) ++finite;
    }
    CHECK(finite >= 99);
}
