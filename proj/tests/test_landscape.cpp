#include <doctest.h>

#include <cmath>

#include "kramers1d/landscape.hpp"
#include "oracles.hpp"

using namespace kramers1d;

TEST_CASE("Neumann double well has exactly the three constant stationary points") {
    auto pot = Potential::double_well(1.0, BoundaryCondition::Neumann);
    auto grid = make_grid(BoundaryCondition::Neumann, 16);
    auto pts = find_stationary_points(pot, grid);
    REQUIRE(pts.size() == 3);

    // sorted by energy then profile: -1 constant, +1 constant, saddle 0
    CHECK(pts[0].energy == doctest::Approx(-0.25).epsilon(1e-13));
    CHECK(pts[1].energy == doctest::Approx(-0.25).epsilon(1e-13));
    CHECK(pts[2].energy == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(pts[0].index == 0);
    CHECK(pts[1].index == 0);
    CHECK(pts[2].index == 1);
    CHECK(sup_distance(pts[0].profile.values, constant_profile(grid, -1.0).values) < 1e-10);
    CHECK(sup_distance(pts[1].profile.values, constant_profile(grid, 1.0).values) < 1e-10);
    CHECK(sup_distance(pts[2].profile.values, constant_profile(grid, 0.0).values) < 1e-10);
    REQUIRE(pts[2].neg_eigenvalue.has_value());
    CHECK(*pts[2].neg_eigenvalue == doctest::Approx(-1.0).epsilon(1e-10));

    // constants with V'(c) = 0 come back with machine-zero gradients
    for (const auto& p : pts) CHECK(p.grad_norm <= 1e-13);
}

TEST_CASE("Dirichlet double well at gamma = 1 has only the zero profile") {
    auto pot = Potential::double_well(1.0, BoundaryCondition::Dirichlet);
    auto grid = make_grid(BoundaryCondition::Dirichlet, 16);
    auto pts = find_stationary_points(pot, grid);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].index == 0);
    // Newton stops at 1e-10 (1 + |grad at seed|), which bounds the profile
    // residual by tol / lambda_min ~ 1e-9 here
    CHECK(inf_norm(pts[0].profile.values) < 1e-7);
}

TEST_CASE("deduplication merges converging seeds and is idempotent") {
    auto pot = Potential::double_well(1.0, BoundaryCondition::Neumann);
    auto grid = make_grid(BoundaryCondition::Neumann, 12);
    std::vector<FieldProfile> seeds{constant_profile(grid, 1.0), constant_profile(grid, 1.0)};
    seeds[1].values[3] += 1e-9;
    auto pts = find_stationary_points(pot, grid, &seeds);
    CHECK(pts.size() == 1);

    auto all = find_stationary_points(pot, grid);
    std::vector<FieldProfile> again;
    for (const auto& p : all) again.push_back(p.profile);
    auto rerun = find_stationary_points(pot, grid, &again);
    REQUIRE(rerun.size() == all.size());
    for (std::size_t i = 0; i < all.size(); ++i)
        CHECK(sup_distance(rerun[i].profile.values, all[i].profile.values) < 1e-12);
}

TEST_CASE("classification against the closed-form spectrum and a dense oracle") {
    auto pot = Potential::double_well(1.0, BoundaryCondition::Neumann);
    auto grid = make_grid(BoundaryCondition::Neumann, 16);
    auto [idx0, neg0] = classify_point(pot, constant_profile(grid, 0.0));
    CHECK(idx0 == 1);
    REQUIRE(neg0.has_value());
    CHECK(*neg0 == doctest::Approx(-1.0).epsilon(1e-12));
    for (double c : {-1.0, 1.0}) {
        auto [idx, neg] = classify_point(pot, constant_profile(grid, c));
        CHECK(idx == 0);
        CHECK(!neg.has_value());
    }

    // brute-force Morse indices on a landscape with indices 0, 1 and 2
    auto pot_small = Potential::double_well(0.05, BoundaryCondition::Neumann);
    auto grid_small = make_grid(BoundaryCondition::Neumann, 24);
    for (const auto& p : find_stationary_points(pot_small, grid_small)) {
        auto dense = oracles::dense(discrete_hessian(pot_small, p.profile, true));
        int negatives = 0;
        for (double ev : oracles::jacobi_eigenvalues(dense))
            if (ev < 0.0) ++negatives;
        CHECK(p.index == negatives);
    }
}

TEST_CASE("degenerate landscape raises at the discrete bifurcation coefficient") {
    // N-point analogue of gamma = 1/pi^2: the lowest Dirichlet eigenvalue
    // 4 gamma (N+1)^2 sin^2(pi/(2(N+1))) - 1 vanishes exactly
    const int n = 16;
    const double s = std::sin(M_PI / (2.0 * (n + 1)));
    const double gamma_star = 1.0 / (4.0 * (n + 1.0) * (n + 1.0) * s * s);
    auto pot = Potential::polynomial({0.0, 0.0, -0.5, 0.0, 0.25}, gamma_star, BoundaryCondition::Dirichlet);
    auto grid = make_grid(BoundaryCondition::Dirichlet, n);
    CHECK_THROWS_AS(classify_point(pot, constant_profile(grid, 0.0)), DegenerateLandscapeError);
}

TEST_CASE("descent connects the saddle to both wells") {
    auto pot = Potential::double_well(1.0, BoundaryCondition::Neumann);
    auto grid = make_grid(BoundaryCondition::Neumann, 16);
    auto pts = find_stationary_points(pot, grid);
    std::vector<StationaryPoint> minima{pts[0], pts[1]};
    auto [a, b] = descend_connections(pot, grid, pts[2], minima);
    CHECK(a != b);
    CHECK(std::min(a, b) == 0);
    CHECK(std::max(a, b) == 1);

    // flipping the offset sign swaps the order, not the set
    LandscapeOptions flipped;
    flipped.descent_delta = -flipped.descent_delta;
    auto [a2, b2] = descend_connections(pot, grid, pts[2], minima, flipped);
    CHECK(a2 == b);
    CHECK(b2 == a);

    CHECK_THROWS_AS(descend_connections(pot, grid, pts[0], minima), std::invalid_argument);
}

TEST_CASE("skeleton of the double well") {
    auto pot = Potential::double_well(1.0, BoundaryCondition::Neumann);
    auto grid = make_grid(BoundaryCondition::Neumann, 16);
    auto graph = build_skeleton(pot, grid, find_stationary_points(pot, grid));
    REQUIRE(graph.vertices.size() == 2);
    REQUIRE(graph.edges.size() == 1);
    CHECK(!graph.edges[0].self_loop);
    CHECK(graph.connected);
    CHECK(graph.minimax[0][1] == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(graph.minimax[1][0] == graph.minimax[0][1]);
    CHECK(graph.minimax[0][0] == doctest::Approx(-0.25));
    CHECK(graph.minimax[1][1] == doctest::Approx(-0.25));
}

namespace {
// three minima in a row with saddles at heights 1 and 2
SkeletonGraph synthetic_chain() {
    auto grid = make_grid(BoundaryCondition::Neumann, 4);
    SkeletonGraph g;
    for (int i = 0; i < 3; ++i) {
        StationaryPoint m;
        m.profile = constant_profile(grid, static_cast<double>(i));
        m.energy = 0.0;
        m.index = 0;
        m.id = i;
        g.vertices.push_back(m);
    }
    auto add_edge = [&](double height, int a, int b, int id) {
        StationaryPoint s;
        s.profile = constant_profile(grid, 0.5);
        s.energy = height;
        s.index = 1;
        s.neg_eigenvalue = -1.0;
        s.id = id;
        g.edges.push_back({s, a, b, false});
    };
    add_edge(1.0, 0, 1, 3);
    add_edge(2.0, 1, 2, 4);
    finalize_minimax(g);
    return g;
}
} // namespace

TEST_CASE("minimax heights on a synthetic chain") {
    auto g = synthetic_chain();
    CHECK(g.minimax[0][2] == doctest::Approx(2.0));
    CHECK(g.minimax[0][1] == doctest::Approx(1.0));
    // symmetry and the ultrametric inequality over all triples
    const std::size_t m = g.vertices.size();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            CHECK(g.minimax[i][j] == g.minimax[j][i]);
            for (std::size_t k = 0; k < m; ++k)
                CHECK(g.minimax[i][j] <= std::max(g.minimax[i][k], g.minimax[k][j]) + 1e-12);
        }
}

TEST_CASE("relevant saddles select the bottleneck band") {
    auto pot = Potential::double_well(1.0, BoundaryCondition::Neumann);
    auto grid = make_grid(BoundaryCondition::Neumann, 16);
    auto graph = build_skeleton(pot, grid, find_stationary_points(pot, grid));
    auto edges = relevant_saddles(graph, 0, {1}, 1e-8);
    REQUIRE(edges.size() == 1);

    auto chain = synthetic_chain();
    auto tight = relevant_saddles(chain, 0, {2}, 1e-8);
    REQUIRE(tight.size() == 1);
    CHECK(tight[0].saddle.energy == doctest::Approx(2.0));
    auto broad = relevant_saddles(chain, 0, {2}, 10.0);
    CHECK(broad.size() == 2); // widening eta only adds edges

    CHECK_THROWS_AS(relevant_saddles(chain, 0, {}, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(relevant_saddles(chain, 0, {0, 2}, 1e-8), std::invalid_argument);

    SkeletonGraph disconnected = chain;
    disconnected.edges.pop_back(); // vertex 2 unreachable
    finalize_minimax(disconnected);
    CHECK(!disconnected.connected);
    CHECK_THROWS_AS(relevant_saddles(disconnected, 0, {2}, 1e-8), DisconnectedGraphError);

    // the bottleneck tolerance must also admit edges at deeply negative heights
    SkeletonGraph shifted = chain;
    for (auto& v : shifted.vertices) v.energy -= 100.0;
    for (auto& e : shifted.edges) e.saddle.energy -= 100.0;
    finalize_minimax(shifted);
    CHECK(relevant_saddles(shifted, 0, {2}, 1e-8).size() == 1);
}

TEST_CASE("stationary points satisfy the gradient tolerance") {
    for (double gamma : {1.0, 0.05}) {
        auto pot = Potential::double_well(gamma, BoundaryCondition::Dirichlet);
        auto grid = make_grid(BoundaryCondition::Dirichlet, 20);
        for (const auto& p : find_stationary_points(pot, grid)) CHECK(p.grad_norm <= 1e-9);
    }
}
