#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "kramers1d/polynomial.hpp"

namespace kramers1d {

enum class BoundaryCondition { Dirichlet, Neumann };

inline std::string to_string(BoundaryCondition bc) {
    return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

enum class PotentialKind { DoubleWell, Polynomial };

/// The local potential V together with the diffusion coefficient and the
/// boundary condition of the field equation
///   du/dt = gamma u_xx - V'(u) + sqrt(2 eps) * white noise.
///
/// V is polynomial with even leading degree >= 2 and positive leading
/// coefficient, which makes it convex at infinity; the built-in double well
/// is V(x) = x^4/4 - x^2/2.
class Potential {
public:
    static Potential double_well(double gamma, BoundaryCondition bc) {
        Potential p(Polynomial{{0.0, 0.0, -0.5, 0.0, 0.25}}, gamma, bc);
        p.kind_ = PotentialKind::DoubleWell;
        return p;
    }

    static Potential polynomial(std::vector<double> coeffs, double gamma, BoundaryCondition bc) {
        return Potential(Polynomial{std::move(coeffs)}, gamma, bc);
    }

    PotentialKind kind() const { return kind_; }
    double gamma() const { return gamma_; }
    BoundaryCondition bc() const { return bc_; }
    const Polynomial& v() const { return derivs_[0]; }

    /// V, V', V'' or V''' at x.
    double eval(double x, int order = 0) const {
        if (order < 0 || order > 3) throw std::invalid_argument("potential derivative order must be in 0..3");
        return derivs_[static_cast<std::size_t>(order)](x);
    }

    /// Real critical points of V (roots of V'), ascending.
    std::vector<double> critical_points() const { return derivs_[1].real_roots(); }

private:
    Potential(Polynomial v, double gamma, BoundaryCondition bc)
        : gamma_(gamma), bc_(bc), kind_(PotentialKind::Polynomial) {
        if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
        const int deg = v.degree();
        if (deg < 2 || deg % 2 != 0 || v.coefficients().back() <= 0.0)
            throw std::invalid_argument(
                "potential must have even leading degree >= 2 with positive leading coefficient");
        derivs_[0] = v;
        for (int k = 1; k <= 3; ++k) derivs_[static_cast<std::size_t>(k)] = derivs_[static_cast<std::size_t>(k - 1)].derivative();
    }

    Polynomial derivs_[4];
    double gamma_ = 1.0;
    BoundaryCondition bc_ = BoundaryCondition::Neumann;
    PotentialKind kind_ = PotentialKind::Polynomial;
};

/// Uniform grid of N interior points with step h and nodes x_0..x_{N+1}.
/// Dirichlet: h = 1/(N+1), x_i = i h; the end nodes are the boundary.
/// Neumann:   h = 1/N, x_i = (i - 1/2) h; x_0 and x_{N+1} are ghost nodes.
struct Grid {
    BoundaryCondition bc = BoundaryCondition::Neumann;
    int n = 0;
    double h = 0.0;
    std::vector<double> nodes;
};

inline Grid make_grid(BoundaryCondition bc, int n) {
    if (n < 1) throw std::invalid_argument("grid needs at least one interior point");
    Grid g;
    g.bc = bc;
    g.n = n;
    g.nodes.resize(static_cast<std::size_t>(n) + 2);
    if (bc == BoundaryCondition::Dirichlet) {
        g.h = 1.0 / (n + 1);
        for (int i = 0; i <= n + 1; ++i) g.nodes[static_cast<std::size_t>(i)] = i * g.h;
    } else {
        g.h = 1.0 / n;
        for (int i = 0; i <= n + 1; ++i) g.nodes[static_cast<std::size_t>(i)] = (i - 0.5) * g.h;
    }
    return g;
}

/// Discretized field: interior values y_1..y_N on a grid. Boundary/ghost
/// values are derived, never stored: Dirichlet y_0 = y_{N+1} = 0, Neumann
/// y_0 = y_1 and y_{N+1} = y_N.
struct FieldProfile {
    Grid grid;
    std::vector<double> values;

    FieldProfile() = default;
    FieldProfile(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if (static_cast<int>(values.size()) != grid.n)
            throw std::invalid_argument("profile length does not match grid");
        for (double y : values)
            if (!std::isfinite(y)) throw std::invalid_argument("profile values must be finite");
    }

    double left_boundary() const { return grid.bc == BoundaryCondition::Dirichlet ? 0.0 : values.front(); }
    double right_boundary() const { return grid.bc == BoundaryCondition::Dirichlet ? 0.0 : values.back(); }
};

inline FieldProfile constant_profile(const Grid& g, double c) {
    return FieldProfile(g, std::vector<double>(static_cast<std::size_t>(g.n), c));
}

/// Symmetric tridiagonal operator; `scale` records the multiplier applied
/// relative to the raw Hessian H S_N (1 for H S_N itself, 1/h for the
/// spectrally scaled operator -gamma Laplacian + diag V'').
struct TridiagonalOperator {
    std::size_t dim = 0;
    std::vector<double> diag;
    std::vector<double> off; // dim-1 entries
    double scale = 1.0;

    double inf_norm() const {
        double m = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            double row = std::abs(diag[i]);
            if (i > 0) row += std::abs(off[i - 1]);
            if (i + 1 < dim) row += std::abs(off[i]);
            m = std::max(m, row);
        }
        return m;
    }
};

namespace detail {
inline void check_profile(const Potential& pot, const FieldProfile& u) {
    if (u.grid.bc != pot.bc()) throw std::invalid_argument("profile boundary condition does not match potential");
    if (static_cast<int>(u.values.size()) != u.grid.n)
        throw std::invalid_argument("profile length does not match grid");
}
} // namespace detail

/// Discretized free energy
///   S_N(y) = (gamma/2h) sum_edges (y_{i+1}-y_i)^2 + h sum_{i=1..N} V(y_i),
/// with the edge range i=0..N for Dirichlet (zero boundary values) and
/// i=1..N-1 for Neumann. This edge/V-sum split is the convention under which
/// (1/h) grad S_N is exactly the deterministic drift of the lattice SDE.
inline double discrete_energy(const Potential& pot, const FieldProfile& u) {
    detail::check_profile(pot, u);
    const auto& y = u.values;
    const int n = u.grid.n;
    const double h = u.grid.h;
    double quad = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
        double d = y[static_cast<std::size_t>(i + 1)] - y[static_cast<std::size_t>(i)];
        quad += d * d;
    }
    if (u.grid.bc == BoundaryCondition::Dirichlet) {
        quad += y.front() * y.front();
        quad += y.back() * y.back();
    }
    double pots = 0.0;
    for (int i = 0; i < n; ++i) pots += pot.eval(y[static_cast<std::size_t>(i)], 0);
    return pot.gamma() / (2.0 * h) * quad + h * pots;
}

/// Exact gradient of S_N. Satisfies (1/h) grad S_N(u)_i = -gamma (Lap u)_i + V'(u_i)
/// with the standard second-difference Laplacian and the grid's boundary rule.
inline std::vector<double> discrete_gradient(const Potential& pot, const FieldProfile& u) {
    detail::check_profile(pot, u);
    const auto& y = u.values;
    const int n = u.grid.n;
    const double h = u.grid.h;
    const double gh = pot.gamma() / h;
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double yi = y[static_cast<std::size_t>(i)];
        double left = i > 0 ? y[static_cast<std::size_t>(i - 1)] : u.left_boundary();
        double right = i + 1 < n ? y[static_cast<std::size_t>(i + 1)] : u.right_boundary();
        g[static_cast<std::size_t>(i)] = gh * (2.0 * yi - left - right) + h * pot.eval(yi, 1);
    }
    return g;
}

/// Hessian of S_N as a symmetric tridiagonal operator. With `scaled` the
/// result is (1/h) H S_N = -gamma Lap + diag(V''(y_i)), whose eigenvalues
/// approximate the Sturm-Liouville spectrum of the continuum Hessian.
inline TridiagonalOperator discrete_hessian(const Potential& pot, const FieldProfile& u, bool scaled) {
    detail::check_profile(pot, u);
    const auto& y = u.values;
    const std::size_t n = y.size();
    const double h = u.grid.h;
    const double s = scaled ? 1.0 / h : 1.0;
    TridiagonalOperator op;
    op.dim = n;
    op.scale = s;
    op.diag.resize(n);
    op.off.assign(n > 1 ? n - 1 : 0, -s * pot.gamma() / h);
    const bool neumann = u.grid.bc == BoundaryCondition::Neumann;
    for (std::size_t i = 0; i < n; ++i) {
        double couplings = 2.0;
        if (neumann && (i == 0 || i + 1 == n)) couplings = (n == 1) ? 0.0 : 1.0;
        op.diag[i] = s * (couplings * pot.gamma() / h + h * pot.eval(y[i], 2));
    }
    return op;
}

/// Free energy S(phi) = int (gamma/2) phi'^2 + V(phi) of a continuum profile
/// sampled uniformly on [0,1]: trapezoid rule with second-order difference
/// derivatives (central inside, 3-point one-sided at the ends).
inline double continuum_energy(const Potential& pot, std::span<const double> samples) {
    const std::size_t m = samples.size();
    if (m < 2) throw std::invalid_argument("continuum_energy needs at least two samples");
    const double dx = 1.0 / static_cast<double>(m - 1);
    auto deriv = [&](std::size_t i) {
        if (i == 0) return (-3.0 * samples[0] + 4.0 * samples[1] - samples[2 < m ? 2 : 1]) / (2.0 * dx);
        if (i + 1 == m) return (3.0 * samples[m - 1] - 4.0 * samples[m - 2] + samples[m >= 3 ? m - 3 : m - 2]) / (2.0 * dx);
        return (samples[i + 1] - samples[i - 1]) / (2.0 * dx);
    };
    double total = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double d = m == 2 ? (samples[1] - samples[0]) / dx : deriv(i);
        double g = 0.5 * pot.gamma() * d * d + pot.eval(samples[i], 0);
        if (i > 0) total += 0.5 * dx * (prev + g);
        prev = g;
    }
    return total;
}

/// Discrete L2 norm |y|_2 / sqrt(N), the metric for capture balls.
inline double discrete_l2(std::span<const double> y) {
    double s = 0.0;
    for (double v : y) s += v * v;
    return std::sqrt(s / static_cast<double>(y.size()));
}

inline double discrete_l2_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(a.size()));
}

inline double sup_distance(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace kramers1d
