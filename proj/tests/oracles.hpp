#pragma once

// Test-only oracles, kept independent of the library paths they check.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "kramers1d/potential.hpp"

namespace oracles {

/// Dense symmetric eigenvalues by classical Jacobi rotations.
inline std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

inline std::vector<std::vector<double>> dense(const kramers1d::TridiagonalOperator& op) {
    std::vector<std::vector<double>> a(op.dim, std::vector<double>(op.dim, 0.0));
    for (std::size_t i = 0; i < op.dim; ++i) {
        a[i][i] = op.diag[i];
        if (i + 1 < op.dim) a[i][i + 1] = a[i + 1][i] = op.off[i];
    }
    return a;
}

/// Central finite differences of the discrete energy.
inline std::vector<double> fd_gradient(const kramers1d::Potential& pot, const kramers1d::FieldProfile& u,
                                       double step = 1e-6) {
    std::vector<double> g(u.values.size());
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        kramers1d::FieldProfile up = u, dn = u;
        up.values[i] += step;
        dn.values[i] -= step;
        g[i] = (discrete_energy(pot, up) - discrete_energy(pot, dn)) / (2.0 * step);
    }
    return g;
}

/// Central finite differences of the gradient (dense Jacobian columns).
inline std::vector<std::vector<double>> fd_hessian(const kramers1d::Potential& pot,
                                                   const kramers1d::FieldProfile& u, double step = 1e-6) {
    const std::size_t n = u.values.size();
    std::vector<std::vector<double>> h(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        kramers1d::FieldProfile up = u, dn = u;
        up.values[j] += step;
        dn.values[j] -= step;
        auto gp = discrete_gradient(pot, up);
        auto gn = discrete_gradient(pot, dn);
        for (std::size_t i = 0; i < n; ++i) h[i][j] = (gp[i] - gn[i]) / (2.0 * step);
    }
    return h;
}

inline kramers1d::FieldProfile random_profile(const kramers1d::Grid& grid, std::mt19937& rng, double amp = 1.5) {
    std::uniform_real_distribution<double> dist(-amp, amp);
    kramers1d::FieldProfile u = kramers1d::constant_profile(grid, 0.0);
    for (auto& v : u.values) v = dist(rng);
    return u;
}

/// Second-difference Laplacian with the grid's boundary rule, written out
/// independently of the library.
inline std::vector<double> lattice_laplacian(const kramers1d::FieldProfile& u) {
    const auto n = u.values.size();
    std::vector<double> out(n);
    const double inv_h2 = 1.0 / (u.grid.h * u.grid.h);
    for (std::size_t i = 0; i < n; ++i) {
        double left = i > 0 ? u.values[i - 1] : u.left_boundary();
        double right = i + 1 < n ? u.values[i + 1] : u.right_boundary();
        out[i] = (left - 2.0 * u.values[i] + right) * inv_h2;
    }
    return out;
}

} // namespace oracles
