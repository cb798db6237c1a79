#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "kramers1d/errors.hpp"
#include "kramers1d/log_scalar.hpp"
#include "kramers1d/potential.hpp"

namespace kramers1d {

/// Number of eigenvalues of the symmetric tridiagonal operator strictly
/// below x (Sturm sequence / LDL^T sign count). IEEE-safe: zero pivots are
/// nudged and infinities propagate harmlessly through the recurrence.
inline int sturm_count_below(const TridiagonalOperator& op, double x) {
    int count = 0;
    double p = 1.0;
    for (std::size_t i = 0; i < op.dim; ++i) {
        double e2 = i > 0 ? op.off[i - 1] * op.off[i - 1] : 0.0;
        if (p == 0.0) p = std::numeric_limits<double>::min();
        p = (op.diag[i] - x) - e2 / p;
        if (p < 0.0) ++count;
    }
    return count;
}

inline int inertia_negative(const TridiagonalOperator& op) { return sturm_count_below(op, 0.0); }

namespace detail {
inline std::pair<double, double> gershgorin_bounds(const TridiagonalOperator& op) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < op.dim; ++i) {
        double r = (i > 0 ? std::abs(op.off[i - 1]) : 0.0) + (i + 1 < op.dim ? std::abs(op.off[i]) : 0.0);
        lo = std::min(lo, op.diag[i] - r);
        hi = std::max(hi, op.diag[i] + r);
    }
    return {lo, hi};
}
} // namespace detail

/// k-th eigenvalue (0-based, ascending) by bisection on the Sturm count,
/// run to near machine-width brackets.
inline double tridiagonal_eigenvalue(const TridiagonalOperator& op, int k) {
    if (k < 0 || static_cast<std::size_t>(k) >= op.dim) throw std::invalid_argument("eigenvalue index out of range");
    auto [lo, hi] = detail::gershgorin_bounds(op);
    lo -= 1.0;
    hi += 1.0;
    for (int it = 0; it < 140; ++it) {
        double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        if (sturm_count_below(op, mid) > k)
            hi = mid;
        else
            lo = mid;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max({1.0, std::abs(lo), std::abs(hi)})) break;
    }
    return 0.5 * (lo + hi);
}

/// All eigenvalues, ascending.
inline std::vector<double> tridiagonal_eigenvalues(const TridiagonalOperator& op) {
    std::vector<double> ev(op.dim);
    for (std::size_t k = 0; k < op.dim; ++k) ev[k] = tridiagonal_eigenvalue(op, static_cast<int>(k));
    return ev;
}

/// Determinant via the three-term characteristic recurrence with running
/// rescaling, carried as (log|det|, sign).
inline LogScalar tridiagonal_log_det(const TridiagonalOperator& op) {
    double prev = 1.0, cur = 1.0;
    double log_scale = 0.0;
    for (std::size_t i = 0; i < op.dim; ++i) {
        double e2 = i > 0 ? op.off[i - 1] * op.off[i - 1] : 0.0;
        double next = op.diag[i] * cur - e2 * prev;
        prev = cur;
        cur = next;
        double m = std::max(std::abs(prev), std::abs(cur));
        if (m > 1e150 || (m > 0.0 && m < 1e-150)) {
            prev /= m;
            cur /= m;
            log_scale += std::log(m);
        }
    }
    if (cur == 0.0) return LogScalar{-std::numeric_limits<double>::infinity(), 0};
    return LogScalar{log_scale + std::log(std::abs(cur)), cur > 0.0 ? 1 : -1};
}

/// Solve (T) x = b for general (possibly indefinite) tridiagonal T by
/// Gaussian elimination with partial pivoting between adjacent rows.
inline std::vector<double> tridiagonal_solve(const TridiagonalOperator& op, std::vector<double> b) {
    const std::size_t n = op.dim;
    if (b.size() != n) throw std::invalid_argument("rhs size mismatch");
    if (n == 0) return b;
    std::vector<double> d(op.diag), u1(n, 0.0), u2(n, 0.0), l(op.off);
    for (std::size_t i = 0; i + 1 < n; ++i) u1[i] = op.off[i];
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double sub = l[i];
        if (std::abs(sub) > std::abs(d[i])) { // swap rows i, i+1
            std::swap(d[i], sub);
            double t = u1[i];
            u1[i] = d[i + 1];
            d[i + 1] = t;
            if (i + 2 < n) {
                u2[i] = u1[i + 1];
                u1[i + 1] = 0.0;
            }
            std::swap(b[i], b[i + 1]);
        }
        if (d[i] == 0.0) d[i] = 1e-300;
        double m = sub / d[i];
        d[i + 1] -= m * u1[i];
        if (i + 2 < n) u1[i + 1] -= m * u2[i];
        b[i + 1] -= m * b[i];
    }
    if (d[n - 1] == 0.0) d[n - 1] = 1e-300;
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        if (i + 1 < n) s -= u1[i] * x[i + 1];
        if (i + 2 < n) s -= u2[i] * x[i + 2];
        x[i] = s / d[i];
    }
    return x;
}

/// Unit eigenvector for an isolated eigenvalue via shifted inverse iteration.
inline std::vector<double> tridiagonal_eigenvector(const TridiagonalOperator& op, double lambda) {
    const std::size_t n = op.dim;
    TridiagonalOperator shifted = op;
    double nudge = 1e-12 * std::max(1.0, op.inf_norm());
    for (std::size_t i = 0; i < n; ++i) shifted.diag[i] -= lambda + nudge;
    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    for (std::size_t i = 0; i < n; ++i) v[i] *= (i % 2 == 0 ? 1.0 : 1.0 - 1e-3); // break symmetry
    for (int it = 0; it < 4; ++it) {
        v = tridiagonal_solve(shifted, std::move(v));
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("inverse iteration failed");
        for (double& x : v) x /= norm;
    }
    // fix sign deterministically: first nonzero component positive
    for (double x : v) {
        if (std::abs(x) > 1e-14) {
            if (x < 0.0)
                for (double& y : v) y = -y;
            break;
        }
    }
    return v;
}

} // namespace kramers1d
