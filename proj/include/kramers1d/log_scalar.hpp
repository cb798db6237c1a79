#pragma once

#include <cmath>
#include <cstdlib>

namespace kramers1d {

/// Signed scalar carried as (log|x|, sign). Determinants of large Hessians
/// under/overflow doubles (det H S^N ~ N^{-N} det of the scaled operator),
/// so every determinant-valued quantity travels in this form.
struct LogScalar {
    double log_abs = 0.0; // log|x|; -inf encodes zero
    int sign = 1;         // -1, 0, +1

    static LogScalar from_value(double x) {
        if (x == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
        return {std::log(std::abs(x)), x > 0 ? 1 : -1};
    }
    static LogScalar from_log(double log_abs, int sign) { return {log_abs, sign}; }

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
    bool is_zero() const { return sign == 0; }

    LogScalar operator*(const LogScalar& o) const {
        if (sign == 0 || o.sign == 0) return {-std::numeric_limits<double>::infinity(), 0};
        return {log_abs + o.log_abs, sign * o.sign};
    }
    LogScalar operator/(const LogScalar& o) const {
        return {log_abs - o.log_abs, sign * o.sign};
    }
    LogScalar abs() const { return {log_abs, sign == 0 ? 0 : 1}; }
    LogScalar sqrt_abs() const { return {0.5 * log_abs, sign == 0 ? 0 : 1}; }
};

} // namespace kramers1d
