#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace kramers1d {

/// Real polynomial in ascending-coefficient form: p(x) = sum c[k] x^k.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

    const std::vector<double>& coefficients() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }

    double operator()(double x) const {
        double v = 0.0;
        for (std::size_t k = c_.size(); k-- > 0;) v = v * x + c_[k];
        return v;
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return Polynomial{{}};
        std::vector<double> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
        return Polynomial{std::move(d)};
    }

    /// Cauchy bound: all real roots lie in [-B, B].
    double root_bound() const {
        if (degree() < 1) return 0.0;
        double m = 0.0;
        for (int k = 0; k < degree(); ++k) m = std::max(m, std::abs(c_[k]));
        return 1.0 + m / std::abs(c_.back());
    }

    /// All real roots, ascending, deduplicated. Recursive monotone-interval
    /// subdivision: between consecutive critical points p is monotone, so a
    /// sign change brackets exactly one root.
    std::vector<double> real_roots() const {
        std::vector<double> roots;
        const int deg = degree();
        if (deg < 1) return roots;
        if (deg == 1) {
            roots.push_back(-c_[0] / c_[1]);
            return roots;
        }
        const double bound = root_bound();
        std::vector<double> knots = derivative().real_roots();
        knots.insert(knots.begin(), -bound);
        knots.push_back(bound);
        std::sort(knots.begin(), knots.end());

        const double tiny = 1e-12 * (1.0 + std::abs((*this)(bound)));
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            double a = knots[i], b = knots[i + 1];
            if (!(b > a)) continue;
            double fa = (*this)(a), fb = (*this)(b);
            if (std::abs(fa) < tiny) push_root(roots, a);
            if (fa * fb < 0.0) push_root(roots, bisect(a, b, fa));
        }
        if (std::abs((*this)(bound)) < tiny) push_root(roots, bound);
        std::sort(roots.begin(), roots.end());
        return roots;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    }

    double bisect(double a, double b, double fa) const {
        for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
            double m = 0.5 * (a + b), fm = (*this)(m);
            if (fm == 0.0) return m;
            if ((fa < 0.0) == (fm < 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        return 0.5 * (a + b);
    }

    static void push_root(std::vector<double>& roots, double r) {
        for (double existing : roots)
            if (std::abs(existing - r) < 1e-9 * (1.0 + std::abs(r))) return;
        roots.push_back(r);
    }

    std::vector<double> c_;
};

} // namespace kramers1d
