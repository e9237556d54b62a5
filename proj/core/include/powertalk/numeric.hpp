#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace powertalk {

/// Gaussian tail probability Q(x) = P(Z > x) for Z ~ N(0,1).
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct QuadratureNode {
    double x;  // abscissa on [-1, 1]
    double w;  // weight
};

/// Gauss-Legendre rule of the given order; nodes are computed once per order
/// and cached.
std::span<const QuadratureNode> gauss_legendre(int order);

/// Mean of f over r uniform on [lo, hi], by fixed-order Gauss-Legendre
/// quadrature (64 nodes unless overridden).
template <class F>
double uniform_mean(double lo, double hi, F&& f, int order = 64) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (const auto& n : gauss_legendre(order)) acc += n.w * f(mid + half * n.x);
    return 0.5 * acc;  // node weights sum to 2
}

/// Adaptive Simpson integration of f on [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12);

/// Binomial(n, p) probability mass at k; 0 outside [0, n].
inline double binomial_pmf(int n, int k, double p) {
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int j = 0; j < k; ++j) c *= double(n - j) / double(j + 1);
    return c * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

}  // namespace powertalk
