#pragma once

#include <functional>
#include <vector>

namespace wavekit::numeric {

using Fn = std::function<double(double)>;

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
double adaptive_simpson(const Fn& f, double a, double b, double tol,
                        int max_depth = 40);

/// Grid of n+1 points on [a, b] with cosine clustering at both endpoints.
std::vector<double> cosine_grid(double a, double b, int n);

/// Cumulative trapezoid integrals of the sampled values: out[i] holds the
/// integral from x[0] to x[i]. x and y must have equal size >= 1.
std::vector<double> cumulative_trapezoid(const std::vector<double>& x,
                                         const std::vector<double>& y);

/// Bisection root refinement on [lo, hi]; f(lo) and f(hi) must have
/// opposite signs. Stops when the bracket is narrower than xtol.
double bisect_root(const Fn& f, double lo, double hi, double xtol);

/// Golden-section minimisation of f on [lo, hi] to bracket width xtol.
/// Returns the abscissa of the minimum.
double golden_min(const Fn& f, double lo, double hi, double xtol);

/// Derivative of the middle sample of five (x, y) pairs by Lagrange
/// differentiation; the abscissae need not be uniform.
double lagrange5_derivative(const double x[5], const double y[5]);

}  // namespace wavekit::numeric
