#ifndef LQZ_QUADRATURE_HPP
#define LQZ_QUADRATURE_HPP

#include <functional>
#include <vector>

#include "lqz/types.hpp"

namespace lqz {

struct GaussRule {
  std::vector<double> x;  ///< nodes on [-1, 1]
  std::vector<double> w;
};

/// n-point Gauss-Legendre rule (cached, thread-safe).
const GaussRule& gauss_legendre(int n);

template <class F>
double integrate_gl(F&& f, double a, double b, int n) {
  const GaussRule& r = gauss_legendre(n);
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += r.w[i] * f(m + h * r.x[i]);
  return s * h;
}

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  ///< difference between the last two refinements
  int nodes = 0;
};

/// Average of a 2π-periodic function by trapezoid doubling until successive
/// estimates agree within tol. Throws ConvergenceError past max_nodes.
QuadResult periodic_average(const std::function<double(double)>& f, double tol, int n0,
                            int max_nodes);

/// Average over [0, π] of f(θ) whose even reflection is smooth and periodic,
/// e.g. a reflection-symmetric function on a half circle centred on the real line.
QuadResult half_circle_average(const std::function<double(double)>& f, double tol, int n0,
                               int max_nodes);

/// Integral over [a, b] by composite 16-point Gauss-Legendre, doubling the
/// panel count until successive estimates agree within tol.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double tol, int max_panels = 4096);

/// Average of f over the circle |v - c| = r, split at the given angles and
/// integrated piecewise by Gauss-Legendre; use for integrands with kinks.
double circle_average_split(const std::function<double(Complex)>& f, Complex c, double r,
                            std::vector<double> kinks, int n_per_arc = 24);

/// Average over the circle |v - c| = r of log max(|v - p|, s); exact up to
/// quadrature round-off (the integrand is analytic between its two kinks).
double circle_avg_log_max(Complex c, double r, Complex p, double s);

}  // namespace lqz

#endif
