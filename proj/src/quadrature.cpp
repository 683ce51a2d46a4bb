#include "lqz/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace lqz {

namespace {

GaussRule build_gauss(int n) {
  // Newton iteration on the Legendre recurrence, Chebyshev initial guesses.
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (n == 1) {
    r.x[0] = 0.0;
    r.w[0] = 2.0;
  }
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  static std::mutex m;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> g(m);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_gauss(n));
  return *slot;
}

QuadResult periodic_average(const std::function<double(double)>& f, double tol, int n0,
                            int max_nodes) {
  int n = std::max(4, n0);
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += f(2 * pi * k / n);
  double prev = sum / n;
  while (n < max_nodes) {
    // Doubling reuses the previous nodes.
    for (int k = 0; k < n; ++k) sum += f(2 * pi * (k + 0.5) / n);
    n *= 2;
    double cur = sum / n;
    double err = std::abs(cur - prev);
    if (err < tol) return {cur, err, n};
    prev = cur;
  }
  throw ConvergenceError("periodic_average: no convergence", std::abs(sum / n - prev));
}

QuadResult half_circle_average(const std::function<double(double)>& f, double tol, int n0,
                               int max_nodes) {
  // Trapezoid on [0, π] with half-weight endpoints equals the periodic rule
  // applied to the even reflection.
  int n = std::max(4, n0);
  double ends = 0.5 * (f(0.0) + f(pi));
  double inner = 0.0;
  for (int k = 1; k < n; ++k) inner += f(pi * k / n);
  double prev = (ends + inner) / n;
  while (2 * n <= max_nodes) {
    for (int k = 0; k < n; ++k) inner += f(pi * (k + 0.5) / n);
    n *= 2;
    double cur = (ends + inner) / n;
    double err = std::abs(cur - prev);
    if (err < tol) return {cur, err, n + 1};
    prev = cur;
  }
  throw ConvergenceError("half_circle_average: no convergence",
                         std::abs((ends + inner) / n - prev));
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double tol, int max_panels) {
  auto panels = [&](int n) {
    double s = 0.0, h = (b - a) / n;
    for (int k = 0; k < n; ++k) s += integrate_gl(f, a + k * h, a + (k + 1) * h, 16);
    return s;
  };
  double prev = panels(1);
  for (int n = 2; n <= max_panels; n *= 2) {
    double cur = panels(n);
    double err = std::abs(cur - prev);
    if (err < tol) return {cur, err, 16 * n};
    prev = cur;
  }
  throw ConvergenceError("integrate_adaptive: no convergence", std::abs(prev - panels(max_panels / 2)));
}

double circle_average_split(const std::function<double(Complex)>& f, Complex c, double r,
                            std::vector<double> kinks, int n_per_arc) {
  for (double& k : kinks) {
    k = std::fmod(k, 2 * pi);
    if (k < 0) k += 2 * pi;
  }
  std::sort(kinks.begin(), kinks.end());
  if (kinks.empty()) kinks.push_back(0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < kinks.size(); ++i) {
    double a = kinks[i];
    double b = (i + 1 < kinks.size()) ? kinks[i + 1] : kinks[0] + 2 * pi;
    if (b - a <= 0) continue;
    total += integrate_gl([&](double t) { return f(c + r * std::polar(1.0, t)); }, a, b, n_per_arc);
  }
  return total / (2 * pi);
}

double circle_avg_log_max(Complex c, double r, Complex p, double s) {
  const double d = std::abs(c - p);
  if (d - r >= s) return std::log(std::max(d, r));
  if (d + r <= s) return std::log(s);
  if (r - d >= s) return std::log(r);
  const double psi = std::arg(c - p);
  double cs = (s * s - d * d - r * r) / (2 * d * r);
  cs = std::clamp(cs, -1.0, 1.0);
  const double a = std::acos(cs);
  auto f = [&](Complex v) { return std::log(std::max(std::abs(v - p), s)); };
  return circle_average_split(f, c, r, {psi - a, psi + a}, 32);
}

}  // namespace lqz
