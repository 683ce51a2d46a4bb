#include <gtest/gtest.h>

#include <cmath>

#include "lqz/quadrature.hpp"

using namespace lqz;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  for (int n : {1, 2, 5, 16, 33}) {
    int deg = 2 * n - 1;
    double v = integrate_gl([&](double x) { return std::pow(x, deg - (deg % 2)); }, -1, 1, n);
    double exact = 2.0 / (deg - (deg % 2) + 1);
    EXPECT_NEAR(v, exact, 1e-13) << n;
  }
  EXPECT_NEAR(integrate_gl([](double x) { return std::exp(x); }, 0, 1, 20), std::exp(1.0) - 1, 1e-14);
}

TEST(PeriodicAverage, ConvergesSpectrally) {
  auto r = periodic_average([](double t) { return std::exp(std::cos(t)); }, 1e-13, 8, 1 << 12);
  EXPECT_NEAR(r.value, std::cyl_bessel_i(0.0, 1.0), 1e-13);
}

TEST(PeriodicAverage, ThrowsWhenUnreachable) {
  auto f = [](double t) { return std::abs(std::sin(t)); };
  EXPECT_THROW(periodic_average(f, 1e-14, 8, 64), ConvergenceError);
}

TEST(HalfCircle, EvenFunction) {
  auto r = half_circle_average([](double t) { return std::cos(2 * t) + 3.0; }, 1e-13, 8, 1 << 10);
  EXPECT_NEAR(r.value, 3.0, 1e-13);
}

TEST(CircleAvgLogMax, ClosedFormCases) {
  // Mean value: avg log|v - p| = log max(|c - p|, r).
  EXPECT_NEAR(circle_avg_log_max({0, 0}, 1.0, {3, 0}, 0.5), std::log(3.0), 1e-14);
  EXPECT_NEAR(circle_avg_log_max({0, 0}, 2.0, {0.5, 0}, 0.1), std::log(2.0), 1e-14);
  EXPECT_NEAR(circle_avg_log_max({0, 0}, 0.1, {0.05, 0}, 1.0), 0.0, 1e-14);
}

TEST(CircleAvgLogMax, MixedCaseMatchesBruteForce) {
  Complex c(0.3, 0.7), p(0.9, 0.6);
  double r = 0.5, s = 0.3;
  double brute = 0;
  const int n = 2000000;
  for (int k = 0; k < n; ++k) {
    Complex v = c + r * std::polar(1.0, 2 * pi * (k + 0.5) / n);
    brute += std::log(std::max(std::abs(v - p), s));
  }
  brute /= n;
  EXPECT_NEAR(circle_avg_log_max(c, r, p, s), brute, 1e-10);
}
