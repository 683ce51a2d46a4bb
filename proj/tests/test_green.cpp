#include <gtest/gtest.h>

#include <boost/math/quadrature/trapezoidal.hpp>
#include <cmath>

#include "lqz/green.hpp"
#include "lqz/rng.hpp"

using namespace lqz;

TEST(GreenH, Examples) {
  EXPECT_EQ(green_H_inf(Complex(0, 1)), 0.0);
  EXPECT_NEAR(green_H_inf(Complex(0, 2)), 2 * std::log(2.0), 1e-15);
  EXPECT_THROW(green_H(Complex(1, 1), Complex(1, 1)), SingularityError);
  // Large |w|: G_H(z, w) -> G_H(z, inf).
  EXPECT_NEAR(green_H(Complex(0.3, 0.5), Complex(0, 1e7)), green_H_inf(Complex(0.3, 0.5)), 1e-6);
}

TEST(GreenH, SymmetricExactly) {
  Stream s(1, 0);
  for (int k = 0; k < 100; ++k) {
    Complex z(4 * s.uniform() - 2, 3 * s.uniform()), w(4 * s.uniform() - 2, 3 * s.uniform());
    EXPECT_EQ(green_H(z, w), green_H(w, z));
    EXPECT_EQ(green_neutral(z, w), green_neutral(w, z));
  }
}

TEST(GreenNeutral, Examples) {
  EXPECT_NEAR(green_neutral(Complex(0, 1), Complex(0, 2)), -std::log(3.0), 1e-15);
  EXPECT_NEAR(green_neutral(Complex(0.5, 0), Complex(2, 0)), -2 * std::log(1.5), 1e-15);
  EXPECT_THROW(green_neutral(Complex(1, 0), Complex(1, 0)), SingularityError);
}

TEST(Profile, EmptySpec) {
  const double Q = 2.5, c = 0.7;
  auto f = liouville_profile({}, Q, c);
  for (Complex z : {Complex(0.2, 0.3), Complex(3, 1), Complex(-5, 0.1)})
    EXPECT_NEAR(f(z), -2 * Q * log_plus(z) + c, 1e-14);
}

TEST(Profile, SingleBulkAndNeutrality) {
  const double Q = 2.5, a = 0.8;
  InsertionSpec s{{{a, {0, 1}}}, {}, 0.0};
  auto f = liouville_profile(s, Q, 0.1);
  EXPECT_NEAR(f(Complex(0, 2)), a * green_H(Complex(0, 2), Complex(0, 1)) - Q * 2 * std::log(2.0) + 0.1, 1e-14);
  EXPECT_THROW(f(Complex(0, 1)), SingularityError);

  InsertionSpec n{{{0.8, {0.5, 1}}, {0.6, {-1, 2}}}, {{0.4, 1.5}}, 0.0};
  n.delta_inf = Q - 0.8 - 0.6 - 0.4;
  auto g = liouville_profile(n, Q, 0.0);
  // Equal up to the constant sum_j 2 a_j log|z_j|_+, which the c-variable absorbs.
  const double shift = 0.8 * 2 * log_plus(Complex(0.5, 1)) + 0.6 * 2 * log_plus(Complex(-1, 2)) +
                       0.4 * 2 * log_plus(Complex(1.5, 0));
  for (Complex z : {Complex(0.2, 0.3), Complex(3, 1), Complex(-5, 0.1)}) {
    double neutral = 0.8 * green_neutral(z, Complex(0.5, 1)) + 0.6 * green_neutral(z, Complex(-1, 2)) +
                     0.4 * green_neutral(z, Complex(1.5, 0));
    EXPECT_NEAR(g(z), neutral + shift, 1e-13);
  }
}

TEST(NormalizationC, Examples) {
  const double Q = 2.3, a = 0.7;
  EXPECT_NEAR(normalization_C({{{a, {0, 1}}}, {}, 0}, Q), std::pow(2.0, -a * a / 2), 1e-15);
  InsertionSpec split{{{0.3, {1, 2}}, {0.5, {1, 2}}}, {}, 0.4};
  InsertionSpec joined{{{0.8, {1, 2}}}, {}, 0.4};
  EXPECT_NEAR(normalization_C(split, Q), normalization_C(joined, Q), 1e-15);
  EXPECT_EQ(normalization_C({}, Q), 1.0);
}

TEST(PartitionZ, Examples) {
  const double a = 0.9, b = -0.4, x = 2.5;
  EXPECT_NEAR(partition_Z({{a, {0, 1}}}), std::pow(2.0, -a * a / 2), 1e-15);
  EXPECT_EQ(partition_Z({{a, {3, 0}}}), 1.0);
  EXPECT_NEAR(partition_Z({{a, {0, 0}}, {b, {x, 0}}}), std::pow(x, -2 * a * b), 1e-14);
  EXPECT_NEAR(partition_Z({{0.2, {0, 1}}, {0.3, {0, 1}}}), partition_Z({{0.5, {0, 1}}}), 1e-15);
}

TEST(PartitionZ, EqualsCUnderNeutrality) {
  const double Q = 2.1;
  InsertionSpec s{{{0.5, {0.3, 0.9}}, {-0.2, {-1.2, 2.5}}}, {{0.6, 0.7}, {0.3, -2.0}}, 0};
  s.delta_inf = Q - s.total_charge();
  EXPECT_NEAR(log_normalization_C(s, Q), log_partition_Z(s.points()), 1e-13);
}

TEST(CircleGreen, MatchesQuadrature) {
  struct Case {
    Complex c;
    double eps;
    Complex p;
  };
  // Outside, enclosing, and crossing the unit circle; boundary p.
  for (Case k : {Case{{0.2, 0.5}, 0.1, {1, 1}}, Case{{0.2, 0.5}, 0.1, {0.22, 0.5}},
                 Case{{0.9, 0.5}, 0.3, {-0.4, 0.2}}, Case{{1.5, 0}, 0.5, {1.7, 0}},
                 Case{{0.7, 0.7}, 0.2, {2, 0}}}) {
    auto f = [&](double th) {
      Complex v = k.c + k.eps * std::polar(1.0, th);
      return -std::log(std::abs(v - k.p)) - std::log(std::abs(v - std::conj(k.p))) +
             2 * log_plus(v) + 2 * log_plus(k.p);
    };
    // Integrable log singularity when p lies on the contour is avoided by the cases.
    double q = 0;
    const int n = 400000;
    for (int i = 0; i < n; ++i) q += f(2 * pi * (i + 0.5) / n);
    q /= n;
    EXPECT_NEAR(circle_average_green_H(k.c, k.eps, k.p), q, 2e-8) << k.c << k.p;
  }
  EXPECT_NEAR(circle_log_plus({0, 0}, 0.5), 0.0, 1e-15);
  EXPECT_NEAR(circle_log_plus({0, 0}, 2.0), std::log(2.0), 1e-15);
  double q = boost::math::quadrature::trapezoidal(
      [](double th) { return log_plus(Complex(0.8, 0.4) + 0.5 * std::polar(1.0, th)); }, 0.0, 2 * pi, 1e-12);
  EXPECT_NEAR(circle_log_plus({0.8, 0.4}, 0.5), q / (2 * pi), 1e-6);
}
