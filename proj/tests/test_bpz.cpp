#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "lqz/bpz.hpp"
#include "lqz/observables.hpp"

using namespace lqz;

namespace {

CorrelationConfig small_config() {
  CorrelationConfig c;
  c.gamma = 1.5;
  c.beta_star = -2 / c.gamma;
  c.alpha = {1.2, 1.2};
  c.beta = {1.2};
  c.delta = -0.3;
  c.point.w = -0.6;
  c.point.z = {Complex(-0.5, 0.8), Complex(0.6, 1.1)};
  c.point.x = {0.8};
  c.mu = {0.0, 0.0};
  c.window.ymin = 0.1;
  c.window.ladder = {0.1, 0.05};
  c.window.inner_cell = 0.2;
  c.window.outer_cell = 0.5;
  c.samples = 300;
  return c;
}

}  // namespace

TEST(Bpz, SeibergExamples) {
  CorrelationConfig c;
  c.gamma = 1.5;
  c.beta_star = -c.gamma / 2;
  const double Q = c.Q();
  c.alpha = {Q - 0.1};
  c.delta = Q - 0.2;
  EXPECT_TRUE(seiberg_check(c).ok);
  c.alpha = {Q};
  EXPECT_FALSE(seiberg_check(c).ok);
  c.alpha = {Q / 2};
  c.beta = {Q / 2};
  c.delta = 2 * (Q - c.alpha[0] - c.beta[0] / 2 - c.beta_star / 2);
  EXPECT_NEAR(c.total_charge(), Q, 1e-15);
  auto r = seiberg_check(c);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.violations.size(), 1u);
  c.beta = {Q};
  EXPECT_FALSE(seiberg_check(c).ok);
}

TEST(Bpz, CIntegralClosedForms) {
  const double gamma = 1.5;
  for (double p : {0.1, 0.7, 2.0})
    for (double A : {1e-3, 0.8, 40.0}) {
      const double want = std::tgamma(p / gamma) * std::pow(A, -p / gamma) / gamma;
      EXPECT_NEAR(c_integral(A, 0.0, p, gamma), want, 1e-9 * want) << p << " " << A;
    }
  // Mixed area and length terms against tanh-sinh in t = e^{gamma c / 2}.
  boost::math::quadrature::tanh_sinh<double> ts;
  for (auto [A, M, p] : {std::tuple{0.5, 0.3, 0.4}, std::tuple{2.0, 5.0, 0.1}, std::tuple{1e-2, 1e-3, 1.3}}) {
    auto f = [&](double t) { return std::pow(t, 2 * p / gamma - 1) * std::exp(-A * t * t - M * t); };
    const double want = 2 / gamma * ts.integrate(f, 0.0, std::numeric_limits<double>::infinity());
    EXPECT_NEAR(c_integral(A, M, p, gamma), want, 1e-8 * want);
  }
  EXPECT_THROW(c_integral(0.0, 1.0, 0.5, gamma), DomainError);
  EXPECT_THROW(c_integral(1.0, 1.0, 0.0, gamma), DomainError);
}

TEST(Bpz, ConstantFunctionHasZeroResidual) {
  BpzPoint b;
  b.w = 0.3;
  std::vector<double> F(3, 2.75);
  EXPECT_EQ(bpz_apply(F, b, 0.1, -2 / 1.5, 2.0, {}, {}), 0.0);
}

TEST(Bpz, PolynomialOracleConverges) {
  const double gamma = 1.5, Q = gamma / 2 + 2 / gamma, bs = -2 / gamma, beta = 1.2, p = 2.5;
  BpzPoint b;
  b.w = -0.6;
  b.x = {0.8};
  auto F = [&](const BpzPoint& q) { return std::pow(q.x[0] - q.w, p); };
  const double d = b.x[0] - b.w;
  const double want = (p * (p - 1) / (bs * bs) - p + delta_weight(beta, Q)) * std::pow(d, p - 2);
  std::vector<double> beta_v{beta};
  auto err = [&](double h) {
    std::vector<double> v;
    for (const auto& q : bpz_stencil(b, h)) v.push_back(F(q));
    return std::abs(bpz_apply(v, b, h, bs, Q, {}, beta_v) - want);
  };
  for (double h : {0.2, 0.1, 0.05}) {
    const double ratio = err(h) / err(h / 2);
    EXPECT_GE(ratio, 3.0) << h;
    EXPECT_LE(ratio, 5.0) << h;
  }
  EXPECT_LT(err(0.01), 1e-4);
}

TEST(Bpz, BulkTermsMatchSymbolic) {
  // F = Re((z - w)^2) + (Im z)^3: F_ww = 2, F_x = 2(x - w), F_y = -2y + 3y^2.
  const double bs = -2 / 1.5, Q = 2.0, a = 0.7;
  BpzPoint b;
  b.w = 0.2;
  b.z = {Complex(-0.3, 0.9)};
  auto F = [](const BpzPoint& q) {
    const Complex d = q.z[0] - q.w;
    return std::real(d * d) + std::pow(q.z[0].imag(), 3);
  };
  std::vector<double> v;
  for (const auto& q : bpz_stencil(b, 1e-3)) v.push_back(F(q));
  const Complex z = b.z[0], dz = b.w - z;
  const double x = z.real(), y = z.imag();
  const double fx = 2 * (x - b.w), fy = -2 * y + 3 * y * y;
  const double want = 2 / (bs * bs) + std::real(Complex(fx, -fy) / dz) +
                      std::real(2 * delta_weight(a, Q) / (dz * dz)) * F(b);
  std::vector<double> al{a};
  EXPECT_NEAR(bpz_apply(v, b, 1e-3, bs, Q, al, {}), want, 1e-5);
}

TEST(Bpz, StencilErrors) {
  BpzPoint b;
  b.w = 0.0;
  b.x = {0.15};
  EXPECT_THROW(check_stencil(b, 0.1), DomainError);
  b.x = {0.5};
  b.z = {Complex(0.3, 0.05)};
  EXPECT_THROW(check_stencil(b, 0.1), DomainError);
  b.z = {Complex(0.3, 0.5)};
  EXPECT_NO_THROW(check_stencil(b, 0.1));
  std::vector<double> wrong(4, 1.0);
  EXPECT_THROW(bpz_apply(wrong, b, 0.1, -1, 2, std::vector<double>{0.3}, std::vector<double>{0.4}), DomainError);
}

TEST(Bpz, EstimateProperties) {
  const auto c = small_config();
  auto f = estimate_F(c, 3);
  EXPECT_TRUE(std::isfinite(f.value.mean));
  EXPECT_TRUE(std::isfinite(f.value.std_error));
  EXPECT_GT(f.value.mean, 0.0);
  EXPECT_LT(f.ladder_drift, 0.1);
  EXPECT_LT(f.tail_effect, 0.01);
  // The two orders of integration agree up to quadrature error.
  EXPECT_NEAR(estimate_F_swapped(c, f.tables) / f.value.mean, 1.0, 1e-8);

  // Relabeling the bulk insertions.
  auto r = c;
  std::swap(r.alpha[0], r.alpha[1]);
  std::swap(r.point.z[0], r.point.z[1]);
  EXPECT_NEAR(estimate_F(r, 3).value.mean / f.value.mean, 1.0, 1e-12);

  // Paired monotonicity in a boundary cosmological constant.
  auto m = c;
  m.mu = {0.0, 0.5};
  const double f1 = estimate_F(m, 3).value.mean;
  m.mu = {0.0, 1.0};
  const double f2 = estimate_F(m, 3).value.mean;
  EXPECT_LT(f1, f.value.mean);
  EXPECT_LT(f2, f1);
}

TEST(Bpz, EstimateErrors) {
  auto c = small_config();
  c.delta = -3.0;  // total charge below Q
  EXPECT_THROW(estimate_F(c, 1), DomainError);
  c = small_config();
  c.window.radius = 2.5;
  c.window.inner = 2.0;
  EXPECT_THROW(estimate_F(c, 1, 1e-4), ConvergenceError);
  c = small_config();
  c.beta_star = -1.0;
  EXPECT_THROW(estimate_F(c, 1), DomainError);
  c = small_config();
  c.gamma = std::sqrt(2.0);
  c.beta_star = -c.gamma / 2;
  EXPECT_EQ(c.validate().size(), 1u);
}
