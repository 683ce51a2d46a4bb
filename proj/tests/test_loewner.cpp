#include <gtest/gtest.h>

#include <cmath>

#include "lqz/loewner.hpp"
#include "lqz/rng.hpp"

using namespace lqz;

TEST(SlitMap, ClosedFormValues) {
  EXPECT_NEAR(std::abs(slit_map(Complex(0, 2), 0.25) - Complex(0, std::sqrt(5.0))), 0, 1e-15);
  EXPECT_NEAR(std::abs(slit_map(Complex(3, 0), 0.25) - std::sqrt(8.0)), 0, 1e-15);
  EXPECT_NEAR(std::abs(slit_map(Complex(-3, 0), 0.25) + std::sqrt(8.0)), 0, 1e-15);
  Complex z(-0.4, 0.3);
  EXPECT_NEAR(std::abs(slit_map_inverse(slit_map(z, 0.3), 0.3) - z), 0, 1e-14);
  EXPECT_GE(slit_map(z, 0.3).imag(), 0.0);
}

TEST(ReverseFlow, ZeroDriving) {
  auto ev = constant_driving(0.0, 0.25, 1e-4);
  std::vector<Complex> pts{{0, 2}, {3, 0}};
  auto out = reverse_flow(pts, ev, 0.0, 0.25);
  EXPECT_NEAR(std::abs(out[0].value() - Complex(0, 2.2360679774997897)), 0, 1e-10);
  EXPECT_NEAR(std::abs(out[1].value() - 2.8284271247461903), 0, 1e-10);
  EXPECT_FALSE(out[0].collided);
}

TEST(ReverseFlow, OracleGrid) {
  const double t = 0.25;
  auto ev = constant_driving(0.0, t, 1e-5);
  std::vector<Complex> pts;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 5; ++j) pts.emplace_back(-2.0 + 4.0 * i / 9, 0.1 + 0.5 * j);
  auto out = reverse_flow(pts, ev, 0, t, false);
  double err = 0;
  for (std::size_t k = 0; k < pts.size(); ++k)
    err = std::max(err, std::abs(out[k].value() - slit_map(pts[k], t)));
  EXPECT_LT(err, 1e-8);
}

TEST(ReverseFlow, ZeroDurationUnchanged) {
  Stream s(3, 0);
  LoewnerEvolution ev{{0.0, 0.1, -0.2, 0.05}, 0.01};
  std::vector<Complex> pts{{0.3, 0.4}, {2, 0}};
  auto out = reverse_flow(pts, ev, 0.02, 0.02);
  EXPECT_EQ(out[0].value(), pts[0]);
  EXPECT_EQ(out[1].value(), pts[1]);
}

TEST(ReverseFlow, ImmediateCollision) {
  auto ev = constant_driving(0.5, 0.1, 1e-3);
  std::vector<Complex> pts{{0.5, 0}};
  auto out = reverse_flow(pts, ev, 0, 0.1);
  EXPECT_TRUE(out[0].collided);
  EXPECT_EQ(out[0].collision_time, 0.0);
  auto zero = reverse_flow(pts, ev, 0, 0);
  EXPECT_TRUE(zero[0].collided);
}

TEST(ReverseFlow, RealPointSwallowedWithoutNaN) {
  // sqrt(x^2 - 4t) reaches the collision gap sqrt(dt) at t = (x^2 - dt)/4.
  const double dt = 1e-4;
  auto ev = constant_driving(0.0, 0.05, dt);
  std::vector<Complex> pts{{0.1, 0}};
  auto out = reverse_flow(pts, ev, 0, 0.05);
  EXPECT_TRUE(out[0].collided);
  EXPECT_NEAR(out[0].collision_time, (0.01 - dt) / 4, dt);
  for (auto v : out[0].trajectory) EXPECT_TRUE(std::isfinite(v.real()) && std::isfinite(v.imag()));
  for (auto v : out[0].derivative) EXPECT_TRUE(std::isfinite(v.real()));
}

TEST(ReverseFlow, StaysInUpperHalfPlane) {
  Stream s(4, 0);
  const double dt = 1e-3;
  std::vector<double> w{0.0};
  for (int k = 0; k < 500; ++k) w.push_back(w.back() + 2.0 * std::sqrt(dt) * s.normal());
  LoewnerEvolution ev{w, dt};
  std::vector<Complex> pts{{0.1, 0.01}, {-0.5, 0.2}, {1.0, 0}, {0, 1}};
  for (const auto& tp : reverse_flow(pts, ev, 0, ev.duration()))
    for (auto v : tp.trajectory) EXPECT_GE(v.imag(), 0.0);
}

TEST(ReverseFlow, DerivativeMatchesOracleAndFiniteDifference) {
  const double t = 0.3;
  auto ev = constant_driving(0.0, t, 1e-4);
  Complex z(0.4, 0.5);
  std::vector<Complex> pts{z};
  auto out = reverse_flow(pts, ev, 0, t);
  EXPECT_NEAR(std::abs(out[0].slope() - slit_map_derivative(z, t)), 0, 1e-9);

  // Sinusoidal driving, central differences of the flow itself.
  LoewnerEvolution sine;
  sine.dt = 1e-4;
  for (int k = 0; k <= 3000; ++k) sine.driving.push_back(0.5 * std::sin(10.0 * k * sine.dt));
  const double h = 1e-4;
  std::vector<Complex> st{z, z + h, z - h};
  auto fd = reverse_flow(st, sine, 0, sine.duration(), false);
  Complex diff = (fd[1].value() - fd[2].value()) / (2 * h);
  EXPECT_NEAR(std::abs(fd[0].slope() - diff), 0, 1e-6);
}

TEST(Hcap, ZeroDriving) {
  EXPECT_NEAR(hcap_estimate(constant_driving(0.0, 0.5, 1e-3)), 1.0, 1e-4);
  EXPECT_EQ(hcap_estimate(constant_driving(0.0, 0.0, 1e-3)), 0.0);
}

TEST(Hcap, BrownianAndSinusoidal) {
  Stream s(8, 0);
  const double dt = 1e-3;
  LoewnerEvolution bm{{0.0}, dt};
  for (int k = 0; k < 500; ++k) bm.driving.push_back(bm.driving.back() + 2 * std::sqrt(dt) * s.normal());
  EXPECT_NEAR(hcap_estimate(bm), 1.0, 1e-4);
  LoewnerEvolution sine{{}, dt};
  for (int k = 0; k <= 500; ++k) sine.driving.push_back(3.0 * std::sin(20.0 * k * dt));
  EXPECT_NEAR(hcap_estimate(sine), 1.0, 1e-4);
}

TEST(Hcap, Concatenation) {
  Stream s(8, 1);
  const double dt = 1e-3;
  LoewnerEvolution a{{0.0}, dt}, b{{0.0}, dt};
  for (int k = 0; k < 200; ++k) a.driving.push_back(a.driving.back() + 2 * std::sqrt(dt) * s.normal());
  for (int k = 0; k < 300; ++k) b.driving.push_back(b.driving.back() + 2 * std::sqrt(dt) * s.normal());
  auto ab = concatenate(a, b);
  EXPECT_NEAR(ab.duration(), 0.5, 1e-12);
  EXPECT_NEAR(hcap_estimate(ab), 1.0, 1e-4);
  EXPECT_NEAR(hcap_estimate(ab), hcap_estimate(a) + hcap_estimate(b), 1e-4);
}

TEST(Hcap, ComposedFlowMatchesSequentialFlows) {
  // g_{a then b}(z) = g_b(g_a(z)) with b's driving translated.
  LoewnerEvolution a{{0.0, 0.1, 0.15, 0.05}, 0.01}, b{{0.0, -0.2, -0.1}, 0.01};
  auto ab = concatenate(a, b);
  std::vector<Complex> z{{0.2, 0.7}};
  auto full = reverse_flow(z, ab, 0, ab.duration());
  auto mid = reverse_flow(z, ab, 0, a.duration());
  std::vector<Complex> zm{mid[0].value()};
  auto rest = reverse_flow(zm, ab, a.duration(), ab.duration());
  EXPECT_NEAR(std::abs(full[0].value() - rest[0].value()), 0, 1e-13);
}

TEST(Loewner, InvalidInputsRejected) {
  auto ev = constant_driving(0.0, 0.1, 1e-3);
  std::vector<Complex> below{{0, -1}};
  EXPECT_THROW(reverse_flow(below, ev, 0, 0.1), DomainError);
  std::vector<Complex> ok{{0, 1}};
  EXPECT_THROW(reverse_flow(ok, ev, 0.05, 0.01), DomainError);
  EXPECT_THROW(reverse_flow(ok, ev, 0, 0.2), DomainError);
}
