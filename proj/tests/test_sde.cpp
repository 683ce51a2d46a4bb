#include <gtest/gtest.h>

#include <cmath>

#include "lqz/sde.hpp"
#include "lqz/stats.hpp"

using namespace lqz;

TEST(Params, FromKappa) {
  auto p = Params::from_kappa(2.0);
  EXPECT_DOUBLE_EQ(p.gamma, std::sqrt(2.0));
  EXPECT_NEAR(p.Q, std::sqrt(2.0) / 2 + std::sqrt(2.0), 1e-15);
  auto q = Params::from_kappa(8.0);
  EXPECT_NEAR(q.gamma, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(Params::from_kappa(4.0).gamma, 2.0, 1e-15);
  EXPECT_THROW(Params::from_kappa(-1.0), DomainError);
  Params bad{1.0, 2.0, 2.5};
  EXPECT_THROW(bad.validate(), DomainError);
}

TEST(Threshold, Examples) {
  auto p = Params::from_kappa(3.0);
  std::vector<double> one{p.kappa / 2 + 4}, none{}, two{p.kappa / 4 + 2, p.kappa / 4 + 2};
  std::vector<double> below{p.kappa / 2 + 3.9};
  EXPECT_TRUE(continuation_threshold(one, p));
  EXPECT_FALSE(continuation_threshold(none, p));
  EXPECT_TRUE(continuation_threshold(two, p));
  EXPECT_FALSE(continuation_threshold(below, p));
}

TEST(ReverseSle, NoForcePointsVariance) {
  auto p = Params::from_kappa(4.0);
  const int n = 100000;
  std::vector<double> w1(n);
  for (int i = 0; i < n; ++i) {
    Stream s(77, i);
    auto st = simulate_reverse_sle(p, {}, 1.0, 0.01, s);
    w1[i] = st.driving.driving.back();
  }
  auto v = mc_variance(w1);
  EXPECT_LT(std::abs(v.mean - 4.0), 3 * v.std_error);
}

TEST(ReverseSle, ImmediateThreshold) {
  auto p = Params::from_kappa(2.0);
  std::vector<ForcePointSpec> fp{{p.kappa / 2 + 4, {0, 0}}};
  Stream s(1, 0);
  auto st = simulate_reverse_sle(p, fp, 1.0, 1e-3, s);
  EXPECT_TRUE(st.threshold_hit);
  EXPECT_EQ(st.threshold_time, 0.0);
  EXPECT_EQ(st.driving.driving.size(), 1u);
}

TEST(ReverseSle, BelowThresholdFreezesAndContinues) {
  auto p = Params::from_kappa(2.0);
  std::vector<ForcePointSpec> fp{{1.0, {0, 0}}};
  Stream s(1, 0);
  auto st = simulate_reverse_sle(p, fp, 0.1, 1e-3, s);
  EXPECT_FALSE(st.threshold_hit);
  EXPECT_TRUE(st.force_trajectories[0].collided);
  EXPECT_EQ(st.force_trajectories[0].collision_time, 0.0);
  EXPECT_EQ(st.driving.driving.size(), 101u);
}

TEST(ReverseSle, FarForcePointDriftBound) {
  auto p = Params::from_kappa(2.0);
  std::vector<ForcePointSpec> fp{{1.0, {1e6, 0}}};
  Stream s(2, 0);
  ReverseSleStepper st(p, fp, 1e-3, s);
  double sup = std::abs(st.drift());
  for (int k = 0; k < 1000; ++k) {
    st.step();
    sup = std::max(sup, std::abs(st.drift()));
  }
  EXPECT_LE(sup, 1.1e-6);
}

TEST(ReverseSle, QuadraticVariation) {
  auto p = Params::from_kappa(3.0);
  const double dt = 1e-4;
  std::vector<double> qv(100);
  for (int i = 0; i < 100; ++i) {
    Stream s(5, i);
    auto w = simulate_reverse_sle(p, {}, 1.0, dt, s).driving.driving;
    double q = 0;
    for (std::size_t k = 1; k < w.size(); ++k) q += (w[k] - w[k - 1]) * (w[k] - w[k - 1]);
    qv[i] = q;
  }
  auto e = mc_stats(qv);
  EXPECT_LT(std::abs(e.mean - 3.0), 3 * e.std_error + 1e-12);
}

TEST(ReverseSle, DriftRegression) {
  auto p = Params::from_kappa(4.0);
  std::vector<ForcePointSpec> fp{{2.0, {1, 1}}};
  const double dt = 1e-3;
  BinnedResidual br({-INFINITY, -1.0, -0.8, -0.6, INFINITY});
  for (int i = 0; i < 4000; ++i) {
    Stream s(6, i);
    ReverseSleStepper st(p, fp, dt, s);
    br.begin_path();
    for (int k = 0; k < 100; ++k) {
      double pred = st.drift(), w0 = st.W();
      st.step();
      br.add(pred, pred, (st.W() - w0) / dt);
    }
    br.end_path();
  }
  for (const auto& b : br.bins()) EXPECT_LT(std::abs(b.z), 4.0) << b.lo;
}

TEST(ReverseSle, TrajectoriesMatchReplayedFlow) {
  auto p = Params::from_kappa(2.0);
  std::vector<ForcePointSpec> fp{{0.0, {0.3, 0.8}}};
  Stream s(3, 3);
  auto st = simulate_reverse_sle(p, fp, 0.2, 1e-4, s);
  std::vector<Complex> z{fp[0].z};
  auto replay = reverse_flow(z, st.driving, 0, st.driving.duration(), false);
  EXPECT_NEAR(std::abs(replay[0].value() - st.force_trajectories[0].value()), 0, 1e-10);
}

TEST(ReverseSle, RejectsBadInput) {
  auto p = Params::from_kappa(2.0);
  Stream s(1, 1);
  EXPECT_THROW(simulate_reverse_sle(p, {}, 1.0, 0.0, s), DomainError);
  std::vector<ForcePointSpec> dup{{1, {1, 1}}, {2, {1, 1}}};
  EXPECT_THROW(simulate_reverse_sle(p, dup, 1.0, 1e-3, s), DomainError);
}

TEST(ReverseSle, SupTailReflectionPrinciple) {
  auto p = Params::from_kappa(2.0);
  const int n = 20000;
  const double dt = 1e-3;
  std::vector<double> sup(n);
  for (int i = 0; i < n; ++i) {
    Stream s(12, i);
    auto w = simulate_reverse_sle(p, {}, 1.0, dt, s).driving.driving;
    sup[i] = *std::max_element(w.begin(), w.end());
  }
  // Discrete-monitoring correction of the running maximum.
  const double shift = 0.5826 * std::sqrt(p.kappa * dt);
  double prev = 1.0;
  for (double x : {0.5, 1.0, 2.0, 3.0}) {
    std::vector<double> ind(n);
    for (int i = 0; i < n; ++i) ind[i] = sup[i] + shift > x ? 1.0 : 0.0;
    auto e = mc_stats(ind);
    double exact = 2 * (1 - normal_cdf(x / std::sqrt(p.kappa)));
    EXPECT_LT(std::abs(e.mean - exact), 4 * e.std_error + 2e-3) << x;
    EXPECT_LE(e.mean, prev);
    prev = e.mean;
  }
}

TEST(Crt, Constants) {
  EXPECT_NEAR(crt_a_sq(16.0), 2 * std::sqrt(2.0), 1e-12);
  Stream s(1, 0);
  auto c = sample_crt(Params::from_kappa(8.0), 0.01, 0.01, s);
  EXPECT_NEAR(-std::cos(c.theta), 0.0, 1e-15);
  EXPECT_THROW(sample_crt(Params::from_kappa(4.0), 1, 0.1, s), DomainError);
  EXPECT_THROW(sample_crt(Params::from_kappa(3.0), 1, 0.1, s), DomainError);
}

TEST(Crt, VarianceAndCovariance) {
  auto p = Params::from_kappa(6.0);
  const int n = 100000;
  std::vector<double> x(n), y(n);
  double a_sq = 0, th = 0;
  for (int i = 0; i < n; ++i) {
    Stream s(31, i);
    auto c = sample_crt(p, 1.0, 0.05, s);
    x[i] = c.X.back();
    y[i] = c.Y.back();
    a_sq = c.a_sq;
    th = c.theta;
  }
  auto vx = mc_variance(x), vy = mc_variance(y), cxy = mc_covariance(x, y);
  EXPECT_LT(std::abs(vx.mean - a_sq), 3 * vx.std_error);
  EXPECT_LT(std::abs(vy.mean - a_sq), 3 * vy.std_error);
  EXPECT_LT(std::abs(cxy.mean + a_sq * std::cos(th)), 3 * cxy.std_error);
}

TEST(Wedge, DriftAndNegativeHalf) {
  auto p = Params::from_gamma(1.5);
  EXPECT_NEAR(wedge_drift(2.0, p), p.Q - p.gamma, 1e-15);
  Stream s(4, 0);
  auto w = wedge_average_process(2.0, p, 5.0, 0.01, s);
  EXPECT_EQ(w.times[w.zero_index], 0.0);
  EXPECT_EQ(w.values[w.zero_index], 0.0);
  for (std::size_t k = 0; k < w.zero_index; ++k) EXPECT_LT(w.values[k], 0.0);
  EXPECT_THROW(wedge_average_process(0.5, p, 5.0, 0.01, s), DomainError);
}

TEST(Wedge, OccupationSmallB) {
  auto p = Params::from_gamma(1.5);
  const double a = wedge_drift(2.0, p), b = 2.0, dt = 0.01;
  std::vector<double> occ(4000);
  for (std::size_t i = 0; i < occ.size(); ++i) {
    Stream s(8, i);
    auto w = wedge_average_process(2.0, p, 30.0, dt, s);
    double o = 0;
    for (double v : w.values)
      if (v > 0 && v < b) o += dt;
    occ[i] = o;
  }
  auto e = mc_stats(occ);
  EXPECT_LT(std::abs(e.mean - b / a), 4 * e.std_error + 0.03 * b / a);
}
