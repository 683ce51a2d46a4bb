#include <gtest/gtest.h>

#include <cmath>

#include "lqz/observables.hpp"
#include "lqz/rng.hpp"

using namespace lqz;

namespace {

// Mean of M_tau / M_0 along reverse SLE_kappa with the insertions as tracers.
MCEstimate martingale_ratio(const Params& p, const InsertionSpec& spec, double tau, double dt, int n,
                            std::uint64_t seed) {
  std::vector<ForcePointSpec> tracers;
  for (const auto& [a, z] : spec.points()) tracers.push_back({0.0, z});
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) {
    Stream rng(seed, i);
    ReverseSleStepper st(p, tracers, dt, rng);
    FlowSnapshot s0{st.W(), st.points()};
    const double m0 = log_martingale_M(s0, spec, p);
    const auto steps = std::llround(tau / dt);
    for (long k = 0; k < steps; ++k) st.step();
    r[i] = std::exp(log_martingale_M({st.W(), st.points()}, spec, p) - m0);
  }
  return mc_stats(r, seed);
}

}  // namespace

TEST(Observables, DeltaWeight) {
  const double Q = 2.3;
  for (double a : {-1.0, 0.2, 1.7})
    EXPECT_NEAR(delta_weight(a, Q), delta_weight(2 * Q - a, Q), 1e-14);
  EXPECT_NEAR(delta_weight(Q, Q), Q * Q / 4, 1e-14);
  EXPECT_EQ(delta_weight(0.0, Q), 0.0);
}

TEST(Observables, TimeZeroAndEmpty) {
  const Params p = Params::from_kappa(3.0);
  InsertionSpec empty;
  EXPECT_NEAR(martingale_M({0.4, {}}, empty, p), 1.0, 1e-15);
  InsertionSpec spec;
  spec.bulk.push_back({0.4, Complex(0.3, 1.1)});
  spec.boundary.push_back({0.5, 1.5});
  FlowSnapshot s{0.0, {FlowPoint{Complex(0.3, 1.1)}, FlowPoint{Complex(1.5, 0.0)}}};
  const double z = partition_Z({{-1 / p.sqrt_kappa(), 0.0}, {0.4, Complex(0.3, 1.1)}, {0.5, 1.5}});
  EXPECT_NEAR(martingale_M(s, spec, p), z, 1e-13 * z);
  s.points[1].collided = true;
  EXPECT_THROW(martingale_M(s, spec, p), SingularityError);
}

TEST(Observables, BulkMartingaleFlat) {
  for (double kappa : {2.0, 4.0}) {
    const Params p = Params::from_kappa(kappa);
    InsertionSpec spec;
    spec.bulk.push_back({0.3, Complex(0.0, 1.0)});
    auto e = martingale_ratio(p, spec, 0.1, 1e-3, 4000, 5);
    EXPECT_LT(std::abs(e.mean - 1), 4 * e.std_error + 2e-3) << kappa << " " << e.mean << " " << e.std_error;
  }
}

TEST(Observables, BoundaryMartingaleFlat) {
  const Params p = Params::from_kappa(2.0);
  InsertionSpec spec;
  spec.boundary.push_back({0.5, 1.5});
  auto e = martingale_ratio(p, spec, 0.05, 5e-4, 4000, 6);
  EXPECT_LT(std::abs(e.mean - 1), 4 * e.std_error + 2e-3) << e.mean << " " << e.std_error;
}

TEST(Observables, TrigResidual) {
  Stream rng(1, 0);
  for (int i = 0; i < 1000; ++i) {
    const double x = 20 * rng.uniform() - 10, th = 3 * rng.uniform();
    EXPECT_LT(std::abs(trig_residual(x, th)), 1e-12);
    EXPECT_LT(std::abs(trig_residual(Complex(x, rng.uniform() - 0.5), Complex(th, 0.0))), 1e-12);
  }
}

TEST(Observables, MuCouplingMatchesTrigForm) {
  Stream rng(2, 0);
  for (double gamma : {1.2, 1.5, 1.8}) {
    const Params p = Params::from_gamma(gamma);
    for (int i = 0; i < 200; ++i) {
      Complex sl(4 * rng.uniform() - 2, rng.uniform() - 0.5);
      auto c = CosmologicalCoupling::from_sigma_L(sl, p);
      auto d = CosmologicalCoupling::from_x(c.x, p);
      EXPECT_LT(std::abs(c.mu_L - d.mu_L), 1e-12);
      EXPECT_LT(std::abs(c.mu_R - d.mu_R), 1e-12);
      EXPECT_LT(std::abs(c.sigma_L - c.sigma_R + gamma / 4), 1e-14);
      EXPECT_LT(std::abs(crt_log_expectation(1.0, c, crt_a_sq(16 / (gamma * gamma)))), 1e-11);
    }
  }
  EXPECT_THROW(coupling_mu(0.3, Params::from_gamma(2.0)), DomainError);
  EXPECT_THROW(CosmologicalCoupling::from_x(0.3, Params::from_gamma(2.0)), DomainError);
}

TEST(Observables, CrtExpectationSmallN) {
  const Params p = Params::from_kappa(6.0);
  const double s = 0.5;
  auto c = CosmologicalCoupling::from_x(0.3, p);
  const int n = 20000;
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    Stream rng(3, i);
    auto path = sample_crt(p, s, s, rng);
    v[i] = std::real(crt_mtg_value(s, path.X.back(), path.Y.back(), c));
  }
  auto e = mc_stats(v);
  EXPECT_LT(std::abs(e.mean - 1), 4 * e.std_error) << e.mean;
}

TEST(Observables, GirsanovEmptySpecAndErrors) {
  const Params p = Params::from_kappa(2.0);
  std::vector<DrivingState> paths;
  for (int i = 0; i < 50; ++i) {
    Stream rng(4, i);
    paths.push_back(simulate_reverse_sle(p, {}, 0.02, 1e-3, rng));
  }
  InsertionSpec empty;
  auto r = girsanov_drift_check(paths, empty, p, 0.02, 1, 10);
  for (double w : r.weights) EXPECT_NEAR(w, 1.0, 1e-15);
  EXPECT_NEAR(r.ess, 50.0, 1e-9);
  EXPECT_THROW(girsanov_drift_check(paths, empty, p, 0.02, 1, 100), ConvergenceError);
  InsertionSpec one;
  one.bulk.push_back({0.3, Complex(0, 1)});
  EXPECT_THROW(girsanov_drift_check(paths, one, p, 0.02), DomainError);
}

TEST(Observables, GirsanovDriftSmallN) {
  const Params p = Params::from_kappa(2.0);
  InsertionSpec spec;
  spec.boundary.push_back({0.5, 1.5});
  std::vector<ForcePointSpec> tr{{0.0, Complex(1.5, 0.0)}};
  std::vector<DrivingState> paths;
  for (int i = 0; i < 3000; ++i) {
    Stream rng(7, i);
    paths.push_back(simulate_reverse_sle(p, tr, 0.05, 1e-3, rng));
  }
  auto r = girsanov_drift_check(paths, spec, p, 0.05, 5, 500);
  EXPECT_LT(r.max_abs_z, 4.0);
}
