#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <memory>

#include "lqz/gmc.hpp"
#include "lqz/sde.hpp"
#include "lqz/stats.hpp"

using namespace lqz;
using boost::math::quadrature::gauss_kronrod;

namespace {

// Exact E[mass_eps] of the base field on a grid: sum eps^{g^2/2} exp(g^2 Var/2) dA.
double area_expectation(const AreaGrid& g, double gamma, double eps) {
  double s = 0.0;
  for (Complex z : g.centers()) {
    CircleFunctional c{z, eps};
    s += std::exp(gamma * gamma * circle_covariance(c, c) / 2);
  }
  return std::pow(eps, gamma * gamma / 2) * g.cell_area() * s;
}

}  // namespace

TEST(Gmc, AreaOracleMatchesBoost) {
  const Rect r{-1, 1, 0.25, 1};
  for (double gamma : {0.5, 1.0, 1.5}) {
    const double g2 = gamma * gamma;
    auto inner = [&](double y) {
      auto f = [&](double x) {
        double a = std::hypot(x, y);
        return std::pow(2 * y, -g2 / 2) * std::pow(std::max(a, 1.0), 2 * g2);
      };
      const double k = std::sqrt(1 - y * y);
      return gauss_kronrod<double, 31>::integrate(f, -1.0, -k, 8, 1e-12) +
             gauss_kronrod<double, 31>::integrate(f, -k, k, 8, 1e-12) +
             gauss_kronrod<double, 31>::integrate(f, k, 1.0, 8, 1e-12);
    };
    double want = gauss_kronrod<double, 31>::integrate(inner, 0.25, 1.0, 10, 1e-11);
    EXPECT_NEAR(area_first_moment(r, gamma), want, 1e-8 * want) << gamma;
  }
}

TEST(Gmc, ShiftCovarianceExact) {
  auto d = std::make_shared<Discretization>();
  AreaGrid g{{-1, 1, 0.25, 1}, 8, 4};
  LengthGrid lg{1, 2, 10};
  auto ladder = geometric_ladder(0.2, 4);
  register_area_functionals(*d, g, ladder);
  register_length_functionals(*d, lg, ladder);
  CholeskySampler s(d);
  Stream rng(2, 0);
  auto f = s.sample(rng);
  const double gamma = 1.3, c = 0.7;
  auto a0 = quantum_area(f, g, gamma, ladder), a1 = quantum_area(f.shifted(c), g, gamma, ladder);
  auto l0 = quantum_length(f, lg, gamma, ladder), l1 = quantum_length(f.shifted(c), lg, gamma, ladder);
  ASSERT_EQ(a0.masses.size(), 4u);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_GT(a0.masses[k], 0.0);
    EXPECT_TRUE(std::isfinite(a0.masses[k]));
    EXPECT_NEAR(a1.masses[k] / a0.masses[k], std::exp(gamma * c), 1e-13);
    EXPECT_NEAR(l1.masses[k] / l0.masses[k], std::exp(gamma * c / 2), 1e-13);
  }
}

TEST(Gmc, Errors) {
  auto phi = [](Complex, double) { return 0.0; };
  std::vector<double> ladder{0.3};
  EXPECT_THROW(quantum_area(phi, {{-1, 1, 0.25, 1}, 4, 4}, 1.0, ladder), DomainError);
  EXPECT_THROW(quantum_area(phi, {{-1, 1, 0.5, 1}, 4, 4}, 2.0, ladder), DomainError);
  EXPECT_THROW(quantum_length(phi, {0, 1, 4}, 0.0, ladder), DomainError);
  auto e = quantum_length(phi, {1, 1, 4}, 1.0, ladder);
  EXPECT_EQ(e.masses[0], 0.0);
  auto d = std::make_shared<Discretization>(Window{-1, 1, 1});
  EXPECT_THROW(register_area_functionals(*d, {{-1, 1, 0.5, 1}, 4, 4}, ladder), DomainError);
}

TEST(Gmc, ProfileCircleAverageIsPointValue) {
  InsertionSpec spec;
  const double Q = 2.5;
  spec.bulk.push_back({0.8, Complex(0.2, 0.6)});
  spec.delta_inf = Q;  // pure alpha G_H(., z0)
  FieldSample f = constant_field(0.0);
  f.profile = liouville_profile(spec, Q, 0.0);
  // Contours avoid z0 and the unit circle, where log|.|_+ is not harmonic.
  for (auto [z, eps] : {std::pair{Complex(2.0, 1.0), 0.2}, std::pair{Complex(-0.4, 0.3), 0.1}})
    EXPECT_NEAR(f.circle_average(z, eps), 0.8 * green_H(z, Complex(0.2, 0.6)), 1e-8);
}

TEST(Gmc, ScalingPushforwardExact) {
  auto d = std::make_shared<Discretization>();
  AreaGrid g{{-0.5, 0.5, 0.3, 0.8}, 6, 4};
  const double eps = 0.1, r = 2.0, gamma = 1.2;
  const Params p = Params::from_gamma(gamma);
  std::vector<double> l{eps / r};
  register_area_functionals(*d, g, l);
  CholeskySampler s(d);
  Stream rng(9, 0);
  auto f = s.sample(rng);
  // (g . h)_eps(w) = h_{eps/r}(w/r) - Q log r for g(z) = r z.
  auto pushed = [&](Complex w, double e) { return f.circle_average(w / r, e / r) - p.Q * std::log(r); };
  AreaGrid gr{{r * g.region.xmin, r * g.region.xmax, r * g.region.ymin, r * g.region.ymax}, g.nx, g.ny};
  std::vector<double> l2{eps};
  double lhs = quantum_area(pushed, gr, gamma, l2).masses[0];
  double rhs = quantum_area(f, g, gamma, l).masses[0];
  EXPECT_NEAR(lhs / rhs, 1.0, 1e-12);
}

TEST(Gmc, FirstMomentsSmallN) {
  auto d = std::make_shared<Discretization>();
  AreaGrid g{{-1, 1, 0.25, 1}, 16, 6};
  LengthGrid lg{1, 2, 16};
  auto ladder = geometric_ladder(0.2, 2);
  register_area_functionals(*d, g, ladder);
  register_length_functionals(*d, lg, ladder);
  CholeskySampler s(d);
  const double gamma = 1.0;
  const int n = 4000;
  std::vector<double> a(n), b(n);
  for (int k = 0; k < n; ++k) {
    Stream rng(21, k);
    auto f = s.sample(rng);
    a[k] = quantum_area(f, g, gamma, ladder).masses[1];
    b[k] = quantum_length(f, lg, gamma, ladder).masses[1];
  }
  auto ea = mc_stats(a), eb = mc_stats(b);
  EXPECT_LT(std::abs(ea.mean - area_expectation(g, gamma, 0.1)), 4 * ea.std_error);
  EXPECT_NEAR(ea.mean / area_first_moment(g.region, gamma), 1.0, 0.1);
  EXPECT_NEAR(eb.mean / length_first_moment(1, 2, gamma, 0.1), 1.0, 0.05);
}
