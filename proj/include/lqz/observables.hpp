#ifndef LQZ_OBSERVABLES_HPP
#define LQZ_OBSERVABLES_HPP

#include <span>
#include <vector>

#include "lqz/green.hpp"
#include "lqz/loewner.hpp"
#include "lqz/sde.hpp"
#include "lqz/stats.hpp"

namespace lqz {

/// Delta_alpha = (alpha/2)(Q - alpha/2).
template <class T>
T delta_weight(T alpha, T Q) {
  return alpha / T(2) * (Q - alpha / T(2));
}
inline double delta_weight(double alpha, const Params& p) { return delta_weight(alpha, p.Q); }

/// W and the flowed insertion points, in InsertionSpec::points() order.
struct FlowSnapshot {
  double W = 0.0;
  std::vector<FlowPoint> points;
};

/// log M = sum_bulk 2 Delta_a log|g'| + sum_bdy Delta_{2a} log|g'| + log Z((-1/sqrt k, W), (a_j, g(z_j))).
/// Boundary insertions use beta_half as their charge. Throws SingularityError
/// for a collided point or an image on W.
double log_martingale_M(const FlowSnapshot& s, const InsertionSpec& spec, const Params& p);
double martingale_M(const FlowSnapshot& s, const InsertionSpec& spec, const Params& p);

/// Force-point weights rho_j = 2 sqrt(kappa) a_j matching the insertions.
std::vector<ForcePointSpec> girsanov_force_points(const InsertionSpec& spec, const Params& p);

/// g(sigma) = cos(pi gamma (sigma - Q/2)) / sqrt(sin(pi gamma^2 / 4)); gamma in (0, 2).
Complex coupling_mu(Complex sigma, const Params& p);

/// sigma_L, sigma_R with sigma_L - sigma_R = beta_* / 2 for beta_* = -gamma/2, and
/// the equivalent parametrization theta = pi gamma^2 / 4 = 4 pi / kappa', x = pi gamma (sigma_L - Q/2).
struct CosmologicalCoupling {
  Complex sigma_L, sigma_R, mu_L, mu_R, x;
  double theta = 0.0;

  static CosmologicalCoupling from_sigma_L(Complex sigma_L, const Params& p);
  /// mu_L = cos x / sqrt(sin th), mu_R = cos(x + th) / sqrt(sin th).
  static CosmologicalCoupling from_x(Complex x, const Params& p);
};

/// cos^2 x + cos^2(x + th) - 2 cos x cos(x + th) cos th - sin^2 th.
template <class T>
T trig_residual(T x, T theta) {
  using std::cos;
  using std::sin;
  const T a = cos(x), b = cos(x + theta), c = cos(theta), s = sin(theta);
  return a * a + b * b - T(2) * a * b * c - s * s;
}

/// e^{-s - mu_L X - mu_R Y}
Complex crt_mtg_value(double s, double X, double Y, const CosmologicalCoupling& c);

/// -s + (1/2)(mu_L^2 + mu_R^2 - 2 mu_L mu_R cos th) a^2 s, the log of E[crt_mtg_value].
Complex crt_log_expectation(double s, const CosmologicalCoupling& c, double a_sq);

struct GirsanovReport {
  std::vector<double> weights;  ///< M_tau / M_0 per path
  std::vector<double> W_tau;
  double ess = 0.0;
  std::vector<BinnedResidual::Bin> drift_bins;
  double max_abs_z = 0.0;
};

/// Weights plain reverse SLE_kappa paths by M_tau / M_0 and bins the weighted
/// drift of W against sum Re(-rho_j / (Z_j - W)). Each path must carry the
/// insertion points as zero-weight tracers in points() order, recorded up to tau.
/// Throws ConvergenceError when the Kish effective sample size is below min_ess.
GirsanovReport girsanov_drift_check(std::span<const DrivingState> paths, const InsertionSpec& spec,
                                    const Params& p, double tau, int bins = 10, double min_ess = 1000);

}  // namespace lqz

#endif
