#ifndef LQZ_ZIPPER_HPP
#define LQZ_ZIPPER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "lqz/gff.hpp"
#include "lqz/loewner.hpp"
#include "lqz/sde.hpp"

namespace lqz {

/// Force point image (rho_j, g_t(z_j)).
struct ForceImage {
  double rho;
  Complex image;
};

/// h_t at a point with image g = g_t(z) and derivative dg = g_t'(z):
/// -(1/sqrt k) G(g, W) + (1/(2 sqrt k)) sum rho_j G(g, g_t(z_j)) + Q log|dg|.
double zipper_profile_at(const Params& p, double W, std::span<const ForceImage> force, Complex g,
                         Complex dg);

/// Deterministic profile h_t of a recorded driving path.
class ZipperProfile {
 public:
  ZipperProfile(double t, DrivingState state, Params p);

  /// Flows z to time t and evaluates. Throws SingularityError at W_t, at a
  /// force point image, or for a swallowed z.
  double operator()(Complex z) const;
  double time() const { return t_; }

 private:
  double t_;
  DrivingState state_;
  Params p_;
  double W_;
  std::vector<ForceImage> force_;
};

ZipperProfile zipper_profile(double t, const DrivingState& state, const Params& p);

/// Tensor Gauss rule on the bumps of several test functions. Per-bump weights
/// are renormalized to unit mass so discrete pairings stay mean-zero.
struct PairingQuadrature {
  std::vector<Complex> nodes;
  Eigen::MatrixXd weights;  ///< tests x nodes
};

PairingQuadrature pairing_quadrature(std::span<const TestFunction> tests, int radial_nodes,
                                     int angular_nodes);

struct ZipperCouplingSetup {
  Params params;
  std::vector<ForcePointSpec> force;
  double tau = 0.05;
  double dt = 2.5e-4;
  std::vector<TestFunction> tests;  ///< mean-zero
  int radial_nodes = 6;
  int angular_nodes = 8;
  SpectralOptions spectral{};
};

/// Samples of (h_0 + h, f_i), h from the spectral sampler. Rows are samples.
Eigen::MatrixXd zipper_lhs_samples(const ZipperCouplingSetup& s, std::size_t n, std::uint64_t seed,
                                   int workers = 1);

struct ZipperRhsSamples {
  Eigen::MatrixXd samples;         ///< rows (h_tau + h o g_tau, f_i)
  std::size_t collided_paths = 0;  ///< paths where a node or force point hit W before tau
};

/// Samples of (h_tau + h o g_tau, f_i). Given the path, (h o g_tau, f) is
/// Gaussian with covariance Sigma_0 + int int S f_a f_b where
/// S(z, w) = G_H(g z, g w) - G_H(z, w) reduced to its two-variable part.
ZipperRhsSamples zipper_rhs_samples(const ZipperCouplingSetup& s, std::size_t n, std::uint64_t seed,
                                    int workers = 1);

}  // namespace lqz

#endif
