#ifndef LQZ_GFF_HPP
#define LQZ_GFF_HPP

#include <Eigen/Dense>
#include <array>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <tuple>
#include <variant>
#include <vector>

#include "lqz/green.hpp"
#include "lqz/rng.hpp"
#include "lqz/types.hpp"

namespace lqz {

/// Unit-mass radial bump A exp(-1/(1 - |z-c|^2/r^2)) supported in B_r(c).
struct Bump {
  Complex center;
  double radius;

  double operator()(Complex z) const;
  /// Log potential U(z) = int -log|z - w| psi(w) dw (Newton's theorem).
  double potential(Complex z) const;
};

/// Density of the unit bump on the unit disk as a function of |z|.
double unit_bump_density(double x);

/// Finite linear combination of bumps.
class TestFunction {
 public:
  TestFunction() = default;
  explicit TestFunction(Bump b) : terms_{{1.0, b}} {}

  const std::vector<std::pair<double, Bump>>& terms() const { return terms_; }
  double operator()(Complex z) const;
  double mass() const;
  /// Bounding box {xmin, xmax, ymin, ymax} of the support.
  std::array<double, 4> support_box() const;

  friend TestFunction operator+(TestFunction a, const TestFunction& b);
  friend TestFunction operator-(TestFunction a, const TestFunction& b);
  friend TestFunction operator*(double s, TestFunction a);

 private:
  std::vector<std::pair<double, Bump>> terms_;
};

/// Average over the circle |v - center| = eps; a half circle when center is real.
struct CircleFunctional {
  Complex center;
  double eps;
  bool half() const { return center.imag() == 0.0; }
};

using Functional = std::variant<CircleFunctional, TestFunction>;

/// E[(h, a)(h, b)] under the free-boundary covariance, computed from closed
/// forms and smooth quadrature only.
double functional_covariance(const Functional& a, const Functional& b);

/// int log|z|_+ psi(z) dz
double bump_log_plus(const Bump& b);
/// Double integral of G_H against two bumps.
double bump_covariance(const Bump& a, const Bump& b);
/// Circle average of int G_H(z, .) psi(z) dz.
double bump_circle_covariance(const Bump& b, const CircleFunctional& c);
double circle_covariance(const CircleFunctional& a, const CircleFunctional& b);

/// Axis-aligned window {x in [xmin, xmax], 0 <= y <= ymax}.
struct Window {
  double xmin = -1e300, xmax = 1e300, ymax = 1e300;
  bool contains(const CircleFunctional& c) const;
};

/// Shared list of linear functionals that a sample records.
class Discretization {
 public:
  explicit Discretization(Window w = {}) : window_(w) {}

  std::size_t add_circle(Complex center, double eps);
  std::size_t add_pairing(const TestFunction& f);
  std::optional<std::size_t> find_circle(Complex center, double eps) const;

  const std::vector<Functional>& functionals() const { return items_; }
  std::size_t size() const { return items_.size(); }
  const Window& window() const { return window_; }

 private:
  Window window_;
  std::vector<Functional> items_;
  std::map<std::tuple<double, double, double>, std::size_t> circle_index_;
};

Eigen::MatrixXd covariance_matrix(const Discretization& d);

/// Gaussian values of the recorded functionals plus a deterministic profile and constant.
struct FieldSample {
  std::shared_ptr<const Discretization> discretization;
  Eigen::VectorXd gaussian;
  std::optional<LiouvilleProfile> profile;
  double c = 0.0;

  /// phi_eps(z): recorded Gaussian circle average + exact profile average + c.
  /// Throws DomainError if the contour exits the window or was not recorded.
  double circle_average(Complex z, double eps) const;
  /// (h, f) for the recorded pairing with index i (Gaussian part only).
  double value(std::size_t i) const { return gaussian(static_cast<Eigen::Index>(i)); }
  FieldSample shifted(double dc) const;
};

/// Constant field with no recorded functionals.
FieldSample constant_field(double c, std::shared_ptr<const Discretization> d = nullptr);

/// Exact sampler: Cholesky factor of the covariance of the recorded functionals.
class CholeskySampler {
 public:
  explicit CholeskySampler(std::shared_ptr<const Discretization> d);

  FieldSample sample(Stream& rng) const;
  /// Columns are samples; column j uses the normals of stream streams[j].
  Eigen::MatrixXd sample_values(std::span<Stream> streams) const;
  const Eigen::MatrixXd& covariance() const { return cov_; }
  bool used_eigen_fallback() const { return fallback_; }
  std::shared_ptr<const Discretization> discretization() const { return d_; }

 private:
  std::shared_ptr<const Discretization> d_;
  Eigen::MatrixXd cov_, factor_;
  bool fallback_ = false;
};

struct SpectralOptions {
  int modes = 512;          ///< angular modes cos(n theta), n <= modes
  double du = 0.04;         ///< radial cell width in log r for pairings
  int theta_nodes = 2048;   ///< trapezoid nodes on [0, pi] for mode weights
  int circle_nodes = 0;     ///< nodes per circle; 0 picks 2 * modes + 2
  bool drop_negligible_modes = true;
};

/// Polar-coordinate expansion h(e^{u + i theta}) = B(2u) + sum_n X_n(u) cos(n theta).
///
/// B is a two-sided Brownian motion pinned at u = 0 and X_n are independent
/// stationary Ornstein-Uhlenbeck processes with covariance (2/n) e^{-n|u-v|},
/// which reproduces G_H mode by mode. Both are sampled exactly, jointly with
/// their cell integrals, on the merged radial breakpoints.
class SpectralSampler {
 public:
  SpectralSampler(std::shared_ptr<const Discretization> d, SpectralOptions opt = {});

  FieldSample sample(Stream& rng) const;
  /// Exact covariance of the sampler's outputs for pairing functionals
  /// (circle rows are left at zero).
  Eigen::MatrixXd pairing_covariance() const;
  int active_modes() const { return active_modes_; }
  std::shared_ptr<const Discretization> discretization() const { return d_; }

 private:
  struct PairingWeights {
    std::size_t index;
    std::vector<std::size_t> intervals;
    std::vector<std::vector<double>> weights;  ///< per interval, per mode 0..N
  };
  struct CircleNodes {
    std::size_t index;
    std::vector<std::size_t> breakpoint;  ///< node radius as breakpoint index
    std::vector<double> theta, weight;
    std::vector<double> cos_table;  ///< weight * cos(n theta), mode-major, when cached
  };

  std::shared_ptr<const Discretization> d_;
  SpectralOptions opt_;
  int active_modes_ = 0;
  std::vector<double> u_;  ///< breakpoints
  std::size_t zero_ = 0;   ///< index of u = 0
  std::vector<PairingWeights> pairings_;
  std::vector<CircleNodes> circles_;
  std::vector<double> steps_;  ///< cached OU step coefficients, 5 per (mode, interval)
};

}  // namespace lqz

#endif
