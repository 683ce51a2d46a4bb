#ifndef LQZ_SDE_HPP
#define LQZ_SDE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "lqz/loewner.hpp"
#include "lqz/rng.hpp"
#include "lqz/types.hpp"

namespace lqz {

/// Coupling constants. kappa and 16/kappa share gamma; Q = gamma/2 + 2/gamma.
struct Params {
  double gamma = 0.0;
  double kappa = 0.0;
  double Q = 0.0;

  static Params from_kappa(double kappa);
  /// Uses the kappa = gamma^2 branch.
  static Params from_gamma(double gamma);
  /// Checks the invariants; gamma = 2 (kappa = 4) is allowed here.
  void validate() const;
  double sqrt_kappa() const { return std::sqrt(kappa); }
};

struct ForcePointSpec {
  double rho = 0.0;
  Complex z;
};

/// True iff the colliding weights reach kappa/2 + 4.
bool continuation_threshold(std::span<const double> colliding_weights, const Params& p);

/// Euler-Maruyama stepper for reverse SLE_{kappa,rho}.
///
/// Force points flow with the reverse Loewner ODE between driving samples. A
/// force point within sqrt(dt) of W is tested against the continuation
/// threshold, then frozen and dropped from the drift. Zero-weight points are
/// passive tracers.
class ReverseSleStepper {
 public:
  ReverseSleStepper(const Params& p, std::span<const ForcePointSpec> fp, double dt, Stream& rng);

  /// Advances one grid step; no-op once the threshold is hit.
  void step();

  double time() const { return t_; }
  double W() const { return w_; }
  double dt() const { return dt_; }
  const std::vector<FlowPoint>& points() const { return pts_; }
  const std::vector<double>& weights() const { return rho_; }
  bool threshold_hit() const { return threshold_; }
  double threshold_time() const { return threshold_time_; }
  /// Drift sum_j Re(-rho_j / (Z_j - W)) over live points at the current state.
  double drift() const;
  int substeps_last() const { return last_m_; }

 private:
  void check_collisions(const std::vector<bool>& was_live);

  Params p_;
  std::vector<double> rho_;
  std::vector<FlowPoint> pts_;
  double dt_, t_ = 0.0, w_ = 0.0;
  Stream& rng_;
  FlowTolerance tol_;
  bool threshold_ = false;
  double threshold_time_;
  int last_m_ = 1;
};

/// A sampled driving path with co-evolved force points.
struct DrivingState {
  LoewnerEvolution driving;
  std::vector<double> rho;
  std::vector<TrackedPoint> force_trajectories;
  bool threshold_hit = false;
  double threshold_time = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t rng_seed = 0;
  std::uint64_t rng_stream = 0;
};

/// Runs the stepper to T (or the threshold) and records the path.
DrivingState simulate_reverse_sle(const Params& p, std::span<const ForcePointSpec> force_points,
                                  double T, double dt, Stream& rng);

/// Correlated Brownian pair of the mating-of-trees encoding.
struct CrtPath {
  std::vector<double> X, Y;
  double dt = 0.0;
  double a_sq = 0.0;
  double theta = 0.0;
};

/// Requires kappa > 4. Increments have covariance a_sq dt [[1, -cos th], [-cos th, 1]].
CrtPath sample_crt(const Params& p, double T, double dt, Stream& rng);
double crt_a_sq(double kappa);

/// Drift Q - 2 alpha of the wedge average process, alpha = (Q + gamma/2 - W/gamma)/2.
double wedge_drift(double weight, const Params& p);

struct WedgePath {
  std::vector<double> times;   ///< -T, ..., 0, ..., T
  std::vector<double> values;
  std::size_t zero_index = 0;  ///< times[zero_index] == 0
  int attempts = 0;            ///< rejection attempts for the negative half
};

/// Y_t = B_{2t} + a t for t >= 0; for t < 0 an independent copy of
/// B_{-2t} + a t conditioned to stay negative on the grid (rejection, at most
/// 10^4 attempts). The sampled time window is [-T, T].
WedgePath wedge_average_process(double weight, const Params& p, double T, double dt, Stream& rng);

}  // namespace lqz

#endif
