#ifndef LQZ_LOEWNER_HPP
#define LQZ_LOEWNER_HPP

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "lqz/types.hpp"

namespace lqz {

/// Driving function sampled on a uniform capacity-time grid t_k = k dt.
struct LoewnerEvolution {
  std::vector<double> driving;
  double dt = 0.0;

  double duration() const { return driving.empty() ? 0.0 : dt * (driving.size() - 1); }
  /// Linear interpolation of W at time t.
  double at(double t) const;
  double sup_abs() const;
  void validate() const;
};

LoewnerEvolution constant_driving(double w, double duration, double dt);

/// Driving of the composed flow: b runs after a, translated to start at a's endpoint.
LoewnerEvolution concatenate(const LoewnerEvolution& a, const LoewnerEvolution& b);

struct TrackedPoint {
  Complex start;
  std::vector<double> times;
  std::vector<Complex> trajectory;  ///< g_t(start)
  std::vector<Complex> derivative;  ///< g_t'(start)
  bool collided = false;
  double collision_time = std::numeric_limits<double>::quiet_NaN();

  Complex value() const { return trajectory.back(); }
  Complex slope() const { return derivative.back(); }
};

/// State of one point under the flow, used by steppers that do not record.
struct FlowPoint {
  Complex g;
  Complex dg{1.0, 0.0};
  bool collided = false;
  double collision_time = std::numeric_limits<double>::quiet_NaN();
};

/// Collision thresholds tied to the grid step.
struct FlowTolerance {
  double near;     ///< below this gap the step is sub-divided
  double collide;  ///< below this gap the point is frozen
  static FlowTolerance for_step(double dt) { return {10.0 * std::sqrt(dt), std::sqrt(dt)}; }
};

/// Advances p over [t, t + h] with W linear from w0 to w1.
/// Sub-steps when close to W and freezes the point on collision.
void flow_step(FlowPoint& p, double t, double h, double w0, double w1, const FlowTolerance& tol);

/// Reverse Loewner flow dg = -2/(g - W) dt, g' co-evolved, from t0 to t1.
std::vector<TrackedPoint> reverse_flow(std::span<const Complex> points,
                                       const LoewnerEvolution& ev, double t0, double t1,
                                       bool record_trajectory = true);

/// Final images and derivatives only.
std::vector<FlowPoint> flow_points(std::span<const Complex> points, const LoewnerEvolution& ev,
                                   double t0, double t1);

/// Half-plane capacity of the hull generated over [0, duration].
///
/// Richardson extrapolation of -z (g(z) - z) at z = iR, 2iR, 4iR with
/// R = 100 (1 + sup|W|). Throws ConvergenceError when the spread exceeds tol.
double hcap_estimate(const LoewnerEvolution& ev, double tol = 1e-5);

/// Zero-driving reverse map g_t(z) = sqrt(z^2 - 4t), branch with iR+ -> iR+.
template <class T>
std::complex<T> slit_map(std::complex<T> z, T t) {
  std::complex<T> w = std::sqrt(z * z - T(4) * t);
  if (w.imag() < 0 || (w.imag() == 0 && w.real() * z.real() < 0)) w = -w;
  return w;
}

template <class T>
std::complex<T> slit_map_inverse(std::complex<T> w, T t) {
  std::complex<T> z = std::sqrt(w * w + T(4) * t);
  if (z.imag() < 0 || (z.imag() == 0 && z.real() * w.real() < 0)) z = -z;
  return z;
}

template <class T>
std::complex<T> slit_map_derivative(std::complex<T> z, T t) {
  return z / slit_map(z, t);
}

}  // namespace lqz

#endif
