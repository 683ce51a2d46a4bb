#include "lqz/loewner.hpp"

#include <algorithm>

namespace lqz {

double LoewnerEvolution::at(double t) const {
  if (driving.size() == 1 || dt <= 0) return driving.front();
  double s = t / dt;
  auto k = static_cast<std::size_t>(std::floor(s));
  if (k + 1 >= driving.size()) return driving.back();
  double f = s - static_cast<double>(k);
  return driving[k] + f * (driving[k + 1] - driving[k]);
}

double LoewnerEvolution::sup_abs() const {
  double m = 0.0;
  for (double w : driving) m = std::max(m, std::abs(w));
  return m;
}

void LoewnerEvolution::validate() const {
  if (driving.empty()) throw DomainError("LoewnerEvolution: empty driving");
  if (driving.size() > 1 && !(dt > 0)) throw DomainError("LoewnerEvolution: dt must be positive");
  for (double w : driving)
    if (!std::isfinite(w)) throw DomainError("LoewnerEvolution: non-finite driving value");
}

LoewnerEvolution constant_driving(double w, double duration, double dt) {
  require(dt > 0 && duration >= 0, "constant_driving: need dt > 0, duration >= 0");
  auto n = static_cast<std::size_t>(std::llround(duration / dt));
  return {std::vector<double>(n + 1, w), dt};
}

LoewnerEvolution concatenate(const LoewnerEvolution& a, const LoewnerEvolution& b) {
  a.validate();
  b.validate();
  if (a.driving.size() > 1 && b.driving.size() > 1 && std::abs(a.dt - b.dt) > 1e-15 * a.dt)
    throw DomainError("concatenate: step sizes differ");
  LoewnerEvolution out{a.driving, a.driving.size() > 1 ? a.dt : b.dt};
  const double shift = a.driving.back() - b.driving.front();
  for (std::size_t k = 1; k < b.driving.size(); ++k) out.driving.push_back(b.driving[k] + shift);
  return out;
}

namespace {

struct Deriv {
  Complex g, dg;
};

inline Deriv field(Complex g, Complex dg, double w) {
  Complex inv = 1.0 / (g - w);
  return {-2.0 * inv, 2.0 * dg * inv * inv};
}

inline bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Classical RK4 on [0, h], W linear from w0 to w1.
inline void rk4(Complex& g, Complex& dg, double h, double w0, double w1) {
  const double wm = 0.5 * (w0 + w1);
  Deriv k1 = field(g, dg, w0);
  Deriv k2 = field(g + 0.5 * h * k1.g, dg + 0.5 * h * k1.dg, wm);
  Deriv k3 = field(g + 0.5 * h * k2.g, dg + 0.5 * h * k2.dg, wm);
  Deriv k4 = field(g + h * k3.g, dg + h * k3.dg, w1);
  g += h / 6.0 * (k1.g + 2.0 * k2.g + 2.0 * k3.g + k4.g);
  dg += h / 6.0 * (k1.dg + 2.0 * k2.dg + 2.0 * k3.dg + k4.dg);
}

constexpr int kMaxSubsteps = 4096;

}  // namespace

void flow_step(FlowPoint& p, double t, double h, double w0, double w1, const FlowTolerance& tol) {
  if (p.collided || h <= 0) return;
  const bool real_start = p.g.imag() == 0.0;
  double gap = std::abs(p.g - w0);
  if (gap < tol.collide) {
    p.collided = true;
    p.collision_time = t;
    return;
  }
  int m = 1;
  if (gap < tol.near) {
    double r = tol.near / gap;
    m = static_cast<int>(std::min<double>(kMaxSubsteps, std::ceil(r * r)));
  }
  const double hs = h / m;
  for (int j = 0; j < m; ++j) {
    double a = w0 + (w1 - w0) * (static_cast<double>(j) / m);
    double b = w0 + (w1 - w0) * (static_cast<double>(j + 1) / m);
    Complex g = p.g, dg = p.dg;
    rk4(g, dg, hs, a, b);
    if (real_start) g.imag(0.0);
    if (g.imag() < 0) g.imag(0.0);
    if (!finite(g) || !finite(dg)) {
      p.collided = true;
      p.collision_time = t + j * hs;
      return;
    }
    p.g = g;
    p.dg = dg;
    if (std::abs(p.g - b) < tol.collide) {
      p.collided = true;
      p.collision_time = t + (j + 1) * hs;
      return;
    }
  }
}

namespace {

// Step schedule from t0 to t1 aligned with the driving grid.
std::vector<double> schedule(const LoewnerEvolution& ev, double t0, double t1) {
  std::vector<double> ts{t0};
  if (t1 <= t0) return ts;
  auto k = static_cast<long long>(std::floor(t0 / ev.dt + 1e-9)) + 1;
  for (;; ++k) {
    double tk = k * ev.dt;
    if (tk >= t1 - 1e-12 * ev.dt) break;
    if (tk > t0 + 1e-12 * ev.dt) ts.push_back(tk);
  }
  ts.push_back(t1);
  return ts;
}

void check_range(const LoewnerEvolution& ev, double t0, double t1) {
  ev.validate();
  if (!(t0 >= 0 && t0 <= t1 && t1 <= ev.duration() * (1 + 1e-12) + 1e-15))
    throw DomainError("reverse_flow: need 0 <= t0 <= t1 <= duration");
}

}  // namespace

std::vector<TrackedPoint> reverse_flow(std::span<const Complex> points,
                                       const LoewnerEvolution& ev, double t0, double t1,
                                       bool record_trajectory) {
  check_range(ev, t0, t1);
  for (Complex z : points)
    if (z.imag() < 0 || !finite(z)) throw DomainError("reverse_flow: point outside closed H");
  const auto ts = schedule(ev, t0, t1);
  const FlowTolerance tol = FlowTolerance::for_step(ev.dt);
  std::vector<TrackedPoint> out;
  out.reserve(points.size());
  for (Complex z : points) {
    TrackedPoint tp;
    tp.start = z;
    FlowPoint p{z};
    auto record = [&](double t) {
      tp.times.push_back(t);
      tp.trajectory.push_back(p.g);
      tp.derivative.push_back(p.dg);
    };
    record(t0);
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
      flow_step(p, ts[i], ts[i + 1] - ts[i], ev.at(ts[i]), ev.at(ts[i + 1]), tol);
      if (record_trajectory) record(ts[i + 1]);
    }
    // A zero-length flow still applies the immediate-collision rule.
    if (ts.size() == 1 && std::abs(p.g - ev.at(t0)) < tol.collide) {
      p.collided = true;
      p.collision_time = t0;
    }
    if (!record_trajectory && ts.size() > 1) record(ts.back());
    tp.collided = p.collided;
    tp.collision_time = p.collision_time;
    out.push_back(std::move(tp));
  }
  return out;
}

std::vector<FlowPoint> flow_points(std::span<const Complex> points, const LoewnerEvolution& ev,
                                   double t0, double t1) {
  check_range(ev, t0, t1);
  const auto ts = schedule(ev, t0, t1);
  const FlowTolerance tol = FlowTolerance::for_step(ev.dt);
  std::vector<FlowPoint> out;
  out.reserve(points.size());
  for (Complex z : points) {
    FlowPoint p{z};
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
      flow_step(p, ts[i], ts[i + 1] - ts[i], ev.at(ts[i]), ev.at(ts[i + 1]), tol);
    out.push_back(p);
  }
  return out;
}

double hcap_estimate(const LoewnerEvolution& ev, double tol) {
  ev.validate();
  const double T = ev.duration();
  if (T == 0.0) return 0.0;
  const double R = 100.0 * (1.0 + ev.sup_abs());
  // Integrate the displacement u = g(z) - z so that O(1/z) increments are not
  // lost against |z|.
  auto moment = [&](double radius) {
    const Complex z(0.0, radius);
    Complex u = 0.0;
    auto f = [&](Complex uu, double w) { return -2.0 / (z + uu - w); };
    const std::size_t n = ev.driving.size() - 1;
    const double h = ev.dt;
    for (std::size_t k = 0; k < n; ++k) {
      double w0 = ev.driving[k], w1 = ev.driving[k + 1], wm = 0.5 * (w0 + w1);
      Complex k1 = f(u, w0);
      Complex k2 = f(u + 0.5 * h * k1, wm);
      Complex k3 = f(u + 0.5 * h * k2, wm);
      Complex k4 = f(u + h * k3, w1);
      u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return -z * u;
  };
  const Complex f1 = moment(R), f2 = moment(2 * R), f3 = moment(4 * R);
  const Complex g1 = 2.0 * f2 - f1, g2 = 2.0 * f3 - f2;
  const Complex a = (4.0 * g2 - g1) / 3.0;
  const double spread = std::abs(a - g2);
  if (spread > tol) throw ConvergenceError("hcap_estimate: extrapolation spread too large", spread);
  return a.real();
}

}  // namespace lqz
