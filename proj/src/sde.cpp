#include "lqz/sde.hpp"

#include <algorithm>
#include <cmath>

namespace lqz {

Params Params::from_kappa(double kappa) {
  if (!(kappa > 0) || !std::isfinite(kappa)) throw DomainError("Params: kappa must be positive");
  Params p;
  p.kappa = kappa;
  p.gamma = std::min(std::sqrt(kappa), 4.0 / std::sqrt(kappa));
  p.Q = p.gamma / 2 + 2 / p.gamma;
  return p;
}

Params Params::from_gamma(double gamma) {
  if (!(gamma > 0 && gamma <= 2)) throw DomainError("Params: gamma must lie in (0, 2]");
  Params p;
  p.gamma = gamma;
  p.kappa = gamma * gamma;
  p.Q = gamma / 2 + 2 / gamma;
  return p;
}

void Params::validate() const {
  if (!(kappa > 0)) throw DomainError("Params: kappa must be positive");
  if (!(gamma > 0 && gamma <= 2)) throw DomainError("Params: gamma must lie in (0, 2]");
  const double g = std::min(std::sqrt(kappa), 4.0 / std::sqrt(kappa));
  if (std::abs(g - gamma) > 1e-12 * g) throw DomainError("Params: gamma != min(sqrt k, 4/sqrt k)");
  if (std::abs(Q - (gamma / 2 + 2 / gamma)) > 1e-12 * Q) throw DomainError("Params: Q != g/2 + 2/g");
}

bool continuation_threshold(std::span<const double> colliding_weights, const Params& p) {
  double s = 0.0;
  for (double w : colliding_weights) s += w;
  return s >= p.kappa / 2 + 4 - 1e-12;
}

ReverseSleStepper::ReverseSleStepper(const Params& p, std::span<const ForcePointSpec> fp,
                                     double dt, Stream& rng)
    : p_(p), dt_(dt), rng_(rng), tol_(FlowTolerance::for_step(dt)) {
  p_.validate();
  if (!(dt > 0) || !std::isfinite(dt)) throw DomainError("reverse SLE: dt must be positive");
  threshold_time_ = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < fp.size(); ++i) {
    const auto& f = fp[i];
    if (!std::isfinite(f.rho)) throw DomainError("reverse SLE: non-finite weight");
    if (f.z.imag() < 0 || !std::isfinite(f.z.real()) || !std::isfinite(f.z.imag()))
      throw DomainError("reverse SLE: force point outside closed H");
    for (std::size_t j = 0; j < i; ++j)
      if (fp[j].z == f.z) throw DomainError("reverse SLE: force points must be distinct");
    rho_.push_back(f.rho);
    pts_.push_back(FlowPoint{f.z});
  }
  std::vector<bool> live(pts_.size(), true);
  check_collisions(live);
}

double ReverseSleStepper::drift() const {
  double d = 0.0;
  for (std::size_t j = 0; j < pts_.size(); ++j)
    if (!pts_[j].collided && rho_[j] != 0.0) d += std::real(-rho_[j] / (pts_[j].g - w_));
  return d;
}

void ReverseSleStepper::check_collisions(const std::vector<bool>& was_live) {
  std::vector<double> hit;
  for (std::size_t j = 0; j < pts_.size(); ++j) {
    if (!was_live[j]) continue;
    auto& q = pts_[j];
    if (!q.collided && std::abs(q.g - w_) < tol_.collide) {
      q.collided = true;
      q.collision_time = t_;
    }
    if (q.collided) hit.push_back(rho_[j]);
  }
  if (!hit.empty() && continuation_threshold(hit, p_)) {
    threshold_ = true;
    threshold_time_ = t_;
  }
}

void ReverseSleStepper::step() {
  if (threshold_) return;
  std::vector<bool> live(pts_.size());
  double gap = INFINITY;
  for (std::size_t j = 0; j < pts_.size(); ++j) {
    live[j] = !pts_[j].collided;
    if (live[j] && rho_[j] != 0.0) gap = std::min(gap, std::abs(pts_[j].g - w_));
  }
  int m = 1;
  if (gap < tol_.near) {
    double r = tol_.near / gap;
    m = static_cast<int>(std::min(1024.0, std::ceil(r * r)));
  }
  last_m_ = m;
  const double h = dt_ / m, sk = std::sqrt(p_.kappa * h);
  for (int i = 0; i < m; ++i) {
    double w0 = w_;
    double w1 = w0 + drift() * h + sk * rng_.normal();
    if (!std::isfinite(w1)) w1 = w0 + sk * rng_.normal();
    for (std::size_t j = 0; j < pts_.size(); ++j)
      if (!pts_[j].collided) flow_step(pts_[j], t_, h, w0, w1, tol_);
    w_ = w1;
    t_ += h;
  }
  t_ = std::round(t_ / dt_) * dt_;
  check_collisions(live);
}

DrivingState simulate_reverse_sle(const Params& p, std::span<const ForcePointSpec> force_points,
                                  double T, double dt, Stream& rng) {
  if (!(T >= 0)) throw DomainError("simulate_reverse_sle: T must be non-negative");
  ReverseSleStepper st(p, force_points, dt, rng);
  DrivingState out;
  out.driving.dt = dt;
  out.rho = st.weights();
  out.rng_seed = rng.seed();
  out.rng_stream = rng.stream_id();
  out.force_trajectories.resize(force_points.size());
  auto record = [&] {
    out.driving.driving.push_back(st.W());
    for (std::size_t j = 0; j < force_points.size(); ++j) {
      auto& tp = out.force_trajectories[j];
      tp.times.push_back(st.time());
      tp.trajectory.push_back(st.points()[j].g);
      tp.derivative.push_back(st.points()[j].dg);
    }
  };
  for (std::size_t j = 0; j < force_points.size(); ++j)
    out.force_trajectories[j].start = force_points[j].z;
  record();
  const auto n = static_cast<long long>(std::llround(T / dt));
  for (long long k = 0; k < n && !st.threshold_hit(); ++k) {
    st.step();
    record();
  }
  for (std::size_t j = 0; j < force_points.size(); ++j) {
    out.force_trajectories[j].collided = st.points()[j].collided;
    out.force_trajectories[j].collision_time = st.points()[j].collision_time;
  }
  out.threshold_hit = st.threshold_hit();
  out.threshold_time = st.threshold_time();
  return out;
}

double crt_a_sq(double kappa) {
  if (!(kappa > 4)) throw DomainError("CRT: requires kappa > 4");
  return 2.0 / std::sin(4 * pi / kappa);
}

CrtPath sample_crt(const Params& p, double T, double dt, Stream& rng) {
  if (!(p.kappa > 4)) throw DomainError("sample_crt: requires kappa > 4");
  if (!(dt > 0) || !(T >= 0)) throw DomainError("sample_crt: need dt > 0, T >= 0");
  CrtPath c;
  c.dt = dt;
  c.theta = 4 * pi / p.kappa;
  c.a_sq = crt_a_sq(p.kappa);
  // Cholesky factor of [[1, -cos], [-cos, 1]].
  const double r = -std::cos(c.theta), s = std::sqrt(1 - r * r), sd = std::sqrt(c.a_sq * dt);
  const auto n = static_cast<std::size_t>(std::llround(T / dt));
  c.X.assign(n + 1, 0.0);
  c.Y.assign(n + 1, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    double z1 = rng.normal(), z2 = rng.normal();
    c.X[k] = c.X[k - 1] + sd * z1;
    c.Y[k] = c.Y[k - 1] + sd * (r * z1 + s * z2);
  }
  return c;
}

double wedge_drift(double weight, const Params& p) {
  const double alpha = (p.Q + p.gamma / 2 - weight / p.gamma) / 2;
  return p.Q - 2 * alpha;
}

WedgePath wedge_average_process(double weight, const Params& p, double T, double dt, Stream& rng) {
  if (!(weight >= p.gamma * p.gamma / 2))
    throw DomainError("wedge_average_process: thin regime (W < gamma^2/2) not supported");
  if (!(dt > 0) || !(T > 0)) throw DomainError("wedge_average_process: need dt > 0, T > 0");
  const double a = wedge_drift(weight, p), sd = std::sqrt(2 * dt);
  const auto n = static_cast<std::size_t>(std::llround(T / dt));
  WedgePath w;
  w.times.resize(2 * n + 1);
  w.values.assign(2 * n + 1, 0.0);
  w.zero_index = n;
  for (std::size_t k = 0; k <= 2 * n; ++k) w.times[k] = (static_cast<double>(k) - n) * dt;
  for (std::size_t k = 1; k <= n; ++k) w.values[n + k] = w.values[n + k - 1] + a * dt + sd * rng.normal();
  // Negative half: s = -t runs forward, increments N(-a dt, 2 dt), all values < 0.
  std::vector<double> neg(n + 1, 0.0);
  bool ok = false;
  for (w.attempts = 1; w.attempts <= 10000; ++w.attempts) {
    ok = true;
    for (std::size_t k = 1; k <= n; ++k) {
      neg[k] = neg[k - 1] - a * dt + sd * rng.normal();
      if (neg[k] >= 0) {
        ok = false;
        break;
      }
    }
    if (ok) break;
  }
  if (!ok) throw ConvergenceError("wedge_average_process: rejection cap reached", 10000);
  for (std::size_t k = 1; k <= n; ++k) w.values[n - k] = neg[k];
  return w;
}

}  // namespace lqz
