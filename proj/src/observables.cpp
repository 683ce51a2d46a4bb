#include "lqz/observables.hpp"

#include <algorithm>
#include <cmath>

namespace lqz {

double log_martingale_M(const FlowSnapshot& s, const InsertionSpec& spec, const Params& p) {
  const auto pts = spec.points();
  if (pts.size() != s.points.size()) throw DomainError("martingale_M: snapshot does not match the spec");
  std::vector<std::pair<double, Complex>> z{{-1.0 / p.sqrt_kappa(), Complex(s.W, 0.0)}};
  double lg = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const auto& q = s.points[j];
    if (q.collided || q.g == Complex(s.W, 0.0)) throw SingularityError("martingale_M: point collided with W");
    const double a = pts[j].first;
    const bool bulk = j < spec.bulk.size();
    const double expo = bulk ? 2 * delta_weight(a, p) : delta_weight(2 * a, p);
    lg += expo * std::log(std::abs(q.dg));
    Complex img = q.g;
    if (!bulk) img.imag(0.0);
    z.emplace_back(a, img);
  }
  return lg + log_partition_Z(z);
}

double martingale_M(const FlowSnapshot& s, const InsertionSpec& spec, const Params& p) {
  return std::exp(log_martingale_M(s, spec, p));
}

std::vector<ForcePointSpec> girsanov_force_points(const InsertionSpec& spec, const Params& p) {
  std::vector<ForcePointSpec> f;
  for (const auto& [a, z] : spec.points()) f.push_back({2 * p.sqrt_kappa() * a, z});
  return f;
}

Complex coupling_mu(Complex sigma, const Params& p) {
  p.validate();
  if (!(p.gamma < 2)) throw DomainError("coupling_mu: requires gamma in (0, 2)");
  const double s = std::sin(pi * p.gamma * p.gamma / 4);
  return std::cos(pi * p.gamma * (sigma - p.Q / 2)) / std::sqrt(s);
}

CosmologicalCoupling CosmologicalCoupling::from_sigma_L(Complex sigma_L, const Params& p) {
  CosmologicalCoupling c;
  c.sigma_L = sigma_L;
  c.sigma_R = sigma_L + p.gamma / 4;  // sigma_L - sigma_R = beta_* / 2 with beta_* = -gamma / 2
  c.mu_L = coupling_mu(c.sigma_L, p);
  c.mu_R = coupling_mu(c.sigma_R, p);
  c.theta = pi * p.gamma * p.gamma / 4;
  c.x = pi * p.gamma * (sigma_L - p.Q / 2);
  return c;
}

CosmologicalCoupling CosmologicalCoupling::from_x(Complex x, const Params& p) {
  p.validate();
  if (!(p.gamma < 2)) throw DomainError("CosmologicalCoupling: requires gamma in (0, 2)");
  CosmologicalCoupling c;
  c.theta = pi * p.gamma * p.gamma / 4;
  c.x = x;
  const double r = std::sqrt(1 / std::sin(c.theta));
  c.mu_L = r * std::cos(x);
  c.mu_R = r * std::cos(x + c.theta);
  c.sigma_L = x / (pi * p.gamma) + p.Q / 2;
  c.sigma_R = c.sigma_L + p.gamma / 4;
  return c;
}

Complex crt_mtg_value(double s, double X, double Y, const CosmologicalCoupling& c) {
  return std::exp(-s - c.mu_L * X - c.mu_R * Y);
}

Complex crt_log_expectation(double s, const CosmologicalCoupling& c, double a_sq) {
  return -s + 0.5 * (c.mu_L * c.mu_L + c.mu_R * c.mu_R - 2.0 * c.mu_L * c.mu_R * std::cos(c.theta)) * a_sq * s;
}

GirsanovReport girsanov_drift_check(std::span<const DrivingState> paths, const InsertionSpec& spec,
                                    const Params& p, double tau, int bins, double min_ess) {
  require(!paths.empty(), "girsanov_drift_check: no paths");
  const auto force = girsanov_force_points(spec, p);
  const std::size_t J = force.size();
  GirsanovReport r;
  struct PathData {
    std::size_t steps;
    double weight;
  };
  std::vector<PathData> pd;
  std::vector<double> pilot;
  for (const auto& st : paths) {
    if (st.force_trajectories.size() != J) throw DomainError("girsanov_drift_check: tracers do not match the spec");
    for (double rho : st.rho)
      if (rho != 0.0) throw DomainError("girsanov_drift_check: paths must be plain reverse SLE");
    const double dt = st.driving.dt;
    const auto steps = static_cast<std::size_t>(std::llround(tau / dt));
    if (st.driving.driving.size() < steps + 1) throw DomainError("girsanov_drift_check: path shorter than tau");
    FlowSnapshot s0, s1;
    s0.W = st.driving.driving[0];
    s1.W = st.driving.driving[steps];
    for (const auto& tp : st.force_trajectories) {
      if (tp.collided && tp.collision_time <= tau) throw SingularityError("girsanov_drift_check: collision before tau");
      s0.points.push_back({tp.trajectory[0], tp.derivative[0]});
      s1.points.push_back({tp.trajectory[steps], tp.derivative[steps]});
    }
    const double w = std::exp(log_martingale_M(s1, spec, p) - log_martingale_M(s0, spec, p));
    pd.push_back({steps, w});
    r.weights.push_back(w);
    r.W_tau.push_back(s1.W);
    for (std::size_t k = 0; k < steps && pilot.size() < 200000; k += std::max<std::size_t>(1, steps / 20)) {
      double d = 0.0;
      for (std::size_t j = 0; j < J; ++j) d += std::real(-force[j].rho / (st.force_trajectories[j].trajectory[k] - st.driving.driving[k]));
      pilot.push_back(d);
    }
  }
  r.ess = effective_sample_size(r.weights);
  if (r.ess < min_ess)
    throw ConvergenceError("girsanov_drift_check: effective sample size too small; increase N or reduce tau", r.ess);
  if (J == 0) pilot.assign({-1.0, 1.0});
  BinnedResidual br(equal_mass_edges(pilot, J == 0 ? 1 : bins));
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto& st = paths[i];
    const double dt = st.driving.dt;
    br.begin_path(pd[i].weight);
    for (std::size_t k = 0; k < pd[i].steps; ++k) {
      const double W = st.driving.driving[k];
      double d = 0.0;
      for (std::size_t j = 0; j < J; ++j) d += std::real(-force[j].rho / (st.force_trajectories[j].trajectory[k] - W));
      br.add(d, d, (st.driving.driving[k + 1] - W) / dt);
    }
    br.end_path();
  }
  r.drift_bins = br.bins();
  for (const auto& b : r.drift_bins)
    if (b.count > 0 && std::isfinite(b.z)) r.max_abs_z = std::max(r.max_abs_z, std::abs(b.z));
  return r;
}

}  // namespace lqz
