#include "lqz/zipper.hpp"

#include <cmath>
#include <map>
#include <utility>

#include "lqz/green.hpp"
#include "lqz/parallel.hpp"
#include "lqz/quadrature.hpp"

namespace lqz {

double zipper_profile_at(const Params& p, double W, std::span<const ForceImage> force, Complex g,
                         Complex dg) {
  const double sk = p.sqrt_kappa();
  double v = -green_neutral(g, Complex(W, 0.0)) / sk;
  for (const auto& f : force)
    if (f.rho != 0.0) v += f.rho / (2 * sk) * green_neutral(g, f.image);
  return v + p.Q * std::log(std::abs(dg));
}

ZipperProfile::ZipperProfile(double t, DrivingState state, Params p)
    : t_(t), state_(std::move(state)), p_(p) {
  p_.validate();
  const auto& ev = state_.driving;
  if (!(t >= 0 && t <= ev.duration() * (1 + 1e-12)))
    throw DomainError("zipper_profile: t outside the recorded path");
  if (state_.threshold_hit && t > state_.threshold_time)
    throw DomainError("zipper_profile: t past the continuation threshold");
  W_ = ev.at(t);
  std::vector<Complex> starts;
  for (const auto& tp : state_.force_trajectories) starts.push_back(tp.start);
  auto imgs = flow_points(starts, ev, 0.0, t);
  for (std::size_t j = 0; j < imgs.size(); ++j) force_.push_back({state_.rho[j], imgs[j].g});
}

double ZipperProfile::operator()(Complex z) const {
  const Complex pt[1] = {z};
  auto r = flow_points(pt, state_.driving, 0.0, t_);
  if (r[0].collided) throw SingularityError("zipper_profile: point swallowed before t");
  return zipper_profile_at(p_, W_, force_, r[0].g, r[0].dg);
}

ZipperProfile zipper_profile(double t, const DrivingState& state, const Params& p) {
  return ZipperProfile(t, state, p);
}

PairingQuadrature pairing_quadrature(std::span<const TestFunction> tests, int nr, int nt) {
  require(nr >= 1 && nt >= 1, "pairing_quadrature: need positive node counts");
  const GaussRule& g = gauss_legendre(nr);
  PairingQuadrature q;
  std::map<std::tuple<double, double, double>, std::size_t> first;  // bump -> first node
  std::vector<std::vector<std::pair<std::size_t, double>>> cols(tests.size());
  const int per = nr * nt;
  for (std::size_t a = 0; a < tests.size(); ++a) {
    for (const auto& [coef, b] : tests[a].terms()) {
      auto key = std::make_tuple(b.center.real(), b.center.imag(), b.radius);
      auto it = first.find(key);
      std::size_t base;
      if (it == first.end()) {
        base = q.nodes.size();
        first[key] = base;
        for (int i = 0; i < nr; ++i) {
          const double x = 0.5 * (g.x[i] + 1);
          for (int j = 0; j < nt; ++j)
            q.nodes.push_back(b.center + b.radius * x * std::polar(1.0, 2 * pi * (j + 0.5) / nt));
        }
      } else {
        base = it->second;
      }
      double total = 0.0;
      std::vector<double> w(per);
      for (int i = 0; i < nr; ++i) {
        const double x = 0.5 * (g.x[i] + 1);
        for (int j = 0; j < nt; ++j) total += w[i * nt + j] = g.w[i] * x * unit_bump_density(x);
      }
      for (int k = 0; k < per; ++k) cols[a].emplace_back(base + k, coef * w[k] / total);
    }
  }
  q.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(tests.size()),
                                    static_cast<Eigen::Index>(q.nodes.size()));
  for (std::size_t a = 0; a < tests.size(); ++a)
    for (const auto& [k, w] : cols[a]) q.weights(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(k)) += w;
  return q;
}

namespace {

void check_setup(const ZipperCouplingSetup& s) {
  s.params.validate();
  require(!s.tests.empty(), "zipper coupling: no test functions");
  require(s.tau > 0 && s.dt > 0, "zipper coupling: tau and dt must be positive");
  for (const auto& f : s.tests)
    if (std::abs(f.mass()) > 1e-12) throw DomainError("zipper coupling: test functions must be mean-zero");
}

std::shared_ptr<Discretization> pairing_discretization(const ZipperCouplingSetup& s) {
  auto d = std::make_shared<Discretization>();
  for (const auto& f : s.tests) d->add_pairing(f);
  return d;
}

}  // namespace

Eigen::MatrixXd zipper_lhs_samples(const ZipperCouplingSetup& s, std::size_t n, std::uint64_t seed,
                                   int workers) {
  check_setup(s);
  const auto q = pairing_quadrature(s.tests, s.radial_nodes, s.angular_nodes);
  std::vector<ForceImage> f0;
  for (const auto& f : s.force) f0.push_back({f.rho, f.z});
  Eigen::VectorXd h0(static_cast<Eigen::Index>(q.nodes.size()));
  for (std::size_t k = 0; k < q.nodes.size(); ++k)
    h0(static_cast<Eigen::Index>(k)) = zipper_profile_at(s.params, 0.0, f0, q.nodes[k], 1.0);
  const Eigen::VectorXd mean = q.weights * h0;
  SpectralSampler sampler(pairing_discretization(s), s.spectral);
  const auto T = static_cast<Eigen::Index>(s.tests.size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), T);
  parallel_for(n, workers, [&](std::size_t i) {
    Stream rng(seed, i);
    auto field = sampler.sample(rng);
    for (Eigen::Index a = 0; a < T; ++a)
      out(static_cast<Eigen::Index>(i), a) = mean(a) + field.gaussian(a);
  });
  return out;
}

ZipperRhsSamples zipper_rhs_samples(const ZipperCouplingSetup& s, std::size_t n, std::uint64_t seed,
                                    int workers) {
  check_setup(s);
  const auto q = pairing_quadrature(s.tests, s.radial_nodes, s.angular_nodes);
  const Eigen::MatrixXd sigma0 = covariance_matrix(*pairing_discretization(s));
  const std::size_t M = q.nodes.size(), F = s.force.size();
  const auto T = static_cast<Eigen::Index>(s.tests.size());

  // Path-independent part of S: 0.5 log|z - w|^2 + log|z - conj w|, diagonal log(2 Im z).
  Eigen::MatrixXd base(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j) {
      const Complex z = q.nodes[i], w = q.nodes[j];
      base(i, j) = i == j ? std::log(2 * z.imag()) : 0.5 * std::log(std::norm(z - w)) + std::log(std::abs(z - std::conj(w)));
    }

  std::vector<ForcePointSpec> pts = s.force;
  for (Complex z : q.nodes) pts.push_back({0.0, z});
  const auto steps = static_cast<std::size_t>(std::llround(s.tau / s.dt));

  ZipperRhsSamples out;
  out.samples.resize(static_cast<Eigen::Index>(n), T);
  std::vector<char> collided(n, 0);
  parallel_for(n, workers, [&](std::size_t i) {
    Stream rng(seed, i);
    ReverseSleStepper st(s.params, pts, s.dt, rng);
    for (std::size_t k = 0; k < steps && !st.threshold_hit(); ++k) st.step();
    const auto& P = st.points();
    bool bad = st.threshold_hit();
    for (std::size_t k = F; k < P.size() && !bad; ++k) bad = P[k].collided;
    if (bad) {
      collided[i] = 1;
      out.samples.row(static_cast<Eigen::Index>(i)).setConstant(std::numeric_limits<double>::quiet_NaN());
      return;
    }
    std::vector<ForceImage> fi;
    for (std::size_t j = 0; j < F; ++j) fi.push_back({s.force[j].rho, P[j].g});
    Eigen::VectorXd h(static_cast<Eigen::Index>(M));
    for (std::size_t k = 0; k < M; ++k)
      h(static_cast<Eigen::Index>(k)) = zipper_profile_at(s.params, st.W(), fi, P[F + k].g, P[F + k].dg);
    Eigen::MatrixXd S(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
    for (std::size_t a = 0; a < M; ++a) {
      const Complex ga = P[F + a].g;
      S(a, a) = base(a, a) - std::log(std::abs(P[F + a].dg)) - std::log(2 * ga.imag());
      for (std::size_t b = a + 1; b < M; ++b) {
        const Complex gb = P[F + b].g;
        S(a, b) = S(b, a) = base(a, b) - 0.5 * std::log(std::norm(ga - gb) * std::norm(ga - std::conj(gb)));
      }
    }
    Eigen::MatrixXd sigma = sigma0 + q.weights * S * q.weights.transpose();
    Eigen::MatrixXd L;
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() == Eigen::Success) {
      L = llt.matrixL();
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
      L = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
    Eigen::VectorXd z(T);
    for (Eigen::Index a = 0; a < T; ++a) z(a) = rng.normal();
    out.samples.row(static_cast<Eigen::Index>(i)) = (q.weights * h + L * z).transpose();
  });
  for (char c : collided) out.collided_paths += c;
  return out;
}

}  // namespace lqz
