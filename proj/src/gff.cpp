#include "lqz/gff.hpp"

#include <algorithm>
#include <cmath>

#include "lqz/quadrature.hpp"

namespace lqz {

namespace {

// Cumulative radial tables of the unit bump: mass m(x) inside radius x and
// tau(x) = int_x^1 log y dmu(y). Cubic Hermite interpolation with exact slopes.
struct UnitTables {
  static constexpr int K = 4096;
  double A;
  std::vector<double> m, tau;

  UnitTables() : m(K + 1), tau(K + 1) {
    // int_0^1 e^{-1/(1-x^2)} x dx = (e^{-1} - E1(1)) / 2
    A = 1.0 / (pi * (std::exp(-1.0) + std::expint(-1.0)));
    auto dm = [&](double x) { return 2 * pi * x * density(x); };
    std::vector<double> seg_m(K), seg_t(K);
    for (int k = 0; k < K; ++k) {
      double a = double(k) / K, b = double(k + 1) / K;
      seg_m[k] = integrate_gl(dm, a, b, 8);
      seg_t[k] = integrate_gl([&](double x) { return x > 0 ? std::log(x) * dm(x) : 0.0; }, a, b, 8);
    }
    m[0] = 0;
    for (int k = 0; k < K; ++k) m[k + 1] = m[k] + seg_m[k];
    tau[K] = 0;
    for (int k = K - 1; k >= 0; --k) tau[k] = tau[k + 1] + seg_t[k];
  }

  double density(double x) const { return x < 1 ? A * std::exp(-1.0 / (1 - x * x)) : 0.0; }

  static double hermite(double t, double h, double y0, double y1, double d0, double d1) {
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
           (t3 - t2) * h * d1;
  }

  // -(log x m(x) + tau(x)) for x in [0, 1)
  double inner(double x) const {
    const double h = 1.0 / K;
    int k = std::min(K - 1, static_cast<int>(x * K));
    double a = k * h, t = (x - a) / h;
    auto dm = [&](double y) { return 2 * pi * y * density(y); };
    double mm = hermite(t, h, m[k], m[k + 1], dm(a), dm(a + h));
    auto dt = [&](double y) { return y > 0 ? -std::log(y) * dm(y) : 0.0; };
    double tt = hermite(t, h, tau[k], tau[k + 1], dt(a), dt(a + h));
    double lm = x > 0 ? std::log(x) * mm : 0.0;
    return -(lm + tt);
  }
};

const UnitTables& tables() {
  static const UnitTables t;
  return t;
}

// Circle average of U_b over |v - c| = eps.
double circle_average_potential(const Bump& b, Complex c, double eps) {
  const double d = std::abs(c - b.center);
  if (d >= b.radius + eps) return -std::log(d);
  if (eps >= d + b.radius) return -std::log(eps);
  auto f = [&](double th) { return b.potential(c + eps * std::polar(1.0, th)); };
  return periodic_average(f, 1e-13, 32, 1 << 16).value;
}

}  // namespace

double unit_bump_density(double x) { return tables().density(x); }

double Bump::operator()(Complex z) const {
  return tables().density(std::abs(z - center) / radius) / (radius * radius);
}

double Bump::potential(Complex z) const {
  const double rho = std::abs(z - center);
  if (rho >= radius) return -std::log(rho);
  return -std::log(radius) + tables().inner(rho / radius);
}

double TestFunction::operator()(Complex z) const {
  double s = 0.0;
  for (const auto& [w, b] : terms_) s += w * b(z);
  return s;
}

double TestFunction::mass() const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.first;
  return s;
}

std::array<double, 4> TestFunction::support_box() const {
  std::array<double, 4> box{1e300, -1e300, 1e300, -1e300};
  for (const auto& [w, b] : terms_) {
    box[0] = std::min(box[0], b.center.real() - b.radius);
    box[1] = std::max(box[1], b.center.real() + b.radius);
    box[2] = std::min(box[2], b.center.imag() - b.radius);
    box[3] = std::max(box[3], b.center.imag() + b.radius);
  }
  return box;
}

TestFunction operator+(TestFunction a, const TestFunction& b) {
  for (const auto& t : b.terms_) a.terms_.push_back(t);
  return a;
}

TestFunction operator-(TestFunction a, const TestFunction& b) {
  for (const auto& [w, bb] : b.terms_) a.terms_.emplace_back(-w, bb);
  return a;
}

TestFunction operator*(double s, TestFunction a) {
  for (auto& t : a.terms_) t.first *= s;
  return a;
}

double bump_log_plus(const Bump& b) {
  const double d = std::abs(b.center);
  if (d >= 1 + b.radius) return std::log(d);
  if (d + b.radius <= 1) return 0.0;
  // log max(|z|, 1) is the unit-circle average of log|z - v|.
  return -periodic_average([&](double th) { return b.potential(std::polar(1.0, th)); }, 1e-13, 32,
                           1 << 16)
              .value;
}

double bump_covariance(const Bump& a, const Bump& b) {
  double self;
  const double d = std::abs(a.center - b.center);
  if (d >= a.radius + b.radius) {
    self = -std::log(d);
  } else {
    // Polar Gauss on the support of a: radial Gauss-Legendre times angular trapezoid.
    const GaussRule& g = gauss_legendre(64);
    const int M = 128;
    self = 0.0;
    for (int i = 0; i < 64; ++i) {
      double x = 0.5 * (g.x[i] + 1), wx = 0.5 * g.w[i];
      double dens = unit_bump_density(x);
      if (dens == 0) continue;
      double ang = 0.0;
      for (int j = 0; j < M; ++j)
        ang += b.potential(a.center + a.radius * x * std::polar(1.0, 2 * pi * (j + 0.5) / M));
      self += wx * dens * 2 * pi * x * ang / M;
    }
  }
  // The reflected term is harmonic on the support: -log|c_a - conj c_b|.
  return self - std::log(std::abs(a.center - std::conj(b.center))) + 2 * bump_log_plus(a) +
         2 * bump_log_plus(b);
}

double bump_circle_covariance(const Bump& b, const CircleFunctional& c) {
  return circle_average_potential(b, c.center, c.eps) +
         circle_average_potential(b, std::conj(c.center), c.eps) + 2 * bump_log_plus(b) +
         2 * circle_log_plus(c.center, c.eps);
}

double circle_covariance(const CircleFunctional& a, const CircleFunctional& b) {
  // Half circles on R average the reflection-symmetric kernel like full circles.
  double lam = -circle_avg_log_max(b.center, b.eps, a.center, a.eps);
  double lam_bar = -circle_avg_log_max(std::conj(b.center), b.eps, a.center, a.eps);
  return lam + lam_bar + 2 * circle_log_plus(a.center, a.eps) + 2 * circle_log_plus(b.center, b.eps);
}

double functional_covariance(const Functional& a, const Functional& b) {
  const auto* ca = std::get_if<CircleFunctional>(&a);
  const auto* cb = std::get_if<CircleFunctional>(&b);
  if (ca && cb) return circle_covariance(*ca, *cb);
  if (ca || cb) {
    const auto& c = ca ? *ca : *cb;
    const auto& f = ca ? std::get<TestFunction>(b) : std::get<TestFunction>(a);
    double s = 0.0;
    for (const auto& [w, bump] : f.terms()) s += w * bump_circle_covariance(bump, c);
    return s;
  }
  const auto& fa = std::get<TestFunction>(a);
  const auto& fb = std::get<TestFunction>(b);
  double s = 0.0;
  for (const auto& [wa, ba] : fa.terms())
    for (const auto& [wb, bb] : fb.terms()) s += wa * wb * bump_covariance(ba, bb);
  return s;
}

bool Window::contains(const CircleFunctional& c) const {
  return c.center.real() - c.eps >= xmin && c.center.real() + c.eps <= xmax &&
         c.center.imag() + c.eps <= ymax;
}

std::size_t Discretization::add_circle(Complex center, double eps) {
  require(eps > 0, "circle functional: eps must be positive");
  if (center.imag() < 0 || (center.imag() > 0 && center.imag() < eps))
    throw DomainError("circle functional: contour must be a circle in H or a half circle on R");
  CircleFunctional c{center, eps};
  if (!window_.contains(c)) throw DomainError("circle functional: contour exits the window");
  auto key = std::make_tuple(center.real(), center.imag(), eps);
  if (auto it = circle_index_.find(key); it != circle_index_.end()) return it->second;
  items_.emplace_back(c);
  circle_index_[key] = items_.size() - 1;
  return items_.size() - 1;
}

std::size_t Discretization::add_pairing(const TestFunction& f) {
  require(!f.terms().empty(), "pairing: empty test function");
  for (const auto& [w, b] : f.terms())
    if (!(b.radius > 0 && b.radius < b.center.imag()))
      throw DomainError("pairing: bump support must lie inside H");
  auto box = f.support_box();
  if (box[0] < window_.xmin || box[1] > window_.xmax || box[3] > window_.ymax)
    throw DomainError("pairing: support exits the window");
  items_.emplace_back(f);
  return items_.size() - 1;
}

std::optional<std::size_t> Discretization::find_circle(Complex center, double eps) const {
  auto it = circle_index_.find(std::make_tuple(center.real(), center.imag(), eps));
  if (it == circle_index_.end()) return std::nullopt;
  return it->second;
}

Eigen::MatrixXd covariance_matrix(const Discretization& d) {
  const auto& f = d.functionals();
  const auto n = static_cast<Eigen::Index>(f.size());
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) K(i, j) = K(j, i) = functional_covariance(f[i], f[j]);
  return K;
}

double FieldSample::circle_average(Complex z, double eps) const {
  double g = 0.0;
  if (discretization) {
    if (!discretization->window().contains({z, eps}))
      throw DomainError("circle_average: contour exits the window");
    auto idx = discretization->find_circle(z, eps);
    if (!idx) throw DomainError("circle_average: contour not recorded in this discretization");
    g = gaussian(static_cast<Eigen::Index>(*idx));
  }
  double p = profile ? profile->circle_average(z, eps) : 0.0;
  return g + p + c;
}

FieldSample FieldSample::shifted(double dc) const {
  FieldSample s = *this;
  s.c += dc;
  return s;
}

FieldSample constant_field(double c, std::shared_ptr<const Discretization> d) {
  FieldSample s;
  s.discretization = std::move(d);
  s.gaussian = Eigen::VectorXd::Zero(s.discretization ? static_cast<Eigen::Index>(s.discretization->size()) : 0);
  s.c = c;
  return s;
}

CholeskySampler::CholeskySampler(std::shared_ptr<const Discretization> d) : d_(std::move(d)) {
  cov_ = covariance_matrix(*d_);
  Eigen::LLT<Eigen::MatrixXd> llt(cov_);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
  } else {
    fallback_ = true;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov_);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    factor_ = es.eigenvectors() * ev.asDiagonal();
  }
}

FieldSample CholeskySampler::sample(Stream& rng) const {
  const auto n = factor_.rows();
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
  FieldSample s;
  s.discretization = d_;
  s.gaussian = fallback_ ? Eigen::VectorXd(factor_ * z)
                         : Eigen::VectorXd(factor_.triangularView<Eigen::Lower>() * z);
  return s;
}

Eigen::MatrixXd CholeskySampler::sample_values(std::span<Stream> streams) const {
  const auto n = factor_.rows();
  Eigen::MatrixXd Z(n, static_cast<Eigen::Index>(streams.size()));
  for (Eigen::Index j = 0; j < Z.cols(); ++j)
    for (Eigen::Index i = 0; i < n; ++i) Z(i, j) = streams[j].normal();
  if (fallback_) return factor_ * Z;
  return factor_.triangularView<Eigen::Lower>() * Z;
}

// ---------------------------------------------------------------------------

namespace {

// x - (1 - e^{-x}), stable for small x
double ou_self(double x) {
  if (x < 1e-3) return x * x / 2 - x * x * x / 6 + x * x * x * x / 24;
  return x + std::expm1(-x);
}

// x - 2(1 - e^{-x}) + (1 - e^{-2x})/2, stable for small x
double ou_integral_var(double x) {
  if (x < 1e-2) return x * x * x / 3 - x * x * x * x / 4 + 7.0 / 60 * std::pow(x, 5);
  return x + 2 * std::expm1(-x) - 0.5 * std::expm1(-2 * x);
}

struct OuStep {
  double a, mean_i, sxi, czx, sz2;
};

OuStep ou_step(int n, double delta) {
  const double x = n * delta, a = std::exp(-x);
  const double var_xi = 2.0 / n * (-std::expm1(-2 * x));
  const double var_zeta = 4.0 / (double(n) * n * n) * ou_integral_var(x);
  const double cov = 2.0 / (double(n) * n) * std::expm1(-x) * std::expm1(-x);
  OuStep s{a, -std::expm1(-x) / n, 0, 0, 0};
  if (var_xi > 1e-300) {
    s.sxi = std::sqrt(var_xi);
    s.czx = cov / s.sxi;
    s.sz2 = std::sqrt(std::max(0.0, var_zeta - cov * cov / var_xi));
  }
  return s;
}

}  // namespace

SpectralSampler::SpectralSampler(std::shared_ptr<const Discretization> d, SpectralOptions opt)
    : d_(std::move(d)), opt_(opt) {
  require(opt_.modes >= 1 && opt_.theta_nodes >= 16 && opt_.du > 0, "SpectralSampler: bad options");
  const int N = opt_.modes;
  const int J = opt_.circle_nodes > 0 ? opt_.circle_nodes : 2 * N + 2;
  std::vector<double> bp{0.0};
  const auto& items = d_->functionals();

  // Circle nodes in polar coordinates.
  struct Node {
    double u, th, w;
  };
  std::vector<std::vector<Node>> nodes(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto* c = std::get_if<CircleFunctional>(&items[i]);
    if (!c) continue;
    const int count = c->half() ? J + 1 : J;
    for (int j = 0; j < count; ++j) {
      double th = c->half() ? pi * j / J : 2 * pi * j / J;
      double w = c->half() ? ((j == 0 || j == J) ? 0.5 : 1.0) / J : 1.0 / J;
      Complex v = c->center + c->eps * std::polar(1.0, th);
      if (c->half()) v.imag(std::max(0.0, v.imag()));
      if (std::abs(v) == 0) throw DomainError("SpectralSampler: contour passes through 0");
      Node nd{std::log(std::abs(v)), std::max(0.0, std::arg(v)), w};
      if (nd.th > pi) nd.th = pi;
      nodes[i].push_back(nd);
      bp.push_back(nd.u);
    }
  }
  // Radial cells of each bump.
  for (const auto& it : items) {
    const auto* f = std::get_if<TestFunction>(&it);
    if (!f) continue;
    for (const auto& [w, b] : f->terms()) {
      const double lo = std::log(std::abs(b.center) - b.radius), hi = std::log(std::abs(b.center) + b.radius);
      const int cells = std::max(1, static_cast<int>(std::ceil((hi - lo) / opt_.du)));
      for (int k = 0; k <= cells; ++k) bp.push_back(lo + (hi - lo) * k / cells);
    }
  }
  // Round-off may split one radius into several; merge them (onto 0 when present).
  for (double& u : bp)
    if (std::abs(u) < 1e-13) u = 0.0;
  std::sort(bp.begin(), bp.end());
  for (double u : bp)
    if (u_.empty() || u - u_.back() > 1e-13 * std::max(1.0, std::abs(u))) u_.push_back(u);
  zero_ = static_cast<std::size_t>(std::lower_bound(u_.begin(), u_.end(), 0.0) - u_.begin());

  for (std::size_t i = 0; i < items.size(); ++i) {
    if (nodes[i].empty()) continue;
    CircleNodes cn;
    cn.index = i;
    for (const auto& nd : nodes[i]) {
      auto it = std::lower_bound(u_.begin(), u_.end(), nd.u - 1e-13 * std::max(1.0, std::abs(nd.u)));
      cn.breakpoint.push_back(static_cast<std::size_t>(it - u_.begin()));
      cn.theta.push_back(nd.th);
      cn.weight.push_back(nd.w);
    }
    circles_.push_back(std::move(cn));
  }

  // Mode weights F_n(u) = e^{2u} int_0^pi f(e^{u + i th}) cos(n th) d th, averaged per interval.
  const int M = opt_.theta_nodes;
  const GaussRule& g3 = gauss_legendre(3);
  double fmax = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto* f = std::get_if<TestFunction>(&items[i]);
    if (!f) continue;
    PairingWeights pw;
    pw.index = i;
    double rmin = 1e300, rmax = 0;
    for (const auto& [w, b] : f->terms()) {
      rmin = std::min(rmin, std::abs(b.center) - b.radius);
      rmax = std::max(rmax, std::abs(b.center) + b.radius);
    }
    for (std::size_t k = 0; k + 1 < u_.size(); ++k) {
      const double a = u_[k], b = u_[k + 1];
      if (b <= std::log(rmin) || a >= std::log(rmax)) continue;
      std::vector<double> F(N + 1, 0.0);
      for (int q = 0; q < 3; ++q) {
        const double u = 0.5 * (a + b) + 0.5 * (b - a) * g3.x[q], r = std::exp(u);
        std::vector<double> acc(N + 1, 0.0);
        bool any = false;
        for (int j = 0; j <= M; ++j) {
          const double th = pi * j / M;
          const double fv = (*f)(std::polar(r, th));
          if (fv == 0.0) continue;
          any = true;
          const double w = ((j == 0 || j == M) ? 0.5 : 1.0) * pi / M * fv;
          const double c1 = std::cos(th);
          double cm = 1.0, cn = c1;
          acc[0] += w;
          for (int n = 1; n <= N; ++n) {
            acc[n] += w * cn;
            double nx = 2 * c1 * cn - cm;
            cm = cn;
            cn = nx;
          }
        }
        if (!any) continue;
        for (int n = 0; n <= N; ++n) F[n] += 0.5 * g3.w[q] * r * r * acc[n];
      }
      bool nonzero = false;
      for (double v : F) {
        if (v != 0.0) nonzero = true;
        fmax = std::max(fmax, std::abs(v));
      }
      if (!nonzero) continue;
      pw.intervals.push_back(k);
      pw.weights.push_back(std::move(F));
    }
    pairings_.push_back(std::move(pw));
  }
  active_modes_ = N;
  if (opt_.drop_negligible_modes && circles_.empty() && fmax > 0) {
    int last = 0;
    for (const auto& pw : pairings_)
      for (const auto& F : pw.weights)
        for (int n = 1; n <= N; ++n)
          if (std::abs(F[n]) > 1e-12 * fmax) last = std::max(last, n);
    active_modes_ = last;
  }

  const std::size_t K = u_.size();
  if (static_cast<double>(active_modes_) * K <= 4e6) {
    steps_.resize(5 * active_modes_ * (K - 1));
    for (int n = 1; n <= active_modes_; ++n)
      for (std::size_t k = 0; k + 1 < K; ++k) {
        OuStep s = ou_step(n, u_[k + 1] - u_[k]);
        double* p = &steps_[5 * ((n - 1) * (K - 1) + k)];
        p[0] = s.a;
        p[1] = s.mean_i;
        p[2] = s.sxi;
        p[3] = s.czx;
        p[4] = s.sz2;
      }
  }
  for (auto& cn : circles_) {
    const std::size_t J = cn.theta.size();
    if (static_cast<double>(active_modes_) * J > 4e6) continue;
    cn.cos_table.resize(active_modes_ * J);
    for (int n = 1; n <= active_modes_; ++n)
      for (std::size_t j = 0; j < J; ++j) cn.cos_table[(n - 1) * J + j] = cn.weight[j] * std::cos(n * cn.theta[j]);
  }
}

FieldSample SpectralSampler::sample(Stream& rng) const {
  const std::size_t K = u_.size();
  const int N = active_modes_;
  std::vector<double> val(d_->size(), 0.0);
  std::vector<double> X(K), I(K > 0 ? K - 1 : 0);

  auto accumulate = [&](int n) {
    for (const auto& pw : pairings_)
      for (std::size_t q = 0; q < pw.intervals.size(); ++q) val[pw.index] += pw.weights[q][n] * I[pw.intervals[q]];
  };

  // Radial part: B(2u), a two-sided Brownian motion with variance 2|u|, pinned at 0.
  X[zero_] = 0.0;
  const double s2 = std::sqrt(2.0);
  for (std::size_t k = zero_; k + 1 < K; ++k) {
    const double d = u_[k + 1] - u_[k];
    const double z1 = rng.normal(), z2 = rng.normal();
    const double xi = std::sqrt(d) * z1, zeta = 0.5 * d * xi + d * std::sqrt(d) / (2 * std::sqrt(3.0)) * z2;
    X[k + 1] = X[k] + s2 * xi;
    I[k] = X[k] * d + s2 * zeta;
  }
  for (std::size_t k = zero_; k > 0; --k) {
    const double d = u_[k] - u_[k - 1];
    const double z1 = rng.normal(), z2 = rng.normal();
    const double xi = std::sqrt(d) * z1, zeta = 0.5 * d * xi + d * std::sqrt(d) / (2 * std::sqrt(3.0)) * z2;
    X[k - 1] = X[k] + s2 * xi;
    I[k - 1] = X[k] * d + s2 * zeta;
  }
  accumulate(0);
  for (const auto& cn : circles_)
    for (std::size_t j = 0; j < cn.theta.size(); ++j) val[cn.index] += cn.weight[j] * X[cn.breakpoint[j]];

  for (int n = 1; n <= N; ++n) {
    X[0] = std::sqrt(2.0 / n) * rng.normal();
    if (!steps_.empty()) {
      const double* p = &steps_[5 * (n - 1) * (K - 1)];
      for (std::size_t k = 0; k + 1 < K; ++k, p += 5) {
        const double z1 = rng.normal(), z2 = rng.normal();
        X[k + 1] = p[0] * X[k] + p[2] * z1;
        I[k] = p[1] * X[k] + p[3] * z1 + p[4] * z2;
      }
    } else {
      for (std::size_t k = 0; k + 1 < K; ++k) {
        const OuStep s = ou_step(n, u_[k + 1] - u_[k]);
        const double z1 = rng.normal(), z2 = rng.normal();
        X[k + 1] = s.a * X[k] + s.sxi * z1;
        I[k] = s.mean_i * X[k] + s.czx * z1 + s.sz2 * z2;
      }
    }
    accumulate(n);
    for (const auto& cn : circles_) {
      const std::size_t J = cn.theta.size();
      double acc = 0.0;
      if (!cn.cos_table.empty()) {
        const double* c = &cn.cos_table[(n - 1) * J];
        for (std::size_t j = 0; j < J; ++j) acc += c[j] * X[cn.breakpoint[j]];
      } else {
        for (std::size_t j = 0; j < J; ++j) acc += cn.weight[j] * X[cn.breakpoint[j]] * std::cos(n * cn.theta[j]);
      }
      val[cn.index] += acc;
    }
  }
  FieldSample out;
  out.discretization = d_;
  out.gaussian = Eigen::Map<Eigen::VectorXd>(val.data(), static_cast<Eigen::Index>(val.size()));
  return out;
}

Eigen::MatrixXd SpectralSampler::pairing_covariance() const {
  const auto n = static_cast<Eigen::Index>(d_->size());
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  auto radial = [&](std::size_t k, std::size_t l) {
    double a = u_[k], b = u_[k + 1], c = u_[l], d = u_[l + 1];
    if ((a < 0) != (c < 0)) return 0.0;
    if (a < 0) {
      // Mirror to the positive side; the inner interval comes first.
      std::tie(a, b) = std::make_pair(-b, -a);
      std::tie(c, d) = std::make_pair(-d, -c);
    }
    if (k == l) return 2 * ((b - a) * (b - a) * a + std::pow(b - a, 3) / 3);
    if (a > c) {
      std::swap(a, c);
      std::swap(b, d);
    }
    return (b * b - a * a) * (d - c);
  };
  auto ou = [&](int m, std::size_t k, std::size_t l) {
    const double m3 = double(m) * m * m;
    if (k == l) return 4.0 / m3 * ou_self(m * (u_[k + 1] - u_[k]));
    if (k > l) std::swap(k, l);
    return 2.0 / m3 * std::exp(-m * (u_[l] - u_[k + 1])) * (-std::expm1(-m * (u_[k + 1] - u_[k]))) *
           (-std::expm1(-m * (u_[l + 1] - u_[l])));
  };
  for (const auto& pa : pairings_)
    for (const auto& pb : pairings_) {
      double s = 0.0;
      for (std::size_t p = 0; p < pa.intervals.size(); ++p)
        for (std::size_t q = 0; q < pb.intervals.size(); ++q) {
          const std::size_t k = pa.intervals[p], l = pb.intervals[q];
          s += pa.weights[p][0] * pb.weights[q][0] * radial(k, l);
          for (int m = 1; m <= active_modes_; ++m) s += pa.weights[p][m] * pb.weights[q][m] * ou(m, k, l);
        }
      C(static_cast<Eigen::Index>(pa.index), static_cast<Eigen::Index>(pb.index)) = s;
    }
  return C;
}

}  // namespace lqz
