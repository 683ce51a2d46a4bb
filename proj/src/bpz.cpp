#include "lqz/bpz.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "lqz/gff.hpp"
#include "lqz/observables.hpp"
#include "lqz/quadrature.hpp"
#include "lqz/rng.hpp"

namespace lqz {

double CorrelationConfig::total_charge() const {
  double s = delta / 2 + beta_star / 2;
  for (double a : alpha) s += a;
  for (double b : beta) s += b / 2;
  return s;
}

int CorrelationConfig::k_star() const {
  return static_cast<int>(std::upper_bound(point.x.begin(), point.x.end(), point.w) - point.x.begin());
}

InsertionSpec CorrelationConfig::insertions(const BpzPoint& at) const {
  InsertionSpec s;
  for (std::size_t j = 0; j < alpha.size(); ++j) s.bulk.push_back({alpha[j], at.z[j]});
  s.boundary.push_back({beta_star / 2, at.w});
  for (std::size_t k = 0; k < beta.size(); ++k) s.boundary.push_back({beta[k] / 2, at.x[k]});
  s.delta_inf = delta / 2;
  return s;
}

std::vector<std::string> CorrelationConfig::validate() const {
  if (!(gamma > 0 && gamma < 2)) throw DomainError("CorrelationConfig: gamma must lie in (0, 2)");
  const bool a = std::abs(beta_star + gamma / 2) < 1e-12, b = std::abs(beta_star + 2 / gamma) < 1e-12;
  if (!a && !b) throw DomainError("CorrelationConfig: beta_* must be -gamma/2 or -2/gamma");
  if (alpha.size() != point.z.size()) throw DomainError("CorrelationConfig: one bulk point per alpha");
  if (beta.size() != point.x.size()) throw DomainError("CorrelationConfig: one boundary point per beta");
  for (Complex z : point.z)
    if (!(z.imag() > 0)) throw DomainError("CorrelationConfig: bulk points must lie in H");
  for (std::size_t k = 1; k < point.x.size(); ++k)
    if (!(point.x[k] > point.x[k - 1])) throw DomainError("CorrelationConfig: boundary points must increase");
  for (double x : point.x)
    if (x == point.w) throw DomainError("CorrelationConfig: w coincides with a boundary point");
  if (mu.size() != point.x.size() + 1) throw DomainError("CorrelationConfig: need one mu per interval");
  for (double m : mu)
    if (!(m >= 0)) throw DomainError("CorrelationConfig: boundary cosmological constants must be >= 0");
  if (!(mu_L >= 0 && mu_R >= 0)) throw DomainError("CorrelationConfig: mu_L, mu_R must be >= 0");
  const auto& W = window;
  if (!(W.radius > W.inner && W.inner > W.ymin && W.ymin > 0))
    throw DomainError("CorrelationConfig: need radius > inner > ymin > 0");
  if (W.ladder.empty()) throw DomainError("CorrelationConfig: empty eps ladder");
  for (double e : W.ladder)
    if (!(e > 0 && e <= W.ymin)) throw DomainError("CorrelationConfig: each eps must lie in (0, ymin]");
  auto inside = [&](Complex z) { return std::abs(z.real()) < W.inner && z.imag() < W.inner; };
  for (Complex z : point.z)
    if (!inside(z)) throw DomainError("CorrelationConfig: bulk points must lie in the inner box");
  for (double x : point.x)
    if (std::abs(x) >= W.inner) throw DomainError("CorrelationConfig: boundary points must lie in the inner box");
  if (std::abs(point.w) >= W.inner) throw DomainError("CorrelationConfig: w must lie in the inner box");
  if (samples < 2) throw DomainError("CorrelationConfig: need at least 2 samples");
  std::vector<std::string> warn;
  if (a && std::abs(gamma - std::sqrt(2.0)) < 1e-12)
    warn.emplace_back("(gamma, beta_*) = (sqrt 2, -gamma/2) is outside the proven range");
  return warn;
}

SeibergResult seiberg_check(const CorrelationConfig& c) {
  SeibergResult r;
  r.Q = c.Q();
  r.total_charge = c.total_charge();
  auto fail = [&](const std::string& s) { r.violations.push_back(s); };
  if (!(r.total_charge > r.Q)) fail("total charge " + std::to_string(r.total_charge) + " <= Q");
  for (std::size_t j = 0; j < c.alpha.size(); ++j)
    if (!(c.alpha[j] < r.Q)) fail("alpha_" + std::to_string(j) + " >= Q");
  for (std::size_t k = 0; k < c.beta.size(); ++k)
    if (!(c.beta[k] < r.Q)) fail("beta_" + std::to_string(k) + " >= Q");
  if (!(c.delta < r.Q)) fail("delta >= Q");
  r.ok = r.violations.empty();
  return r;
}

namespace {

// int_{-inf}^{u} e^{a v} dv
double exp_tail(double a, double u) { return std::exp(a * u) / a; }

}  // namespace

double c_integral(double area, double length_term, double s_minus_Q, double gamma) {
  if (!(area > 0) || !(length_term >= 0) || !(s_minus_Q > 0) || !(gamma > 0))
    throw DomainError("c_integral: need A > 0, M >= 0, s > Q");
  const double p = s_minus_Q;
  const double c0 = -std::log(area) / gamma;
  const double m = length_term / std::sqrt(area);
  // Below u_lo the exponent is <= 2e-5 and its cubic Taylor remainder is negligible.
  const double u_lo = 2 * std::log(1e-5 / std::max(1.0, m)) / gamma;
  const double u_hi = std::log(50.0) / gamma;
  const double tail = exp_tail(p, u_lo) - exp_tail(p + gamma, u_lo) - m * exp_tail(p + gamma / 2, u_lo) +
                      0.5 * (exp_tail(p + 2 * gamma, u_lo) + 2 * m * exp_tail(p + 1.5 * gamma, u_lo) +
                             m * m * exp_tail(p + gamma, u_lo));
  auto f = [&](double u) {
    const double e = std::exp(gamma * u / 2);
    return std::exp(p * u - e * e - m * e);
  };
  const double main = integrate_adaptive(f, u_lo, u_hi, 1e-12 * std::max(1.0, tail)).value;
  return std::exp(p * c0) * (tail + main);
}

namespace {

struct Cell {
  Complex z;
  double weight;  ///< cell area or length
};

// Quadtree refinement toward the focus points: a cell is kept once its size is at
// most grading times its distance to every focus point.
void refine(std::vector<Cell>& out, Rect r, const TruncationWindow& W, std::span<const Complex> focus) {
  const double size = std::max(r.xmax - r.xmin, r.ymax - r.ymin);
  const Complex mid(0.5 * (r.xmin + r.xmax), 0.5 * (r.ymin + r.ymax));
  double d = 1e300;
  for (Complex f : focus) {
    const double dx = std::max({r.xmin - f.real(), 0.0, f.real() - r.xmax});
    const double dy = std::max({r.ymin - f.imag(), 0.0, f.imag() - r.ymax});
    d = std::min(d, std::hypot(dx, dy));
  }
  if (W.grading <= 0 || size / 2 < W.min_cell || size <= W.grading * d) {
    out.push_back({mid, (r.xmax - r.xmin) * (r.ymax - r.ymin)});
    return;
  }
  const double hx = (r.xmax - r.xmin) / 2, hy = (r.ymax - r.ymin) / 2;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i)
      refine(out, {r.xmin + i * hx, r.xmin + (i + 1) * hx, r.ymin + j * hy, r.ymin + (j + 1) * hy}, W, focus);
}

std::vector<Cell> area_cells(const TruncationWindow& W, std::span<const Complex> focus) {
  std::vector<Cell> cells;
  auto tile = [&](Rect r, double h) {
    const int nx = std::max(1, static_cast<int>(std::lround((r.xmax - r.xmin) / h)));
    const int ny = std::max(1, static_cast<int>(std::lround((r.ymax - r.ymin) / h)));
    const double hx = (r.xmax - r.xmin) / nx, hy = (r.ymax - r.ymin) / ny;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        refine(cells, {r.xmin + i * hx, r.xmin + (i + 1) * hx, r.ymin + j * hy, r.ymin + (j + 1) * hy}, W, focus);
  };
  tile({-W.inner, W.inner, W.ymin, W.inner}, W.inner_cell);
  tile({-W.radius, -W.inner, W.ymin, W.radius}, W.outer_cell);
  tile({W.inner, W.radius, W.ymin, W.radius}, W.outer_cell);
  tile({-W.inner, W.inner, W.inner, W.radius}, W.outer_cell);
  return cells;
}

std::vector<Cell> length_cells(const TruncationWindow& W) {
  std::vector<Cell> cells;
  LengthGrid g{-W.radius, W.radius, static_cast<int>(std::ceil(2 * W.radius / W.length_cell))};
  for (double x : g.centers()) cells.push_back({Complex(x, 0.0), g.cell_length()});
  return cells;
}

// Boundary constants of the n + 2 intervals cut by the x_k and w, left to right.
std::vector<double> interval_mu(const CorrelationConfig& c) {
  std::vector<double> m;
  const int ks = c.k_star();
  for (int k = 0; k <= static_cast<int>(c.point.x.size()); ++k) {
    if (k == ks) {
      m.push_back(c.mu_L);
      m.push_back(c.mu_R);
    } else {
      m.push_back(c.mu[k]);
    }
  }
  return m;
}

std::vector<double> cuts_of(const BpzPoint& at) {
  std::vector<double> cuts(at.x.begin(), at.x.end());
  cuts.push_back(at.w);
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

// Overlap length of each length cell with each interval; cell k spans [x - l/2, x + l/2].
std::vector<std::vector<double>> overlaps(const std::vector<Cell>& cells, const std::vector<double>& cuts, double R) {
  std::vector<double> ends{-R};
  ends.insert(ends.end(), cuts.begin(), cuts.end());
  ends.push_back(R);
  std::vector<std::vector<double>> o(ends.size() - 1, std::vector<double>(cells.size(), 0.0));
  for (std::size_t i = 0; i + 1 < ends.size(); ++i)
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const double a = cells[k].z.real() - cells[k].weight / 2, b = cells[k].z.real() + cells[k].weight / 2;
      o[i][k] = std::max(0.0, std::min(b, ends[i + 1]) - std::max(a, ends[i]));
    }
  return o;
}

// Deterministic factors of one evaluation point, per rung.
struct NodeWeights {
  double logC = 0.0;
  std::vector<std::vector<double>> area;                 // rung -> cell
  std::vector<std::vector<std::vector<double>>> length;  // rung -> interval -> cell
};

class Evaluator {
 public:
  explicit Evaluator(const CorrelationConfig& c) : c_(c) {
    c_.validate();
    auto sb = seiberg_check(c_);
    if (!sb.ok) {
      std::string m = "estimate_F: Seiberg bounds fail:";
      for (const auto& v : sb.violations) m += " " + v;
      throw DomainError(m);
    }
    gamma_ = c_.gamma;
    Q_ = c_.Q();
    p_ = c_.total_charge() - Q_;
    mu_ = interval_mu(c_);
    use_length_ = std::any_of(mu_.begin(), mu_.end(), [](double m) { return m > 0; });
    std::vector<Complex> focus(c_.point.z.begin(), c_.point.z.end());
    focus.emplace_back(c_.point.w, 0.0);
    for (double x : c_.point.x) focus.emplace_back(x, 0.0);
    area_ = area_cells(c_.window, focus);
    if (use_length_) length_ = length_cells(c_.window);
    auto d = std::make_shared<Discretization>();
    for (double e : c_.window.ladder) {
      for (const auto& cell : area_) d->add_circle(cell.z, e);
      for (const auto& cell : length_) d->add_circle(cell.z, e);
    }
    sampler_ = std::make_unique<CholeskySampler>(d);
  }

  NodeWeights weights(const BpzPoint& at) const {
    const InsertionSpec spec = c_.insertions(at);
    LiouvilleProfile P(spec, Q_, 0.0);
    NodeWeights w;
    w.logC = log_normalization_C(spec, Q_);
    const auto ov = use_length_ ? overlaps(length_, cuts_of(at), c_.window.radius) : std::vector<std::vector<double>>{};
    for (double e : c_.window.ladder) {
      std::vector<double> a(area_.size());
      const double fa = std::pow(e, gamma_ * gamma_ / 2);
      for (std::size_t i = 0; i < area_.size(); ++i)
        a[i] = fa * area_[i].weight * std::exp(gamma_ * P.circle_average(area_[i].z, e));
      w.area.push_back(std::move(a));
      std::vector<std::vector<double>> l;
      const double fl = std::pow(e, gamma_ * gamma_ / 4);
      for (const auto& row : ov) {
        std::vector<double> r(length_.size(), 0.0);
        for (std::size_t k = 0; k < length_.size(); ++k)
          if (row[k] > 0) r[k] = fl * row[k] * std::exp(gamma_ / 2 * P.circle_average(length_[k].z, e));
        l.push_back(std::move(r));
      }
      w.length.push_back(std::move(l));
    }
    return w;
  }

  // Gaussian values of samples [first, first + n), columns are samples.
  Eigen::MatrixXd batch(std::uint64_t seed, int first, int n) const {
    std::vector<Stream> s;
    s.reserve(n);
    for (int i = 0; i < n; ++i) s.emplace_back(seed, static_cast<std::uint64_t>(first + i));
    return sampler_->sample_values(s);
  }

  // Measures of one evaluation point from one sample column.
  MeasureTable table(const NodeWeights& w, const Eigen::Ref<const Eigen::VectorXd>& g) const {
    MeasureTable t;
    const std::size_t na = area_.size(), nl = length_.size(), stride = na + nl;
    std::vector<double> terms;
    for (std::size_t r = 0; r < c_.window.ladder.size(); ++r) {
      const std::size_t off = r * stride;
      terms.resize(na);
      for (std::size_t i = 0; i < na; ++i) terms[i] = w.area[r][i] * std::exp(gamma_ * g(off + i));
      t.area.push_back(pairwise_sum(terms));
      std::vector<double> lens;
      for (const auto& row : w.length[r]) {
        terms.assign(nl, 0.0);
        for (std::size_t k = 0; k < nl; ++k)
          if (row[k] > 0) terms[k] = row[k] * std::exp(gamma_ / 2 * g(off + na + k));
        lens.push_back(pairwise_sum(terms));
      }
      t.length.push_back(std::move(lens));
    }
    return t;
  }

  double length_term(const MeasureTable& t, std::size_t r) const {
    double m = 0.0;
    for (std::size_t i = 0; i < t.length[r].size(); ++i) m += mu_[i] * t.length[r][i];
    return m;
  }

  double F(const NodeWeights& w, const MeasureTable& t, std::size_t r) const {
    return std::exp(w.logC) * c_integral(t.area[r], length_term(t, r), p_, gamma_);
  }

  // First-moment area of the window at the finest rung and an upper bound outside it.
  std::pair<double, double> first_moments(const NodeWeights& w) const {
    const double e = c_.window.ladder.back(), g2 = gamma_ * gamma_;
    std::vector<double> terms(area_.size());
    for (std::size_t i = 0; i < area_.size(); ++i) {
      CircleFunctional cf{area_[i].z, e};
      terms[i] = w.area.back()[i] * std::exp(g2 / 2 * circle_covariance(cf, cf));
    }
    const double inside = pairwise_sum(terms);
    // Outside the half disk of radius R, which the window contains.
    const InsertionSpec spec = c_.insertions(c_.point);
    LiouvilleProfile P(spec, Q_, 0.0);
    const double R = c_.window.radius, y0 = c_.window.ymin;
    auto dens = [&](Complex z) {
      return std::exp(gamma_ * P(z)) * std::pow(2 * z.imag(), -g2 / 2) * std::pow(std::abs(z), 2 * g2);
    };
    auto ring = [&](double u) {
      if (u <= 0) return 0.0;
      const double r = R / u, t0 = std::asin(std::min(1.0, y0 / r));
      // theta = t0 e^v resolves the (Im z)^{-gamma^2/2} edge.
      const double vmax = std::log(pi / 2 / t0);
      auto side = [&](bool left) {
        return integrate_adaptive(
                   [&](double v) {
                     const double th = t0 * std::exp(v);
                     return th * dens(std::polar(r, left ? pi - th : th));
                   },
                   0.0, vmax, 1e-10)
            .value;
      };
      return (side(false) + side(true)) * r * R / (u * u);
    };
    const double outside = integrate_adaptive(ring, 0.0, 1.0, 1e-6 * inside).value;
    return {inside, outside};
  }

  const CorrelationConfig& config() const { return c_; }
  double p() const { return p_; }
  std::size_t rungs() const { return c_.window.ladder.size(); }

 private:
  CorrelationConfig c_;
  double gamma_ = 0.0, Q_ = 0.0, p_ = 0.0;
  std::vector<double> mu_;
  bool use_length_ = false;
  std::vector<Cell> area_, length_;
  std::unique_ptr<CholeskySampler> sampler_;
};

constexpr int kBatch = 256;

}  // namespace

FEstimate estimate_F(const CorrelationConfig& c, std::uint64_t seed, double tail_tol) {
  Evaluator ev(c);
  const NodeWeights w = ev.weights(c.point);
  FEstimate r;
  auto [inside, outside] = ev.first_moments(w);
  r.tail_fraction = outside / inside;
  r.tail_effect = ev.p() / c.gamma * r.tail_fraction;
  if (r.tail_effect > tail_tol)
    throw ConvergenceError("estimate_F: truncation tail too heavy; enlarge the window radius", r.tail_effect);
  std::vector<double> fine, coarse;
  for (int first = 0; first < c.samples; first += kBatch) {
    const int n = std::min(kBatch, c.samples - first);
    const Eigen::MatrixXd g = ev.batch(seed, first, n);
    for (int j = 0; j < n; ++j) {
      r.tables.push_back(ev.table(w, g.col(j)));
      fine.push_back(ev.F(w, r.tables.back(), ev.rungs() - 1));
      coarse.push_back(ev.F(w, r.tables.back(), 0));
    }
  }
  r.value = mc_stats(fine, seed);
  r.coarse = mc_stats(coarse, seed);
  r.ladder_drift = std::abs(r.value.mean / r.coarse.mean - 1);
  return r;
}

double estimate_F_swapped(const CorrelationConfig& c, std::span<const MeasureTable> tables) {
  require(!tables.empty(), "estimate_F_swapped: no tables");
  const double gamma = c.gamma, p = c.total_charge() - c.Q();
  if (!(p > 0)) throw DomainError("estimate_F_swapped: Seiberg bounds fail");
  const auto mu = interval_mu(c);
  const std::size_t r = tables[0].area.size() - 1;
  std::vector<double> A, M;
  for (const auto& t : tables) {
    A.push_back(t.area[r]);
    double m = 0.0;
    for (std::size_t i = 0; i < t.length[r].size(); ++i) m += mu[i] * t.length[r][i];
    M.push_back(m);
  }
  // Common c range: every sample is in its Taylor regime below c_lo and negligible above c_hi.
  double c_lo = 1e300, c_hi = -1e300;
  for (std::size_t i = 0; i < A.size(); ++i) {
    const double c0 = -std::log(A[i]) / gamma, m = M[i] / std::sqrt(A[i]);
    c_lo = std::min(c_lo, c0 + 2 * std::log(1e-5 / std::max(1.0, m)) / gamma);
    c_hi = std::max(c_hi, c0 + std::log(50.0) / gamma);
  }
  std::vector<double> terms(A.size());
  auto mean_integrand = [&](double cc) {
    const double e = std::exp(gamma * cc / 2);
    for (std::size_t i = 0; i < A.size(); ++i) terms[i] = std::exp(p * cc - e * e * A[i] - e * M[i]);
    return pairwise_sum(terms) / static_cast<double>(A.size());
  };
  auto tail = [&](double a, double k) { return k == 0 ? 0.0 : k * std::exp((p + a) * c_lo) / (p + a); };
  double left = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    const double a = A[i], m = M[i];
    left += tail(0, 1) - tail(gamma, a) - tail(gamma / 2, m) +
            0.5 * (tail(2 * gamma, a * a) + tail(1.5 * gamma, 2 * a * m) + tail(gamma, m * m));
  }
  left /= static_cast<double>(A.size());
  const double main = integrate_adaptive(mean_integrand, c_lo, c_hi, 1e-12 * std::max(1.0, left)).value;
  return normalization_C(c.insertions(c.point), c.Q()) * (left + main);
}

std::vector<BpzPoint> bpz_stencil(const BpzPoint& base, double h) {
  std::vector<BpzPoint> s{base};
  auto push = [&](auto mutate) {
    for (double sg : {1.0, -1.0}) {
      BpzPoint q = base;
      mutate(q, sg * h);
      s.push_back(std::move(q));
    }
  };
  push([](BpzPoint& q, double d) { q.w += d; });
  for (std::size_t k = 0; k < base.x.size(); ++k) push([k](BpzPoint& q, double d) { q.x[k] += d; });
  for (std::size_t j = 0; j < base.z.size(); ++j) {
    push([j](BpzPoint& q, double d) { q.z[j] += d; });
    push([j](BpzPoint& q, double d) { q.z[j] += Complex(0.0, d); });
  }
  return s;
}

void check_stencil(const BpzPoint& base, double h) {
  require(h > 0, "check_stencil: h must be positive");
  std::vector<double> b(base.x.begin(), base.x.end());
  b.push_back(base.w);
  std::sort(b.begin(), b.end());
  for (std::size_t k = 1; k < b.size(); ++k)
    if (!(b[k] - b[k - 1] > 2 * h)) throw DomainError("check_stencil: stencil crosses a boundary insertion");
  for (std::size_t j = 0; j < base.z.size(); ++j) {
    if (!(base.z[j].imag() > h)) throw DomainError("check_stencil: stencil crosses R");
    for (std::size_t i = 0; i < j; ++i)
      if (!(std::abs(base.z[j] - base.z[i]) > 2 * std::sqrt(2.0) * h))
        throw DomainError("check_stencil: stencil crosses a bulk insertion");
  }
}

double bpz_apply(std::span<const double> F, const BpzPoint& base, double h, double beta_star, double Q,
                 std::span<const double> alpha, std::span<const double> beta) {
  const std::size_t n = base.x.size(), m = base.z.size();
  if (F.size() != 3 + 2 * n + 4 * m) throw DomainError("bpz_apply: value count does not match the stencil");
  if (alpha.size() != m || beta.size() != n) throw DomainError("bpz_apply: weights do not match the point");
  const double w = base.w, F0 = F[0];
  double r = (F[1] - 2 * F0 + F[2]) / (h * h) / (beta_star * beta_star);
  double pot = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = (F[3 + 2 * k] - F[4 + 2 * k]) / (2 * h);
    r += d / (w - base.x[k]);
    pot += delta_weight(beta[k], Q) / ((w - base.x[k]) * (w - base.x[k]));
  }
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t o = 3 + 2 * n + 4 * j;
    const double fx = (F[o] - F[o + 1]) / (2 * h), fy = (F[o + 2] - F[o + 3]) / (2 * h);
    const Complex dz = Complex(w, 0.0) - base.z[j];
    r += std::real(Complex(fx, -fy) / dz);
    pot += std::real(2 * delta_weight(alpha[j], Q) / (dz * dz));
  }
  return r + pot * F0;
}

BpzResidual bpz_residual(const CorrelationConfig& c, double h, std::uint64_t seed) {
  check_stencil(c.point, h);
  Evaluator ev(c);
  const auto outer = bpz_stencil(c.point, h), inner = bpz_stencil(c.point, h / 2);
  std::vector<NodeWeights> wo, wi;
  for (const auto& q : outer) wo.push_back(ev.weights(q));
  for (const auto& q : inner) wi.push_back(ev.weights(q));
  const std::size_t r = ev.rungs() - 1;
  std::vector<double> rc, rf, rx, f0, vo(outer.size()), vi(inner.size());
  for (int first = 0; first < c.samples; first += kBatch) {
    const int n = std::min(kBatch, c.samples - first);
    const Eigen::MatrixXd g = ev.batch(seed, first, n);
    for (int j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < outer.size(); ++k) vo[k] = ev.F(wo[k], ev.table(wo[k], g.col(j)), r);
      for (std::size_t k = 0; k < inner.size(); ++k) vi[k] = ev.F(wi[k], ev.table(wi[k], g.col(j)), r);
      rc.push_back(bpz_apply(vo, c.point, h, c.beta_star, c.Q(), c.alpha, c.beta));
      rf.push_back(bpz_apply(vi, c.point, h / 2, c.beta_star, c.Q(), c.alpha, c.beta));
      rx.push_back((4 * rf.back() - rc.back()) / 3);
      f0.push_back(vo[0]);
    }
  }
  BpzResidual out;
  out.residual = mc_stats(rx, seed);
  out.coarse = mc_stats(rc, seed);
  out.fine = mc_stats(rf, seed);
  out.F = mc_stats(f0, seed);
  // Size of the largest single term at the mean F, for a relative reading of the residual.
  out.scale = std::abs(out.F.mean);
  for (std::size_t k = 0; k < c.point.x.size(); ++k)
    out.scale = std::max(out.scale, std::abs(delta_weight(c.beta[k], c.Q()) * out.F.mean /
                                                 std::pow(c.point.w - c.point.x[k], 2)));
  return out;
}

}  // namespace lqz
