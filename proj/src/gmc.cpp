#include "lqz/gmc.hpp"

#include <algorithm>
#include <cmath>

#include "lqz/quadrature.hpp"
#include "lqz/stats.hpp"

namespace lqz {

std::vector<Complex> AreaGrid::centers() const {
  require(nx > 0 && ny > 0, "AreaGrid: need positive cell counts");
  std::vector<Complex> c;
  c.reserve(static_cast<std::size_t>(nx) * ny);
  const double hx = (region.xmax - region.xmin) / nx, hy = (region.ymax - region.ymin) / ny;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) c.emplace_back(region.xmin + (i + 0.5) * hx, region.ymin + (j + 0.5) * hy);
  return c;
}

double AreaGrid::cell_area() const {
  return (region.xmax - region.xmin) / nx * (region.ymax - region.ymin) / ny;
}

std::vector<double> LengthGrid::centers() const {
  std::vector<double> c;
  if (n <= 0 || b <= a) return c;
  const double h = cell_length();
  for (int i = 0; i < n; ++i) c.push_back(a + (i + 0.5) * h);
  return c;
}

std::vector<double> geometric_ladder(double eps0, int rungs) {
  require(eps0 > 0 && rungs >= 1, "geometric_ladder: need eps0 > 0 and rungs >= 1");
  std::vector<double> l;
  for (int k = 0; k < rungs; ++k) l.push_back(std::ldexp(eps0, -k));
  return l;
}

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0 && gamma < 2)) throw DomainError("GMC: gamma must lie in (0, 2)");
}

void check_area(const AreaGrid& g, std::span<const double> ladder) {
  require(g.region.xmax > g.region.xmin && g.region.ymax > g.region.ymin, "quantum_area: empty region");
  for (double e : ladder) {
    require(e > 0, "quantum_area: eps must be positive");
    if (g.region.ymin < e) throw DomainError("quantum_area: region closer to R than eps");
  }
}

}  // namespace

RegularizedMeasure quantum_area(const CircleAverageFn& phi, const AreaGrid& grid, double gamma,
                                std::span<const double> ladder) {
  check_gamma(gamma);
  check_area(grid, ladder);
  RegularizedMeasure m{gamma, {ladder.begin(), ladder.end()}, {}};
  const auto pts = grid.centers();
  std::vector<double> terms(pts.size());
  for (double e : ladder) {
    for (std::size_t k = 0; k < pts.size(); ++k) terms[k] = std::exp(gamma * phi(pts[k], e));
    m.masses.push_back(std::pow(e, gamma * gamma / 2) * grid.cell_area() * pairwise_sum(terms));
  }
  return m;
}

RegularizedMeasure quantum_area(const FieldSample& f, const AreaGrid& grid, double gamma,
                                std::span<const double> ladder) {
  return quantum_area([&f](Complex z, double e) { return f.circle_average(z, e); }, grid, gamma, ladder);
}

RegularizedMeasure quantum_length(const CircleAverageFn& phi, const LengthGrid& grid, double gamma,
                                  std::span<const double> ladder) {
  check_gamma(gamma);
  for (double e : ladder) require(e > 0, "quantum_length: eps must be positive");
  RegularizedMeasure m{gamma, {ladder.begin(), ladder.end()}, {}};
  const auto xs = grid.centers();
  std::vector<double> terms(xs.size());
  for (double e : ladder) {
    if (xs.empty()) {
      m.masses.push_back(0.0);
      continue;
    }
    for (std::size_t k = 0; k < xs.size(); ++k) terms[k] = std::exp(0.5 * gamma * phi(Complex(xs[k], 0.0), e));
    m.masses.push_back(std::pow(e, gamma * gamma / 4) * grid.cell_length() * pairwise_sum(terms));
  }
  return m;
}

RegularizedMeasure quantum_length(const FieldSample& f, const LengthGrid& grid, double gamma,
                                  std::span<const double> ladder) {
  return quantum_length([&f](Complex z, double e) { return f.circle_average(z, e); }, grid, gamma, ladder);
}

void register_area_functionals(Discretization& d, const AreaGrid& grid, std::span<const double> ladder) {
  check_area(grid, ladder);
  for (double e : ladder)
    for (Complex z : grid.centers()) d.add_circle(z, e);
}

void register_length_functionals(Discretization& d, const LengthGrid& grid, std::span<const double> ladder) {
  for (double e : ladder)
    for (double x : grid.centers()) d.add_circle(Complex(x, 0.0), e);
}

double area_first_moment(const Rect& r, double gamma) {
  require(r.xmax > r.xmin && r.ymax > r.ymin && r.ymin > 0, "area_first_moment: bad region");
  const double g2 = gamma * gamma;
  auto row = [&](double y) {
    std::vector<double> cuts{r.xmin, r.xmax};
    if (y < 1) {
      const double k = std::sqrt(1 - y * y);
      for (double c : {-k, k})
        if (c > r.xmin && c < r.xmax) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    auto f = [&](double x) {
      const double a = std::hypot(x, y);
      return std::pow(2 * y, -g2 / 2) * (a > 1 ? std::pow(a, 2 * g2) : 1.0);
    };
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += integrate_gl(f, cuts[i], cuts[i + 1], 48);
    return s;
  };
  // The kink positions move like sqrt(1 - y^2); split the outer integral at y = 1.
  double total = 0.0;
  std::vector<double> ys{r.ymin, r.ymax};
  if (r.ymin < 1 && r.ymax > 1) ys.insert(ys.begin() + 1, 1.0);
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) total += integrate_adaptive(row, ys[i], ys[i + 1], 1e-12).value;
  return total;
}

double length_first_moment(double a, double b, double gamma, double eps) {
  check_gamma(gamma);
  require(eps > 0, "length_first_moment: eps must be positive");
  if (b <= a) return 0.0;
  auto f = [&](double x) {
    CircleFunctional c{Complex(x, 0.0), eps};
    return std::pow(eps, gamma * gamma / 4) * std::exp(gamma * gamma * circle_covariance(c, c) / 8);
  };
  // Kinks where the half circle starts to cross the unit circle.
  std::vector<double> cuts{a, b};
  for (double c : {-1 - eps, -1 + eps, 1 - eps, 1 + eps})
    if (c > a && c < b) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += integrate_adaptive(f, cuts[i], cuts[i + 1], 1e-12).value;
  return s;
}

}  // namespace lqz
