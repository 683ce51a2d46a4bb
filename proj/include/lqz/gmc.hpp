#ifndef LQZ_GMC_HPP
#define LQZ_GMC_HPP

#include <functional>
#include <span>
#include <vector>

#include "lqz/gff.hpp"
#include "lqz/types.hpp"

namespace lqz {

/// phi_eps(z); half circles when z is real.
using CircleAverageFn = std::function<double(Complex, double)>;

struct Rect {
  double xmin, xmax, ymin, ymax;
};

/// Midpoint grid of nx * ny cells over a rectangle.
struct AreaGrid {
  Rect region;
  int nx = 1, ny = 1;

  std::vector<Complex> centers() const;
  double cell_area() const;
};

/// Midpoint grid of n cells over [a, b] on the real line.
struct LengthGrid {
  double a = 0.0, b = 0.0;
  int n = 1;

  std::vector<double> centers() const;
  double cell_length() const { return n > 0 ? (b - a) / n : 0.0; }
};

struct RegularizedMeasure {
  double gamma = 0.0;
  std::vector<double> eps;
  std::vector<double> masses;
};

/// eps0, eps0/2, ... (rungs entries).
std::vector<double> geometric_ladder(double eps0, int rungs);

/// Riemann sums of eps^{gamma^2/2} e^{gamma phi_eps(z)} over the grid for each rung.
/// Requires gamma in (0, 2) and region.ymin >= eps for every rung.
RegularizedMeasure quantum_area(const CircleAverageFn& phi, const AreaGrid& grid, double gamma,
                                std::span<const double> ladder);
RegularizedMeasure quantum_area(const FieldSample& f, const AreaGrid& grid, double gamma,
                                std::span<const double> ladder);

/// Riemann sums of eps^{gamma^2/4} e^{(gamma/2) phi_eps(x)} with half-circle averages.
RegularizedMeasure quantum_length(const CircleAverageFn& phi, const LengthGrid& grid, double gamma,
                                  std::span<const double> ladder);
RegularizedMeasure quantum_length(const FieldSample& f, const LengthGrid& grid, double gamma,
                                  std::span<const double> ladder);

/// Records every circle average that quantum_area / quantum_length will ask for.
void register_area_functionals(Discretization& d, const AreaGrid& grid, std::span<const double> ladder);
void register_length_functionals(Discretization& d, const LengthGrid& grid, std::span<const double> ladder);

/// int_R (2 Im z)^{-gamma^2/2} |z|_+^{2 gamma^2} dz, the eps -> 0 first moment of the area.
double area_first_moment(const Rect& r, double gamma);

/// E[L_eps] of the base field: int eps^{gamma^2/4} exp(gamma^2 Var(h_eps(x)) / 8) dx
/// with the variance from the covariance oracle.
double length_first_moment(double a, double b, double gamma, double eps);

}  // namespace lqz

#endif
