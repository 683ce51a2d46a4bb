#ifndef LQZ_CONFORMAL_HPP
#define LQZ_CONFORMAL_HPP

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "lqz/loewner.hpp"
#include "lqz/types.hpp"

namespace lqz {

/// A conformal map of H onto a subdomain, with derivative and, when known, inverse.
class ConformalMap {
 public:
  using Fn = std::function<Complex(Complex)>;
  using Pred = std::function<bool(Complex)>;

  ConformalMap(std::string name, Fn f, Fn df, Fn inv = nullptr, Pred in_image = nullptr);

  static ConformalMap identity();
  static ConformalMap scaling(double r);
  /// z -> sqrt(z^2 - 4t), onto H minus the slit (0, 2i sqrt t].
  static ConformalMap slit(double t);
  /// Reverse Loewner map g_T of a driving function; no inverse.
  static ConformalMap loewner(const LoewnerEvolution& ev);

  Complex operator()(Complex z) const { return f_(z); }
  Complex derivative(Complex z) const { return df_(z); }
  bool has_inverse() const { return static_cast<bool>(inv_); }
  /// Throws DomainError when w is not in the image or no inverse is available.
  Complex inverse(Complex w) const;
  bool in_image(Complex w) const { return !in_image_ || in_image_(w); }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Fn f_, df_, inv_;
  Pred in_image_;
};

/// outer o inner
ConformalMap compose(const ConformalMap& outer, const ConformalMap& inner);

/// (g . h)(w) = h(g^{-1} w) + Q log|(g^{-1})'(w)| at each target w.
std::vector<double> coordinate_change(const std::function<double(Complex)>& h,
                                      const ConformalMap& g, const std::vector<Complex>& targets,
                                      double Q);

/// Uniform probability measures used as contours.
struct BulkContour {
  Complex center;
  double eps;
};
struct BoundaryContour {
  double center;
  double eps;
};
struct InfinityContour {
  double eps;  ///< half circle of radius 1/eps about 0
};
using Contour = std::variant<BulkContour, BoundaryContour, InfinityContour>;

enum class Kernel { Neutral, FreeBoundary };

/// Average of G(u, g(v)) over the contour, by adaptive trapezoid.
/// Throws ConvergenceError with the achieved tolerance on failure.
double pushforward_average(Complex u, const ConformalMap& g, const Contour& contour,
                           Kernel kernel = Kernel::Neutral, double tol = 1e-11);

/// Average of log g'(v) over the contour (real and imaginary parts).
Complex log_derivative_average(const ConformalMap& g, const Contour& contour, double tol = 1e-11);

}  // namespace lqz

#endif
