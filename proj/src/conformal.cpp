#include "lqz/conformal.hpp"

#include <cmath>

#include "lqz/green.hpp"
#include "lqz/quadrature.hpp"

namespace lqz {

ConformalMap::ConformalMap(std::string name, Fn f, Fn df, Fn inv, Pred in_image)
    : name_(std::move(name)), f_(std::move(f)), df_(std::move(df)), inv_(std::move(inv)),
      in_image_(std::move(in_image)) {}

ConformalMap ConformalMap::identity() {
  auto id = [](Complex z) { return z; };
  return {"identity", id, [](Complex) { return Complex(1.0); }, id};
}

ConformalMap ConformalMap::scaling(double r) {
  require(r > 0, "scaling: factor must be positive");
  return {"scaling", [r](Complex z) { return r * z; }, [r](Complex) { return Complex(r); },
          [r](Complex w) { return w / r; }};
}

ConformalMap ConformalMap::slit(double t) {
  require(t >= 0, "slit: time must be non-negative");
  const double top = 2 * std::sqrt(t);
  return {"slit", [t](Complex z) { return slit_map(z, t); },
          [t](Complex z) { return slit_map_derivative(z, t); },
          [t](Complex w) { return slit_map_inverse(w, t); },
          [top](Complex w) {
            return w.imag() >= 0 && !(w.real() == 0.0 && w.imag() > 0 && w.imag() <= top);
          }};
}

ConformalMap ConformalMap::loewner(const LoewnerEvolution& ev) {
  auto shared = std::make_shared<LoewnerEvolution>(ev);
  auto run = [shared](Complex z) {
    std::vector<Complex> p{z};
    auto out = flow_points(p, *shared, 0.0, shared->duration());
    if (out[0].collided) throw SingularityError("loewner map: point swallowed");
    return out[0];
  };
  return {"loewner", [run](Complex z) { return run(z).g; }, [run](Complex z) { return run(z).dg; }};
}

Complex ConformalMap::inverse(Complex w) const {
  if (!inv_) throw DomainError("conformal map '" + name_ + "': no inverse available");
  if (!in_image(w)) throw DomainError("conformal map '" + name_ + "': target outside image");
  return inv_(w);
}

ConformalMap compose(const ConformalMap& outer, const ConformalMap& inner) {
  ConformalMap::Fn inv = nullptr;
  ConformalMap::Pred pred = nullptr;
  if (outer.has_inverse() && inner.has_inverse()) {
    inv = [outer, inner](Complex w) { return inner.inverse(outer.inverse(w)); };
    pred = [outer, inner](Complex w) {
      return outer.in_image(w) && inner.in_image(outer.inverse(w));
    };
  }
  return {outer.name() + "*" + inner.name(), [outer, inner](Complex z) { return outer(inner(z)); },
          [outer, inner](Complex z) { return outer.derivative(inner(z)) * inner.derivative(z); },
          inv, pred};
}

std::vector<double> coordinate_change(const std::function<double(Complex)>& h,
                                      const ConformalMap& g, const std::vector<Complex>& targets,
                                      double Q) {
  std::vector<double> out;
  out.reserve(targets.size());
  for (Complex w : targets) {
    Complex z = g.inverse(w);
    out.push_back(h(z) - Q * std::log(std::abs(g.derivative(z))));
  }
  return out;
}

namespace {

double kernel_value(Kernel k, Complex u, Complex v) {
  return k == Kernel::Neutral ? green_neutral(u, v) : green_H(u, v);
}

struct Param {
  Complex center;
  double radius;
  bool half;
};

Param parametrize(const Contour& c) {
  if (auto b = std::get_if<BulkContour>(&c)) {
    require(b->eps > 0 && b->center.imag() > b->eps, "bulk contour must lie inside H");
    return {b->center, b->eps, false};
  }
  if (auto b = std::get_if<BoundaryContour>(&c)) {
    require(b->eps > 0, "boundary contour radius must be positive");
    return {Complex(b->center, 0), b->eps, true};
  }
  const auto& i = std::get<InfinityContour>(c);
  require(i.eps > 0, "contour at infinity needs eps > 0");
  return {0.0, 1.0 / i.eps, true};
}

}  // namespace

double pushforward_average(Complex u, const ConformalMap& g, const Contour& contour, Kernel kernel,
                           double tol) {
  const Param p = parametrize(contour);
  auto f = [&](double th) { return kernel_value(kernel, u, g(p.center + p.radius * std::polar(1.0, th))); };
  // On half circles whose ends map to R the integrand reflects evenly.
  auto r = p.half ? half_circle_average(f, tol, 16, 1 << 16) : periodic_average(f, tol, 16, 1 << 16);
  return r.value;
}

Complex log_derivative_average(const ConformalMap& g, const Contour& contour, double tol) {
  const Param p = parametrize(contour);
  auto v = [&](double th) { return std::log(g.derivative(p.center + p.radius * std::polar(1.0, th))); };
  if (!p.half) {
    double re = periodic_average([&](double t) { return v(t).real(); }, tol, 16, 1 << 16).value;
    double im = periodic_average([&](double t) { return v(t).imag(); }, tol, 16, 1 << 16).value;
    return {re, im};
  }
  double re = half_circle_average([&](double t) { return v(t).real(); }, tol, 16, 1 << 16).value;
  // The argument is odd under reflection; integrate it on [0, pi] directly.
  double im = integrate_adaptive([&](double t) { return v(t).imag(); }, 0, pi, tol * pi).value / pi;
  return {re, im};
}

}  // namespace lqz
