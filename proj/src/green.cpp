#include "lqz/green.hpp"

#include <algorithm>

#include "lqz/quadrature.hpp"

namespace lqz {

InsertionSpec InsertionSpec::merged() const {
  InsertionSpec out;
  out.delta_inf = delta_inf;
  for (const auto& b : bulk) {
    auto it = std::find_if(out.bulk.begin(), out.bulk.end(),
                           [&](const BulkInsertion& o) { return o.z == b.z; });
    if (it == out.bulk.end())
      out.bulk.push_back(b);
    else
      it->alpha += b.alpha;
  }
  for (const auto& b : boundary) {
    auto it = std::find_if(out.boundary.begin(), out.boundary.end(),
                           [&](const BoundaryInsertion& o) { return o.x == b.x; });
    if (it == out.boundary.end())
      out.boundary.push_back(b);
    else
      it->beta_half += b.beta_half;
  }
  return out;
}

std::vector<std::pair<double, Complex>> InsertionSpec::points() const {
  std::vector<std::pair<double, Complex>> p;
  for (const auto& b : bulk) p.emplace_back(b.alpha, b.z);
  for (const auto& b : boundary) p.emplace_back(b.beta_half, Complex(b.x, 0.0));
  return p;
}

double InsertionSpec::total_charge() const {
  double s = delta_inf;
  for (const auto& b : bulk) s += b.alpha;
  for (const auto& b : boundary) s += b.beta_half;
  return s;
}

void InsertionSpec::validate() const {
  for (const auto& b : bulk)
    if (!(b.z.imag() > 0)) throw DomainError("InsertionSpec: bulk point must lie in H");
  for (std::size_t i = 0; i < bulk.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (bulk[i].z == bulk[j].z) throw DomainError("InsertionSpec: duplicate bulk point; merge first");
  for (std::size_t i = 0; i < boundary.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (boundary[i].x == boundary[j].x)
        throw DomainError("InsertionSpec: duplicate boundary point; merge first");
}

LiouvilleProfile::LiouvilleProfile(const InsertionSpec& spec, double Q, double c)
    : spec_(spec.merged()), Q_(Q), c_(c) {
  spec_.validate();
}

double LiouvilleProfile::operator()(Complex z) const {
  double v = c_ + (spec_.delta_inf - Q_) * green_H_inf(z);
  for (const auto& [a, p] : spec_.points()) {
    if (std::abs(z - p) == 0.0) throw SingularityError("liouville_profile: evaluation at an insertion");
    v += a * green_H(z, p);
  }
  return v;
}

double LiouvilleProfile::circle_average(Complex c0, double eps) const {
  double v = c_ + (spec_.delta_inf - Q_) * 2 * circle_log_plus(c0, eps);
  for (const auto& [a, p] : spec_.points()) v += a * circle_average_green_H(c0, eps, p);
  return v;
}

LiouvilleProfile liouville_profile(const InsertionSpec& spec, double Q, double c) {
  return LiouvilleProfile(spec, Q, c);
}

double circle_log_plus(Complex c, double r) { return circle_avg_log_max(c, r, 0.0, 1.0); }

double circle_average_green_H(Complex c, double eps, Complex p) {
  // log|v - p| averages to log max(|c - p|, eps); the conjugate term likewise.
  return -std::log(std::max(std::abs(c - p), eps)) -
         std::log(std::max(std::abs(c - std::conj(p)), eps)) + 2 * circle_log_plus(c, eps) +
         2 * log_plus(p);
}

double single_insertion_C(double alpha, Complex z, double Q) {
  double l = -2 * alpha * (Q - alpha) * log_plus(z);
  if (z.imag() > 0) l += -alpha * alpha / 2 * std::log(2 * z.imag());
  return std::exp(l);
}

double log_normalization_C(const InsertionSpec& spec, double Q) {
  const auto pts = spec.merged().points();
  double l = 0.0;
  for (const auto& [a, z] : pts) {
    l += std::log(single_insertion_C(a, z, Q));
    l += a * spec.delta_inf * green_H_inf(z);
  }
  for (std::size_t j = 0; j < pts.size(); ++j)
    for (std::size_t k = j + 1; k < pts.size(); ++k)
      l += pts[j].first * pts[k].first * green_H(pts[j].second, pts[k].second);
  return l;
}

double normalization_C(const InsertionSpec& spec, double Q) {
  return std::exp(log_normalization_C(spec, Q));
}

double log_partition_Z(const std::vector<std::pair<double, Complex>>& points) {
  std::vector<std::pair<double, Complex>> m;
  for (const auto& [a, p] : points) {
    auto it = std::find_if(m.begin(), m.end(), [&](const auto& o) { return o.second == p; });
    if (it == m.end())
      m.emplace_back(a, p);
    else
      it->first += a;
  }
  double l = 0.0;
  for (const auto& [a, p] : m)
    if (p.imag() > 0) l += -a * a / 2 * std::log(2 * p.imag());
  for (std::size_t j = 0; j < m.size(); ++j)
    for (std::size_t k = j + 1; k < m.size(); ++k)
      l += m[j].first * m[k].first * green_neutral(m[j].second, m[k].second);
  return l;
}

double partition_Z(const std::vector<std::pair<double, Complex>>& points) {
  return std::exp(log_partition_Z(points));
}

}  // namespace lqz
