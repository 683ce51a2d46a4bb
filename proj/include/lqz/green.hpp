#ifndef LQZ_GREEN_HPP
#define LQZ_GREEN_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "lqz/types.hpp"

namespace lqz {

/// log max(|z|, 1)
template <class T>
T log_plus(std::complex<T> z) {
  return std::max(std::log(std::abs(z)), T(0));
}

/// Free-boundary kernel -log|z-w| - log|z-conj w| + 2 log|z|_+ + 2 log|w|_+.
template <class T>
T green_H(std::complex<T> z, std::complex<T> w) {
  if (z == w) throw SingularityError("green_H: coincident points");
  return -std::log(std::abs(z - w)) - std::log(std::abs(z - std::conj(w))) +
         2 * (log_plus(z) + log_plus(w));
}

/// G_H(z, infinity) = 2 log|z|_+
template <class T>
T green_H_inf(std::complex<T> z) {
  return 2 * log_plus(z);
}

/// Neutral kernel -log|z-w| - log|z-conj w|.
template <class T>
T green_neutral(std::complex<T> z, std::complex<T> w) {
  if (z == w) throw SingularityError("green_neutral: coincident points");
  return -std::log(std::abs(z - w)) - std::log(std::abs(z - std::conj(w)));
}

struct BulkInsertion {
  double alpha;
  Complex z;
};

struct BoundaryInsertion {
  double beta_half;  ///< the weight entering the field, beta / 2
  double x;
};

/// Bulk insertions (alpha_j, z_j), boundary insertions (beta_k / 2, x_k) and delta at infinity.
struct InsertionSpec {
  std::vector<BulkInsertion> bulk;
  std::vector<BoundaryInsertion> boundary;
  double delta_inf = 0.0;

  /// Coincident points merged by summing weights; order of first appearance kept.
  InsertionSpec merged() const;
  /// All insertions as (weight, point) pairs, bulk first.
  std::vector<std::pair<double, Complex>> points() const;
  double total_charge() const;
  void validate() const;
};

/// Deterministic part sum_j a_j G_H(z, z_j) + (delta - Q) G_H(z, inf) + c.
class LiouvilleProfile {
 public:
  LiouvilleProfile(const InsertionSpec& spec, double Q, double c);

  double operator()(Complex z) const;
  /// Exact average over the circle |v - c0| = eps (a half circle for real c0).
  double circle_average(Complex c0, double eps) const;
  const InsertionSpec& spec() const { return spec_; }
  double Q() const { return Q_; }
  double c() const { return c_; }

 private:
  InsertionSpec spec_;
  double Q_, c_;
};

LiouvilleProfile liouville_profile(const InsertionSpec& spec, double Q, double c);

/// C_gamma^{(alpha,z)} = |z|_+^{-2 a (Q - a)} (2 Im z)^{-a^2/2}, the last factor only for z in H.
double single_insertion_C(double alpha, Complex z, double Q);

/// Normalization product over merged insertions.
double normalization_C(const InsertionSpec& spec, double Q);
double log_normalization_C(const InsertionSpec& spec, double Q);

/// prod_{p in H} (2 Im p)^{-a^2/2} prod_{j<k} exp(a_j a_k G(p_j, p_k)), after merging.
double partition_Z(const std::vector<std::pair<double, Complex>>& points);
double log_partition_Z(const std::vector<std::pair<double, Complex>>& points);

/// Average of log max(|v|, 1) over the circle |v - c| = r.
double circle_log_plus(Complex c, double r);

/// Exact circle average of G_H(., p) over |v - c| = eps (p may be real).
double circle_average_green_H(Complex c, double eps, Complex p);

}  // namespace lqz

#endif
