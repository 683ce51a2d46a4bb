#ifndef LQZ_BPZ_HPP
#define LQZ_BPZ_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lqz/gmc.hpp"
#include "lqz/green.hpp"
#include "lqz/sde.hpp"
#include "lqz/stats.hpp"

namespace lqz {

/// Positions of the insertions the correlation function depends on.
struct BpzPoint {
  double w = 0.0;
  std::vector<Complex> z;  ///< bulk points
  std::vector<double> x;   ///< boundary points, increasing
};

/// Truncation of H to [-radius, radius] x [ymin, radius]. The inner box
/// [-inner, inner] x [ymin, inner] gets its own finer grid, refined toward the insertions.
struct TruncationWindow {
  double radius = 6.0;
  double inner = 2.0;
  double ymin = 0.0125;
  double inner_cell = 0.1;
  double outer_cell = 0.4;
  double length_cell = 0.05;
  double grading = 1.0;  ///< > 0: split cells larger than grading * distance to an insertion
  double min_cell = 0.0125;
  std::vector<double> ladder{0.0125, 0.00625};  ///< the last rung is the finest
};

/// Boundary correlation function with a degenerate insertion (beta_* / 2, w).
/// Boundary cosmological constants: mu[k] on I_k = (x_k, x_{k+1}) for k != k_*,
/// and mu_L, mu_R on (x_{k_*}, w), (w, x_{k_*+1}). Intervals are clipped to the window.
struct CorrelationConfig {
  double gamma = 1.5;
  double beta_star = 0.0;
  std::vector<double> alpha;  ///< bulk weights
  std::vector<double> beta;   ///< boundary weights (full beta_k; the field sees beta_k / 2)
  double delta = 0.0;         ///< the field sees delta / 2 at infinity
  BpzPoint point;
  std::vector<double> mu;  ///< size n + 1; entry k_* is ignored
  double mu_L = 0.0, mu_R = 0.0;
  TruncationWindow window;
  int samples = 1000;

  double Q() const { return gamma / 2 + 2 / gamma; }
  /// sum alpha + sum beta / 2 + delta / 2 + beta_* / 2
  double total_charge() const;
  /// Index of the interval containing w.
  int k_star() const;
  /// Insertions at a given point: bulk, then (beta_* / 2, w), then (beta_k / 2, x_k).
  InsertionSpec insertions(const BpzPoint& at) const;
  /// Throws DomainError for malformed input; returns warnings for supported but excluded cases.
  std::vector<std::string> validate() const;
};

struct SeibergResult {
  bool ok = false;
  double total_charge = 0.0;
  double Q = 0.0;
  std::vector<std::string> violations;
};

/// Strict bounds: total charge > Q, every alpha_j, beta_k < Q, delta < Q.
SeibergResult seiberg_check(const CorrelationConfig& c);

/// int e^{(s - Q) c} exp(-e^{gamma c} A - e^{gamma c / 2} M) dc for A > 0, M >= 0, s > Q.
double c_integral(double area, double length_term, double s_minus_Q, double gamma);

/// Per-sample area and interval lengths of one correlation evaluation.
struct MeasureTable {
  std::vector<double> area;               ///< per rung
  std::vector<std::vector<double>> length;  ///< per rung, per interval (n + 2 entries)
};

struct FEstimate {
  MCEstimate value;
  MCEstimate coarse;          ///< same estimator at the coarsest rung
  double ladder_drift = 0.0;  ///< |fine / coarse - 1|
  double tail_fraction = 0.0;  ///< first-moment area outside the window over inside
  double tail_effect = 0.0;    ///< first-order bound on the relative change of F
  std::vector<MeasureTable> tables;
};

/// Monte Carlo F_{beta_*}: C * int e^{(s-Q)c} E[exp(-e^{gamma c} A - e^{gamma c/2} sum mu L)] dc.
/// The Gaussian free field is sampled exactly on the window grid; the profile enters
/// through exact circle averages. Throws DomainError if the Seiberg bounds fail and
/// ConvergenceError if the tail effect exceeds tail_tol.
FEstimate estimate_F(const CorrelationConfig& c, std::uint64_t seed, double tail_tol = 0.01);

/// Same integral with the sample average taken inside the c-quadrature.
double estimate_F_swapped(const CorrelationConfig& c, std::span<const MeasureTable> tables);

/// Stencil nodes in fixed order: base, w +- h, x_k +- h, then Re z_j +- h, Im z_j +- h.
std::vector<BpzPoint> bpz_stencil(const BpzPoint& base, double h);

/// BPZ operator assembled from central differences of F values on bpz_stencil(base, h).
/// Delta weights use alpha_j and the full beta_k.
double bpz_apply(std::span<const double> F, const BpzPoint& base, double h, double beta_star, double Q,
                 std::span<const double> alpha, std::span<const double> beta);

/// Throws DomainError if the stencil crosses or touches an insertion or R.
void check_stencil(const BpzPoint& base, double h);

struct BpzResidual {
  MCEstimate residual;  ///< Richardson combination (4 R(h/2) - R(h)) / 3, per sample
  MCEstimate coarse;    ///< R(h)
  MCEstimate fine;      ///< R(h/2)
  MCEstimate F;         ///< F at the base point
  double scale = 0.0;   ///< mean of the absolute operator terms, for relative reporting
};

/// Monte Carlo BPZ residual: every stencil node at steps h and h/2 uses the same field samples.
BpzResidual bpz_residual(const CorrelationConfig& c, double h, std::uint64_t seed);

}  // namespace lqz

#endif
