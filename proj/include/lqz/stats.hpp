#ifndef LQZ_STATS_HPP
#define LQZ_STATS_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace lqz {

/// Summary of a Monte Carlo estimate.
struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;  ///< sample standard deviation / sqrt(n)
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

/// Pairwise (cascade) summation; order of the result depends only on input order.
double pairwise_sum(std::span<const double> x);

/// Mean and unbiased standard error. Throws DomainError if n < 2.
MCEstimate mc_stats(std::span<const double> samples, std::uint64_t seed = 0);

/// Sample covariance of paired samples with its standard error.
MCEstimate mc_covariance(std::span<const double> x, std::span<const double> y,
                         std::uint64_t seed = 0);

/// Sample variance with standard error from the fourth central moment.
MCEstimate mc_variance(std::span<const double> x, std::uint64_t seed = 0);

/// Self-normalized weighted mean with delta-method standard error.
MCEstimate weighted_stats(std::span<const double> x, std::span<const double> w,
                          std::uint64_t seed = 0);

/// Kish effective sample size (sum w)^2 / sum w^2.
double effective_sample_size(std::span<const double> w);

double normal_cdf(double x);

/// Kolmogorov survival function P(K > x).
double kolmogorov_sf(double x);

struct KsResult {
  double statistic = 0.0;
  double effective_n = 0.0;
  double p_value = 0.0;
};

/// Two-sample Kolmogorov-Smirnov test; empty weights mean unit weights.
/// Weighted samples enter through their Kish effective size.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> wa,
                       std::span<const double> b, std::span<const double> wb);

/// Edges of `bins` equal-mass bins (bins + 1 values, outer edges infinite).
std::vector<double> equal_mass_edges(std::vector<double> pilot, int bins);

/// Index of the bin containing x given edges from equal_mass_edges.
int bin_index(std::span<const double> edges, double x);

/// Binned regression of observed against predicted values.
///
/// Samples are grouped by path; paths are the independent units for the
/// standard error, so per-path weights and within-path dependence are handled
/// by a cluster (ratio-estimator) variance.
class BinnedResidual {
 public:
  explicit BinnedResidual(std::vector<double> edges);

  void begin_path(double weight = 1.0);
  void add(double key, double predicted, double observed);
  void end_path();
  void merge(const BinnedResidual& other);

  struct Bin {
    double lo, hi;
    double count;           ///< number of samples
    double predicted_mean;  ///< weighted mean of predictions
    double observed_mean;   ///< weighted mean of observations
    double std_error;       ///< of observed_mean - predicted_mean
    double z;
  };
  std::vector<Bin> bins() const;
  const std::vector<double>& edges() const { return edges_; }

 private:
  std::vector<double> edges_;
  struct Acc {
    double count = 0, swn = 0, swr = 0, swp = 0, swo = 0, w2r2 = 0, w2rn = 0, w2n2 = 0;
  };
  struct Tmp {
    double n = 0, r = 0, p = 0, o = 0;
  };
  std::vector<Acc> acc_;
  std::vector<Tmp> tmp_;
  double weight_ = 1.0;
};

}  // namespace lqz

#endif
