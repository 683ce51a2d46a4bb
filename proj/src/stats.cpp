#include "lqz/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lqz/types.hpp"

namespace lqz {

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 16) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  std::size_t h = x.size() / 2;
  return pairwise_sum(x.subspan(0, h)) + pairwise_sum(x.subspan(h));
}

MCEstimate mc_stats(std::span<const double> samples, std::uint64_t seed) {
  const std::size_t n = samples.size();
  if (n < 2) throw DomainError("mc_stats: need at least two samples");
  double mean = pairwise_sum(samples) / static_cast<double>(n);
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = (samples[i] - mean) * (samples[i] - mean);
  double var = pairwise_sum(dev) / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n)), n, seed};
}

MCEstimate mc_covariance(std::span<const double> x, std::span<const double> y,
                         std::uint64_t seed) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw DomainError("mc_covariance: need matched samples, n >= 2");
  double mx = pairwise_sum(x) / n, my = pairwise_sum(y) / n;
  std::vector<double> prod(n);
  for (std::size_t i = 0; i < n; ++i) prod[i] = (x[i] - mx) * (y[i] - my);
  MCEstimate e = mc_stats(prod, seed);
  e.mean *= static_cast<double>(n) / static_cast<double>(n - 1);
  return e;
}

MCEstimate mc_variance(std::span<const double> x, std::uint64_t seed) {
  return mc_covariance(x, x, seed);
}

MCEstimate weighted_stats(std::span<const double> x, std::span<const double> w,
                          std::uint64_t seed) {
  const std::size_t n = x.size();
  if (n < 2 || w.size() != n) throw DomainError("weighted_stats: need matched samples, n >= 2");
  std::vector<double> wx(n);
  for (std::size_t i = 0; i < n; ++i) wx[i] = w[i] * x[i];
  double sw = pairwise_sum(w);
  if (!(sw > 0)) throw DomainError("weighted_stats: weights must have positive sum");
  double mean = pairwise_sum(wx) / sw;
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = w[i] * w[i] * (x[i] - mean) * (x[i] - mean);
  double var = pairwise_sum(d) / (sw * sw) * static_cast<double>(n) / static_cast<double>(n - 1);
  return {mean, std::sqrt(var), n, seed};
}

double effective_sample_size(std::span<const double> w) {
  std::vector<double> w2(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) w2[i] = w[i] * w[i];
  double s = pairwise_sum(w), s2 = pairwise_sum(w2);
  return s2 > 0 ? s * s / s2 : 0.0;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double kolmogorov_sf(double x) {
  if (x <= 0) return 1.0;
  if (x < 0.3) {
    // Small-x series; the alternating form converges poorly here.
    double s = 0.0;
    for (int k = 1; k < 50; ++k) {
      double t = (2 * k - 1) * pi / x;
      s += std::exp(-t * t / 8.0);
    }
    return 1.0 - std::sqrt(2 * pi) / x * s;
  }
  double s = 0.0;
  for (int k = 1; k < 200; ++k) {
    double term = std::exp(-2.0 * k * k * x * x);
    s += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

namespace {

struct WeightedCdf {
  std::vector<std::pair<double, double>> pts;  // value, normalized weight
  double ess;
};

WeightedCdf make_cdf(std::span<const double> x, std::span<const double> w) {
  WeightedCdf c;
  c.pts.resize(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double wi = w.empty() ? 1.0 : w[i];
    c.pts[i] = {x[i], wi};
    total += wi;
  }
  if (!(total > 0)) throw DomainError("ks_two_sample: empty or zero-weight sample");
  for (auto& p : c.pts) p.second /= total;
  std::sort(c.pts.begin(), c.pts.end());
  c.ess = w.empty() ? static_cast<double>(x.size()) : effective_sample_size(w);
  return c;
}

}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> wa,
                       std::span<const double> b, std::span<const double> wb) {
  WeightedCdf ca = make_cdf(a, wa), cb = make_cdf(b, wb);
  double fa = 0.0, fb = 0.0, d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ca.pts.size() || j < cb.pts.size()) {
    double v = std::numeric_limits<double>::infinity();
    if (i < ca.pts.size()) v = ca.pts[i].first;
    if (j < cb.pts.size()) v = std::min(v, cb.pts[j].first);
    while (i < ca.pts.size() && ca.pts[i].first == v) fa += ca.pts[i++].second;
    while (j < cb.pts.size() && cb.pts[j].first == v) fb += cb.pts[j++].second;
    d = std::max(d, std::abs(fa - fb));
  }
  double ne = ca.ess * cb.ess / (ca.ess + cb.ess);
  double sq = std::sqrt(ne);
  // Stephens' small-sample correction.
  double p = kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d);
  return {d, ne, p};
}

std::vector<double> equal_mass_edges(std::vector<double> pilot, int bins) {
  if (bins < 1 || pilot.size() < static_cast<std::size_t>(bins))
    throw DomainError("equal_mass_edges: not enough pilot samples");
  std::sort(pilot.begin(), pilot.end());
  std::vector<double> e(bins + 1);
  e.front() = -std::numeric_limits<double>::infinity();
  e.back() = std::numeric_limits<double>::infinity();
  for (int k = 1; k < bins; ++k) e[k] = pilot[pilot.size() * k / bins];
  return e;
}

int bin_index(std::span<const double> edges, double x) {
  auto it = std::upper_bound(edges.begin() + 1, edges.end() - 1, x);
  return static_cast<int>(it - edges.begin()) - 1;
}

BinnedResidual::BinnedResidual(std::vector<double> edges)
    : edges_(std::move(edges)), acc_(edges_.size() - 1), tmp_(edges_.size() - 1) {}

void BinnedResidual::begin_path(double weight) {
  weight_ = weight;
  std::fill(tmp_.begin(), tmp_.end(), Tmp{});
}

void BinnedResidual::add(double key, double predicted, double observed) {
  Tmp& t = tmp_[bin_index(edges_, key)];
  t.n += 1;
  t.r += observed - predicted;
  t.p += predicted;
  t.o += observed;
}

void BinnedResidual::end_path() {
  const double w = weight_;
  for (std::size_t b = 0; b < tmp_.size(); ++b) {
    const Tmp& t = tmp_[b];
    if (t.n == 0) continue;
    Acc& a = acc_[b];
    a.count += t.n;
    a.swn += w * t.n;
    a.swr += w * t.r;
    a.swp += w * t.p;
    a.swo += w * t.o;
    a.w2r2 += w * w * t.r * t.r;
    a.w2rn += w * w * t.r * t.n;
    a.w2n2 += w * w * t.n * t.n;
  }
}

void BinnedResidual::merge(const BinnedResidual& o) {
  for (std::size_t b = 0; b < acc_.size(); ++b) {
    Acc& a = acc_[b];
    const Acc& c = o.acc_[b];
    a.count += c.count;
    a.swn += c.swn;
    a.swr += c.swr;
    a.swp += c.swp;
    a.swo += c.swo;
    a.w2r2 += c.w2r2;
    a.w2rn += c.w2rn;
    a.w2n2 += c.w2n2;
  }
}

std::vector<BinnedResidual::Bin> BinnedResidual::bins() const {
  std::vector<Bin> out;
  for (std::size_t b = 0; b < acc_.size(); ++b) {
    const Acc& a = acc_[b];
    Bin bin{edges_[b], edges_[b + 1], a.count, 0, 0, 0, 0};
    if (a.swn > 0) {
      double rbar = a.swr / a.swn;
      bin.predicted_mean = a.swp / a.swn;
      bin.observed_mean = a.swo / a.swn;
      double v = a.w2r2 - 2 * rbar * a.w2rn + rbar * rbar * a.w2n2;
      bin.std_error = std::sqrt(std::max(v, 0.0)) / a.swn;
      bin.z = bin.std_error > 0 ? rbar / bin.std_error : 0.0;
    }
    out.push_back(bin);
  }
  return out;
}

}  // namespace lqz
