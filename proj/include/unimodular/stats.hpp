#pragma once

// Histograms and goodness-of-fit statistics (Kolmogorov-Smirnov, chi-square).

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "unimodular/errors.hpp"

namespace unimodular {

/// Equal-width histogram on [lo, hi]; values outside land in underflow/overflow
/// so that sum(counts) + underflow + overflow = total.
struct EmpiricalDistribution {
  std::vector<double> bin_edges;
  std::vector<std::int64_t> counts;
  std::int64_t underflow = 0;
  std::int64_t overflow = 0;
  std::int64_t total = 0;

  std::vector<double> normalized_heights() const {
    std::vector<double> h(counts.size(), 0.0);
    const std::int64_t inside = total - underflow - overflow;
    if (inside == 0) return h;
    for (std::size_t i = 0; i < counts.size(); ++i)
      h[i] = static_cast<double>(counts[i]) / (static_cast<double>(inside) * (bin_edges[i + 1] - bin_edges[i]));
    return h;
  }
};

inline EmpiricalDistribution make_histogram(const std::vector<double>& values, double lo, double hi, int bins = 50) {
  require(bins >= 1, "make_histogram: bins must be >= 1");
  require(hi > lo, "make_histogram: empty range");
  EmpiricalDistribution h;
  h.bin_edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) h.bin_edges[i] = lo + (hi - lo) * i / bins;
  h.counts.assign(bins, 0);
  for (double v : values) {
    ++h.total;
    if (v < lo) {
      ++h.underflow;
    } else if (v > hi) {
      ++h.overflow;
    } else {
      int idx = static_cast<int>((v - lo) / (hi - lo) * bins);
      h.counts[std::clamp(idx, 0, bins - 1)]++;
    }
  }
  return h;
}

/// Histogram over the data range.
inline EmpiricalDistribution make_histogram(const std::vector<double>& values, int bins = 50) {
  require(!values.empty(), "make_histogram: no data");
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double hi = (*mx > *mn) ? *mx : *mn + 1.0;
  return make_histogram(values, *mn, hi, bins);
}

/// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
inline double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf) {
  require(!values.empty(), "ks_statistic: no data");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double F = cdf(values[i]);
    d = std::max({d, (i + 1) / n - F, F - i / n});
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "ks_two_sample: no data");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

/// Asymptotic 1% critical value of the Kolmogorov distribution.
inline constexpr double ks_critical_1pct = 1.628;

inline double ks_threshold_1pct(std::int64_t n) { return ks_critical_1pct / std::sqrt(static_cast<double>(n)); }

inline double ks_threshold_1pct(std::int64_t n, std::int64_t m) {
  return ks_critical_1pct * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double pvalue = 0.0;
  int merged_bins = 0;
};

/// Chi-square of a histogram against a reference CDF. Underflow and overflow
/// become two extra cells; adjacent cells are merged until each expects >= 5.
inline ChiSquare chi_square(const EmpiricalDistribution& h, const std::function<double(double)>& cdf,
                            int fitted_parameters = 0) {
  const double n = static_cast<double>(h.total);
  require(n > 0, "chi_square: empty histogram");
  std::vector<double> observed, expected;
  observed.push_back(static_cast<double>(h.underflow));
  expected.push_back(n * cdf(h.bin_edges.front()));
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    observed.push_back(static_cast<double>(h.counts[i]));
    expected.push_back(n * (cdf(h.bin_edges[i + 1]) - cdf(h.bin_edges[i])));
  }
  observed.push_back(static_cast<double>(h.overflow));
  expected.push_back(n * (1.0 - cdf(h.bin_edges.back())));

  std::vector<double> obs_m, exp_m;
  double o_acc = 0.0, e_acc = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o_acc += observed[i];
    e_acc += std::max(expected[i], 0.0);
    if (e_acc >= 5.0) {
      obs_m.push_back(o_acc);
      exp_m.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (o_acc > 0.0 || e_acc > 0.0) {
    if (exp_m.empty()) {
      obs_m.push_back(o_acc);
      exp_m.push_back(e_acc);
    } else {
      obs_m.back() += o_acc;
      exp_m.back() += e_acc;
    }
  }
  ChiSquare out;
  out.merged_bins = static_cast<int>(exp_m.size());
  for (std::size_t i = 0; i < exp_m.size(); ++i) {
    if (exp_m[i] <= 0.0) {
      if (obs_m[i] > 0.0) out.statistic = std::numeric_limits<double>::infinity();
      continue;
    }
    const double d = obs_m[i] - exp_m[i];
    out.statistic += d * d / exp_m[i];
  }
  out.dof = out.merged_bins - 1 - fitted_parameters;
  if (out.dof < 1) {
    out.pvalue = 1.0;
    return out;
  }
  out.pvalue = std::isfinite(out.statistic) ? boost::math::gamma_q(0.5 * out.dof, 0.5 * out.statistic) : 0.0;
  return out;
}

struct GofReport {
  std::int64_t samples = 0;
  double ks_statistic = 0.0;
  double ks_threshold_1pct = 0.0;
  double chi2_statistic = 0.0;
  int chi2_dof = 0;
  double chi2_pvalue = 0.0;
  bool pass = false;
};

inline GofReport goodness_of_fit(const std::vector<double>& values, const EmpiricalDistribution& h,
                                 const std::function<double(double)>& cdf) {
  GofReport r;
  r.samples = static_cast<std::int64_t>(values.size());
  r.ks_statistic = ks_statistic(values, cdf);
  r.ks_threshold_1pct = unimodular::ks_threshold_1pct(r.samples);
  const auto chi = chi_square(h, cdf);
  r.chi2_statistic = chi.statistic;
  r.chi2_dof = chi.dof;
  r.chi2_pvalue = chi.pvalue;
  r.pass = r.ks_statistic < r.ks_threshold_1pct && r.chi2_pvalue > 0.01;
  return r;
}

/// Mean and batch-means standard error of a (possibly correlated) series.
struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

inline MeanEstimate batch_means(const std::vector<double>& x, int batches = 50) {
  require(static_cast<int>(x.size()) >= 2 * batches, "batch_means: too few values");
  const std::size_t per = x.size() / batches;
  std::vector<double> means(batches, 0.0);
  for (int b = 0; b < batches; ++b) {
    for (std::size_t i = 0; i < per; ++i) means[b] += x[b * per + i];
    means[b] /= static_cast<double>(per);
  }
  MeanEstimate out;
  for (double m : means) out.mean += m;
  out.mean /= batches;
  double var = 0.0;
  for (double m : means) var += (m - out.mean) * (m - out.mean);
  out.standard_error = std::sqrt(var / (batches - 1) / batches);
  return out;
}

}  // namespace unimodular
