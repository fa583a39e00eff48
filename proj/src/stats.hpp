#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace coarsening {

struct BinomialEstimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 1.0;
  double confidence = 0.95;

  double standard_error() const;
};

/// Wilson score interval. Throws InputError unless 0 <= successes <= trials,
/// trials >= 1 and confidence in (0,1).
BinomialEstimate wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                 double confidence = 0.95);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // sum of squared residuals in log space
  std::size_t used = 0;
};

/// Least squares of log(p) against t. Every p must lie in (0,1].
SlopeFit fit_log_slope(const std::vector<std::pair<double, double>>& points);

/// As fit_log_slope, but zero estimates are dropped rather than rejected.
/// `censored` receives the number of dropped points.
SlopeFit fit_log_slope_censored(const std::vector<std::pair<double, double>>& points,
                                std::size_t& censored);

/// Ordinary least squares slope of y on x.
SlopeFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

Summary summarize(const std::vector<double>& values);

/// Quantile with linear interpolation between order statistics (type 7).
double quantile(std::vector<double> values, double prob);

/// Kolmogorov limiting survival function P(K > x).
double kolmogorov_survival(double x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample test against the Exp(rate) distribution.
KsResult ks_exponential(std::vector<double> sample, double rate);

}  // namespace coarsening
