#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "errors.hpp"

namespace coarsening {

double BinomialEstimate::standard_error() const {
  if (trials == 0) return 0.0;
  return std::sqrt(estimate * (1.0 - estimate) / static_cast<double>(trials));
}

BinomialEstimate wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                 double confidence) {
  COARSENING_REQUIRE(trials >= 1, "wilson_interval: trials must be >= 1");
  COARSENING_REQUIRE(successes <= trials, "wilson_interval: successes exceed trials");
  COARSENING_REQUIRE(confidence > 0.0 && confidence < 1.0,
                     "wilson_interval: confidence must lie in (0,1)");
  const boost::math::normal_distribution<double> normal;
  const double z = boost::math::quantile(normal, 0.5 + confidence / 2.0);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;

  BinomialEstimate out;
  out.successes = successes;
  out.trials = trials;
  out.estimate = p;
  out.confidence = confidence;
  out.lower = successes == 0 ? 0.0 : std::clamp(centre - half, 0.0, p);
  out.upper = successes == trials ? 1.0 : std::clamp(centre + half, p, 1.0);
  return out;
}

SlopeFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  COARSENING_REQUIRE(x.size() == y.size(), "fit_linear: size mismatch");
  COARSENING_REQUIRE(x.size() >= 2, "fit_linear: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  COARSENING_REQUIRE(sxx > 0.0, "fit_linear: abscissae are all equal");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    fit.residual += r * r;
  }
  fit.used = x.size();
  return fit;
}

SlopeFit fit_log_slope(const std::vector<std::pair<double, double>>& points) {
  COARSENING_REQUIRE(points.size() >= 3, "fit_log_slope: need at least three points");
  std::vector<double> x, y;
  for (const auto& [t, p] : points) {
    COARSENING_REQUIRE(p > 0.0 && p <= 1.0, "fit_log_slope: estimates must lie in (0,1]");
    x.push_back(t);
    y.push_back(std::log(p));
  }
  return fit_linear(x, y);
}

SlopeFit fit_log_slope_censored(const std::vector<std::pair<double, double>>& points,
                                std::size_t& censored) {
  std::vector<std::pair<double, double>> kept;
  censored = 0;
  for (const auto& pt : points) {
    if (pt.second == 0.0) {
      ++censored;
    } else {
      kept.push_back(pt);
    }
  }
  return fit_log_slope(kept);
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return s;
}

double quantile(std::vector<double> values, double prob) {
  COARSENING_REQUIRE(!values.empty(), "quantile: empty sample");
  COARSENING_REQUIRE(prob >= 0.0 && prob <= 1.0, "quantile: probability outside [0,1]");
  std::sort(values.begin(), values.end());
  const double h = prob * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.3) {
    // Theta-function form converges fast for small x.
    const double pi = 3.14159265358979323846;
    double cdf = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double a = (2.0 * k - 1.0) * pi / x;
      cdf += std::exp(-a * a / 8.0);
    }
    cdf *= std::sqrt(2.0 * pi) / x;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  COARSENING_REQUIRE(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  return {d, kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d)};
}

KsResult ks_exponential(std::vector<double> sample, double rate) {
  COARSENING_REQUIRE(!sample.empty(), "ks_exponential: empty sample");
  COARSENING_REQUIRE(rate > 0.0, "ks_exponential: rate must be positive");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = -std::expm1(-rate * sample[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double sq = std::sqrt(n);
  return {d, kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d)};
}

}  // namespace coarsening
