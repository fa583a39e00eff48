#include "doctest.h"

#include <cmath>
#include <set>
#include <vector>

#include "rng.hpp"
#include "stats.hpp"

using namespace coarsening;

TEST_CASE("mix64 matches the SplitMix64 reference stream") {
  // First three outputs of SplitMix64 seeded with 0.
  CHECK(mix64(0x9E3779B97F4A7C15ULL) == 0xE220A8397B1DCDAFULL);
  CHECK(mix64(2 * 0x9E3779B97F4A7C15ULL) == 0x6E789E6AA1B965F4ULL);
  CHECK(mix64(3 * 0x9E3779B97F4A7C15ULL) == 0x06C45D188009454FULL);
}

TEST_CASE("same seed gives the same stream") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a(), y = b(), z = c();
    CHECK(x == y);
    differs = differs || x != z;
  }
  CHECK(differs);
}

TEST_CASE("derived seeds are distinct and depend only on (master, index)") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(7, i));
  CHECK(seen.size() == 10000);
  CHECK(derive_seed(7, 5) == derive_seed(7, 5));
  CHECK(derive_seed(7, 5) != derive_seed(8, 5));
}

TEST_CASE("uniform lies in [0,1) and has mean 1/2") {
  Rng r(1);
  double s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    s += u;
  }
  CHECK(std::abs(s / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("below is unbiased over a small range") {
  Rng r(2);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = r.below(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  CHECK(chi2 < 22.46);  // chi-square 6 dof, p = 0.001
  CHECK(r.below(1) == 0);
}

TEST_CASE("exponential passes a KS test against Exp(rate)") {
  Rng r(3);
  std::vector<double> xs(10000);
  for (auto& x : xs) x = r.exponential(2.5);
  CHECK(ks_exponential(xs, 2.5).p_value > 0.01);
}
