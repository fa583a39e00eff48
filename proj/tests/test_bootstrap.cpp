#include "doctest.h"

#include <algorithm>
#include <vector>

#include "bootstrap.hpp"
#include "errors.hpp"
#include "rng.hpp"

using namespace coarsening;

namespace {

MbpConfig with_sites(const BoxShape& s, const std::vector<std::vector<int>>& sites) {
  MbpConfig c(s);
  for (const auto& x : sites) c.occupied[s.index(x)] = 1;
  return c;
}

MbpConfig brute_closure(MbpConfig c) {
  for (;;) {
    MbpConfig next = mbp_step(c);
    if (next == c) return c;
    c = std::move(next);
  }
}

// Threshold-two minus closure by repeated full sweeps.
SpinConfig brute_minus_closure(SpinConfig f) {
  for (bool changed = true; changed;) {
    changed = false;
    SpinConfig next = f;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f.spin(i) < 0) continue;
      const auto x = f.shape().coords(i);
      int minus = 0;
      for (int a = 0; a < f.shape().dim(); ++a) {
        for (int s : {-1, 1}) {
          auto y = x;
          y[a] += s;
          if (f.shape().contains(y) && f.spin(f.shape().index(y)) < 0) ++minus;
        }
      }
      if (minus >= 2) {
        next.set(i, -1);
        changed = true;
      }
    }
    f = std::move(next);
  }
  return f;
}

}  // namespace

TEST_CASE("mbp_step examples") {
  const BoxShape s = BoxShape::cube(2, 4);
  MbpConfig full(s, 1);
  CHECK(mbp_step(full) == full);

  const MbpConfig c = mbp_step(with_sites(s, {{1, 0}, {0, 1}}));
  CHECK(c.occupied[s.index({0, 0})] == 1);
  CHECK(c.occupied[s.index({1, 1})] == 1);
  CHECK(c.count() == 4);

  const MbpConfig line = with_sites(s, {{0, 0}, {2, 0}});
  CHECK(mbp_step(line) == line);
}

TEST_CASE("mbp_closure examples") {
  const BoxShape s = BoxShape::cube(2, 6);
  CHECK(mbp_closure(MbpConfig(s)).count() == 0);
  MbpConfig cross(s);
  for (int i = 0; i < 6; ++i) {
    cross.occupied[s.index({0, i})] = 1;
    cross.occupied[s.index({i, 0})] = 1;
  }
  CHECK(mbp_closure(cross).full());
}

TEST_CASE("closure equals the brute-force fixpoint and is idempotent") {
  for (int d = 1; d <= 3; ++d) {
    const BoxShape s = BoxShape::cube(d, d == 3 ? 4 : 8);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      Rng r(seed);
      const MbpConfig c = sample_mbp(s, 0.05 + 0.6 * r.uniform(), derive_seed(3, seed));
      const MbpConfig cl = mbp_closure(c);
      CHECK(cl == brute_closure(c));
      CHECK(mbp_closure(cl) == cl);
    }
  }
}

TEST_CASE("closure is monotone in the input") {
  const BoxShape s = BoxShape::cube(2, 10);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const MbpConfig a = sample_mbp(s, 0.2, derive_seed(4, seed));
    MbpConfig b = a;
    Rng r(seed);
    for (int k = 0; k < 5; ++k) b.occupied[r.below(b.occupied.size())] = 1;
    const MbpConfig ca = mbp_closure(a), cb = mbp_closure(b);
    for (std::size_t i = 0; i < ca.occupied.size(); ++i) CHECK(ca.occupied[i] <= cb.occupied[i]);
  }
}

TEST_CASE("internally_spans") {
  const BoxShape s = BoxShape::cube(2, 5);
  MbpConfig full(s, 1);
  CHECK(internally_spans(full, SubBox{{1, 1}, {3, 4}}));
  MbpConfig hole(s, 1);
  hole.occupied[s.index({2, 2})] = 0;
  CHECK_FALSE(internally_spans(hole, SubBox{{2, 2}, {3, 3}}));
  CHECK(internally_spans(hole, SubBox{{0, 0}, {5, 5}}));
  CHECK_THROWS_AS(internally_spans(hole, SubBox{{0, 0}, {6, 5}}), InputError);
}

TEST_CASE("spanning probability degenerate cases are exact") {
  for (int n : {2, 5, 9}) {
    CHECK(spanning_probability(n, 1.0, 2, 50, 1).estimate == 1.0);
    CHECK(spanning_probability(n, 0.0, 2, 50, 1).estimate == 0.0);
  }
  CHECK_THROWS_AS(spanning_probability(4, 1.2, 2, 10, 1), InputError);
}

TEST_CASE("minus bootstrap rectangles") {
  const BoxShape s = BoxShape::cube(2, 5);
  SpinConfig none(s, BoundaryKind::AllPlus, 1);
  CHECK(minus_bootstrap_rectangles(none).rects.empty());

  SpinConfig pair = none;
  pair.set(s.index({1, 1}), -1);
  pair.set(s.index({1, 2}), -1);
  auto rs = minus_bootstrap_rectangles(pair);
  REQUIRE(rs.rects.size() == 1);
  CHECK(rs.rects[0].contains({1, 1}));
  CHECK(rs.rects[0].contains({1, 2}));

  SpinConfig far = none;
  far.set(s.index({0, 0}), -1);
  far.set(s.index({3, 3}), -1);
  rs = minus_bootstrap_rectangles(far);
  CHECK(rs.rects.size() == 2);
  CHECK(well_separated(rs));
}

TEST_CASE("rectangle invariants on random fields") {
  const BoxShape s = BoxShape::cube(2, 12);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SpinConfig f = sample_product_config(s, 0.9, BoundaryKind::AllPlus, derive_seed(21, seed));
    const SpinConfig cl = minus_closure(f);
    CHECK(cl == brute_minus_closure(f));
    const RectangleSet rs = minus_bootstrap_rectangles(f);
    CHECK(well_separated(rs));
    // Coverage of every -1 site of the closure.
    for (std::size_t i = 0; i < cl.size(); ++i) {
      if (cl.spin(i) > 0) continue;
      const auto x = s.coords(i);
      CHECK(std::any_of(rs.rects.begin(), rs.rects.end(), [&](const Rect& r) { return r.contains(x); }));
    }
    // Minimality: each rectangle covers some -1 site no other rectangle covers.
    for (std::size_t k = 0; k < rs.rects.size(); ++k) {
      bool needed = false;
      for (std::size_t i = 0; i < cl.size() && !needed; ++i) {
        if (cl.spin(i) > 0) continue;
        const auto x = s.coords(i);
        if (!rs.rects[k].contains(x)) continue;
        bool other = false;
        for (std::size_t j = 0; j < rs.rects.size(); ++j) other = other || (j != k && rs.rects[j].contains(x));
        needed = !other;
      }
      CHECK(needed);
    }
  }
}

TEST_CASE("long closure rectangles contain an internally spanned subrectangle of comparable size") {
  const BoxShape s = BoxShape::cube(2, 10);
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const SpinConfig f = sample_product_config(s, 0.8, BoundaryKind::AllPlus, derive_seed(31, seed));
    for (const Rect& r : minus_bootstrap_rectangles(f).rects) {
      const int j = r.longest_side() - 1;
      if (j < 4) continue;
      bool found = false;
      for (int x0 = r.lo[0]; x0 <= r.hi[0] && !found; ++x0)
        for (int y0 = r.lo[1]; y0 <= r.hi[1] && !found; ++y0)
          for (int x1 = x0; x1 <= r.hi[0] && !found; ++x1)
            for (int y1 = y0; y1 <= r.hi[1] && !found; ++y1) {
              const Rect sub{{x0, y0}, {x1, y1}};
              const int side = sub.longest_side();
              if (side < j / 2 - 1 || side > j) continue;
              found = minus_internally_spans(f, sub);
            }
      CHECK(found);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("text form shares the spin format") {
  const MbpConfig c = sample_mbp(BoxShape({3, 4}), 0.5, 7);
  CHECK(MbpConfig::from_text(c.to_text()) == c);
}
