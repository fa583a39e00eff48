#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "errors.hpp"
#include "glauber.hpp"
#include "rng.hpp"
#include "stats.hpp"

using namespace coarsening;

TEST_CASE("apply_ring follows the three-case rule") {
  SpinConfig c(BoxShape::cube(2, 3), BoundaryKind::AllPlus, +1);
  const std::size_t mid = c.shape().index({1, 1});
  c.set(mid, -1);
  auto ev = apply_ring(c, mid, 0.99, 0.0);  // e = 4 > 0: flips regardless of u, q
  CHECK(ev.new_spin == 1);
  CHECK_FALSE(ev.used_tiebreak);
  ev = apply_ring(c, mid, 0.0, 1.0);  // e = -4: keeps
  CHECK(ev.new_spin == 1);
  // Tie: two + and two - neighbours.
  c.set(c.shape().index({0, 1}), -1);
  c.set(c.shape().index({1, 0}), -1);
  CHECK(c.local_energy(mid) == 0);
  ev = apply_ring(c, mid, 0.3, 0.5);
  CHECK(ev.used_tiebreak);
  CHECK(ev.new_spin == 1);
  ev = apply_ring(c, mid, 0.7, 0.5);
  CHECK(ev.new_spin == -1);
}

TEST_CASE("q = 1 keeps an all-plus cube") {
  for (auto kind : {BoundaryKind::AllPlus, BoundaryKind::AllMinus, BoundaryKind::Free}) {
    GlauberSim sim(SpinConfig(BoxShape::cube(2, 4), kind, +1), 1.0, 17);
    sim.evolve_until(50.0);
    CHECK(sim.config().all_equal(1));
    CHECK(sim.event_count() > 0);
  }
}

TEST_CASE("evolving to the current time changes nothing") {
  GlauberSim sim(sample_product_config(BoxShape::cube(2, 6), 0.5, BoundaryKind::AllPlus, 1), 0.5, 2);
  sim.evolve_until(1.0);
  const SpinConfig before = sim.config();
  const auto events = sim.event_count();
  sim.evolve_until(1.0);
  CHECK(sim.config() == before);
  CHECK(sim.event_count() == events);
  CHECK_THROWS_AS(sim.evolve_until(0.5), InputError);
  CHECK_THROWS_AS(sim.evolve_until(INFINITY), InputError);
}

TEST_CASE("trajectory does not depend on how the horizon is split") {
  const SpinConfig start = sample_product_config(BoxShape::cube(2, 10), 0.5, BoundaryKind::Free, 4);
  GlauberSim a(start, 0.6, 99), b(start, 0.6, 99);
  std::ostringstream la, lb;
  EventLogWriter wa(la), wb(lb);
  a.evolve_until(5.0, [&](const GlauberEvent& e) { wa(e); return true; });
  for (double t = 0.37; t < 5.0; t += 0.37) b.evolve_until(t, [&](const GlauberEvent& e) { wb(e); return true; });
  b.evolve_until(5.0, [&](const GlauberEvent& e) { wb(e); return true; });
  CHECK(a.config() == b.config());
  CHECK(la.str() == lb.str());
  CHECK(la.str().rfind("event_index,time,site_index,e_x,old_spin,new_spin,used_tiebreak\n", 0) == 0);
}

TEST_CASE("single minus site under plus boundary survives with probability e^{-t}") {
  const int n = 100000;
  std::uint64_t alive = 0;
  for (int i = 0; i < n; ++i) {
    GlauberSim sim(SpinConfig(BoxShape::cube(1, 1), BoundaryKind::AllPlus, -1), 0.3, derive_seed(5, i));
    sim.evolve_until(1.0);
    if (sim.config().spin(0) < 0) ++alive;
  }
  const auto e = wilson_interval(alive, n);
  CHECK(std::abs(e.estimate - std::exp(-1.0)) < 3.0 * e.standard_error());
}

TEST_CASE("erosion of a single site is Exp(1)") {
  std::vector<double> times;
  for (int i = 0; i < 10000; ++i) times.push_back(erosion_time(1, 0.5, 2, derive_seed(6, i), 100.0).time);
  const auto s = summarize(times);
  CHECK(std::abs(s.mean - 1.0) < 3.0 * s.std_error);
  CHECK(ks_exponential(times, 1.0).p_value > 0.05);
}

TEST_CASE("erosion at q = 1 terminates for L = 2") {
  for (int i = 0; i < 200; ++i) {
    const auto r = erosion_time(2, 1.0, 2, derive_seed(8, i), 100.0);
    CHECK_FALSE(r.censored);
  }
  const auto r = erosion_time(8, 0.0, 2, 1, 0.5);
  CHECK(r.censored);
  CHECK(r.time == 0.5);
  CHECK_THROWS_AS(erosion_time(4, 0.5, 2, 1, 0.0), InputError);
}

TEST_CASE("coupled pair: identical inputs give identical copies") {
  const SpinConfig s = sample_product_config(BoxShape::cube(2, 8), 0.5, BoundaryKind::AllPlus, 3);
  CoupledPair p(s, s, 0.6, 0.6, 4);
  p.evolve_until(4.0);
  CHECK(p.low() == p.high());
}

TEST_CASE("coupled pair preserves ordering") {
  const BoxShape shape = BoxShape::cube(2, 8);
  CoupledPair p(SpinConfig(shape, BoundaryKind::AllPlus, -1), SpinConfig(shape, BoundaryKind::AllPlus, +1), 0.7, 0.7, 5);
  p.evolve_until(5.0);
  CHECK(p.order_violations() == 0);
  CHECK(pointwise_leq(p.low(), p.high()));

  const SpinConfig s = sample_product_config(shape, 0.5, BoundaryKind::Free, 6);
  CoupledPair r(s, s, 0.5, 0.9, 7);
  r.evolve_until(3.0);
  CHECK(r.order_violations() == 0);
  CHECK(r.high().count_plus() >= r.low().count_plus());
}

TEST_CASE("coupled pair rejects unordered input") {
  const BoxShape shape = BoxShape::cube(2, 4);
  CHECK_THROWS_AS(CoupledPair(SpinConfig(shape, BoundaryKind::AllPlus, 1), SpinConfig(shape, BoundaryKind::AllPlus, -1), 0.5, 0.5, 1), InputError);
  CHECK_THROWS_AS(CoupledPair(SpinConfig(shape, BoundaryKind::AllPlus, -1), SpinConfig(shape, BoundaryKind::AllPlus, 1), 0.9, 0.5, 1), InputError);
}

TEST_CASE("first_minus_time_after") {
  GlauberSim stable(SpinConfig(BoxShape::cube(2, 5), BoundaryKind::AllPlus, 1), 1.0, 1);
  CHECK_FALSE(first_minus_time_after(stable, 12, 0.0, 10.0).has_value());

  GlauberSim minus(SpinConfig(BoxShape::cube(2, 5), BoundaryKind::AllMinus, -1), 0.5, 1);
  const auto hit = first_minus_time_after(minus, 12, 0.0, 10.0);
  REQUIRE(hit.has_value());
  CHECK(*hit == 0.0);
  CHECK_THROWS_AS(first_minus_time_after(minus, 12, 5.0, 5.0), InputError);
}

TEST_CASE("origin minus probability decays from its initial value") {
  const BoxShape shape = BoxShape::cube(2, 21);
  const std::size_t origin = shape.index({10, 10});
  std::uint64_t at_zero = 0, later = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const auto s = derive_seed(12, i);
    SpinConfig start = sample_product_config(shape, 0.9, BoundaryKind::AllPlus, s);
    if (start.spin(origin) < 0) ++at_zero;
    GlauberSim sim(std::move(start), 0.9, mix64(s));
    if (first_minus_time_after(sim, origin, 20.0, 40.0)) ++later;
  }
  CHECK(later < at_zero);
}
