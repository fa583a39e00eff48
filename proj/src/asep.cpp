#include "asep.hpp"

#include <cmath>
#include <ostream>

#include "errors.hpp"

namespace coarsening {

bool AsepState::valid() const {
  for (std::size_t i = 1; i < positions.size(); ++i) {
    if (positions[i] >= positions[i - 1]) return false;
  }
  return true;
}

AsepState step_initial(std::size_t M) {
  COARSENING_REQUIRE(M >= 1, "step_initial: M must be >= 1");
  AsepState s;
  s.positions.resize(M);
  for (std::size_t j = 0; j < M; ++j) s.positions[j] = -static_cast<std::int64_t>(j + 1);
  return s;
}

std::size_t current_h0(const AsepState& state) {
  std::size_t count = 0;
  for (std::int64_t x : state.positions) {
    if (x < 1) break;
    ++count;
  }
  return count;
}

AsepSim::AsepSim(AsepState state, double q, std::uint64_t seed)
    : state_(std::move(state)), q_(q), rng_(seed), rate_(static_cast<double>(state_.size())) {
  COARSENING_REQUIRE(q >= 0.0 && q <= 1.0, "AsepSim: q must lie in [0,1]");
  COARSENING_REQUIRE(state_.size() >= 1, "AsepSim: need at least one particle");
  COARSENING_REQUIRE(state_.valid(), "AsepSim: positions must be strictly decreasing");
  next_ = state_.time + rng_.exponential(rate_);
}

void AsepSim::check_target(double t) const {
  COARSENING_REQUIRE(std::isfinite(t), "evolve_asep: time must be finite");
  COARSENING_REQUIRE(t >= state_.time, "evolve_asep: time is before the current clock");
}

AsepState evolve_asep(AsepState state, double t, double q, std::uint64_t seed) {
  AsepSim sim(std::move(state), q, seed);
  sim.evolve_until(t);
  return sim.state();
}

std::size_t truncation_rule(std::size_t m, double time) {
  return m + static_cast<std::size_t>(std::ceil(time)) + 10;
}

bool StaircaseInterface::valid() const {
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i] < 0) return false;
    if (i > 0 && profile[i] > profile[i - 1]) return false;
  }
  return true;
}

AsepState quadrant_to_asep(const StaircaseInterface& interface) {
  COARSENING_REQUIRE(!interface.profile.empty(), "quadrant_to_asep: empty profile");
  COARSENING_REQUIRE(interface.valid(), "quadrant_to_asep: profile is not a staircase");
  AsepState s;
  s.positions.resize(interface.profile.size());
  for (std::size_t l = 0; l < s.positions.size(); ++l) {
    s.positions[l] = interface.profile[l] - static_cast<std::int64_t>(l + 1);
  }
  return s;
}

StaircaseInterface asep_to_quadrant(const AsepState& state, std::size_t window) {
  COARSENING_REQUIRE(state.valid(), "asep_to_quadrant: positions must be strictly decreasing");
  StaircaseInterface out;
  out.profile.assign(window, 0);
  for (std::size_t l = 0; l < window && l < state.size(); ++l) {
    out.profile[l] = state.positions[l] + static_cast<std::int64_t>(l + 1);
  }
  COARSENING_REQUIRE(out.valid(), "asep_to_quadrant: state is not reachable from the step");
  return out;
}

StaircaseInterface staircase_from_config(const SpinConfig& config) {
  const BoxShape& shape = config.shape();
  COARSENING_REQUIRE(shape.dim() == 2, "staircase_from_config: need d = 2");
  const int n0 = shape.sides[0];
  const int n1 = shape.sides[1];
  auto plus = [&](int m, int l) { return config.spin(shape.index({m, l})) > 0; };
  for (int m = 0; m < n0; ++m) {
    COARSENING_REQUIRE(plus(m, 0), "staircase_from_config: row 0 must be +1");
  }
  StaircaseInterface out;
  for (int l = 1; l < n1; ++l) {
    COARSENING_REQUIRE(plus(0, l), "staircase_from_config: column 0 must be +1");
    int a = 0;
    while (a + 1 < n0 && plus(a + 1, l)) ++a;
    for (int m = a + 1; m < n0; ++m) {
      COARSENING_REQUIRE(!plus(m, l), "staircase_from_config: row is not a prefix");
    }
    out.profile.push_back(a);
  }
  COARSENING_REQUIRE(out.valid(), "staircase_from_config: rows are not weakly decreasing");
  return out;
}

bool staircase_update_ok(const SpinConfig& config, std::size_t site) {
  const BoxShape& shape = config.shape();
  const std::vector<int> x = shape.coords(site);
  const int m = x[0];
  const int l = x[1];
  auto spin_at = [&](int a, int b) {
    const std::vector<int> y{a, b};
    return shape.contains(y) ? config.spin(shape.index(y)) : boundary_spin(config.boundary(), y);
  };
  if (config.spin(site) > 0) return spin_at(m - 1, l) > 0 && spin_at(m, l - 1) > 0;
  if (m == 0 || l == 0) return false;
  return spin_at(m + 1, l) < 0 && spin_at(m, l + 1) < 0;
}

BinomialEstimate ld_event_probability(std::size_t m, double t, double q, std::uint64_t replicas,
                                      std::uint64_t seed, std::size_t M) {
  COARSENING_REQUIRE(q > 0.5 && q <= 1.0, "ld_event_probability: need 1/2 < q <= 1");
  COARSENING_REQUIRE(m >= 1, "ld_event_probability: m must be >= 1");
  COARSENING_REQUIRE(t >= 0.0 && std::isfinite(t), "ld_event_probability: t must be >= 0");
  COARSENING_REQUIRE(replicas >= 1, "ld_event_probability: replicas must be >= 1");
  const double horizon = t / (2.0 * q - 1.0);
  if (M == 0) M = truncation_rule(m, horizon);
  COARSENING_REQUIRE(m <= M, "ld_event_probability: m exceeds the particle count");
  std::uint64_t hits = 0;
  for (std::uint64_t r = 0; r < replicas; ++r) {
    AsepSim sim(step_initial(M), q, derive_seed(seed, r));
    sim.evolve_until(horizon);
    if (sim.state().positions[m - 1] < 0) ++hits;
  }
  return wilson_interval(hits, replicas);
}

AsepTrajectoryWriter::AsepTrajectoryWriter(std::ostream& out) : out_(out) {
  out_ << "time,event,particle_index,old_pos,new_pos,blocked\n";
  out_.precision(17);
}

void AsepTrajectoryWriter::operator()(const AsepEvent& ev) {
  out_ << ev.time << ',' << ev.index << ',' << ev.particle + 1 << ',' << ev.old_pos << ','
       << ev.new_pos << ',' << (ev.blocked ? 1 : 0) << '\n';
}

}  // namespace coarsening
