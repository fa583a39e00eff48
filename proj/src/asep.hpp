#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "lattice.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace coarsening {

/// Particle positions x_1 > x_2 > ... > x_M, rightmost first.
struct AsepState {
  std::vector<std::int64_t> positions;
  double time = 0.0;

  std::size_t size() const { return positions.size(); }
  bool valid() const;
};

AsepState step_initial(std::size_t M);

/// Number of particles at positions >= 1.
std::size_t current_h0(const AsepState& state);

struct AsepEvent {
  std::uint64_t index = 0;
  double time = 0.0;
  std::size_t particle = 0;  // zero-based; particle k carries the label x_{k+1}
  std::int64_t old_pos = 0;
  std::int64_t new_pos = 0;
  bool blocked = false;
};

/// ASEP restricted to M particles. Events form a rate-M Poisson stream; each
/// draws a uniform particle and a uniform direction variable (right iff
/// u < q). A blocked attempt still consumes the event.
class AsepSim {
 public:
  AsepSim(AsepState state, double q, std::uint64_t seed);

  const AsepState& state() const { return state_; }
  double q() const { return q_; }
  std::uint64_t event_count() const { return events_; }

  void evolve_until(double t) {
    evolve_until(t, [](const AsepEvent&) {});
  }

  template <class F>
  void evolve_until(double t, F&& on_event) {
    check_target(t);
    auto& x = state_.positions;
    const std::size_t M = x.size();
    while (next_ <= t) {
      const std::size_t i = static_cast<std::size_t>(rng_.below(M));
      const bool right = rng_.uniform() < q_;
      AsepEvent ev;
      ev.index = events_++;
      ev.time = next_;
      ev.particle = i;
      ev.old_pos = x[i];
      if (right) {
        ev.blocked = i > 0 && x[i - 1] == x[i] + 1;
        if (!ev.blocked) ++x[i];
      } else {
        ev.blocked = i + 1 < M && x[i + 1] == x[i] - 1;
        if (!ev.blocked) --x[i];
      }
      ev.new_pos = x[i];
      state_.time = next_;
      next_ += rng_.exponential(rate_);
      on_event(ev);
    }
    state_.time = t;
  }

 private:
  void check_target(double t) const;

  AsepState state_;
  double q_;
  Rng rng_;
  double rate_;
  double next_ = 0.0;
  std::uint64_t events_ = 0;
};

AsepState evolve_asep(AsepState state, double t, double q, std::uint64_t seed);

/// Number of rows needed so that x_m(time) is insensitive to truncation:
/// m + ceil(time) + 10.
std::size_t truncation_rule(std::size_t m, double time);

/// Plus-region of the quadrant coarsening model as row lengths: row l >= 1
/// holds +1 at first coordinate 1..a_l. The sequence is weakly decreasing.
struct StaircaseInterface {
  std::vector<std::int64_t> profile;
  bool valid() const;
};

/// x_l = a_l - l.
AsepState quadrant_to_asep(const StaircaseInterface& interface);

/// a_l = x_l + l for l = 1..window; rows beyond the particle count are 0.
StaircaseInterface asep_to_quadrant(const AsepState& state, std::size_t window);

/// Reads the staircase off a quadrant box; throws InputError when the plus
/// region is not a staircase.
StaircaseInterface staircase_from_config(const SpinConfig& config);

/// After the update at `site`, checks that the plus region is still a
/// staircase, assuming it was one before.
bool staircase_update_ok(const SpinConfig& config, std::size_t site);

/// Monte Carlo estimate of P(x_m(t/gamma) < 0), gamma = 2q - 1.
/// M = 0 selects truncation_rule(m, t/gamma).
BinomialEstimate ld_event_probability(std::size_t m, double t, double q, std::uint64_t replicas,
                                      std::uint64_t seed, std::size_t M = 0);

class AsepTrajectoryWriter {
 public:
  explicit AsepTrajectoryWriter(std::ostream& out);
  void operator()(const AsepEvent& ev);

 private:
  std::ostream& out_;
};

}  // namespace coarsening
