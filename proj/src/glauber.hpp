#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "lattice.hpp"
#include "rng.hpp"

namespace coarsening {

struct GlauberEvent {
  std::uint64_t index = 0;
  double time = 0.0;
  std::size_t site = 0;
  int energy = 0;
  int old_spin = 0;
  int new_spin = 0;
  bool used_tiebreak = false;
};

/// Resolves one ring at `site`: e<0 keeps, e>0 flips, e=0 sets +1 iff u < q.
inline GlauberEvent apply_ring(SpinConfig& config, std::size_t site, double u, double q) {
  GlauberEvent ev;
  ev.site = site;
  ev.old_spin = config.spin(site);
  ev.energy = config.local_energy(site);
  ev.new_spin = ev.old_spin;
  if (ev.energy > 0) {
    ev.new_spin = -ev.old_spin;
  } else if (ev.energy == 0) {
    ev.used_tiebreak = true;
    ev.new_spin = u < q ? 1 : -1;
  }
  if (ev.new_spin != ev.old_spin) config.set(site, ev.new_spin);
  return ev;
}

/// Zero-temperature Glauber dynamics with q-biased tie breaking on a finite
/// box. Events form a single rate-N Poisson stream; each event draws a
/// uniform site and a uniform tie-break variable. The next event time is kept
/// pending, so a trajectory does not depend on how the horizon is split
/// across evolve calls.
class GlauberSim {
 public:
  GlauberSim(SpinConfig config, double q, std::uint64_t seed);

  const SpinConfig& config() const { return config_; }
  double q() const { return q_; }
  double clock_time() const { return clock_; }
  std::uint64_t event_count() const { return events_; }
  double next_event_time() const { return next_; }

  void evolve_until(double t) {
    evolve_until(t, [](const GlauberEvent&) { return true; });
  }

  /// Runs events up to time t. `on_event` is called after each event; when it
  /// returns false the run stops at that event's time.
  template <class F>
  bool evolve_until(double t, F&& on_event) {
    check_target(t);
    while (next_ <= t) {
      const std::size_t site = static_cast<std::size_t>(rng_.below(config_.size()));
      const double u = rng_.uniform();
      GlauberEvent ev = apply_ring(config_, site, u, q_);
      ev.index = events_++;
      ev.time = next_;
      clock_ = next_;
      next_ += rng_.exponential(rate_);
      if (!on_event(ev)) return false;
    }
    clock_ = t;
    return true;
  }

 private:
  void check_target(double t) const;

  SpinConfig config_;
  double q_;
  Rng rng_;
  double rate_;
  double clock_ = 0.0;
  double next_ = 0.0;
  std::uint64_t events_ = 0;
};

/// Two copies driven by one event stream: same ring times, same sites, same
/// tie-break uniform. Each copy resolves ties with its own q.
class CoupledPair {
 public:
  CoupledPair(SpinConfig low, SpinConfig high, double q_low, double q_high, std::uint64_t seed);

  const SpinConfig& low() const { return low_; }
  const SpinConfig& high() const { return high_; }
  double clock_time() const { return clock_; }
  std::uint64_t event_count() const { return events_; }
  /// Events after which low <= high failed at the updated site.
  std::uint64_t order_violations() const { return violations_; }

  void evolve_until(double t);

 private:
  SpinConfig low_;
  SpinConfig high_;
  double q_low_;
  double q_high_;
  Rng rng_;
  double rate_;
  double clock_ = 0.0;
  double next_ = 0.0;
  std::uint64_t events_ = 0;
  std::uint64_t violations_ = 0;
};

bool pointwise_leq(const SpinConfig& a, const SpinConfig& b);

GlauberSim evolve_until(GlauberSim sim, double t);
CoupledPair evolve_coupled(CoupledPair pair, double t);

struct ErosionResult {
  double time = 0.0;  // erosion time, or t_max when censored
  bool censored = false;
  std::uint64_t events = 0;
};

/// Time until an all -1 box of side L with +1 exterior becomes all +1.
ErosionResult erosion_time(int L, double q, int d, std::uint64_t seed, double t_max);

/// First time >= t at which `site` is -1, searching up to `horizon`.
/// The simulation is advanced in place.
std::optional<double> first_minus_time_after(GlauberSim& sim, std::size_t site, double t,
                                             double horizon);

/// CSV writer for the debug event log.
class EventLogWriter {
 public:
  explicit EventLogWriter(std::ostream& out);
  void operator()(const GlauberEvent& ev);

 private:
  std::ostream& out_;
};

}  // namespace coarsening
