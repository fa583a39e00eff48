#include "glauber.hpp"

#include <cmath>
#include <ostream>

#include "errors.hpp"

namespace coarsening {

GlauberSim::GlauberSim(SpinConfig config, double q, std::uint64_t seed)
    : config_(std::move(config)), q_(q), rng_(seed),
      rate_(static_cast<double>(config_.size())) {
  COARSENING_REQUIRE(q >= 0.0 && q <= 1.0, "GlauberSim: q must lie in [0,1]");
  next_ = rng_.exponential(rate_);
}

void GlauberSim::check_target(double t) const {
  COARSENING_REQUIRE(std::isfinite(t), "evolve_until: time must be finite");
  COARSENING_REQUIRE(t >= clock_, "evolve_until: time is before the current clock");
}

GlauberSim evolve_until(GlauberSim sim, double t) {
  sim.evolve_until(t);
  return sim;
}

bool pointwise_leq(const SpinConfig& a, const SpinConfig& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.spin(i) > b.spin(i)) return false;
  }
  return true;
}

CoupledPair::CoupledPair(SpinConfig low, SpinConfig high, double q_low, double q_high,
                         std::uint64_t seed)
    : low_(std::move(low)), high_(std::move(high)), q_low_(q_low), q_high_(q_high), rng_(seed),
      rate_(static_cast<double>(low_.size())) {
  COARSENING_REQUIRE(q_low >= 0.0 && q_high <= 1.0 && q_low <= q_high,
                     "CoupledPair: need 0 <= q_low <= q_high <= 1");
  COARSENING_REQUIRE(low_.shape() == high_.shape() && low_.boundary() == high_.boundary(),
                     "CoupledPair: copies must share shape and boundary");
  COARSENING_REQUIRE(pointwise_leq(low_, high_), "CoupledPair: initial configs are not ordered");
  next_ = rng_.exponential(rate_);
}

void CoupledPair::evolve_until(double t) {
  COARSENING_REQUIRE(std::isfinite(t), "evolve_coupled: time must be finite");
  COARSENING_REQUIRE(t >= clock_, "evolve_coupled: time is before the current clock");
  while (next_ <= t) {
    const std::size_t site = static_cast<std::size_t>(rng_.below(low_.size()));
    const double u = rng_.uniform();
    apply_ring(low_, site, u, q_low_);
    apply_ring(high_, site, u, q_high_);
    if (low_.spin(site) > high_.spin(site)) ++violations_;
    ++events_;
    clock_ = next_;
    next_ += rng_.exponential(rate_);
  }
  clock_ = t;
}

CoupledPair evolve_coupled(CoupledPair pair, double t) {
  pair.evolve_until(t);
  return pair;
}

ErosionResult erosion_time(int L, double q, int d, std::uint64_t seed, double t_max) {
  COARSENING_REQUIRE(L >= 1, "erosion_time: L must be >= 1");
  COARSENING_REQUIRE(t_max > 0.0 && std::isfinite(t_max), "erosion_time: t_max must be positive");
  GlauberSim sim(SpinConfig(BoxShape::cube(d, L), BoundaryKind::AllPlus, -1), q, seed);
  std::size_t minus = sim.config().size();
  ErosionResult result;
  const bool finished = !sim.evolve_until(t_max, [&](const GlauberEvent& ev) {
    if (ev.new_spin != ev.old_spin) {
      if (ev.new_spin > 0) {
        --minus;
      } else {
        ++minus;
      }
    }
    return minus > 0;
  });
  result.events = sim.event_count();
  result.censored = !finished;
  result.time = finished ? sim.clock_time() : t_max;
  return result;
}

std::optional<double> first_minus_time_after(GlauberSim& sim, std::size_t site, double t,
                                             double horizon) {
  COARSENING_REQUIRE(horizon > t, "first_minus_time_after: horizon must exceed t");
  COARSENING_REQUIRE(site < sim.config().size(), "first_minus_time_after: site outside the box");
  sim.evolve_until(t);
  if (sim.config().spin(site) < 0) return t;
  std::optional<double> hit;
  sim.evolve_until(horizon, [&](const GlauberEvent& ev) {
    if (ev.site == site && ev.new_spin < 0) {
      hit = ev.time;
      return false;
    }
    return true;
  });
  return hit;
}

EventLogWriter::EventLogWriter(std::ostream& out) : out_(out) {
  out_ << "event_index,time,site_index,e_x,old_spin,new_spin,used_tiebreak\n";
}

void EventLogWriter::operator()(const GlauberEvent& ev) {
  out_ << ev.index << ',';
  out_.precision(17);
  out_ << ev.time << ',' << ev.site << ',' << ev.energy << ',' << ev.old_spin << ','
       << ev.new_spin << ',' << (ev.used_tiebreak ? 1 : 0) << '\n';
}

}  // namespace coarsening
