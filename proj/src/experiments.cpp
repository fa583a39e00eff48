#include "experiments.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "asep.hpp"
#include "bootstrap.hpp"
#include "errors.hpp"
#include "fredholm.hpp"
#include "glauber.hpp"
#include "lattice.hpp"
#include "rate_function.hpp"
#include "renorm.hpp"
#include "replicate.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace coarsening {

namespace {

constexpr const char* kPilot = "non-paper default, chosen from desk-scale pilots";
constexpr const char* kDesk = "non-paper default, desk-scale budget";

using Row = std::vector<std::string>;
using Runner = void (*)(const json&, unsigned, ExperimentResult&);

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

double num(const json& c, const char* key) { return c.at(key).get<double>(); }

std::uint64_t count(const json& c, const char* key) {
  const double v = num(c, key);
  COARSENING_REQUIRE(v >= 0.0 && v == std::floor(v) && v < 1.8e19,
                     std::string(key) + " must be a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

int integer(const json& c, const char* key) {
  const double v = num(c, key);
  COARSENING_REQUIRE(v == std::floor(v) && std::abs(v) < 2e9, std::string(key) + " must be an integer");
  return static_cast<int>(v);
}

std::vector<double> grid(const json& c, const char* key) {
  std::vector<double> g = c.at(key).get<std::vector<double>>();
  COARSENING_REQUIRE(!g.empty(), std::string(key) + " must not be empty");
  return g;
}

std::uint64_t seed_of(const json& c) { return c.at("seed").get<std::uint64_t>(); }

std::uint64_t replicas_of(const json& c) {
  const std::uint64_t r = count(c, "replicas");
  COARSENING_REQUIRE(r >= 1, "replicas must be >= 1");
  return r;
}

std::uint64_t sum_flags(const std::vector<std::uint8_t>& v) {
  std::uint64_t s = 0;
  for (auto b : v) s += b;
  return s;
}

void add_estimate(Row& row, const BinomialEstimate& e) {
  row.push_back(fmt(e.successes));
  row.push_back(fmt(e.estimate));
  row.push_back(fmt(e.lower));
  row.push_back(fmt(e.upper));
}

bool overlaps(const BinomialEstimate& a, const BinomialEstimate& b) {
  return a.upper >= b.lower && b.upper >= a.lower;
}

/// Nondecreasing within CI overlap: every later estimate is either above the
/// earlier one or its interval overlaps the earlier interval.
bool monotone_within_ci(const std::vector<BinomialEstimate>& cells) {
  for (std::size_t i = 1; i < cells.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (cells[i].estimate < cells[j].estimate && !overlaps(cells[i], cells[j])) return false;
    }
  }
  return true;
}

/// Fraction of replicas whose ASEP particle `m` (1-based) satisfies `pred`
/// at time `horizon`, with M particles from the step initial condition.
template <class Pred>
BinomialEstimate asep_cell(std::size_t m, double horizon, double q, std::size_t M,
                           std::uint64_t replicas, std::uint64_t seed, unsigned threads, Pred pred) {
  const auto hits = replicate<std::uint8_t>(replicas, seed, threads, [&](std::size_t, std::uint64_t s) {
    AsepSim sim(step_initial(M), q, s);
    sim.evolve_until(horizon);
    return static_cast<std::uint8_t>(pred(sim.state().positions[m - 1]) ? 1 : 0);
  });
  return wilson_interval(sum_flags(hits), replicas);
}

// ---------------------------------------------------------------- coupling

void run_coupling(const json& c, unsigned threads, ExperimentResult& r) {
  const double q = num(c, "q");
  const double t = num(c, "t");
  const int m = integer(c, "m");
  const int l = integer(c, "l");
  const std::uint64_t replicas = replicas_of(c);
  const std::uint64_t seed = seed_of(c);
  COARSENING_REQUIRE(integer(c, "d") == 2, "coupling: d must be 2");
  COARSENING_REQUIRE(q >= 0.0 && q <= 1.0, "coupling: q must lie in [0,1]");
  COARSENING_REQUIRE(t >= 0.0 && std::isfinite(t), "coupling: t must be >= 0");
  COARSENING_REQUIRE(m >= 1 && l >= 1, "coupling: m and l must be >= 1");
  int n = integer(c, "box");
  if (n == 0) n = static_cast<int>(std::ceil(2.0 * t)) + 12;
  COARSENING_REQUIRE(n > std::max(m, l), "coupling: box must contain (m, l)");
  const std::size_t site = static_cast<std::size_t>(m) * static_cast<std::size_t>(n) + static_cast<std::size_t>(l);

  const SpinConfig start = quadrant_config(n);
  const auto minus = replicate<std::uint8_t>(replicas, seed, threads, [&](std::size_t, std::uint64_t s) {
    GlauberSim sim(start, q, s);
    sim.evolve_until(t);
    return static_cast<std::uint8_t>(sim.config().spin(site) < 0 ? 1 : 0);
  });
  const BinomialEstimate coarse = wilson_interval(sum_flags(minus), replicas);

  const std::size_t M = truncation_rule(static_cast<std::size_t>(l), t);
  const BinomialEstimate asep =
      asep_cell(static_cast<std::size_t>(l), t, q, M, replicas, derive_seed(seed, replicas), threads,
                [&](std::int64_t x) { return x < m - l; });

  r.columns = {"side", "m", "l", "t", "box_or_particles", "replicas", "censored", "successes",
               "estimate", "lower", "upper"};
  Row a = {"coarsening", fmt(m), fmt(l), fmt(t), fmt(n), fmt(replicas), "0"};
  add_estimate(a, coarse);
  Row b = {"asep", fmt(m), fmt(l), fmt(t), fmt(static_cast<std::uint64_t>(M)), fmt(replicas), "0"};
  add_estimate(b, asep);
  r.rows = {a, b};

  const double se = std::hypot(coarse.standard_error(), asep.standard_error());
  const double diff = coarse.estimate - asep.estimate;
  const double z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : INFINITY);
  r.summary = {{"coarsening_minus_probability", coarse.estimate},
               {"asep_probability", asep.estimate},
               {"difference", diff},
               {"z_score", z},
               {"box", n},
               {"asep_particles", M}};
}

// ------------------------------------------------------------- current LLN

void run_current_lln(const json& c, unsigned threads, ExperimentResult& r) {
  const double q = num(c, "q");
  COARSENING_REQUIRE(q > 0.5 && q <= 1.0, "current-lln: need 1/2 < q <= 1");
  std::vector<double> ts = grid(c, "t_grid");
  for (double t : ts) COARSENING_REQUIRE(t >= 0.0 && std::isfinite(t), "current-lln: t must be >= 0");
  std::sort(ts.begin(), ts.end());
  const std::uint64_t replicas = replicas_of(c);
  const double gamma = 2.0 * q - 1.0;
  const double horizon = ts.back() / gamma;
  const std::size_t M = truncation_rule(0, horizon);

  const auto h = replicate<std::vector<double>>(replicas, seed_of(c), threads, [&](std::size_t, std::uint64_t s) {
    AsepSim sim(step_initial(M), q, s);
    std::vector<double> out;
    out.reserve(ts.size());
    for (double t : ts) {
      sim.evolve_until(t / gamma);
      out.push_back(t == 0.0 ? 0.0 : static_cast<double>(current_h0(sim.state())) / t);
    }
    return out;
  });

  r.columns = {"t", "real_time", "particles", "replicas", "censored", "mean", "std_error", "lower",
               "upper", "deviation_from_quarter"};
  json means = json::array();
  std::vector<double> devs;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    std::vector<double> col(replicas);
    for (std::size_t i = 0; i < replicas; ++i) col[i] = h[i][k];
    const Summary s = summarize(col);
    const double dev = s.mean - 0.25;
    devs.push_back(std::abs(dev));
    means.push_back(s.mean);
    r.rows.push_back({fmt(ts[k]), fmt(ts[k] / gamma), fmt(static_cast<std::uint64_t>(M)), fmt(replicas),
                      "0", fmt(s.mean), fmt(s.std_error), fmt(s.mean - 1.96 * s.std_error),
                      fmt(s.mean + 1.96 * s.std_error), fmt(dev)});
  }
  bool approach = true;
  std::size_t first_positive = 0;
  while (first_positive < ts.size() && ts[first_positive] == 0.0) ++first_positive;
  for (std::size_t k = first_positive + 1; k < ts.size(); ++k) {
    if (devs[k] > devs[k - 1]) approach = false;
  }
  r.summary = {{"means", means},
               {"final_mean", means.back()},
               {"final_abs_deviation", devs.back()},
               {"monotone_approach", approach}};
}

// ----------------------------------------------------------------- LD tail

void run_ld_tail(const json& c, unsigned threads, ExperimentResult& r) {
  const double q = num(c, "q");
  COARSENING_REQUIRE(q > 0.5 && q <= 1.0, "ld-tail: need 1/2 < q <= 1");
  const std::vector<double> eps_grid = grid(c, "eps_grid");
  std::vector<double> ts = grid(c, "t_grid");
  std::sort(ts.begin(), ts.end());
  const std::uint64_t replicas = replicas_of(c);
  const std::uint64_t seed = seed_of(c);
  const RateParams params = RateParams::from_q(q);
  const double gamma = params.gamma;

  r.columns = {"eps", "t", "m", "particles", "replicas", "censored", "successes", "estimate", "lower", "upper"};
  json fits = json::array();
  std::uint64_t cell = 0;
  for (double eps : eps_grid) {
    COARSENING_REQUIRE(eps > 0.0 && eps < 1.0, "ld-tail: eps must lie in (0,1)");
    std::vector<std::pair<double, double>> points;
    std::vector<double> estimates;
    for (double t : ts) {
      const int m = static_cast<int>(std::floor(t * (1.0 - eps) / 4.0));
      COARSENING_REQUIRE(m >= 1, "ld-tail: m = floor(t(1-eps)/4) must be >= 1");
      const double horizon = t / gamma;
      const std::size_t M = truncation_rule(static_cast<std::size_t>(m), horizon);
      const BinomialEstimate e = asep_cell(static_cast<std::size_t>(m), horizon, q, M, replicas,
                                           derive_seed(seed, cell++), threads,
                                           [](std::int64_t x) { return x < 0; });
      Row row = {fmt(eps), fmt(t), fmt(m), fmt(static_cast<std::uint64_t>(M)), fmt(replicas),
                 e.successes == 0 ? "1" : "0"};
      add_estimate(row, e);
      r.rows.push_back(row);
      points.emplace_back(t, e.estimate);
      estimates.push_back(e.estimate);
    }
    std::size_t censored = 0;
    json fit = {{"eps", eps}, {"phi_plus", phi_plus(eps, params)}};
    bool decreasing = true;
    for (std::size_t k = 1; k < estimates.size(); ++k) {
      if (estimates[k] > estimates[k - 1]) decreasing = false;
    }
    fit["decreasing_in_t"] = decreasing;
    std::vector<std::pair<double, double>> kept;
    for (const auto& p : points) {
      if (p.second > 0.0) kept.push_back(p);
    }
    censored = points.size() - kept.size();
    COARSENING_REQUIRE(!kept.empty(), "ld-tail: every cell is empty after censoring");
    fit["censored_cells"] = censored;
    if (kept.size() >= 3) {
      const SlopeFit s = fit_log_slope(kept);
      fit["slope"] = s.slope;
      fit["intercept"] = s.intercept;
      fit["residual"] = s.residual;
      fit["slope_over_minus_phi"] = s.slope / -phi_plus(eps, params);
    } else {
      fit["slope"] = nullptr;
    }
    fits.push_back(fit);
  }
  r.summary = {{"fits", fits}};
}

// --------------------------------------------------------- erosion scaling

void run_erosion_scaling(const json& c, unsigned threads, ExperimentResult& r) {
  const double q = num(c, "q");
  const int d = integer(c, "d");
  COARSENING_REQUIRE(q >= 0.5 && q <= 1.0, "erosion-scaling: need q >= 1/2");
  COARSENING_REQUIRE(d >= 1, "erosion-scaling: d must be >= 1");
  const std::vector<double> Ls = grid(c, "L_grid");
  const std::uint64_t replicas = replicas_of(c);
  const double factor = num(c, "t_max_per_L2");
  COARSENING_REQUIRE(factor > 0.0, "erosion-scaling: t_max_per_L2 must be positive");

  r.columns = {"L", "t_max", "replicas", "censored", "median", "p95", "mean", "median_ratio"};
  std::vector<double> medians;
  json ratios = json::array();
  std::uint64_t cell = 0;
  for (double Ld : Ls) {
    COARSENING_REQUIRE(Ld >= 1.0 && Ld == std::floor(Ld), "erosion-scaling: L must be a positive integer");
    const int L = static_cast<int>(Ld);
    const double t_max = factor * std::max(1.0, Ld * Ld);
    const auto res = replicate<ErosionResult>(replicas, derive_seed(seed_of(c), cell++), threads,
                                              [&](std::size_t, std::uint64_t s) {
                                                return erosion_time(L, q, d, s, t_max);
                                              });
    std::vector<double> times;
    std::uint64_t censored = 0;
    for (const auto& e : res) {
      times.push_back(e.time);
      if (e.censored) ++censored;
    }
    if (censored == replicas) throw InputError("erosion-scaling: every replica timed out at L=" + fmt(L));
    const double med = quantile(times, 0.5);
    const double p95 = quantile(times, 0.95);
    const double mean = summarize(times).mean;
    std::string ratio = "";
    if (!medians.empty()) {
      const double rr = med / medians.back();
      ratio = fmt(rr);
      ratios.push_back(rr);
    }
    medians.push_back(med);
    r.rows.push_back({fmt(L), fmt(t_max), fmt(replicas), fmt(censored), fmt(med), fmt(p95), fmt(mean), ratio});
  }
  r.summary = {{"medians", medians}, {"doubling_ratios", ratios}};
  if (Ls.size() >= 2) {
    std::vector<double> x, y;
    for (std::size_t k = 0; k < Ls.size(); ++k) {
      x.push_back(std::log(Ls[k]));
      y.push_back(std::log(medians[k]));
    }
    const SlopeFit f = fit_linear(x, y);
    r.summary["log_log_slope"] = f.slope;
    r.summary["fitted_doubling_ratio"] = std::exp2(f.slope);
  }
}

// ------------------------------------------------------- q = 1 box fixation

void run_q1_box_fixation(const json& c, unsigned threads, ExperimentResult& r) {
  const double q = num(c, "q");
  const double p = num(c, "p");
  const int d = integer(c, "d");
  COARSENING_REQUIRE(q == 1.0, "q1-box-fixation: q must be 1");
  COARSENING_REQUIRE(p > 0.0 && p <= 1.0, "q1-box-fixation: p must lie in (0,1]");
  COARSENING_REQUIRE(d >= 1, "q1-box-fixation: d must be >= 1");
  const std::vector<double> ns = grid(c, "n_grid");
  const double per_n = num(c, "horizon_per_n");
  COARSENING_REQUIRE(per_n > 0.0, "q1-box-fixation: horizon_per_n must be positive");
  const std::uint64_t replicas = replicas_of(c);

  r.columns = {"n", "horizon", "replicas", "censored", "successes", "estimate", "lower", "upper", "complement"};
  std::vector<BinomialEstimate> cells;
  std::vector<std::pair<double, double>> complement;
  std::uint64_t cell = 0;
  for (double nd : ns) {
    COARSENING_REQUIRE(nd >= 1.0 && nd == std::floor(nd), "q1-box-fixation: n must be a positive integer");
    const int n = static_cast<int>(nd);
    const double horizon = per_n * nd;
    const BoxShape shape = BoxShape::cube(d, n);
    const auto fixed = replicate<std::uint8_t>(replicas, derive_seed(seed_of(c), cell++), threads,
                                               [&](std::size_t, std::uint64_t s) {
      SpinConfig start = sample_product_config(shape, p, BoundaryKind::AllMinus, s);
      std::size_t plus = start.count_plus();
      const std::size_t N = start.size();
      if (plus == N) return std::uint8_t{1};
      GlauberSim sim(std::move(start), q, mix64(s));
      const bool ran_out = sim.evolve_until(horizon, [&](const GlauberEvent& ev) {
        if (ev.new_spin != ev.old_spin) {
          if (ev.new_spin > 0) {
            ++plus;
          } else {
            --plus;
          }
        }
        return plus < N;
      });
      return static_cast<std::uint8_t>(ran_out ? 0 : 1);
    });
    const BinomialEstimate e = wilson_interval(sum_flags(fixed), replicas);
    cells.push_back(e);
    complement.emplace_back(nd, 1.0 - e.estimate);
    Row row = {fmt(n), fmt(horizon), fmt(replicas), "0"};
    add_estimate(row, e);
    row.push_back(fmt(1.0 - e.estimate));
    r.rows.push_back(row);
  }
  r.summary = {{"nondecreasing_within_ci", monotone_within_ci(cells)}};
  std::size_t censored = 0;
  std::vector<std::pair<double, double>> kept;
  for (const auto& pt : complement) {
    if (pt.second > 0.0) kept.push_back(pt);
  }
  censored = complement.size() - kept.size();
  r.summary["complement_zero_cells"] = censored;
  if (kept.size() >= 3) {
    const SlopeFit f = fit_log_slope(kept);
    r.summary["complement_log_slope"] = f.slope;
  } else {
    r.summary["complement_log_slope"] = nullptr;
  }
}

// ---------------------------------------------------------- fixation probe

void run_fixation_probe(const json& c, unsigned threads, ExperimentResult& r) {
  const double q = num(c, "q");
  const double p = num(c, "p");
  const int d = integer(c, "d");
  const int L = integer(c, "L");
  COARSENING_REQUIRE(d == 2, "fixation-probe: d must be 2");
  COARSENING_REQUIRE(q >= 0.0 && q <= 1.0, "fixation-probe: q must lie in [0,1]");
  COARSENING_REQUIRE(p >= 0.0 && p <= 1.0, "fixation-probe: p must lie in [0,1]");
  COARSENING_REQUIRE(L >= 1, "fixation-probe: L must be >= 1");
  std::vector<double> ts = grid(c, "t_grid");
  std::sort(ts.begin(), ts.end());
  const double horizon = num(c, "horizon");
  COARSENING_REQUIRE(ts.front() >= 0.0 && horizon >= ts.back(), "fixation-probe: need 0 <= t <= horizon");
  const BoundaryKind boundary = parse_boundary(c.at("boundary").get<std::string>());
  const std::uint64_t replicas = replicas_of(c);
  const BoxShape shape = BoxShape::cube(2, L);
  const std::size_t origin = shape.index({L / 2, L / 2});

  // Per replica: sup of the times in [0, horizon] at which the origin is -1,
  // or -1 when it never is.
  const auto last = replicate<double>(replicas, seed_of(c), threads, [&](std::size_t, std::uint64_t s) {
    SpinConfig start = sample_product_config(shape, p, boundary, s);
    double last_minus = start.spin(origin) < 0 ? 0.0 : -1.0;
    GlauberSim sim(std::move(start), q, mix64(s));
    sim.evolve_until(horizon, [&](const GlauberEvent& ev) {
      if (ev.site == origin && (ev.old_spin < 0 || ev.new_spin < 0)) last_minus = ev.time;
      return true;
    });
    if (sim.config().spin(origin) < 0) last_minus = horizon;
    return last_minus;
  });

  r.columns = {"t", "horizon", "replicas", "censored", "successes", "estimate", "lower", "upper"};
  std::vector<double> est;
  std::vector<double> x, y;
  for (double t : ts) {
    std::uint64_t hits = 0;
    for (double v : last) {
      if (v >= t) ++hits;
    }
    const BinomialEstimate e = wilson_interval(hits, replicas);
    est.push_back(e.estimate);
    Row row = {fmt(t), fmt(horizon), fmt(replicas), "0"};
    add_estimate(row, e);
    r.rows.push_back(row);
    if (t > 1.0 && e.estimate > 0.0) {
      const double lt = std::log(t);
      x.push_back(t / (lt * lt));
      y.push_back(std::log(e.estimate));
    }
  }
  bool strictly = true;
  for (std::size_t k = 1; k < est.size(); ++k) {
    if (!(est[k] < est[k - 1])) strictly = false;
  }
  r.summary = {{"strictly_decreasing", strictly}, {"estimates", est}};
  if (x.size() >= 2) {
    r.summary["slope_vs_t_over_log2_t"] = fit_linear(x, y).slope;
  } else {
    r.summary["slope_vs_t_over_log2_t"] = nullptr;
  }
}

// ------------------------------------------------------------ MBP spanning

void run_mbp_spanning(const json& c, unsigned threads, ExperimentResult& r) {
  const double theta = num(c, "theta");
  const int d = integer(c, "d");
  COARSENING_REQUIRE(theta >= 0.0 && theta <= 1.0, "mbp-spanning: theta must lie in [0,1]");
  COARSENING_REQUIRE(d >= 1, "mbp-spanning: d must be >= 1");
  const std::vector<double> ns = grid(c, "n_grid");
  const std::uint64_t replicas = replicas_of(c);
  r.columns = {"n", "theta", "replicas", "censored", "successes", "estimate", "lower", "upper"};
  std::vector<BinomialEstimate> cells;
  std::uint64_t cell = 0;
  for (double nd : ns) {
    COARSENING_REQUIRE(nd >= 1.0 && nd == std::floor(nd), "mbp-spanning: n must be a positive integer");
    const BoxShape shape = BoxShape::cube(d, static_cast<int>(nd));
    const auto hit = replicate<std::uint8_t>(replicas, derive_seed(seed_of(c), cell++), threads,
                                             [&](std::size_t, std::uint64_t s) {
                                               return static_cast<std::uint8_t>(
                                                   mbp_closure(sample_mbp(shape, theta, s)).full() ? 1 : 0);
                                             });
    const BinomialEstimate e = wilson_interval(sum_flags(hit), replicas);
    cells.push_back(e);
    Row row = {fmt(static_cast<int>(nd)), fmt(theta), fmt(replicas), "0"};
    add_estimate(row, e);
    r.rows.push_back(row);
  }
  r.summary = {{"nondecreasing_within_ci", monotone_within_ci(cells)}};
}

// -------------------------------------------------------------------- rate

void run_rate(const json& c, unsigned, ExperimentResult& r) {
  const RateParams params = RateParams::from_q(num(c, "q"));
  const auto rows = rate_table(params, grid(c, "eps_grid"));
  r.columns = {"eps", "phi_hat", "phi_plus", "zeta1", "zeta2", "s2_zeta1", "s2_zeta2"};
  for (const auto& row : rows) {
    r.rows.push_back({fmt(row.eps), fmt(row.phi_hat), fmt(row.phi_plus), fmt(row.zeta1), fmt(row.zeta2),
                      fmt(row.s2_zeta1), fmt(row.s2_zeta2)});
  }
  r.summary = {{"tau", params.tau}, {"gamma", params.gamma}, {"eps_circ", params.eps_circ}};
}

// ---------------------------------------------------------------- Fredholm

QuadratureSpec quad_from(const json& c, const RateParams& params) {
  QuadratureSpec quad = QuadratureSpec::defaults(params);
  quad.N_zeta = integer(c, "N_zeta");
  quad.N_eta = integer(c, "N_eta");
  quad.N_mu = integer(c, "N_mu");
  quad.n_max = integer(c, "n_max");
  return quad;
}

void run_fredholm(const json& c, unsigned threads, ExperimentResult& r) {
  const RateParams params = RateParams::from_q(num(c, "q"));
  const int m = integer(c, "m");
  const double t = num(c, "t");
  COARSENING_REQUIRE(m >= 1, "fredholm: m must be >= 1");
  COARSENING_REQUIRE(t > 0.0 && std::isfinite(t), "fredholm: t must be positive");
  const QuadratureSpec base = quad_from(c, params);
  QuadratureSpec fine = base;
  fine.N_zeta *= 2;
  fine.N_eta *= 2;
  fine.N_mu *= 2;

  r.columns = {"level", "N_zeta", "N_eta", "N_mu", "n_max", "probability", "raw_re", "raw_im",
               "full_determinant", "tail_estimate", "hadamard_bound"};
  auto add = [&](const char* level, const QuadratureSpec& quad) {
    const ProbabilityValue v = prob_xm_positive(m, t, params, quad);
    r.rows.push_back({level, fmt(quad.N_zeta), fmt(quad.N_eta), fmt(quad.N_mu), fmt(quad.n_max),
                      fmt(v.probability), fmt(v.raw.real()), fmt(v.raw.imag()), fmt(v.raw_full.real()),
                      fmt(v.tail_estimate), fmt(v.hadamard_bound)});
    return v;
  };
  const ProbabilityValue a = add("base", base);
  r.summary = {{"probability", a.probability},
               {"full_determinant", a.raw_full.real()},
               {"imag_residue", a.imag_residue},
               {"tail_estimate", a.tail_estimate}};
  if (c.at("refine").get<bool>()) {
    const ProbabilityValue b = add("refined", fine);
    r.summary["self_convergence"] = std::abs(a.probability - b.probability);
  }
  const std::uint64_t mc = count(c, "mc_replicas");
  if (mc > 0) {
    const double horizon = t / params.gamma;
    const std::size_t M = truncation_rule(static_cast<std::size_t>(m), horizon);
    const BinomialEstimate e = asep_cell(static_cast<std::size_t>(m), horizon, num(c, "q"), M, mc, seed_of(c), threads, [](std::int64_t x) { return x > 0; });
    r.summary["mc_estimate"] = e.estimate;
    r.summary["mc_std_error"] = e.standard_error();
    r.summary["mc_replicas"] = mc;
    r.summary["abs_difference"] = std::abs(a.probability - e.estimate);
  }
}

// ------------------------------------------------------------------ renorm

void run_renorm(const json& c, unsigned, ExperimentResult& r) {
  ScheduleParams p;
  p.d = integer(c, "d");
  p.alpha = num(c, "alpha");
  p.C = num(c, "C");
  p.gamma = num(c, "gamma");
  p.eps0 = num(c, "eps0");
  p.L0 = num(c, "L0");
  p.delta = num(c, "delta");
  p.k_max = integer(c, "k_max");
  if (!c.at("chi").is_null()) p.chi = num(c, "chi");
  if (!c.at("D").is_null()) p.D = num(c, "D");
  const auto rows = schedule(p);

  r.columns = {"k", "log_inv_eps", "eps", "underflow", "n", "l", "L", "t", "T", "exact", "P1", "P2",
               "P3", "margin", "master_holds", "rho", "time_constraint", "asymptotic", "precondition"};
  bool all_master = true;
  bool all_time = true;
  for (const auto& row : rows) {
    const MasterCheck& mc = row.master;
    all_master = all_master && mc.holds;
    all_time = all_time && mc.time_constraint;
    r.rows.push_back({fmt(row.k), row.log_inv_eps.describe(), fmt(row.eps), fmt(row.underflow),
                      row.n.describe(), row.l.describe(), row.L.describe(), row.t.describe(),
                      row.T.describe(), fmt(row.exact), fmt(mc.P[0]), fmt(mc.P[1]), fmt(mc.P[2]),
                      fmt(mc.margin), fmt(mc.holds), fmt(mc.rho), fmt(mc.time_constraint),
                      fmt(mc.asymptotic), mc.precondition_error});
  }
  r.summary = {{"master_holds_all_levels", all_master}, {"time_constraint_all_levels", all_time}};
  if (p.alpha == 1.0) {
    const Alpha1Constants k = constants_alpha1(p.d, p.C, p.gamma);
    const double D = p.D.value_or(k.D);
    const double chi = p.chi.value_or(k.chi);
    r.summary["D"] = D;
    r.summary["chi"] = chi;
    const ConditionReport rep = check_conditions(num(c, "eps_prime"), p.d, D, chi, p.gamma, p.C, &rows);
    json conds = json::array();
    for (const auto& cond : rep.conditions) {
      conds.push_back({{"name", cond.name}, {"holds", cond.holds}, {"lhs", cond.lhs}, {"rhs", cond.rhs},
                       {"note", cond.note}});
    }
    r.summary["conditions"] = conds;
  }
}

// -------------------------------------------------------------- registry

struct Entry {
  Runner run;
  json defaults;
};

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> reg = [] {
    std::map<std::string, Entry> m;
    m["coupling"] = {run_coupling,
                     {{"d", 2}, {"q", 0.7}, {"t", 4.0}, {"m", 2}, {"l", 1}, {"box", 0},
                      {"replicas", 100000}, {"seed", 20240501}, {"threads", 0},
                      {"_notes", {{"box", "0 selects ceil(2t)+12; " + std::string(kPilot)},
                                  {"replicas", kDesk}}}}};
    m["current-lln"] = {run_current_lln,
                        {{"q", 0.75}, {"t_grid", {50.0, 100.0, 200.0, 400.0}}, {"replicas", 1000},
                         {"seed", 20240502}, {"threads", 0},
                         {"_notes", {{"replicas", kDesk}}}}};
    m["ld-tail"] = {run_ld_tail,
                    {{"q", 0.95}, {"eps_grid", {0.3}}, {"t_grid", {20.0, 40.0, 60.0}},
                     {"replicas", 100000}, {"seed", 20240503}, {"threads", 0},
                     {"_notes", {{"replicas", kDesk}}}}};
    m["erosion-scaling"] = {run_erosion_scaling,
                            {{"q", 0.75}, {"d", 2}, {"L_grid", {8.0, 16.0, 32.0, 64.0}},
                             {"replicas", 200}, {"t_max_per_L2", 5.0}, {"seed", 20240504},
                             {"threads", 0},
                             {"_notes", {{"t_max_per_L2", kPilot}, {"replicas", kDesk}}}}};
    m["q1-box-fixation"] = {run_q1_box_fixation,
                            {{"q", 1.0}, {"p", 0.4}, {"d", 2}, {"n_grid", {8.0, 16.0, 32.0}},
                             {"horizon_per_n", 10.0}, {"replicas", 1000}, {"seed", 20240505},
                             {"threads", 0},
                             {"_notes", {{"replicas", kDesk}}}}};
    m["fixation-probe"] = {run_fixation_probe,
                           {{"d", 2}, {"p", 0.1}, {"q", 0.99}, {"L", 128},
                            {"t_grid", {5.0, 10.0, 20.0, 40.0}}, {"horizon", 80.0},
                            {"boundary", "AllPlus"}, {"replicas", 2000}, {"seed", 20240506},
                            {"threads", 0},
                            {"_notes", {{"horizon", kPilot}, {"boundary", kPilot}, {"replicas", kDesk}}}}};
    m["mbp-spanning"] = {run_mbp_spanning,
                         {{"theta", 0.6}, {"d", 2}, {"n_grid", {4.0, 8.0, 16.0, 32.0}},
                          {"replicas", 2000}, {"seed", 20240507}, {"threads", 0},
                          {"_notes", {{"replicas", kDesk}}}}};
    m["rate"] = {run_rate,
                 {{"q", 0.75},
                  {"eps_grid", {0.001, 0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 0.9}},
                  {"seed", 0}, {"threads", 0}}};
    m["fredholm"] = {run_fredholm,
                     {{"q", 0.75}, {"m", 3}, {"t", 6.0}, {"N_zeta", 128}, {"N_eta", 64}, {"N_mu", 64},
                      {"n_max", 3}, {"refine", true}, {"mc_replicas", 0}, {"seed", 20240508},
                      {"threads", 0},
                      {"_notes", {{"N_zeta", kPilot}, {"N_eta", kPilot}, {"N_mu", kPilot}}}}};
    m["renorm"] = {run_renorm,
                   {{"d", 2}, {"alpha", 1.0}, {"C", 1.0}, {"gamma", 1.0}, {"eps0", 1e-3}, {"L0", 4.0},
                    {"delta", 0.125}, {"k_max", 5}, {"chi", nullptr}, {"D", nullptr},
                    {"eps_prime", 1e-4}, {"seed", 0}, {"threads", 0}}};
    return m;
  }();
  return reg;
}

const Entry& entry(const std::string& name) {
  const auto& reg = registry();
  const auto it = reg.find(name);
  if (it == reg.end()) throw InputError("unknown experiment '" + name + "'");
  return it->second;
}

bool compatible(const json& def, const json& val) {
  if (def.is_null()) return val.is_null() || val.is_number();
  if (def.is_number()) return val.is_number();
  if (def.is_boolean()) return val.is_boolean();
  if (def.is_string()) return val.is_string();
  if (def.is_array()) {
    if (!val.is_array()) return false;
    return std::all_of(val.begin(), val.end(), [](const json& v) { return v.is_number(); });
  }
  return false;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string ExperimentResult::csv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) out += ',';
      out += csv_field(fields[i]);
    }
    out += "\r\n";
  };
  line(columns);
  for (const auto& row : rows) line(row);
  return out;
}

json ExperimentResult::sidecar() const {
  const std::string spec_text = spec.dump();
  return {{"experiment", experiment},
          {"spec", spec},
          {"master_seed", spec.at("seed")},
          {"seed_rule", kSeedDerivationRule},
          {"input_sha1", git_blob_sha1(spec_text)},
          {"columns", columns},
          {"summary", summary},
          {"wall_clock_seconds", wall_clock_seconds}};
}

std::string git_blob_sha1(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("git_blob_sha1: EVP_MD_CTX_new failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("git_blob_sha1: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

json default_config(const std::string& experiment) { return entry(experiment).defaults; }

json resolve_config(const std::string& experiment, const json& user, const RunOptions& options) {
  const json& defaults = entry(experiment).defaults;
  json out;
  for (const auto& [k, v] : defaults.items()) {
    if (k.empty() || k[0] != '_') out[k] = v;
  }
  if (!user.is_null()) {
    COARSENING_REQUIRE(user.is_object(), "configuration must be a JSON object");
    for (const auto& [k, v] : user.items()) {
      if (!k.empty() && k[0] == '_') continue;
      if (k == "experiment") {
        COARSENING_REQUIRE(v == experiment, "configuration names experiment " + v.dump());
        continue;
      }
      COARSENING_REQUIRE(out.contains(k), "unknown configuration key '" + k + "' for " + experiment);
      COARSENING_REQUIRE(compatible(defaults.at(k), v), "configuration key '" + k + "' has the wrong type");
      out[k] = v;
    }
  }
  if (options.seed) out["seed"] = *options.seed;
  if (options.replicas) {
    COARSENING_REQUIRE(out.contains("replicas"), experiment + " takes no replica count");
    out["replicas"] = *options.replicas;
  }
  if (options.threads) out["threads"] = *options.threads;
  const json& seed = out.at("seed");
  COARSENING_REQUIRE(seed.is_number_unsigned() || (seed.is_number_integer() && seed.get<std::int64_t>() >= 0),
                     "seed must be a nonnegative integer");
  COARSENING_REQUIRE(out.at("threads").is_number_integer() && out.at("threads").get<std::int64_t>() >= 0,
                     "threads must be a nonnegative integer");
  return out;
}

ExperimentResult run_experiment(const std::string& experiment, const json& user_config,
                                const RunOptions& options) {
  const Entry& e = entry(experiment);
  ExperimentResult r;
  r.experiment = experiment;
  r.spec = resolve_config(experiment, user_config, options);
  const auto start = std::chrono::steady_clock::now();
  e.run(r.spec, r.spec.at("threads").get<unsigned>(), r);
  r.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

void write_result(const ExperimentResult& result, const std::string& csv_path) {
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw InputError("cannot open '" + csv_path + "' for writing");
  csv << result.csv();
  std::ofstream side(csv_path + ".json", std::ios::binary);
  if (!side) throw InputError("cannot open '" + csv_path + ".json' for writing");
  side << result.sidecar().dump(2) << '\n';
}

}  // namespace coarsening
