#include "renorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "errors.hpp"

namespace coarsening {

namespace {

constexpr double kE = std::numbers::e;
constexpr double kInf = std::numeric_limits<double>::infinity();

double two_e_root(int d) { return std::pow(2.0 * kE, 1.0 / (d - 1)); }

double logsumexp(const double* x, int n) {
  const double hi = *std::max_element(x, x + n);
  if (hi == -kInf) return -kInf;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::exp(x[i] - hi);
  return hi + std::log(s);
}

// log of sum_{r >= R0} (2 d e t / r)^r, truncated once a term drops below
// 1e-300 of the partial sum. Terms are tracked relative to the first one
// so the stopping test keeps working when r is beyond 2^53.
double log_path_sum(double R0, double t, int d) {
  const double c = 2.0 * d * kE * t;
  const double R = std::max(R0, 1.0);
  const double lead = R * std::log(c / R);
  double rel = 0.0;  // log(term_k / term_0)
  double partial = 1.0;
  for (long k = 0;; ++k) {
    const double r = R + static_cast<double>(k);
    rel += std::log(c / (r + 1.0)) - r * std::log1p(1.0 / r);
    const double term = std::exp(rel);
    partial += term;
    if (rel < std::log(partial) - 690.8) break;
    if (k > 100000000L) throw WorkloadError("master_bound: path sum did not converge");
  }
  return lead + std::log(partial);
}

struct LogTerms {
  double v[3];
};

LogTerms master_logs(double log_eps_tilde, double n, double l_next, double L, double L_next,
                     double t_next, int d, double gamma) {
  LogTerms out{};
  const double floor_n3 = std::floor(n / 3.0);
  const double log_base = std::log(2.0) + (d - 1) * std::log(n) + log_eps_tilde;
  out.v[0] = d * std::log(5.0 * n * l_next / 3.0) + (floor_n3 == 0.0 ? 0.0 : floor_n3 * log_base);
  out.v[1] = d * std::log(5.0 * l_next / 3.0) - gamma * n * L;
  out.v[2] = std::log(4.0 * d * L_next) + log_path_sum(std::floor(L_next / 4.0), t_next, d);
  return out;
}

void check_master_preconditions(const MasterInputs& in) {
  COARSENING_REQUIRE(in.d >= 2, "master_bound: d must be >= 2");
  COARSENING_REQUIRE(in.gamma > 0.0 && in.C > 0.0 && in.alpha >= 1.0,
                     "master_bound: gamma, C must be positive and alpha >= 1");
  COARSENING_REQUIRE(in.eps_tilde >= 0.0 && in.eps_tilde <= 1.0,
                     "master_bound: eps_tilde must lie in [0,1]");
  COARSENING_REQUIRE(in.L > 0.0 && in.L_next > 0.0 && in.l_next > 0.0,
                     "master_bound: block sizes must be positive");
  if (!(in.n >= 1.0 && in.n <= std::floor(5.0 * in.l_next / 3.0))) {
    throw InputError("master_bound: n_k condition violated (need 1 <= n_k <= floor(5 l_{k+1} / 3))");
  }
  if (!(in.t_next >= in.C * std::pow(in.n * in.L, in.alpha))) {
    throw InputError("master_bound: t_k condition violated (need t_{k+1} >= C (n_k L_k)^alpha)");
  }
}

}  // namespace

Alpha1Constants constants_alpha1(int d, double C, double gamma) {
  COARSENING_REQUIRE(d >= 2, "constants_alpha1: d must be >= 2");
  COARSENING_REQUIRE(C > 0.0 && gamma > 0.0, "constants_alpha1: C and gamma must be positive");
  const double c = two_e_root(d);
  Alpha1Constants k;
  k.D = 6.0 / (5.0 * c) + 32.0 * d * C;
  k.chi_terms[0] = 1.0 / (24.0 * c);
  k.chi_terms[1] = gamma / (4.0 * c);
  k.chi_terms[2] = k.D * std::log(2.0) / 64.0;
  k.chi = std::min({k.chi_terms[0], k.chi_terms[1], k.chi_terms[2]});
  return k;
}

double ScheduleParams::max_L0() const {
  if (alpha <= 1.0) return kInf;
  const double K = std::pow(2.0 * kE, alpha / ((alpha - 1.0) * (d - 1))) /
                   std::pow(32.0 * d * kE, 1.0 / (alpha - 1.0));
  return K * std::pow(eps0, -2.0 * delta / ((d - 1) * (alpha - 1.0)));
}

void ScheduleParams::validate() const {
  COARSENING_REQUIRE(d >= 2, "schedule: d must be >= 2");
  COARSENING_REQUIRE(alpha >= 1.0, "schedule: alpha must be >= 1");
  COARSENING_REQUIRE(C > 0.0 && gamma > 0.0, "schedule: C and gamma must be positive");
  COARSENING_REQUIRE(eps0 > 0.0 && eps0 < 1.0, "schedule: eps0 must lie in (0,1)");
  COARSENING_REQUIRE(L0 >= 1.0, "schedule: L0 must be >= 1");
  COARSENING_REQUIRE(k_max >= 0, "schedule: k_max must be >= 0");
  if (alpha == 1.0) {
    COARSENING_REQUIRE(L0 >= 4.0, "schedule: alpha = 1 requires L0 >= 4");
  } else {
    COARSENING_REQUIRE(chi.has_value() && *chi > 0.0,
                       "schedule: alpha > 1 requires an explicit positive chi");
    COARSENING_REQUIRE(delta > 0.0, "schedule: delta must be positive");
    COARSENING_REQUIRE(L0 <= max_L0(), "schedule: L0 exceeds K eps0^{-2 delta/((d-1)(alpha-1))}");
    COARSENING_REQUIRE(!D.has_value(), "schedule: D applies only to alpha = 1");
  }
  if (chi) COARSENING_REQUIRE(*chi > 0.0, "schedule: chi must be positive");
  if (D) COARSENING_REQUIRE(*D > 0.0, "schedule: D must be positive");
}

namespace {

MasterCheck check_step(const ScheduleParams& p, double D, double chi, const ScheduleRow& cur,
                       const ScheduleRow& next) {
  MasterCheck mc;
  const int d = p.d;
  const double c_n = 1.0 / two_e_root(d);
  const Tower& u = cur.u;
  const Tower& n = cur.n;
  const Tower& l = next.l;
  const Tower& L = cur.L;
  const Tower& Ln = next.L;
  const Tower& t = next.t;

  if (n < Tower(1.0)) {
    mc.precondition_error = "n_k condition violated (n_k < 1)";
    return mc;
  }
  if (n > floor(scale(l, 5.0 / 3.0))) {
    mc.precondition_error = "n_k condition violated (n_k > floor(5 l_{k+1} / 3))";
    return mc;
  }

  const Tower R0 = floor(scale(Ln, 0.25));
  const bool all_double = u.is_double() && n.is_double() && l.is_double() && L.is_double() &&
                          Ln.is_double() && t.is_double() && R0.is_double();
  const double p_exp = p.alpha + 2.0 * p.delta;

  if (all_double) {
    const double uv = u.top();
    const double log_eps = -cur.log_inv_eps.to_double();
    const LogTerms lt = master_logs(log_eps, n.top(), l.top(), L.top(), Ln.top(), t.top(), d, p.gamma);
    for (int i = 0; i < 3; ++i) mc.P[i] = -lt.v[i] / uv;
    mc.P_min = std::min({mc.P[0], mc.P[1], mc.P[2]});
    mc.log_master = logsumexp(lt.v, 3);
    mc.spread = mc.P_min * uv + mc.log_master;
    const double lambda_next = next.log_inv_eps.to_double();
    mc.margin = (-mc.log_master - lambda_next) / uv;
    mc.holds = mc.log_master <= -lambda_next;
    mc.rho = R0.top() / (2.0 * d * kE * t.top());
    mc.time_constraint = R0.top() >= 4.0 * d * kE * t.top();
    return mc;
  }

  // Leading-order ratios once floors no longer register in double precision.
  const bool u_small = exact_integer_range(u) && exact_integer_range(n);
  const double a = u_small ? n.top() / u.top() : c_n;
  const double a3 = u_small ? std::floor(n.top() / 3.0) / u.top() : c_n / 3.0;
  double b;  // l_{k+1} / u^{p}, with p = 1 when alpha = 1
  if (p.alpha == 1.0) {
    b = u.is_double() && l.is_double() ? l.top() / u.top() : D;
  } else {
    const Tower up = pow(u, p_exp);
    b = up.is_double() && l.is_double() ? l.top() / up.top() : 1.0;
  }
  mc.asymptotic = true;

  const double inv_u = ratio(Tower(1.0), u);
  auto over_u = [&](const Tower& x) { return x == Tower(0.0) ? 0.0 : ratio(x, u); };
  const double log53 = std::log(5.0 / 3.0);

  const double c1 = -std::log(2.0) - (d - 1) * std::log(a);
  mc.P[0] = a3 * c1 - d * (log53 * inv_u + over_u(log(n)) + over_u(log(l)));
  mc.P[1] = scale(L, p.gamma * a).to_double() - d * (log53 * inv_u + over_u(log(l)));

  double log_rho;
  if (p.alpha == 1.0) {
    log_rho = std::log(b / (8.0 * d * kE * p.C * a));
  } else {
    const Tower X = pow(u, 2.0 * p.delta);
    const Tower Y = pow(L, p.alpha - 1.0);
    log_rho = std::log(b) - std::log(8.0 * d * kE * p.C) - p.alpha * std::log(a) +
              std::log(ratio(X, Y));
  }
  mc.rho = std::exp(log_rho);
  mc.time_constraint = log_rho >= std::log(2.0);
  if (log_rho <= 0.0) {
    mc.P[2] = -kInf;
  } else {
    const double log_F = -std::log1p(-std::exp(-log_rho));  // bound on the series tail factor
    const double lead = over_u(R0);
    mc.P[2] = (std::isinf(lead) ? kInf : lead * log_rho) -
              (std::log(4.0 * d) + log_F) * inv_u - over_u(log(Ln));
  }

  mc.P_min = std::min({mc.P[0], mc.P[1], mc.P[2]});
  double s = 0.0;
  for (double Pi : mc.P) {
    const double gap = Pi - mc.P_min;
    s += gap == 0.0 ? 1.0 : std::exp(-scale(u, gap).to_double());
  }
  mc.spread = std::log(s);
  mc.margin = mc.P_min - mc.spread * inv_u - chi;
  mc.holds = mc.margin >= 0.0;
  mc.log_master = u.is_double() ? -(mc.P_min * u.top() - mc.spread) : -kInf;
  return mc;
}

}  // namespace

std::vector<ScheduleRow> schedule(const ScheduleParams& params) {
  params.validate();
  const int d = params.d;
  double D = 0.0;
  double chi = 0.0;
  if (params.alpha == 1.0) {
    const Alpha1Constants k = constants_alpha1(d, params.C, params.gamma);
    D = params.D.value_or(k.D);
    chi = params.chi.value_or(k.chi);
  } else {
    chi = *params.chi;
  }
  const double c_n = 1.0 / two_e_root(d);
  const double inv_dm1 = 1.0 / (d - 1);

  auto fill_eps = [](ScheduleRow& row) {
    const double lam = row.log_inv_eps.to_double();
    row.eps = std::isfinite(lam) ? std::exp(-lam) : 0.0;
    row.underflow = row.eps < std::numeric_limits<double>::min();
  };

  std::vector<ScheduleRow> rows;
  rows.reserve(static_cast<std::size_t>(params.k_max) + 2);
  ScheduleRow r0;
  r0.k = 0;
  r0.log_inv_eps = Tower(-std::log(params.eps0));
  r0.u = Tower(std::pow(params.eps0, -inv_dm1));
  r0.n = floor(scale(r0.u, c_n));
  r0.l = Tower(0.0);
  r0.L = Tower(params.L0);
  r0.t = Tower(0.0);
  r0.T = Tower(0.0);
  r0.exact = exact_integer_range(r0.n);
  fill_eps(r0);
  rows.push_back(r0);

  for (int k = 0; k <= params.k_max; ++k) {
    const ScheduleRow& cur = rows.back();
    ScheduleRow nx;
    nx.k = k + 1;
    nx.log_inv_eps = scale(cur.u, chi);
    nx.u = exp(scale(nx.log_inv_eps, inv_dm1));
    nx.n = floor(scale(nx.u, c_n));
    if (params.alpha == 1.0) {
      nx.l = floor(scale(cur.u, D));
      nx.t = scale(mul(cur.n, cur.L), params.C);
    } else {
      nx.l = floor(pow(cur.u, params.alpha + 2.0 * params.delta));
      nx.t = scale(pow(mul(cur.n, cur.L), params.alpha), params.C);
    }
    nx.L = mul(cur.L, nx.l);
    nx.T = add(cur.T, nx.t);
    nx.exact = exact_integer_range(nx.n) && exact_integer_range(nx.l) &&
               exact_integer_range(nx.L) && exact_integer_range(nx.t);
    fill_eps(nx);
    rows.push_back(nx);
  }
  for (int k = 0; k <= params.k_max; ++k) {
    rows[static_cast<std::size_t>(k)].master =
        check_step(params, D, chi, rows[static_cast<std::size_t>(k)],
                   rows[static_cast<std::size_t>(k) + 1]);
  }
  rows.pop_back();
  return rows;
}

MasterBound master_bound(const MasterInputs& in) {
  check_master_preconditions(in);
  const double log_eps = in.eps_tilde == 0.0 ? -kInf : std::log(in.eps_tilde);
  const LogTerms lt =
      master_logs(log_eps, in.n, in.l_next, in.L, in.L_next, in.t_next, in.d, in.gamma);
  MasterBound mb;
  for (int i = 0; i < 3; ++i) mb.log_terms[i] = lt.v[i];
  mb.log_value = logsumexp(lt.v, 3);
  mb.value = std::exp(mb.log_value);
  return mb;
}

double master_bound_direct(const MasterInputs& in) {
  check_master_preconditions(in);
  const int d = in.d;
  const double term1 = std::pow(5.0 * in.n * in.l_next / 3.0, d) *
                       std::pow(2.0 * std::pow(in.n, d - 1) * in.eps_tilde, std::floor(in.n / 3.0));
  const double term2 = std::pow(5.0 * in.l_next / 3.0, d) * std::exp(-in.gamma * in.n * in.L);
  const double c = 2.0 * d * kE * in.t_next;
  double sum = 0.0;
  for (double r = std::max(std::floor(in.L_next / 4.0), 1.0);; r += 1.0) {
    const double term = std::pow(c / r, r);
    sum += term;
    if (term < 1e-300 * sum || sum == 0.0) break;
  }
  return term1 + term2 + 4.0 * d * in.L_next * sum;
}

bool ConditionReport::all_hold() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const Condition& c) { return c.holds; });
}

ConditionReport check_conditions(double eps_prime, int d, double D, double chi, double gamma,
                                 double C, const std::vector<ScheduleRow>* prefix) {
  COARSENING_REQUIRE(eps_prime > 0.0, "check_conditions: eps' must be positive");
  COARSENING_REQUIRE(d >= 2, "check_conditions: d must be >= 2");
  COARSENING_REQUIRE(D > 0.0 && chi > 0.0 && gamma > 0.0 && C > 0.0,
                     "check_conditions: D, chi, gamma, C must be positive");
  const double c = two_e_root(d);
  const double root = std::pow(eps_prime, 1.0 / (d - 1));
  const double log_eps = std::log(eps_prime);
  ConditionReport rep;
  auto push = [&](std::string name, double lhs, double rhs, std::string note = {}) {
    rep.conditions.push_back({std::move(name), lhs <= rhs, lhs, rhs, std::move(note)});
  };

  push("E1", eps_prime, 1.0 / (std::pow(3.0, d - 1) * 2.0 * kE));
  push("E2", eps_prime, std::pow(D, d - 1));
  {
    const double log_lhs = -(1.0 / (12.0 * c) - chi) / root + d * std::log(5.0 * D / (3.0 * c)) -
                           (2.0 * d / (d - 1)) * log_eps;
    push("E3", std::exp(log_lhs), 0.25, "log lhs = " + std::to_string(log_lhs));
  }
  {
    const double log_lhs = d * std::log(5.0 * D / 3.0) - (static_cast<double>(d) / (d - 1)) * log_eps -
                           (gamma / (2.0 * c) - chi) / root;
    push("E4", std::exp(log_lhs), 0.25, "log lhs = " + std::to_string(log_lhs));
  }
  {
    // sup_{x >= 1} x 2^{-x/16} is attained at x = 16 / log 2.
    const double C_hat = 8.0 * d * 16.0 / (kE * std::log(2.0));
    const double log_lhs = std::log(C_hat) - (D * std::log(2.0) / 32.0 - chi) / root;
    push("E5", std::exp(log_lhs), 0.5, "log lhs = " + std::to_string(log_lhs));
  }
  {
    const double log_lhs = -chi / root - 2.0 * log_eps;
    push("E6", std::exp(log_lhs), 1.0, "log lhs = " + std::to_string(log_lhs));
  }
  {
    const double iota = std::exp(chi / (d - 1));
    const double log_iota = chi / (d - 1);
    const double first = std::exp(-iota / (d - 1) * log_iota);
    const double second = std::exp(-(d - 1.0));  // iota^{-(d-1)/log iota}
    push("E7", eps_prime, std::min(first, second), "iota = exp(chi/(d-1))");
  }
  if (prefix != nullptr && !prefix->empty()) {
    bool ok = true;
    double worst_lhs = 0.0;
    double worst_rhs = 0.0;
    double worst_gap = kInf;
    for (std::size_t k = 1; k < prefix->size(); ++k) {
      const double lhs = C * static_cast<double>(k + 1) * std::pow(D, static_cast<double>(k)) / c;
      const Tower& u_prev = (*prefix)[k - 1].u;
      const bool holds = Tower(lhs) <= u_prev;
      const double gap = ratio(u_prev, Tower(lhs));
      if (!holds) ok = false;
      if (gap < worst_gap) {
        worst_gap = gap;
        worst_lhs = lhs;
        worst_rhs = u_prev.to_double();
      }
    }
    rep.conditions.push_back({"E8", ok, worst_lhs, worst_rhs, "tightest level along the prefix"});

    bool suff = true;
    const Tower lambda0 = (*prefix)[0].log_inv_eps;
    for (std::size_t k = 1; k < prefix->size(); ++k) {
      // eps_k <= eps_0^k  <=>  log(1/eps_k) >= k log(1/eps_0)
      if ((*prefix)[k].log_inv_eps < scale(lambda0, static_cast<double>(k))) suff = false;
    }
    rep.conditions.push_back({"E8-sufficient", suff, 0.0, 0.0, "eps_k <= eps_0^k along the prefix"});
  }
  return rep;
}

}  // namespace coarsening
