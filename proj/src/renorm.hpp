#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tower.hpp"

namespace coarsening {

struct Alpha1Constants {
  double D = 0.0;
  double chi = 0.0;
  double chi_terms[3] = {0.0, 0.0, 0.0};
};

/// D = 6 / (5 (2e)^{1/(d-1)}) + 32 d C,
/// chi = min{1 / (24 (2e)^{1/(d-1)}), gamma / (4 (2e)^{1/(d-1)}), D log 2 / 64}.
Alpha1Constants constants_alpha1(int d, double C, double gamma);

struct ScheduleParams {
  int d = 2;
  double alpha = 1.0;
  double C = 1.0;
  double gamma = 1.0;
  double eps0 = 1e-3;
  double L0 = 4.0;
  double delta = 0.125;
  int k_max = 5;
  /// Required when alpha > 1; optional override when alpha = 1.
  std::optional<double> chi;
  /// Optional override of D (alpha = 1 only).
  std::optional<double> D;

  void validate() const;
  /// K eps0^{-2 delta / ((d-1)(alpha-1))}, the largest admissible L0 for alpha > 1.
  double max_L0() const;
};

/// Normalised form of the master inequality at level k. With
/// u = eps_k^{-1/(d-1)} and A_i = -log(term_i), P_i = A_i / u, and
/// -log(master) = u P_min - spread with spread in [0, log 3].
struct MasterCheck {
  double P[3] = {0.0, 0.0, 0.0};
  double P_min = 0.0;
  double spread = 0.0;
  /// P_min - spread / u - log(1/eps_{k+1}) / u. Nonnegative iff master <= eps_{k+1}.
  double margin = 0.0;
  bool holds = false;
  /// log(master) when it fits in a double, else -inf.
  double log_master = 0.0;
  /// Some comparison fell back on the leading-order asymptotic ratio.
  bool asymptotic = false;
  /// rho = floor(L_{k+1}/4) / (2 d e t_{k+1}); the time constraint is rho >= 2.
  double rho = 0.0;
  bool time_constraint = false;
  std::string precondition_error;
};

struct ScheduleRow {
  int k = 0;
  Tower log_inv_eps;  // log(1 / eps_k)
  Tower u;            // eps_k^{-1/(d-1)}
  double eps = 0.0;   // 0 when it underflows
  bool underflow = false;
  Tower n;
  Tower l;  // l_k, 0 for k = 0
  Tower L;
  Tower t;  // t_k, 0 for k = 0
  Tower T;
  bool exact = true;  // every floor was taken exactly
  MasterCheck master; // the k -> k+1 step
};

std::vector<ScheduleRow> schedule(const ScheduleParams& params);

struct MasterInputs {
  double eps_tilde = 0.0;
  double n = 0.0;
  double l_next = 0.0;
  double L = 0.0;
  double L_next = 0.0;
  double t_next = 0.0;
  int d = 2;
  double gamma = 1.0;
  double C = 1.0;
  double alpha = 1.0;
};

struct MasterBound {
  double value = 0.0;
  double log_value = 0.0;
  double log_terms[3] = {0.0, 0.0, 0.0};
};

/// Three-term bound on eps_tilde_{k+1}, evaluated through logs. Throws
/// InputError naming the violated precondition.
MasterBound master_bound(const MasterInputs& in);

/// Same sum in plain double arithmetic, for cross-checking.
double master_bound_direct(const MasterInputs& in);

struct Condition {
  std::string name;
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string note;
};

struct ConditionReport {
  std::vector<Condition> conditions;
  bool all_hold() const;
};

/// (E1)-(E7) at eps_prime, (E8) along `prefix` when given.
ConditionReport check_conditions(double eps_prime, int d, double D, double chi, double gamma,
                                 double C, const std::vector<ScheduleRow>* prefix = nullptr);

}  // namespace coarsening
