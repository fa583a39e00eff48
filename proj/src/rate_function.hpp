#pragma once

#include <complex>
#include <utility>
#include <vector>

namespace coarsening {

using cplx = std::complex<double>;

struct RateParams {
  double q = 0.75;
  double gamma = 0.5;     // 2q - 1
  double tau = 1.0 / 3;   // (1 - q) / q
  double eps_circ = 0.0;  // ((1 - sqrt(tau)) / (1 + sqrt(tau)))^2

  /// Requires 1/2 < q <= 1.
  static RateParams from_q(double q);
};

/// 0.5 * log((1 + x) / (1 - x)) for 0 <= x < 1, written to keep precision
/// for small x and finite as x approaches 1.
double atanh_stable(double x);

/// S(zeta) = zeta / (1 - zeta) + ((1 - eps) / 4) log(-zeta), principal log.
cplx action_S(cplx zeta, double eps);

/// Derivative of action_S in zeta.
cplx action_S_prime(cplx zeta, double eps);

/// zeta1 = (sqrt(eps) - 1) / (sqrt(eps) + 1), zeta2 = 1 / zeta1.
std::pair<double, double> critical_points(double eps);

/// Closed forms of S'' at (zeta1, zeta2).
std::pair<double, double> s_second(double eps);

/// sqrt(eps) - (1 - eps) atanh(sqrt(eps)).
double phi_hat(double eps);

/// phi_hat truncated at eps_circ: constant on [eps_circ, 1).
double phi_plus(double eps, const RateParams& params);

/// Re S on the circle |zeta| = |zeta_i| at zeta_i * exp(i theta).
std::vector<double> reS_profile(int which, double eps, const std::vector<double>& thetas);

/// Closed-form d/dtheta Re S(zeta_i e^{i theta}).
double reS_theta_derivative(int which, double eps, double theta);

/// tau < |zeta1| < 1 < |zeta2| < |zeta1| / tau.
bool radii_admissible(double eps, double tau);

struct RateRow {
  double eps;
  double phi_hat;
  double phi_plus;
  double zeta1;
  double zeta2;
  double s2_zeta1;
  double s2_zeta2;
};

std::vector<RateRow> rate_table(const RateParams& params, const std::vector<double>& eps_grid);

}  // namespace coarsening
