#include "rate_function.hpp"

#include <cmath>
#include <limits>

#include "errors.hpp"

namespace coarsening {

namespace {
void require_eps(double eps, const char* where) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw InputError(std::string(where) + ": eps must lie in (0,1)");
  }
}
}  // namespace

RateParams RateParams::from_q(double q) {
  COARSENING_REQUIRE(q > 0.5 && q <= 1.0, "RateParams: need 1/2 < q <= 1");
  RateParams p;
  p.q = q;
  p.gamma = 2.0 * q - 1.0;
  p.tau = (1.0 - q) / q;
  const double s = std::sqrt(p.tau);
  p.eps_circ = ((1.0 - s) / (1.0 + s)) * ((1.0 - s) / (1.0 + s));
  return p;
}

double atanh_stable(double x) {
  COARSENING_REQUIRE(x >= 0.0 && x < 1.0, "atanh_stable: argument must lie in [0,1)");
  return 0.5 * std::log1p(2.0 * x / (1.0 - x));
}

cplx action_S(cplx zeta, double eps) {
  COARSENING_REQUIRE(zeta != cplx(0.0) && zeta != cplx(1.0), "action_S: zeta at a singularity");
  return zeta / (1.0 - zeta) + ((1.0 - eps) / 4.0) * std::log(-zeta);
}

cplx action_S_prime(cplx zeta, double eps) {
  COARSENING_REQUIRE(zeta != cplx(0.0) && zeta != cplx(1.0),
                     "action_S_prime: zeta at a singularity");
  return 1.0 / ((1.0 - zeta) * (1.0 - zeta)) + ((1.0 - eps) / 4.0) / zeta;
}

std::pair<double, double> critical_points(double eps) {
  require_eps(eps, "critical_points");
  const double s = std::sqrt(eps);
  const double z1 = (s - 1.0) / (s + 1.0);
  return {z1, (s + 1.0) / (s - 1.0)};
}

std::pair<double, double> s_second(double eps) {
  require_eps(eps, "s_second");
  const double s = std::sqrt(eps);
  const double first = -(1.0 + s) * (1.0 + s) * (1.0 + s) * s / (4.0 * (1.0 - s));
  const double second = (1.0 - s) * (1.0 - s) * (1.0 - s) * s / (4.0 * (1.0 + s));
  return {first, second};
}

double phi_hat(double eps) {
  require_eps(eps, "phi_hat");
  const double s = std::sqrt(eps);
  return s - (1.0 - eps) * atanh_stable(s);
}

double phi_plus(double eps, const RateParams& params) {
  require_eps(eps, "phi_plus");
  return phi_hat(std::min(eps, params.eps_circ));
}

std::vector<double> reS_profile(int which, double eps, const std::vector<double>& thetas) {
  COARSENING_REQUIRE(which == 1 || which == 2, "reS_profile: circle index must be 1 or 2");
  COARSENING_REQUIRE(!thetas.empty(), "reS_profile: empty grid");
  const auto [z1, z2] = critical_points(eps);
  const double z = which == 1 ? z1 : z2;
  std::vector<double> out;
  out.reserve(thetas.size());
  for (double th : thetas) out.push_back(action_S(z * std::polar(1.0, th), eps).real());
  return out;
}

double reS_theta_derivative(int which, double eps, double theta) {
  COARSENING_REQUIRE(which == 1 || which == 2, "reS_theta_derivative: circle index must be 1 or 2");
  require_eps(eps, "reS_theta_derivative");
  const double denom = 1.0 + eps + (1.0 - eps) * std::cos(theta);
  const double value = (1.0 - eps) * std::sqrt(eps) * std::sin(theta) / (denom * denom);
  return which == 1 ? value : -value;
}

bool radii_admissible(double eps, double tau) {
  const auto [z1, z2] = critical_points(eps);
  const double r = std::abs(z1);
  const double rp = std::abs(z2);
  return tau < r && r < 1.0 && 1.0 < rp && rp < r / tau;
}

std::vector<RateRow> rate_table(const RateParams& params, const std::vector<double>& eps_grid) {
  std::vector<RateRow> rows;
  for (double eps : eps_grid) {
    const auto [z1, z2] = critical_points(eps);
    const auto [s1, s2] = s_second(eps);
    rows.push_back({eps, phi_hat(eps), phi_plus(eps, params), z1, z2, s1, s2});
  }
  return rows;
}

}  // namespace coarsening
