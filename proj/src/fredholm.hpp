#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rate_function.hpp"

namespace coarsening {

struct QuadratureSpec {
  double r = 0.0;        // eta circle, in (tau, 1)
  double r_prime = 0.0;  // zeta circle, in (1, r / tau)
  double R = 0.0;        // mu circle, in (tau, inf) minus {1, 1/tau, 1/tau^2, ...}
  int N_zeta = 128;
  int N_eta = 64;
  int N_mu = 64;
  int n_max = 3;
  double series_tol = 1e-17;

  /// r = (1 + tau) / 2, r' = (1 + r / tau) / 2, R = (1 + tau) / 2. With an
  /// eps the radii are |zeta1| and |zeta2| instead.
  static QuadratureSpec defaults(const RateParams& params, std::optional<double> eps = {});
  void validate(double tau) const;
};

/// Work budget: N_mu * (N_zeta * N_eta + N_eta^3) complex operations.
inline constexpr double kFredholmWorkBudget = 2e10;
double fredholm_workload(const QuadratureSpec& quad);

/// sum_{k in Z} tau^k z^k / (1 - tau^k mu), 1 < |z| < 1/tau.
cplx f_tau(cplx mu, cplx z, double tau, double tol = 1e-17);

/// prod_{k >= 0} (1 - mu tau^k).
cplx pochhammer_inf(cplx mu, double tau, double tol = 1e-17);

/// phi_t(zeta) = exp(t zeta / (1 - zeta)).
cplx phi_t(cplx zeta, double t);

/// Kernel J(eta, eta') by the trapezoid rule on |zeta| = r'. A positive
/// `shift` s multiplies the integrand by ((1 - zeta) / (1 - eta'))^s, which
/// turns the probability formula into one for x_m >= s.
cplx kernel_J(cplx eta, cplx eta_prime, cplx mu, int m, double t, const RateParams& params,
              const QuadratureSpec& quad, int shift = 0);

/// Nystrom matrix K_ij = J(eta_i, eta_j) eta_j / N_eta on the eta nodes.
Eigen::MatrixXcd nystrom_matrix(cplx mu, int m, double t, const RateParams& params,
                                const QuadratureSpec& quad, int shift = 0);

struct FredholmValue {
  cplx value;                  // 1 + sum_{n <= n_max} terms
  cplx full;                   // det(I + mu K) by LU
  std::vector<cplx> terms;     // terms[n-1] = mu^n e_n(K), n = 1..n_max
  double tail_estimate = 0.0;  // sum_{n > n_max} |mu^n e_n(K)|
  double hadamard_bound = 0.0; // sum_{n > n_max} (|mu| r max|J|)^n n^{n/2} / n!
};

/// Truncated Fredholm series of det(1 + mu J). Under tensor-product trapezoid
/// quadrature the n-fold term equals mu^n e_n(K), e_n the n-th elementary
/// symmetric function of the eigenvalues of K.
FredholmValue fredholm_det(cplx mu, int m, double t, const RateParams& params,
                           const QuadratureSpec& quad, int shift = 0);

struct ProbabilityValue {
  double probability = 0.0;     // clamped real part
  cplx raw;                     // integral with the truncated series
  cplx raw_full;                // integral with the full determinant
  double imag_residue = 0.0;
  double tail_estimate = 0.0;
  double hadamard_bound = 0.0;
};

inline constexpr double kResidueTolerance = 1e-6;

/// mu-contour integral of (mu; tau)_inf det(1 + mu J) dmu / (2 pi i mu).
/// With shift 0 this is the formula exactly as stated for the kernel above.
ProbabilityValue fredholm_probability(int m, double t, const RateParams& params,
                                      const QuadratureSpec& quad, int shift);

/// P(x_m(t / gamma) > 0). Evaluated with shift 1; see the notes on
/// fredholm_probability.
ProbabilityValue prob_xm_positive(int m, double t, const RateParams& params,
                                  const QuadratureSpec& quad);

/// (2 pi i)^{-1} integral of (mu; tau)_inf dmu / mu over |mu| = R. Equals 1.
cplx residue_identity(double tau, double R, int N_mu);

/// (2 pi i)^{-1} integral of (mu; tau)_inf f_tau(mu, w) dmu over |mu| = R.
cplx qbinomial_integral(double tau, double w, double R, int N_mu);

/// -(w^{-1} (tau; tau)_inf) / (w^{-1}; tau)_inf.
cplx qbinomial_closed_form(double tau, double w);

/// B^n n^{n/2+1} / t^{delta (n-1)}.
double rank_one_bound(int n, double B, double t, double delta);

}  // namespace coarsening
