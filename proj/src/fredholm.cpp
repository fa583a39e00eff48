#include "fredholm.hpp"

#include <cmath>
#include <numbers>

#include "errors.hpp"

namespace coarsening {

namespace {

constexpr int kMaxSeriesTerms = 100000;

bool near_excluded_R(double R, double tau) {
  for (double p = 1.0; p < 1e300 && p <= 2.0 * R; p /= tau) {
    if (std::abs(R - p) < 1e-9 * p) return true;
  }
  return false;
}

cplx node(double radius, int k, int N) {
  return std::polar(radius, 2.0 * std::numbers::pi * k / N);
}

}  // namespace

QuadratureSpec QuadratureSpec::defaults(const RateParams& params, std::optional<double> eps) {
  QuadratureSpec q;
  const double tau = params.tau;
  if (eps) {
    const auto [z1, z2] = critical_points(*eps);
    q.r = std::abs(z1);
    q.r_prime = std::abs(z2);
  } else {
    q.r = (1.0 + tau) / 2.0;
    q.r_prime = tau > 0.0 ? (1.0 + q.r / tau) / 2.0 : 2.0;
  }
  q.R = (1.0 + tau) / 2.0;
  if (near_excluded_R(q.R, tau)) q.R += 1e-3;
  return q;
}

void QuadratureSpec::validate(double tau) const {
  COARSENING_REQUIRE(tau > 0.0 && tau < 1.0, "quadrature: need 0 < tau < 1");
  COARSENING_REQUIRE(r > tau && r < 1.0, "quadrature: r must lie in (tau, 1)");
  COARSENING_REQUIRE(r_prime > 1.0 && r_prime < r / tau, "quadrature: r' must lie in (1, r/tau)");
  COARSENING_REQUIRE(R > tau && !near_excluded_R(R, tau),
                     "quadrature: R must exceed tau and avoid {1, 1/tau, 1/tau^2, ...}");
  COARSENING_REQUIRE(N_zeta >= 16 && N_eta >= 16 && N_mu >= 16,
                     "quadrature: node counts must be >= 16");
  COARSENING_REQUIRE(n_max >= 1, "quadrature: n_max must be >= 1");
  COARSENING_REQUIRE(series_tol > 0.0, "quadrature: series_tol must be positive");
}

double fredholm_workload(const QuadratureSpec& quad) {
  const double ne = quad.N_eta;
  return quad.N_mu * (static_cast<double>(quad.N_zeta) * ne + ne * ne * ne);
}

cplx f_tau(cplx mu, cplx z, double tau, double tol) {
  COARSENING_REQUIRE(tau > 0.0 && tau < 1.0, "f_tau: need 0 < tau < 1");
  COARSENING_REQUIRE(mu != cplx(0.0), "f_tau: the series diverges at mu = 0");
  const double az = std::abs(z);
  COARSENING_REQUIRE(az > 1.0 && az < 1.0 / tau, "f_tau: |z| must lie in (1, 1/tau)");
  cplx sum = 0.0;
  // k >= 0: terms shrink like |tau z|^k.
  cplx tz = 1.0;
  double tk = 1.0;
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    const cplx denom = 1.0 - tk * mu;
    COARSENING_REQUIRE(std::abs(denom) > 1e-14, "f_tau: mu is on a pole");
    const cplx term = tz / denom;
    sum += term;
    if (std::abs(term) <= tol * std::abs(sum)) break;
    tz *= tau * z;
    tk *= tau;
  }
  // k = -j: tau^{-j} z^{-j} / (1 - tau^{-j} mu) = z^{-j} / (tau^j - mu).
  const cplx zinv = 1.0 / z;
  cplx zj = zinv;
  double tj = tau;
  for (int j = 1; j < kMaxSeriesTerms; ++j) {
    const cplx denom = tj - mu;
    COARSENING_REQUIRE(std::abs(denom) > 1e-14 * std::max(tj, std::abs(mu)),
                       "f_tau: mu is on a pole");
    const cplx term = zj / denom;
    sum += term;
    if (std::abs(term) <= tol * std::abs(sum)) break;
    zj *= zinv;
    tj *= tau;
  }
  return sum;
}

cplx pochhammer_inf(cplx mu, double tau, double tol) {
  COARSENING_REQUIRE(tau > 0.0 && tau < 1.0, "pochhammer_inf: need 0 < tau < 1");
  cplx prod = 1.0;
  double tk = 1.0;
  for (int k = 0; k < kMaxSeriesTerms; ++k) {
    const cplx x = mu * tk;
    if (std::abs(x) < tol) {
      // log of the remaining factors is -mu tau^k / (1 - tau) to first order.
      prod *= 1.0 - x / (1.0 - tau);
      break;
    }
    prod *= 1.0 - x;
    tk *= tau;
  }
  return prod;
}

cplx phi_t(cplx zeta, double t) { return std::exp(t * zeta / (1.0 - zeta)); }

cplx kernel_J(cplx eta, cplx eta_prime, cplx mu, int m, double t, const RateParams& params,
              const QuadratureSpec& quad, int shift) {
  quad.validate(params.tau);
  COARSENING_REQUIRE(shift >= 0, "kernel_J: shift must be >= 0");
  cplx sum = 0.0;
  for (int k = 0; k < quad.N_zeta; ++k) {
    const cplx zeta = node(quad.r_prime, k, quad.N_zeta);
    const cplx g = phi_t(zeta, t) * std::pow(zeta, m) * std::pow(1.0 - zeta, shift) *
                   f_tau(mu, zeta / eta_prime, params.tau, quad.series_tol) / (zeta - eta);
    sum += g * zeta;
  }
  sum /= static_cast<double>(quad.N_zeta);
  return sum / (phi_t(eta_prime, t) * std::pow(eta_prime, m + 1) * std::pow(1.0 - eta_prime, shift));
}

Eigen::MatrixXcd nystrom_matrix(cplx mu, int m, double t, const RateParams& params,
                                const QuadratureSpec& quad, int shift) {
  quad.validate(params.tau);
  COARSENING_REQUIRE(shift >= 0, "nystrom_matrix: shift must be >= 0");
  const int nz = quad.N_zeta;
  const int ne = quad.N_eta;
  std::vector<cplx> zeta(static_cast<std::size_t>(nz));
  std::vector<cplx> eta(static_cast<std::size_t>(ne));
  for (int k = 0; k < nz; ++k) zeta[static_cast<std::size_t>(k)] = node(quad.r_prime, k, nz);
  for (int j = 0; j < ne; ++j) eta[static_cast<std::size_t>(j)] = node(quad.r, j, ne);

  Eigen::MatrixXcd A(ne, nz);
  for (int k = 0; k < nz; ++k) {
    const cplx z = zeta[static_cast<std::size_t>(k)];
    const cplx w = phi_t(z, t) * std::pow(z, m) * std::pow(1.0 - z, shift) * z /
                   static_cast<double>(nz);
    for (int i = 0; i < ne; ++i) A(i, k) = w / (z - eta[static_cast<std::size_t>(i)]);
  }
  Eigen::MatrixXcd F(nz, ne);
  for (int j = 0; j < ne; ++j) {
    for (int k = 0; k < nz; ++k) {
      F(k, j) = f_tau(mu, zeta[static_cast<std::size_t>(k)] / eta[static_cast<std::size_t>(j)],
                      params.tau, quad.series_tol);
    }
  }
  Eigen::MatrixXcd K = A * F;
  for (int j = 0; j < ne; ++j) {
    const cplx e = eta[static_cast<std::size_t>(j)];
    const cplx denom = phi_t(e, t) * std::pow(e, m + 1) * std::pow(1.0 - e, shift);
    K.col(j) *= e / (denom * static_cast<double>(ne));
  }
  return K;
}

FredholmValue fredholm_det(cplx mu, int m, double t, const RateParams& params,
                           const QuadratureSpec& quad, int shift) {
  quad.validate(params.tau);
  COARSENING_REQUIRE(m >= 1, "fredholm_det: m must be >= 1");
  COARSENING_REQUIRE(t > 0.0 && std::isfinite(t), "fredholm_det: t must be positive");
  if (fredholm_workload(quad) > kFredholmWorkBudget) {
    throw WorkloadError("fredholm_det: quadrature exceeds the work budget");
  }
  const int ne = quad.N_eta;
  FredholmValue out;
  if (mu == cplx(0.0)) {
    out.value = out.full = 1.0;
    out.terms.assign(static_cast<std::size_t>(quad.n_max), 0.0);
    return out;
  }
  const Eigen::MatrixXcd K = nystrom_matrix(mu, m, t, params, quad, shift);
  const Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(ne, ne) + mu * K;
  out.full = M.partialPivLu().determinant();

  const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(K, false);
  const Eigen::VectorXcd lambda = solver.eigenvalues();
  // e[n] after processing all eigenvalues is the n-th elementary symmetric function.
  std::vector<cplx> e(static_cast<std::size_t>(ne) + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < ne; ++i) {
    for (int n = i + 1; n >= 1; --n) {
      e[static_cast<std::size_t>(n)] += lambda(i) * e[static_cast<std::size_t>(n) - 1];
    }
  }
  out.value = 1.0;
  cplx mun = 1.0;
  for (int n = 1; n <= ne; ++n) {
    mun *= mu;
    const cplx term = mun * e[static_cast<std::size_t>(n)];
    if (n <= quad.n_max) {
      out.terms.push_back(term);
      out.value += term;
    } else {
      out.tail_estimate += std::abs(term);
    }
  }
  for (int n = ne + 1; n <= quad.n_max; ++n) out.terms.push_back(0.0);

  // N_eta max|K| = r max|J|.
  const double scale = std::abs(mu) * ne * K.cwiseAbs().maxCoeff();
  for (int n = quad.n_max + 1; n <= 1000000; ++n) {
    const double term = std::exp(n * std::log(scale) + 0.5 * n * std::log(static_cast<double>(n)) -
                                 std::lgamma(n + 1.0));
    out.hadamard_bound += term;
    if (n > 8.0 * scale * scale && term <= 1e-17 * out.hadamard_bound) break;
  }
  return out;
}

ProbabilityValue fredholm_probability(int m, double t, const RateParams& params,
                                      const QuadratureSpec& quad, int shift) {
  quad.validate(params.tau);
  ProbabilityValue out;
  cplx sum = 0.0;
  cplx sum_full = 0.0;
  for (int k = 0; k < quad.N_mu; ++k) {
    const cplx mu = node(quad.R, k, quad.N_mu);
    const cplx poch = pochhammer_inf(mu, params.tau, quad.series_tol);
    const FredholmValue fv = fredholm_det(mu, m, t, params, quad, shift);
    sum += poch * fv.value;
    sum_full += poch * fv.full;
    out.tail_estimate += std::abs(poch) * fv.tail_estimate;
    out.hadamard_bound += std::abs(poch) * fv.hadamard_bound;
  }
  const double n = quad.N_mu;
  out.raw = sum / n;
  out.raw_full = sum_full / n;
  out.tail_estimate /= n;
  out.hadamard_bound /= n;
  out.imag_residue = std::abs(out.raw.imag());
  if (out.imag_residue > kResidueTolerance) {
    throw ResidueError("fredholm probability: imaginary residue exceeds tolerance",
                       out.raw.real(), out.raw.imag());
  }
  out.probability = std::clamp(out.raw.real(), 0.0, 1.0);
  return out;
}

ProbabilityValue prob_xm_positive(int m, double t, const RateParams& params,
                                  const QuadratureSpec& quad) {
  return fredholm_probability(m, t, params, quad, 1);
}

cplx residue_identity(double tau, double R, int N_mu) {
  COARSENING_REQUIRE(N_mu >= 1, "residue_identity: need at least one node");
  cplx sum = 0.0;
  for (int k = 0; k < N_mu; ++k) sum += pochhammer_inf(node(R, k, N_mu), tau);
  return sum / static_cast<double>(N_mu);
}

cplx qbinomial_integral(double tau, double w, double R, int N_mu) {
  COARSENING_REQUIRE(N_mu >= 1, "qbinomial_integral: need at least one node");
  cplx sum = 0.0;
  for (int k = 0; k < N_mu; ++k) {
    const cplx mu = node(R, k, N_mu);
    sum += pochhammer_inf(mu, tau) * f_tau(mu, w, tau) * mu;
  }
  return sum / static_cast<double>(N_mu);
}

cplx qbinomial_closed_form(double tau, double w) {
  return -(pochhammer_inf(tau, tau) / w) / pochhammer_inf(1.0 / w, tau);
}

double rank_one_bound(int n, double B, double t, double delta) {
  return std::pow(B, n) * std::pow(static_cast<double>(n), n / 2.0 + 1.0) /
         std::pow(t, delta * (n - 1));
}

}  // namespace coarsening
