#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "fredholm.hpp"
#include "rng.hpp"

using namespace coarsening;

namespace {
cplx f_tau_direct(cplx mu, cplx z, double tau, int K) {
  cplx sum = 0.0;
  for (int k = 0; k <= K; ++k) {
    const double tk = std::pow(tau, k);
    sum += std::pow(tau * z, k) / (1.0 - tk * mu);
  }
  // k = -j: tau^{-j} z^{-j} / (1 - tau^{-j} mu) = z^{-j} / (tau^j - mu).
  for (int j = 1; j <= K; ++j) sum += std::pow(z, -j) / (std::pow(tau, j) - mu);
  return sum;
}

QuadratureSpec small_quad(const RateParams& p) {
  auto quad = QuadratureSpec::defaults(p);
  quad.N_zeta = 64;
  quad.N_eta = 32;
  quad.N_mu = 32;
  quad.n_max = 3;
  return quad;
}
}  // namespace

TEST_CASE("f_tau matches a long direct sum") {
  const double tau = 0.3;
  const cplx mu = 0.5;
  const cplx z = 1.5;
  const cplx a = f_tau(mu, z, tau);
  const cplx b = f_tau_direct(mu, z, tau, 1000);
  CHECK(std::abs(a - b) < 1e-12 * std::abs(b));

  const cplx mu2(0.4, 0.7);
  const cplx z2 = std::polar(2.0, 0.9);
  CHECK(std::abs(f_tau(mu2, z2, tau) - f_tau_direct(mu2, z2, tau, 1000)) < 1e-11);
  CHECK(std::abs(f_tau(std::conj(mu2), std::conj(z2), tau) - std::conj(f_tau(mu2, z2, tau))) <
        1e-13);
}

TEST_CASE("f_tau domain errors") {
  CHECK_THROWS_AS(f_tau(0.5, 1.5, 0.0), InputError);
  CHECK_THROWS_AS(f_tau(0.5, 0.9, 0.3), InputError);
  CHECK_THROWS_AS(f_tau(0.5, 4.0, 0.3), InputError);
  CHECK_THROWS_AS(f_tau(0.0, 1.5, 0.3), InputError);
  CHECK_THROWS_AS(f_tau(1.0, 1.5, 0.3), InputError);
}

TEST_CASE("q-Pochhammer") {
  const double tau = 0.3;
  for (cplx mu : {cplx(0.5), cplx(-2.0, 1.0), cplx(3.0, -0.5)}) {
    cplx prod = 1.0;
    for (int k = 0; k < 200; ++k) prod *= 1.0 - mu * std::pow(tau, k);
    CHECK(std::abs(pochhammer_inf(mu, tau) - prod) < 1e-13 * std::max(1.0, std::abs(prod)));
  }
  CHECK(pochhammer_inf(0.0, tau) == cplx(1.0));
  CHECK(std::abs(pochhammer_inf(1.0, tau)) == 0.0);
  CHECK_THROWS_AS(pochhammer_inf(0.5, 1.0), InputError);
}

TEST_CASE("residue and q-binomial identities") {
  const double tau = 0.3;
  const double R = (1.0 + tau) / 2.0;
  CHECK(std::abs(residue_identity(tau, R, 64) - 1.0) < 1e-8);
  CHECK(std::abs(residue_identity(tau, 2.0, 128) - 1.0) < 1e-8);
  const double w = 2.5;
  const cplx lhs = qbinomial_integral(tau, w, R, 64);
  const cplx rhs = qbinomial_closed_form(tau, w);
  CHECK(std::abs(lhs - rhs) < 1e-8);
}

TEST_CASE("quadrature spec validation") {
  const auto p = RateParams::from_q(0.75);
  auto quad = QuadratureSpec::defaults(p);
  CHECK_NOTHROW(quad.validate(p.tau));
  CHECK(quad.r > p.tau);
  CHECK(quad.r < 1.0);
  CHECK(quad.r_prime > 1.0);
  CHECK(quad.r_prime < quad.r / p.tau);

  auto bad = quad;
  bad.r = 0.2;
  CHECK_THROWS_AS(bad.validate(p.tau), InputError);
  bad = quad;
  bad.r_prime = quad.r / p.tau + 0.1;
  CHECK_THROWS_AS(bad.validate(p.tau), InputError);
  bad = quad;
  bad.R = 1.0;
  CHECK_THROWS_AS(bad.validate(p.tau), InputError);
  bad = quad;
  bad.R = 3.0;
  CHECK_THROWS_AS(bad.validate(p.tau), InputError);
  bad = quad;
  bad.n_max = 0;
  CHECK_THROWS_AS(bad.validate(p.tau), InputError);

  const auto with_eps = QuadratureSpec::defaults(p, 0.05);
  CHECK(with_eps.r == doctest::Approx(std::abs(critical_points(0.05).first)));
  CHECK(with_eps.r_prime == doctest::Approx(std::abs(critical_points(0.05).second)));
}

TEST_CASE("kernel converges under zeta refinement") {
  const auto p = RateParams::from_q(0.75);
  auto quad = QuadratureSpec::defaults(p);
  const cplx eta = std::polar(quad.r, 0.7);
  const cplx eta_p = std::polar(quad.r, -1.9);
  const cplx mu = std::polar(quad.R, 2.2);
  quad.N_zeta = 128;
  const cplx a = kernel_J(eta, eta_p, mu, 2, 4.0, p, quad);
  quad.N_zeta = 256;
  const cplx b = kernel_J(eta, eta_p, mu, 2, 4.0, p, quad);
  CHECK(std::abs(a - b) < 1e-8 * std::abs(b));

  const cplx c = kernel_J(std::conj(eta), std::conj(eta_p), std::conj(mu), 2, 4.0, p, quad);
  CHECK(std::abs(c - std::conj(b)) < 1e-10 * std::abs(b));
}

TEST_CASE("Fredholm determinant basic properties") {
  const auto p = RateParams::from_q(0.75);
  const auto quad = small_quad(p);
  const auto zero = fredholm_det(0.0, 2, 4.0, p, quad);
  CHECK(std::abs(zero.value - 1.0) < 1e-15);
  CHECK(std::abs(zero.full - 1.0) < 1e-15);

  const cplx mu = std::polar(quad.R, 1.1);
  const auto a = fredholm_det(mu, 2, 4.0, p, quad);
  const auto b = fredholm_det(std::conj(mu), 2, 4.0, p, quad);
  CHECK(std::abs(a.value - std::conj(b.value)) < 1e-10);
  CHECK(a.terms.size() == 3);
  CHECK(std::abs(a.value - a.full) <= a.tail_estimate + 1e-10);

  auto q2 = quad;
  q2.n_max = 2;
  const auto c = fredholm_det(mu, 2, 4.0, p, q2);
  CHECK(std::abs(c.value - a.value) <= c.tail_estimate + 1e-12);
}

TEST_CASE("n-th term equals the elementary symmetric function of the Nystrom matrix") {
  const auto p = RateParams::from_q(0.75);
  const auto quad = small_quad(p);
  const cplx mu = std::polar(quad.R, 0.4);
  const auto K = nystrom_matrix(mu, 2, 4.0, p, quad);
  // e_1 = trace, e_2 = (trace^2 - trace(K^2)) / 2.
  const cplx e1 = K.trace();
  const cplx e2 = (e1 * e1 - (K * K).trace()) / 2.0;
  const auto v = fredholm_det(mu, 2, 4.0, p, quad);
  CHECK(std::abs(v.terms[0] - mu * e1) < 1e-12 * std::max(1.0, std::abs(mu * e1)));
  CHECK(std::abs(v.terms[1] - mu * mu * e2) < 1e-11 * std::max(1.0, std::abs(mu * mu * e2)));
  const cplx full = (Eigen::MatrixXcd::Identity(K.rows(), K.cols()) + mu * K).determinant();
  CHECK(std::abs(v.full - full) < 1e-10 * std::max(1.0, std::abs(full)));
}

TEST_CASE("probability is real, in [0,1] and nonincreasing in m") {
  const auto p = RateParams::from_q(0.75);
  const auto quad = small_quad(p);
  double prev = 1.0;
  for (int m = 1; m <= 4; ++m) {
    const auto v = prob_xm_positive(m, 4.0, p, quad);
    CHECK(v.imag_residue < kResidueTolerance);
    CHECK(v.probability >= 0.0);
    CHECK(v.probability <= 1.0);
    CHECK(v.probability <= prev + 1e-9);
    prev = v.probability;
  }
}

TEST_CASE("workload guard and argument errors") {
  const auto p = RateParams::from_q(0.75);
  auto quad = QuadratureSpec::defaults(p);
  quad.N_eta = 4096;
  quad.N_mu = 4096;
  CHECK(fredholm_workload(quad) > kFredholmWorkBudget);
  CHECK_THROWS_AS(fredholm_det(0.5, 2, 4.0, p, quad), WorkloadError);
  const auto ok = small_quad(p);
  CHECK_THROWS_AS(fredholm_det(0.5, 0, 4.0, p, ok), InputError);
  CHECK_THROWS_AS(fredholm_det(0.5, 2, 0.0, p, ok), InputError);
  CHECK_THROWS_AS(kernel_J(0.5, 0.5, 0.5, 2, 4.0, p, ok, -1), InputError);
}

TEST_CASE("rank-one perturbation determinant bound") {
  Rng rng(20240611);
  const double delta = 0.125;
  for (double t : {1e4, 1e8}) {
    for (int n = 1; n <= 6; ++n) {
      for (int trial = 0; trial < 50; ++trial) {
        Eigen::MatrixXcd Jt(n, n);
        double max_abs = 0.0;
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            const cplx z = std::polar(rng.uniform(), 2.0 * M_PI * rng.uniform());
            Jt(i, j) = z;
            max_abs = std::max(max_abs, std::abs(z));
          }
        }
        const Eigen::MatrixXcd J =
            Eigen::MatrixXcd::Ones(n, n) + std::pow(t, -delta) * Jt;
        const double B = 1.0 + max_abs;
        CHECK(std::abs(J.determinant()) <= rank_one_bound(n, B, t, delta));
      }
    }
  }
}
