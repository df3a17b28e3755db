#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "svshrink/pinsker.hpp"
#include "svshrink/sequence.hpp"

using namespace svshrink;

namespace {

// independently derived closed forms for beta = 1, Q = I_2, eps = 0.1:
// weights 0,2,2,4,4,...; both eigenvalues 1, so the support condition a_i k < 1
// gives pairs of equal terms. At kappa = 4/27 the support is {2,...,7}
// (a = 2,2,4,4,6,6) and the normalization sum eps^2/k sum a_i (1 - a_i k)
// evaluates to exactly 1; the exact minimax value eps^2 sum (1 - a_i k)_+ * 2
// (two eigendirections) is 31/450 + ... assembled below from the same terms.
constexpr double kKappaI2 = 4.0 / 27.0;

double exact_value_i2(double eps2) {
  // eps^2 sum_i sum_j (lam_j - a_i kappa)_+ with lam = 1, doubled coordinates
  double s = 0.0;
  for (double a : {0.0, 2.0, 2.0, 4.0, 4.0, 6.0, 6.0, 8.0}) {
    for (int j = 0; j < 2; ++j) s += std::max(0.0, 1.0 - a * kKappaI2);
  }
  return eps2 * s;
}

}  // namespace

TEST_CASE("normalization root for the isotropic case is 4/27") {
  const EllipsoidSpec spec(1.0, SymMatrix::identity(2));
  const NoiseLevel eps(0.1);
  const double kappa = solve_kappa_sequence(spec, eps);
  CHECK(kappa == doctest::Approx(kKappaI2).epsilon(1e-12));
  CHECK(std::abs(kappa_eq_residual(spec, eps, kappa)) < 1e-12);
  CHECK(kappa_fixed_point(spec, eps, kappa) ==
        doctest::Approx(kappa).epsilon(1e-12));
}

TEST_CASE("minimax value for the isotropic case is 31/450") {
  const EllipsoidSpec spec(1.0, SymMatrix::identity(2));
  const NoiseLevel eps(0.1);
  const MinimaxValue v = minimax_value_sequence(spec, eps);
  CHECK(v.exact == doctest::Approx(31.0 / 450.0).epsilon(1e-12));
  CHECK(v.exact == doctest::Approx(exact_value_i2(0.01)).epsilon(1e-12));
}

TEST_CASE("scalar case has rational root and value") {
  // p = 1, q = 1, eps = 0.1: kappa = 2/17 and value = 73/1700, both found by
  // solving eps^2/k * sum a_i(1 - a_i k) = 1 over the support {2,...,8} by hand.
  const EllipsoidSpec spec(1.0, SymMatrix::identity(1));
  const NoiseLevel eps(0.1);
  const double kappa = solve_kappa_sequence(spec, eps);
  CHECK(kappa == doctest::Approx(2.0 / 17.0).epsilon(1e-12));
  const MinimaxValue v = minimax_value_sequence(spec, eps);
  CHECK(v.exact == doctest::Approx(73.0 / 1700.0).epsilon(1e-12));
}

TEST_CASE("asymptotic root scale and constant") {
  const EllipsoidSpec spec(1.0, SymMatrix::identity(2));
  // kappa_star = (beta tr Q^{(beta+1)/beta} / ((beta+1)(2beta+1)))^{beta/(2beta+1)}
  // * eps^{2beta/(2beta+1)}; for beta = 1, Q = I_2 this is (1/3)^{1/3} eps^{2/3}
  for (double e : {0.1, 1e-3}) {
    CHECK(kappa_star(spec, NoiseLevel(e)) ==
          doctest::Approx(std::cbrt(1.0 / 3.0) * std::pow(e, 2.0 / 3.0))
              .epsilon(1e-12));
  }
  CHECK(pinsker_constant(spec) == doctest::Approx(std::cbrt(3.0)).epsilon(1e-12));
  // homogeneity: scaling Q by t scales the constant by t^{2(beta+1)/(2beta+1)}
  const EllipsoidSpec spec1(1.0, SymMatrix::identity(1));
  const EllipsoidSpec specq(1.0, SymMatrix::diag({2.5}));
  CHECK(pinsker_constant(specq) ==
        doctest::Approx(pinsker_constant(spec1) * std::pow(2.5, 4.0 / 3.0))
            .epsilon(1e-12));
}

TEST_CASE("root approaches its asymptotic form as noise vanishes") {
  const EllipsoidSpec spec(1.0, SymMatrix::diag({5.0, 1.0}));
  double prev_gap = 1e9;
  for (double e : {0.1, 0.01, 1e-3}) {
    const NoiseLevel eps(e);
    const double gap =
        std::abs(solve_kappa_sequence(spec, eps) / kappa_star(spec, eps) - 1.0);
    CHECK(gap < prev_gap + 1e-12);
    prev_gap = gap;
  }
  CHECK(prev_gap < 0.05);
}

TEST_CASE("coefficient matrices clip in the eigenbasis") {
  const EllipsoidSpec spec(1.0, SymMatrix::diag({5.0, 1.0}));
  const NoiseLevel eps(0.1);
  const PinskerSolution sol = pinsker_coeffs(spec, eps);
  REQUIRE(sol.support >= 2);
  REQUIRE(sol.coeffs.size() == sol.support);
  // index 1 has weight zero: identity coefficient
  CHECK(sol.coeffs[0](0, 0) == doctest::Approx(1.0));
  CHECK(sol.coeffs[0](1, 1) == doctest::Approx(1.0));
  for (std::size_t i = 1; i <= sol.support; ++i) {
    const double a = sobolev_coeff(1.0, i);
    CHECK(sol.coeffs[i - 1](0, 0) ==
          doctest::Approx(std::max(0.0, 1.0 - a * sol.kappa / 5.0)).epsilon(1e-10));
    CHECK(sol.coeffs[i - 1](1, 1) ==
          doctest::Approx(std::max(0.0, 1.0 - a * sol.kappa / 1.0)).epsilon(1e-10));
  }
  // beyond the support the shrink weight on the small eigenvalue has hit zero
  const double a_next = sobolev_coeff(1.0, sol.support + 1);
  CHECK(a_next * sol.kappa >= 5.0);
}

TEST_CASE("exact risk of the minimax rule at zero equals the variance term") {
  const EllipsoidSpec spec(1.0, SymMatrix::identity(2));
  const NoiseLevel eps(0.1);
  const PinskerSolution sol = pinsker_coeffs(spec, eps);
  SequenceParam zero(2, 1);
  const double risk = linear_risk_exact(sol.coeffs, zero, eps, spec.q);
  double var = 0.0;
  for (const SymMatrix& c : sol.coeffs) {
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t k = 0; k < 2; ++k) var += c(r, k) * c(k, r);
    }
  }
  CHECK(risk == doctest::Approx(0.01 * var).epsilon(1e-12));
  // adding mass beyond the coefficient list contributes pure bias
  SequenceParam far(2, 40);
  far.at(40, 0) = 0.3;
  const double risk_far = linear_risk_exact(sol.coeffs, far, eps, spec.q);
  CHECK(risk_far == doctest::Approx(risk + 0.09).epsilon(1e-12));
}

TEST_CASE("minimax risk dominates every ellipsoid point") {
  const EllipsoidSpec spec(1.0, SymMatrix::diag({2.0, 1.0}));
  const NoiseLevel eps(0.2);
  const PinskerSolution sol = pinsker_coeffs(spec, eps);
  const MinimaxValue v = minimax_value_sequence(spec, eps);
  for (int s = 0; s < 20; ++s) {
    SequenceParam theta = sample_near_boundary(spec, 200, 100 + s);
    const double norm = ellipsoid_norm(theta, spec);
    if (norm > 1.0) {  // rescale onto the boundary
      const double shrink = 1.0 / std::sqrt(norm);
      for (std::size_t i = 1; i <= theta.trunc(); ++i) {
        for (std::size_t j = 0; j < 2; ++j) theta.at(i, j) *= shrink;
      }
    }
    CHECK(linear_risk_exact(sol.coeffs, theta, eps, spec.q) <= v.exact + 1e-9);
  }
}

TEST_CASE("finite model root and value at the scalar calibration point") {
  // q = 1, eps = 1: kappa solves (1 - kappa)/kappa = 1, so kappa = 1/2 and the
  // value is (1 - 1/2) = 1/2 for every coordinate count
  for (std::size_t n : {std::size_t{1}, std::size_t{5}, std::size_t{50}}) {
    const FiniteDimPinsker sol =
        finite_dim_pinsker(SymMatrix::identity(1), NoiseLevel(1.0), n);
    CHECK(sol.kappa == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sol.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sol.coeff(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("finite model risk splits into bias and variance") {
  const SymMatrix q = SymMatrix::diag({3.0, 1.0});
  const NoiseLevel eps(0.3);
  const FiniteDimPinsker sol = finite_dim_pinsker(q, eps, 4);
  SequenceParam theta(2, 4);
  theta.at(1, 0) = 0.4;
  theta.at(3, 1) = -0.2;
  const double risk = finite_dim_risk_exact(sol.coeff, theta, eps, q);
  // recompute by hand in the diagonal basis
  double expect = 0.0;
  const double c0 = sol.coeff(0, 0), c1 = sol.coeff(1, 1);
  expect += (1 - c0) * (1 - c0) * 3.0 * 0.16 + (1 - c1) * (1 - c1) * 1.0 * 0.04;
  // total variance: n coords each carrying eps^2/n, so the sum is n-free
  expect += eps.epsilon * eps.epsilon * (c0 * 3.0 * c0 + c1 * 1.0 * c1);
  CHECK(risk == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("finite model limits in the extremes of the noise level") {
  const SymMatrix q = SymMatrix::diag({4.0, 1.0});
  // vanishing noise: kappa -> 0 and the value -> 0
  const FiniteDimPinsker lo = finite_dim_pinsker(q, NoiseLevel(1e-6), 3);
  CHECK(lo.kappa < 1e-10);
  CHECK(lo.value < 1e-9);
  // huge noise: the constraint pins kappa at the top eigenvalue and the rule
  // dies; the value saturates at kappa * (number of active directions) shape
  const FiniteDimPinsker hi = finite_dim_pinsker(q, NoiseLevel(1e4), 3);
  CHECK(hi.kappa == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(hi.coeff(1, 1) == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
}

TEST_CASE("gaussian prior risk closed form") {
  // tr(Q Sigma (Sigma + eps^2 I)^{-1}) * eps^2 for commuting diagonal input
  const SymMatrix q = SymMatrix::diag({5.0, 1.0});
  const SymMatrix sigma = SymMatrix::diag({0.8, 0.2});
  const NoiseLevel eps(0.5);
  const double e2 = 0.25;
  const double expect =
      e2 * (5.0 * 0.8 / (0.8 + e2) + 1.0 * 0.2 / (0.2 + e2));
  CHECK(gaussian_prior_bayes_risk(q, sigma, eps) ==
        doctest::Approx(expect).epsilon(1e-12));
  // the zero prior has zero bayes risk
  CHECK(gaussian_prior_bayes_risk(q, SymMatrix::diag({0.0, 0.0}), eps) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
}

TEST_CASE("least favorable covariances reproduce the minimax value") {
  // sum of per-index bayes risks under the least favorable prior equals the
  // exact minimax value, and the bayes-optimal coefficient matches the rule
  const EllipsoidSpec spec(1.0, SymMatrix::diag({5.0, 1.0}));
  const NoiseLevel eps(0.1);
  const std::vector<SymMatrix> covs = least_favorable_covs(spec, eps);
  const PinskerSolution sol = pinsker_coeffs(spec, eps);
  REQUIRE(covs.size() == sol.support);
  double total = 0.0;
  for (const SymMatrix& v : covs) total += gaussian_prior_bayes_risk(spec.q, v, eps);
  const MinimaxValue mv = minimax_value_sequence(spec, eps);
  // index 1 is unconstrained; its limiting flat prior contributes eps^2 tr(Q)
  // to the minimax value while the stored zero covariance contributes nothing
  const double e2trq = 0.01 * spec.q.trace();
  CHECK(total + e2trq == doctest::Approx(mv.exact).epsilon(1e-10));
  // the first cov is exactly zero (weight a_1 = 0 forces it)
  CHECK(covs[0](0, 0) == 0.0);
  CHECK(covs[0](1, 1) == 0.0);
  // posterior-mean coefficient V (V + eps^2)^{-1} equals the rule coefficient
  for (std::size_t i = 1; i < covs.size(); ++i) {
    Matrix shifted = covs[i].mat();
    for (std::size_t r = 0; r < 2; ++r) shifted(r, r) += 0.01;
    const Matrix post = covs[i].mat() * spd_inverse(SymMatrix(shifted)).mat();
    CHECK(max_abs(post - sol.coeffs[i].mat()) < 1e-9);
  }
}

TEST_CASE("root solver rejects bad input") {
  const EllipsoidSpec spec(1.0, SymMatrix::identity(2));
  CHECK_THROWS_AS(solve_kappa(
                      spec.q, [](std::size_t) { return -1.0; }, NoiseLevel(0.1), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_kappa(
                      spec.q, [](std::size_t i) { return double(i - 1); },
                      NoiseLevel(0.1), 0.0),
                  std::invalid_argument);
}
