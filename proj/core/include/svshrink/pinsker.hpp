#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "svshrink/linalg.hpp"
#include "svshrink/sequence.hpp"

namespace svshrink {

/// Root kappa of the ellipsoid equation together with the derived shrinkage
/// coefficient matrices C_i = (I - a_i kappa Q^{-1})_+ and the asymptotic
/// quantities kappa_star and P(beta, Q).
struct PinskerSolution {
  double kappa = 0.0;
  std::vector<SymMatrix> coeffs;  // C_1..C_support; zero beyond
  std::size_t support = 0;        // last index with a nonzero coefficient
  double kappa_star = 0.0;
  double constant_p = 0.0;
};

/// Unique root of  eps^2 kappa^{-1} sum_i a(i) tr(I - a(i) kappa Q^{-1})_+ = 1
/// for a non-decreasing non-negative coefficient sequence a with a(i) -> inf.
/// Bisection from a geometrically expanded bracket around `guess`; the left
/// side is evaluated sign-only with early exit, so the cost is governed by
/// the support at the root rather than at the bracket ends.
double solve_kappa(const SymMatrix& q, const std::function<double(std::size_t)>& a,
                   NoiseLevel eps, double guess);

/// solve_kappa specialised to the ellipsoid coefficients a_{beta,i}, seeded
/// with the closed-form kappa_star.
double solve_kappa_sequence(const EllipsoidSpec& spec, NoiseLevel eps);

/// Residual (left side minus 1) of the root equation at a given kappa.
double kappa_eq_residual(const EllipsoidSpec& spec, NoiseLevel eps, double kappa);

/// Right side of the fixed-point identity
///   kappa = eps^2 (1 + eps^2 sum_j lambda_j^{-1} sum_{i<=N_j} a_i^2)^{-1}
///                 sum_j sum_{i<=N_j} a_i,
/// where N_j = max{i : a_i kappa < lambda_j}.
double kappa_fixed_point(const EllipsoidSpec& spec, NoiseLevel eps, double kappa);

/// Closed-form first-order root:
/// (beta tr(Q^{(beta+1)/beta}) / ((beta+1)(2 beta+1)))^{beta/(2 beta+1)}
///   * eps^{2 beta/(2 beta+1)}.
double kappa_star(const EllipsoidSpec& spec, NoiseLevel eps);

/// Asymptotic minimax constant
/// P(beta,Q) = (2 beta+1)^{1/(2 beta+1)}
///             (beta tr(Q^{(beta+1)/beta}) / (beta+1))^{2 beta/(2 beta+1)}.
double pinsker_constant(const EllipsoidSpec& spec);

/// Full solution: root, coefficient matrices up to the support
/// max{i : a_i kappa < lambda_1(Q)}, and the asymptotic constants.
PinskerSolution pinsker_coeffs(const EllipsoidSpec& spec, NoiseLevel eps);

/// Exact risk of the linear rule theta_hat_i = C_i y_i (C_i = 0 beyond the
/// supplied list) at the given truncated theta:
///   sum_i theta_i^T (I-C_i) Q (I-C_i) theta_i + eps^2 sum_i tr(C_i Q C_i).
double linear_risk_exact(const std::vector<SymMatrix>& coeffs,
                         const SequenceParam& theta, NoiseLevel eps,
                         const SymMatrix& qloss);

struct MinimaxValue {
  double exact;       // eps^2 sum_i tr(C_i Q)
  double asymptotic;  // P(beta,Q) eps^{4 beta/(2 beta+1)}
};

/// Exact and first-order minimax values; their ratio tends to 1 as eps -> 0.
MinimaxValue minimax_value_sequence(const EllipsoidSpec& spec, NoiseLevel eps);

/// Finite model: y_i = theta_i + eps xi_i, i = 1..n, xi_i ~ N_p(0, (1/n) I_p),
/// ellipsoid sum_i theta_i^T Q^{-1} theta_i <= 1. kappa solves
/// eps^2 kappa^{-1} tr(I - kappa Q^{-1})_+ = 1; the common coefficient is
/// C = (I - kappa Q^{-1})_+ and the value is eps^2 tr(C Q). All three are
/// independent of n; n fixes the noise scale of the risk model.
struct FiniteDimPinsker {
  double kappa = 0.0;
  SymMatrix coeff;
  double value = 0.0;
};

FiniteDimPinsker finite_dim_pinsker(const SymMatrix& q, NoiseLevel eps,
                                    std::size_t n);

/// Exact risk of theta_hat_i = C y_i in the finite model above at a given
/// theta with trunc n:
///   sum_{i<=n} theta_i^T (I-C) Q (I-C) theta_i + eps^2 tr(C Q C).
double finite_dim_risk_exact(const SymMatrix& coeff, const SequenceParam& theta,
                             NoiseLevel eps, const SymMatrix& qloss);

/// Bayes risk of the posterior mean under prior theta ~ N_p(0, Sigma) and
/// observation y ~ N_p(theta, eps^2 I): eps^2 tr(Q Sigma (Sigma + eps^2 I)^{-1}).
double gaussian_prior_bayes_risk(const SymMatrix& qloss, const SymMatrix& sigma,
                                 NoiseLevel eps);

/// Covariances of the nearly-least-favorable Gaussian prior:
/// V_i = eps^2 a_i^{-1} kappa^{-1} Q (I - a_i kappa Q^{-1})_+ for i = 2..support,
/// with V_1 = 0 (index 1 is unconstrained by the ellipsoid and the prior
/// places a point mass at zero there).
std::vector<SymMatrix> least_favorable_covs(const EllipsoidSpec& spec,
                                            NoiseLevel eps);

}  // namespace svshrink
