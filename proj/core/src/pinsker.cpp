#include "svshrink/pinsker.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace svshrink {

namespace {

// Hard cap on coefficient scans; every well-posed input terminates far below
// it, so hitting the cap means the coefficient callback is not diverging.
constexpr std::size_t kMaxScan = 1'000'000'000;

[[noreturn]] void scan_overflow(const char* where) {
  throw std::runtime_error(std::string(where) +
                           ": coefficient scan did not terminate");
}

// Sign of (left side - 1) of the root equation at kappa. The terms
// a(i) tr(I - a(i) kappa Q^{-1})_+ are non-negative, so the scan can return
// +1 as soon as the running sum clears kappa / eps^2, long before the
// support of the sum is exhausted; that keeps evaluations at the far-left
// end of a bracket cheap. Once a(i) kappa >= lambda_1 every later term is
// zero because a is non-decreasing, and the sum is final.
int lhs_sign(const std::vector<double>& eigs,
             const std::function<double(std::size_t)>& a, double eps2,
             double kappa) {
  const long double threshold = static_cast<long double>(kappa) / eps2;
  long double sum = 0.0L;
  for (std::size_t i = 1; i <= kMaxScan; ++i) {
    const double ai = a(i);
    if (!(ai >= 0.0)) {
      throw std::invalid_argument("solve_kappa: coefficients must be >= 0");
    }
    const double prod = ai * kappa;
    double tr = 0.0;
    for (double lam : eigs) {
      if (prod < lam) tr += 1.0 - prod / lam;
    }
    if (ai > 0.0 && tr == 0.0) return sum > threshold ? +1 : -1;
    sum += static_cast<long double>(ai) * tr;
    if (sum > threshold) return +1;
  }
  scan_overflow("solve_kappa");
}

std::vector<double> positive_eigs(const SymMatrix& q, const char* where) {
  std::vector<double> eigs = sym_eig(q).values;
  if (eigs.empty() || eigs.back() <= 0.0) {
    throw std::invalid_argument(std::string(where) +
                                ": Q must be positive definite");
  }
  return eigs;
}

}  // namespace

double solve_kappa(const SymMatrix& q, const std::function<double(std::size_t)>& a,
                   NoiseLevel eps, double guess) {
  if (!std::isfinite(guess) || guess <= 0.0) {
    throw std::invalid_argument("solve_kappa: bracket guess must be positive");
  }
  const std::vector<double> eigs = positive_eigs(q, "solve_kappa");
  const double eps2 = eps.epsilon * eps.epsilon;

  // The left side is strictly decreasing where positive, diverges as
  // kappa -> 0 and vanishes for kappa >= lambda_1 / a(2), so a sign change
  // brackets the unique root. Expand geometrically from the guess until
  // both ends are on the right sides.
  double lo = guess * 1e-3;
  double hi = guess * 1e3;
  for (int tries = 0; lhs_sign(eigs, a, eps2, lo) < 0; ++tries) {
    if (tries > 100) throw std::runtime_error("solve_kappa: no lower bracket");
    lo *= 1e-3;
  }
  for (int tries = 0; lhs_sign(eigs, a, eps2, hi) > 0; ++tries) {
    if (tries > 100) throw std::runtime_error("solve_kappa: no upper bracket");
    hi *= 1e3;
  }

  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket exhausted at double width
    (lhs_sign(eigs, a, eps2, mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double solve_kappa_sequence(const EllipsoidSpec& spec, NoiseLevel eps) {
  const double beta = spec.beta;
  return solve_kappa(
      spec.q, [beta](std::size_t i) { return sobolev_coeff(beta, i); }, eps,
      kappa_star(spec, eps));
}

double kappa_eq_residual(const EllipsoidSpec& spec, NoiseLevel eps,
                         double kappa) {
  if (!std::isfinite(kappa) || kappa <= 0.0) {
    throw std::invalid_argument("kappa_eq_residual: kappa must be positive");
  }
  const std::vector<double> eigs = positive_eigs(spec.q, "kappa_eq_residual");
  const double eps2 = eps.epsilon * eps.epsilon;
  long double sum = 0.0L;
  for (std::size_t i = 1; i <= kMaxScan; ++i) {
    const double ai = sobolev_coeff(spec.beta, i);
    const double prod = ai * kappa;
    long double tr = 0.0L;
    for (double lam : eigs) {
      if (prod < lam) tr += 1.0L - static_cast<long double>(prod) / lam;
    }
    if (ai > 0.0 && tr == 0.0L) break;
    sum += static_cast<long double>(ai) * tr;
  }
  return static_cast<double>(eps2 * sum / kappa - 1.0L);
}

double kappa_fixed_point(const EllipsoidSpec& spec, NoiseLevel eps,
                         double kappa) {
  if (!std::isfinite(kappa) || kappa <= 0.0) {
    throw std::invalid_argument("kappa_fixed_point: kappa must be positive");
  }
  const std::vector<double> eigs = positive_eigs(spec.q, "kappa_fixed_point");
  const double eps2 = eps.epsilon * eps.epsilon;
  long double s1 = 0.0L;  // sum_j sum_{i<=N_j} a_i
  long double s2 = 0.0L;  // sum_j lambda_j^{-1} sum_{i<=N_j} a_i^2
  for (double lam : eigs) {
    for (std::size_t i = 1; i <= kMaxScan; ++i) {
      const double ai = sobolev_coeff(spec.beta, i);
      if (!(ai * kappa < lam)) break;  // N_j = max{i : a_i kappa < lambda_j}
      s1 += ai;
      s2 += static_cast<long double>(ai) * ai / lam;
      if (i == kMaxScan) scan_overflow("kappa_fixed_point");
    }
  }
  return static_cast<double>(eps2 * s1 / (1.0L + eps2 * s2));
}

double kappa_star(const EllipsoidSpec& spec, NoiseLevel eps) {
  const double beta = spec.beta;
  const double tr = mat_power(spec.q, (beta + 1.0) / beta).trace();
  const double base = beta * tr / ((beta + 1.0) * (2.0 * beta + 1.0));
  return std::pow(base, beta / (2.0 * beta + 1.0)) *
         std::pow(eps.epsilon, 2.0 * beta / (2.0 * beta + 1.0));
}

double pinsker_constant(const EllipsoidSpec& spec) {
  const double beta = spec.beta;
  const double tr = mat_power(spec.q, (beta + 1.0) / beta).trace();
  return std::pow(2.0 * beta + 1.0, 1.0 / (2.0 * beta + 1.0)) *
         std::pow(beta * tr / (beta + 1.0), 2.0 * beta / (2.0 * beta + 1.0));
}

PinskerSolution pinsker_coeffs(const EllipsoidSpec& spec, NoiseLevel eps) {
  PinskerSolution sol;
  sol.kappa = solve_kappa_sequence(spec, eps);
  sol.kappa_star = kappa_star(spec, eps);
  sol.constant_p = pinsker_constant(spec);

  const SpectralDecomp dec = sym_eig(spec.q);
  const double lam1 = dec.values.front();
  std::size_t support = 1;
  for (std::size_t i = 2; i <= kMaxScan; ++i) {
    if (!(sobolev_coeff(spec.beta, i) * sol.kappa < lam1)) break;
    support = i;
    if (i == kMaxScan) scan_overflow("pinsker_coeffs");
  }
  sol.support = support;

  const std::size_t p = dec.values.size();
  std::vector<double> f(p);
  sol.coeffs.reserve(support);
  for (std::size_t i = 1; i <= support; ++i) {
    const double ai = sobolev_coeff(spec.beta, i);
    for (std::size_t j = 0; j < p; ++j) {
      f[j] = std::max(0.0, 1.0 - ai * sol.kappa / dec.values[j]);
    }
    sol.coeffs.push_back(dec.assemble(f));
  }
  return sol;
}

double linear_risk_exact(const std::vector<SymMatrix>& coeffs,
                         const SequenceParam& theta, NoiseLevel eps,
                         const SymMatrix& qloss) {
  const std::size_t p = theta.dim();
  if (qloss.dim() != p) {
    throw std::invalid_argument("linear_risk_exact: loss dimension mismatch");
  }
  for (const SymMatrix& c : coeffs) {
    if (c.dim() != p) {
      throw std::invalid_argument("linear_risk_exact: coefficient dimension mismatch");
    }
  }

  const double eps2 = eps.epsilon * eps.epsilon;
  long double bias = 0.0L;
  std::vector<double> r(p);
  for (std::size_t i = 1; i <= theta.trunc(); ++i) {
    if (i <= coeffs.size()) {
      const SymMatrix& c = coeffs[i - 1];
      for (std::size_t k = 0; k < p; ++k) {
        double acc = theta.at(i, k);
        for (std::size_t l = 0; l < p; ++l) acc -= c(k, l) * theta.at(i, l);
        r[k] = acc;
      }
    } else {
      for (std::size_t k = 0; k < p; ++k) r[k] = theta.at(i, k);
    }
    for (std::size_t k = 0; k < p; ++k) {
      for (std::size_t l = 0; l < p; ++l) bias += r[k] * qloss(k, l) * r[l];
    }
  }

  long double var = 0.0L;  // eps^2 sum_i tr(C_i Q C_i)
  for (const SymMatrix& c : coeffs) {
    long double tr = 0.0L;
    for (std::size_t k = 0; k < p; ++k) {
      for (std::size_t l = 0; l < p; ++l) {
        for (std::size_t m = 0; m < p; ++m) {
          tr += c(k, l) * qloss(l, m) * c(m, k);
        }
      }
    }
    var += eps2 * tr;
  }
  return static_cast<double>(bias + var);
}

MinimaxValue minimax_value_sequence(const EllipsoidSpec& spec, NoiseLevel eps) {
  const double kappa = solve_kappa_sequence(spec, eps);
  const std::vector<double> eigs = positive_eigs(spec.q, "minimax_value_sequence");
  const double eps2 = eps.epsilon * eps.epsilon;

  // eps^2 sum_i tr(C_i Q) = eps^2 sum_i sum_j (lambda_j - a_i kappa)_+
  long double sum = 0.0L;
  for (std::size_t i = 1; i <= kMaxScan; ++i) {
    const double ai = sobolev_coeff(spec.beta, i);
    const double prod = ai * kappa;
    bool active = false;
    for (double lam : eigs) {
      if (prod < lam) {
        sum += lam - prod;
        active = true;
      }
    }
    if (!active && ai > 0.0) break;
    if (i == kMaxScan) scan_overflow("minimax_value_sequence");
  }

  MinimaxValue out;
  out.exact = static_cast<double>(eps2 * sum);
  const double beta = spec.beta;
  out.asymptotic = pinsker_constant(spec) *
                   std::pow(eps.epsilon, 4.0 * beta / (2.0 * beta + 1.0));
  return out;
}

FiniteDimPinsker finite_dim_pinsker(const SymMatrix& q, NoiseLevel eps,
                                    std::size_t n) {
  if (n == 0) {
    throw std::invalid_argument("finite_dim_pinsker: n must be >= 1");
  }
  const SpectralDecomp dec = sym_eig(q);
  if (dec.values.back() <= 0.0) {
    throw std::invalid_argument("finite_dim_pinsker: Q must be positive definite");
  }
  const double eps2 = eps.epsilon * eps.epsilon;
  const auto lhs = [&](double kappa) {
    double s = 0.0;
    for (double lam : dec.values) {
      if (kappa < lam) s += 1.0 - kappa / lam;
    }
    return eps2 * s / kappa;
  };

  // lhs decreases from +inf to 0 on (0, lambda_1]; halve down to a lower
  // bracket, then bisect. Neither the root nor the value depends on n: the
  // per-coordinate noise is eps^2 / n and the ellipsoid has n summands, so
  // n cancels. n only scales the risk model this solution is plugged into.
  double hi = dec.values.front();
  double lo = hi;
  while (lhs(lo) <= 1.0) {
    lo *= 0.5;
    if (lo < std::numeric_limits<double>::min()) {
      throw std::runtime_error("finite_dim_pinsker: no lower bracket");
    }
  }
  while (hi - lo > 1e-15 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (lhs(mid) > 1.0 ? lo : hi) = mid;
  }

  FiniteDimPinsker out;
  out.kappa = 0.5 * (lo + hi);
  const std::size_t p = dec.values.size();
  std::vector<double> f(p);
  long double value = 0.0L;
  for (std::size_t j = 0; j < p; ++j) {
    f[j] = std::max(0.0, 1.0 - out.kappa / dec.values[j]);
    value += eps2 * std::max(0.0, dec.values[j] - out.kappa);
  }
  out.coeff = dec.assemble(f);
  out.value = static_cast<double>(value);
  return out;
}

double finite_dim_risk_exact(const SymMatrix& coeff, const SequenceParam& theta,
                             NoiseLevel eps, const SymMatrix& qloss) {
  const std::size_t p = theta.dim();
  if (coeff.dim() != p || qloss.dim() != p) {
    throw std::invalid_argument("finite_dim_risk_exact: dimension mismatch");
  }
  const double eps2 = eps.epsilon * eps.epsilon;

  long double bias = 0.0L;
  std::vector<double> r(p);
  for (std::size_t i = 1; i <= theta.trunc(); ++i) {
    for (std::size_t k = 0; k < p; ++k) {
      double acc = theta.at(i, k);
      for (std::size_t l = 0; l < p; ++l) acc -= coeff(k, l) * theta.at(i, l);
      r[k] = acc;
    }
    for (std::size_t k = 0; k < p; ++k) {
      for (std::size_t l = 0; l < p; ++l) bias += r[k] * qloss(k, l) * r[l];
    }
  }

  long double tr = 0.0L;  // tr(C Q C); total variance is eps^2 tr regardless of n
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t l = 0; l < p; ++l) {
      for (std::size_t m = 0; m < p; ++m) {
        tr += coeff(k, l) * qloss(l, m) * coeff(m, k);
      }
    }
  }
  return static_cast<double>(bias + eps2 * tr);
}

double gaussian_prior_bayes_risk(const SymMatrix& qloss, const SymMatrix& sigma,
                                 NoiseLevel eps) {
  const std::size_t p = qloss.dim();
  if (sigma.dim() != p) {
    throw std::invalid_argument("gaussian_prior_bayes_risk: dimension mismatch");
  }
  const double eps2 = eps.epsilon * eps.epsilon;
  Matrix shifted = sigma.mat();
  for (std::size_t j = 0; j < p; ++j) shifted(j, j) += eps2;
  const SymMatrix inv = spd_inverse(SymMatrix::from_symmetric_parts(shifted));

  long double tr = 0.0L;  // tr(Q Sigma (Sigma + eps^2 I)^{-1})
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t l = 0; l < p; ++l) {
      for (std::size_t m = 0; m < p; ++m) {
        tr += qloss(k, l) * sigma(l, m) * inv(m, k);
      }
    }
  }
  return static_cast<double>(eps2 * tr);
}

std::vector<SymMatrix> least_favorable_covs(const EllipsoidSpec& spec,
                                            NoiseLevel eps) {
  const double kappa = solve_kappa_sequence(spec, eps);
  const SpectralDecomp dec = sym_eig(spec.q);
  const double lam1 = dec.values.front();
  const double eps2 = eps.epsilon * eps.epsilon;

  std::size_t support = 1;
  for (std::size_t i = 2; i <= kMaxScan; ++i) {
    if (!(sobolev_coeff(spec.beta, i) * kappa < lam1)) break;
    support = i;
    if (i == kMaxScan) scan_overflow("least_favorable_covs");
  }

  const std::size_t p = dec.values.size();
  std::vector<SymMatrix> covs;
  covs.reserve(support);
  covs.push_back(SymMatrix::diag(std::vector<double>(p, 0.0)));
  std::vector<double> f(p);
  for (std::size_t i = 2; i <= support; ++i) {
    const double ai = sobolev_coeff(spec.beta, i);
    for (std::size_t j = 0; j < p; ++j) {
      f[j] = eps2 * std::max(0.0, dec.values[j] - ai * kappa) / (ai * kappa);
    }
    covs.push_back(dec.assemble(f));
  }
  return covs;
}

}  // namespace svshrink
