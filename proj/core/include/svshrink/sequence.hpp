#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "svshrink/linalg.hpp"
#include "svshrink/rng.hpp"

namespace svshrink {

/// Per-coordinate noise standard deviation scale (epsilon of the sequence
/// model y_i = theta_i + epsilon * xi_i).
struct NoiseLevel {
  explicit NoiseLevel(double e) : epsilon(e) {
    if (!(e > 0.0)) throw std::invalid_argument("NoiseLevel: epsilon must be positive");
  }
  double epsilon;
};

/// Truncated multivariate sequence theta = (theta_1,...,theta_N), each
/// theta_i a p-vector. Sequence indices are 1-based to match the math;
/// coordinates are 0-based. Entries beyond N are implicitly zero.
class SequenceParam {
public:
  SequenceParam() = default;
  SequenceParam(std::size_t p, std::size_t n) : dim_(p), data_(p * n, 0.0) {
    if (p == 0 || n == 0)
      throw std::invalid_argument("SequenceParam: dim and trunc must be positive");
  }

  std::size_t dim() const { return dim_; }
  std::size_t trunc() const { return dim_ == 0 ? 0 : data_.size() / dim_; }

  double* coeff(std::size_t i) { return data_.data() + (i - 1) * dim_; }
  const double* coeff(std::size_t i) const { return data_.data() + (i - 1) * dim_; }

  double& at(std::size_t i, std::size_t j) { return data_[(i - 1) * dim_ + j]; }
  double at(std::size_t i, std::size_t j) const { return data_[(i - 1) * dim_ + j]; }

  bool operator==(const SequenceParam& o) const {
    return dim_ == o.dim_ && data_ == o.data_;
  }

private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Smoothness beta plus a positive definite weight matrix Q; the ellipsoid is
/// sum_i a_{beta,i}^2 theta_i^T Q^{-1} theta_i <= 1.
struct EllipsoidSpec {
  EllipsoidSpec(double beta_in, SymMatrix q_in);
  double beta;
  SymMatrix q;
};

/// Samples of a p-vector function on a grid in [0,1].
struct SampledFunction {
  std::vector<double> grid;
  std::vector<std::vector<double>> values;  // values[k] = f(grid[k])
};

/// Ellipsoid coefficient a_{beta,i}: i^beta for even i, (i-1)^beta for odd i
/// (so a_1 = 0 and the coefficients come in equal consecutive pairs).
double sobolev_coeff(double beta, std::size_t i);

/// sum_{i<=N} a_{beta,i}^2 theta_i^T Q^{-1} theta_i. Membership in the
/// ellipsoid is value <= 1.
double ellipsoid_norm(const SequenceParam& theta, const EllipsoidSpec& spec);

/// Draw theta_i ~ N_p(0, 12 pi^-2 p^-1 b_{beta,i}^2 Q) independently, with
/// b_{beta,1} = 0 and b_{beta,i} = i^{-beta-1} (even), (i-1)^{-beta-1} (odd).
/// The realized ellipsoid norm concentrates near 1 for large N (its standard
/// deviation stays Theta(1) in N, about 0.44 at p=2). `stream` selects an
/// independent draw for the same seed.
SequenceParam sample_near_boundary(const EllipsoidSpec& spec, std::size_t n,
                                   std::uint64_t seed,
                                   std::uint64_t stream = stream_id(StreamKind::kBoundarySampler, 0, 0));

/// Trigonometric basis of L2[0,1]: phi_1 = 1, phi_{2k} = sqrt(2) cos(2 pi k x),
/// phi_{2k+1} = sqrt(2) sin(2 pi k x).
double fourier_basis(std::size_t i, double x);

/// Partial-sum synthesis f_j(x) = sum_{i<=N} theta_{ij} phi_i(x) on a strictly
/// increasing grid within [0,1].
SampledFunction synthesize(const SequenceParam& theta, const std::vector<double>& grid);

/// y_i = theta_i + epsilon * xi_i with xi_i independent standard p-variate
/// Gaussian; deterministic given (seed, stream).
SequenceParam simulate_observation(const SequenceParam& theta, NoiseLevel eps,
                                   std::uint64_t seed,
                                   std::uint64_t stream = stream_id(StreamKind::kObservation, 0, 0));

/// Numeric check that the smoothness seminorm of the synthesized function
/// matches its coefficient-side expression: returns
///   lhs = integral of f^(beta)(x)^T L^-2 f^(beta)(x) dx  (midpoint rule,
///         termwise-differentiated series),
///   rhs = pi^{2 beta} * sum_i a_{beta,i}^2 theta_i^T (L^2)^{-1} theta_i.
/// beta must be a positive integer.
std::pair<double, double> sobolev_seminorm_check(const SequenceParam& theta,
                                                 double beta, const SymMatrix& l,
                                                 std::size_t quad_points = 100000);

}  // namespace svshrink
