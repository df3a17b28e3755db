#pragma once

#include <vector>

#include "svshrink/blocks.hpp"
#include "svshrink/linalg.hpp"
#include "svshrink/sequence.hpp"

namespace svshrink {

/// Mean of a Gaussian matrix observation (and the observation itself).
using MeanMatrix = Matrix;

/// standard keeps the raw shrinkage factors, which may be negative; the
/// theory is stated for that form. positive_part clips factors at zero and is
/// provided for practical use only.
enum class ShrinkMode { standard, positive_part };

/// Shrink x by the factor 1 - (n-2) * noise_var / ||x||^2. Inputs with n < 3
/// or ||x|| = 0 are returned unchanged.
std::vector<double> james_stein(const std::vector<double>& x, double noise_var,
                                ShrinkMode mode = ShrinkMode::standard);

/// X (I_p - noise_var (n-p-1) (X^T X)^{-1}): shrinks each singular value
/// sigma_j of X to sigma_j - noise_var (n-p-1) / sigma_j while preserving the
/// singular vectors. Requires n >= p+2 and a numerically invertible X^T X
/// (min eigenvalue > max eigenvalue * 1e-12), else degenerate_input_error.
MeanMatrix efron_morris(const MeanMatrix& x, double noise_var,
                        ShrinkMode mode = ShrinkMode::standard);

/// Best linear coefficient for known mean:
/// C* = (M^T M + n noise_var I_p)^{-1} M^T M, with 0 <= C* <= I_p.
SymMatrix linear_oracle_coeff(const MeanMatrix& m, double noise_var);

/// Exact matrix quadratic risk of the oracle linear estimator X C*:
/// c I_p - c^2 (M^T M + c I_p)^{-1} with c = n * noise_var.
SymMatrix oracle_risk(const MeanMatrix& m, double noise_var);

/// Per-block James-Stein shrinkage (p = 1) with noise variance eps^2.
/// Blocks smaller than 3 pass through unchanged; a zero-norm block of size
/// >= 3 raises degenerate_input_error (probability-zero under the model).
/// Requires part.n == y.trunc().
SequenceParam blockwise_js(const SequenceParam& y, NoiseLevel eps,
                           const BlockPartition& part);

/// Per-block Efron-Morris shrinkage: block j of size m >= p+2 is treated as
/// an m x p matrix observation with noise variance eps^2; smaller blocks pass
/// through unchanged. Uses no smoothness or loss-matrix input. A numerically
/// singular block Gram matrix raises degenerate_input_error naming the block.
/// Coincides with blockwise_js when p = 1.
SequenceParam blockwise_em(const SequenceParam& y, NoiseLevel eps,
                           const BlockPartition& part);

}  // namespace svshrink
