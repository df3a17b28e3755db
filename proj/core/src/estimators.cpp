#include "svshrink/estimators.hpp"

#include <cmath>
#include <string>

namespace svshrink {

namespace {

void require_finite(const Matrix& m, const char* who) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!std::isfinite(m(i, j)))
        throw std::invalid_argument(std::string(who) + ": non-finite entry");
}

void require_noise(double noise_var, const char* who) {
  if (!(noise_var > 0.0))
    throw std::invalid_argument(std::string(who) + ": noise_var must be positive");
}

// Gram matrix of the rows y_i, i in [first, last], accumulated in ascending
// index order (the order matters for bitwise p=1 reproducibility).
SymMatrix block_gram(const SequenceParam& y, std::size_t first, std::size_t last) {
  const std::size_t p = y.dim();
  Matrix g(p, p);
  for (std::size_t i = first; i <= last; ++i) {
    const double* t = y.coeff(i);
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t c = 0; c < p; ++c) g(r, c) += t[r] * t[c];
  }
  return SymMatrix::from_symmetric_parts(std::move(g));
}

void require_partition(const SequenceParam& y, const BlockPartition& part,
                       const char* who) {
  if (!part.valid())
    throw std::invalid_argument(std::string(who) + ": invalid partition");
  if (part.n != y.trunc())
    throw std::invalid_argument(std::string(who) +
                                ": partition does not cover the observation");
}

}  // namespace

std::vector<double> james_stein(const std::vector<double>& x, double noise_var,
                                ShrinkMode mode) {
  require_noise(noise_var, "james_stein");
  const std::size_t n = x.size();
  if (n < 3) return x;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) ss += x[i] * x[i];
  if (ss == 0.0) return x;
  double factor = 1.0 - noise_var * static_cast<double>(n - 2) / ss;
  if (mode == ShrinkMode::positive_part && factor < 0.0) factor = 0.0;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = factor * x[i];
  return out;
}

MeanMatrix efron_morris(const MeanMatrix& x, double noise_var, ShrinkMode mode) {
  require_noise(noise_var, "efron_morris");
  require_finite(x, "efron_morris");
  const std::size_t n = x.rows(), p = x.cols();
  if (p == 0) throw std::invalid_argument("efron_morris: empty matrix");
  if (n < p + 2)
    throw std::invalid_argument("efron_morris: requires n - p - 1 > 0");

  Matrix w(p, p);
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t c = 0; c < p; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += x(k, r) * x(k, c);
      w(r, c) = s;
    }
  const SpectralDecomp dec = sym_eig(SymMatrix::from_symmetric_parts(std::move(w)));
  if (dec.min_value() <= dec.max_value() * 1e-12)
    throw degenerate_input_error(
        "efron_morris: X^T X numerically singular (eigenvalue range " +
        std::to_string(dec.min_value()) + " .. " + std::to_string(dec.max_value()) +
        ")");

  const double c = noise_var * static_cast<double>(n - p - 1);
  std::vector<double> factors(p);
  for (std::size_t k = 0; k < p; ++k) {
    double f = 1.0 - c / dec.values[k];
    if (mode == ShrinkMode::positive_part && f < 0.0) f = 0.0;
    factors[k] = f;
  }
  return x * dec.assemble(factors).mat();
}

SymMatrix linear_oracle_coeff(const MeanMatrix& m, double noise_var) {
  require_noise(noise_var, "linear_oracle_coeff");
  require_finite(m, "linear_oracle_coeff");
  const std::size_t n = m.rows(), p = m.cols();
  const Matrix w = transpose(m) * m;
  const SpectralDecomp dec = sym_eig(SymMatrix::from_symmetric_parts(w));
  const double c = static_cast<double>(n) * noise_var;
  std::vector<double> f(p);
  for (std::size_t k = 0; k < p; ++k) {
    const double lam = std::max(0.0, dec.values[k]);
    f[k] = lam / (lam + c);
  }
  return dec.assemble(f);
}

SymMatrix oracle_risk(const MeanMatrix& m, double noise_var) {
  require_noise(noise_var, "oracle_risk");
  require_finite(m, "oracle_risk");
  const std::size_t n = m.rows(), p = m.cols();
  const Matrix w = transpose(m) * m;
  const SpectralDecomp dec = sym_eig(SymMatrix::from_symmetric_parts(w));
  const double c = static_cast<double>(n) * noise_var;
  std::vector<double> f(p);
  for (std::size_t k = 0; k < p; ++k) {
    const double lam = std::max(0.0, dec.values[k]);
    f[k] = c * lam / (lam + c);
  }
  return dec.assemble(f);
}

SequenceParam blockwise_js(const SequenceParam& y, NoiseLevel eps,
                           const BlockPartition& part) {
  if (y.dim() != 1)
    throw std::invalid_argument("blockwise_js: requires p = 1");
  require_partition(y, part, "blockwise_js");
  const double nv = eps.epsilon * eps.epsilon;
  SequenceParam out = y;
  for (std::size_t j = 0; j < part.block_count(); ++j) {
    const std::size_t m = part.block_size(j);
    if (m < 3) continue;
    const std::size_t first = part.block_begin(j), last = part.block_end(j);
    double ss = 0.0;
    for (std::size_t i = first; i <= last; ++i) ss += y.at(i, 0) * y.at(i, 0);
    if (ss == 0.0)
      throw degenerate_input_error("blockwise_js: zero-norm block " +
                                   std::to_string(j + 1));
    const double factor = 1.0 - nv * static_cast<double>(m - 2) / ss;
    for (std::size_t i = first; i <= last; ++i) out.at(i, 0) = factor * y.at(i, 0);
  }
  return out;
}

SequenceParam blockwise_em(const SequenceParam& y, NoiseLevel eps,
                           const BlockPartition& part) {
  const std::size_t p = y.dim();
  require_partition(y, part, "blockwise_em");
  const double nv = eps.epsilon * eps.epsilon;
  SequenceParam out = y;
  std::vector<double> f(p);
  for (std::size_t j = 0; j < part.block_count(); ++j) {
    const std::size_t m = part.block_size(j);
    if (m < p + 2) continue;
    const std::size_t first = part.block_begin(j), last = part.block_end(j);
    const SpectralDecomp dec = sym_eig(block_gram(y, first, last));
    if (dec.min_value() <= dec.max_value() * 1e-12)
      throw degenerate_input_error(
          "blockwise_em: singular Gram matrix in block " + std::to_string(j + 1) +
          " (indices " + std::to_string(first) + ".." + std::to_string(last) + ")");
    const double c = nv * static_cast<double>(m - p - 1);
    for (std::size_t k = 0; k < p; ++k) f[k] = 1.0 - c / dec.values[k];
    const SymMatrix shrink = dec.assemble(f);
    for (std::size_t i = first; i <= last; ++i) {
      const double* yi = y.coeff(i);
      double* oi = out.coeff(i);
      for (std::size_t r = 0; r < p; ++r) {
        double v = 0.0;
        for (std::size_t c2 = 0; c2 < p; ++c2) v += shrink(r, c2) * yi[c2];
        oi[r] = v;
      }
    }
  }
  return out;
}

}  // namespace svshrink
