#include "svshrink/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace svshrink {

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.row(k);
      double* crow = c.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix sum: shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix difference: shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) -= b(i, j);
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) *= s;
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j)));
  return m;
}

double frobenius(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

SymMatrix::SymMatrix(Matrix m, const LinalgTol& tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols())
    throw std::invalid_argument("SymMatrix: not square");
  if (m_.rows() == 0) throw std::invalid_argument("SymMatrix: empty");
  for (std::size_t i = 0; i < m_.rows(); ++i) {
    for (std::size_t j = i + 1; j < m_.cols(); ++j) {
      const double d = std::fabs(m_(i, j) - m_(j, i));
      if (d > tol.symmetry * std::max(1.0, std::fabs(m_(i, j))))
        throw std::invalid_argument("SymMatrix: symmetry violated at (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
}

SymMatrix SymMatrix::identity(std::size_t p) {
  SymMatrix s;
  s.m_ = Matrix::identity(p);
  return s;
}

SymMatrix SymMatrix::diag(const std::vector<double>& d) {
  SymMatrix s;
  s.m_ = Matrix(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) s.m_(i, i) = d[i];
  return s;
}

SymMatrix SymMatrix::from_symmetric_parts(Matrix m) {
  SymMatrix s;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  s.m_ = std::move(m);
  return s;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) t += m_(i, i);
  return t;
}

SymMatrix SpectralDecomp::assemble(const std::vector<double>& fvalues) const {
  const std::size_t p = values.size();
  Matrix out(p, p);
  // S = sum_k f_k * u_k u_k^T with u_k the k-th row of `vectors`.
  for (std::size_t k = 0; k < p; ++k) {
    const double* u = vectors.row(k);
    const double f = fvalues[k];
    if (f == 0.0) continue;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) out(i, j) += f * u[i] * u[j];
  }
  return SymMatrix::from_symmetric_parts(std::move(out));
}

namespace {

// One cyclic Jacobi sweep over the upper triangle; A is updated in place and
// rotations are accumulated into V (columns of V are the eigenvectors).
void jacobi_sweep(Matrix& a, Matrix& v) {
  const std::size_t p = a.rows();
  for (std::size_t i = 0; i + 1 < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      const double aij = a(i, j);
      if (aij == 0.0) continue;
      const double tau = (a(j, j) - a(i, i)) / (2.0 * aij);
      const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                       (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
      const double c = 1.0 / std::sqrt(1.0 + t * t);
      const double s = t * c;
      for (std::size_t k = 0; k < p; ++k) {
        const double aki = a(k, i), akj = a(k, j);
        a(k, i) = c * aki - s * akj;
        a(k, j) = s * aki + c * akj;
      }
      for (std::size_t k = 0; k < p; ++k) {
        const double aik = a(i, k), ajk = a(j, k);
        a(i, k) = c * aik - s * ajk;
        a(j, k) = s * aik + c * ajk;
      }
      for (std::size_t k = 0; k < p; ++k) {
        const double vki = v(k, i), vkj = v(k, j);
        v(k, i) = c * vki - s * vkj;
        v(k, j) = s * vki + c * vkj;
      }
      a(i, j) = 0.0;
      a(j, i) = 0.0;
    }
  }
}

double offdiag_frobenius(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

SpectralDecomp sym_eig(const SymMatrix& s, const LinalgTol& tol) {
  const std::size_t p = s.dim();
  Matrix a = s.mat();
  Matrix v = Matrix::identity(p);
  const double scale = frobenius(a);
  if (scale > 0.0) {
    bool converged = false;
    for (int sweep = 0; sweep < tol.jacobi_max_sweeps; ++sweep) {
      if (offdiag_frobenius(a) < tol.jacobi_off * scale) {
        converged = true;
        break;
      }
      jacobi_sweep(a, v);
    }
    if (!converged && offdiag_frobenius(a) >= tol.jacobi_off * scale)
      throw degenerate_input_error("sym_eig: Jacobi did not converge");
  }

  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

  SpectralDecomp dec;
  dec.values.resize(p);
  dec.vectors = Matrix(p, p);
  for (std::size_t k = 0; k < p; ++k) {
    const std::size_t col = order[k];
    dec.values[k] = a(col, col);
    // Sign convention: largest-magnitude component positive, first such index
    // on ties, so identical inputs give identical frames.
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double m = std::fabs(v(i, col));
      if (m > best) {
        best = m;
        arg = i;
      }
    }
    const double sign = v(arg, col) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < p; ++i) dec.vectors(k, i) = sign * v(i, col);
  }
  return dec;
}

SymMatrix psd_project(const SymMatrix& s, const LinalgTol& tol) {
  SpectralDecomp dec = sym_eig(s, tol);
  std::vector<double> clipped(dec.values.size());
  for (std::size_t i = 0; i < clipped.size(); ++i)
    clipped[i] = std::max(0.0, dec.values[i]);
  return dec.assemble(clipped);
}

Svd svd_thin(const Matrix& x, const LinalgTol& tol) {
  const std::size_t n = x.rows(), p = x.cols();
  if (p == 0 || n < p) throw std::invalid_argument("svd_thin: requires n >= p >= 1");

  Matrix w(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += x(k, i) * x(k, j);
      w(i, j) = s;
      w(j, i) = s;
    }
  SpectralDecomp dec = sym_eig(SymMatrix::from_symmetric_parts(std::move(w)), tol);

  Svd out;
  out.singulars.resize(p);
  for (std::size_t j = 0; j < p; ++j)
    out.singulars[j] = std::sqrt(std::max(0.0, dec.values[j]));
  const double s1 = out.singulars.empty() ? 0.0 : out.singulars[0];

  // Right singular vectors as columns: V = (eigenvector rows)^T.
  out.right = transpose(dec.vectors);

  out.left = Matrix(n, p);
  std::vector<bool> recovered(p, false);
  for (std::size_t j = 0; j < p; ++j) {
    if (out.singulars[j] > s1 * tol.sv_rank && out.singulars[j] > 0.0) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < p; ++k) s += x(i, k) * out.right(k, j);
        out.left(i, j) = s / out.singulars[j];
      }
      recovered[j] = true;
    }
  }
  // Complete (near-)null columns by Gram-Schmidt against everything present,
  // seeding from standard basis vectors in order.
  std::size_t seed = 0;
  for (std::size_t j = 0; j < p; ++j) {
    if (recovered[j]) continue;
    while (true) {
      if (seed >= n)
        throw degenerate_input_error("svd_thin: Gram-Schmidt completion failed");
      std::vector<double> cand(n, 0.0);
      cand[seed++] = 1.0;
      for (std::size_t k = 0; k < p; ++k) {
        if (k == j || (!recovered[k] && k > j)) continue;
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += cand[i] * out.left(i, k);
        for (std::size_t i = 0; i < n; ++i) cand[i] -= dot * out.left(i, k);
      }
      double nrm = 0.0;
      for (double c : cand) nrm += c * c;
      nrm = std::sqrt(nrm);
      if (nrm > 0.5) {  // comfortably away from span of existing columns
        for (std::size_t i = 0; i < n; ++i) out.left(i, j) = cand[i] / nrm;
        recovered[j] = true;
        break;
      }
    }
  }
  return out;
}

bool loewner_leq(const SymMatrix& a, const SymMatrix& b, double slack,
                 const LinalgTol& tol) {
  if (a.dim() != b.dim()) throw std::invalid_argument("loewner_leq: dimension mismatch");
  SymMatrix diff = SymMatrix::from_symmetric_parts(b.mat() - a.mat());
  SpectralDecomp dec = sym_eig(diff, tol);
  return dec.min_value() >= -slack;
}

SymMatrix mat_power(const SymMatrix& s, double r, const LinalgTol& tol) {
  SpectralDecomp dec = sym_eig(s, tol);
  if (dec.min_value() <= tol.pd_min)
    throw std::domain_error("mat_power: matrix not positive definite");
  std::vector<double> powered(dec.values.size());
  for (std::size_t i = 0; i < powered.size(); ++i)
    powered[i] = std::pow(dec.values[i], r);
  return dec.assemble(powered);
}

SymMatrix spd_inverse(const SymMatrix& s, const LinalgTol& tol) {
  SpectralDecomp dec = sym_eig(s, tol);
  if (dec.min_value() <= tol.pd_min * std::max(1.0, dec.max_value()))
    throw std::domain_error("spd_inverse: matrix not positive definite");
  std::vector<double> inv(dec.values.size());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / dec.values[i];
  return dec.assemble(inv);
}

}  // namespace svshrink
