#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace svshrink {

/// Numeric failure rooted in degenerate data (singular Gram matrix, failed
/// convergence on valid input). Distinct from argument validation errors so
/// callers can map them to different exit codes.
class degenerate_input_error : public std::runtime_error {
public:
  explicit degenerate_input_error(const std::string& what)
      : std::runtime_error(what) {}
};

/// Tolerances used by the dense kernel. Defaults match the documented
/// contracts; pass a modified copy to override per call.
struct LinalgTol {
  double symmetry = 1e-12;      // |a_ij - a_ji| <= symmetry * max(1, |a_ij|)
  double jacobi_off = 1e-13;    // off-diag Frobenius < jacobi_off * ||S||_F
  int jacobi_max_sweeps = 100;
  double ortho = 1e-10;
  double sv_rank = 1e-12;       // sigma_j > sigma_1 * sv_rank recovers U column
  double pd_min = 1e-12;        // positive-definiteness threshold for powers
};

/// Dense row-major matrix. Only the small shapes used by the estimators are
/// expected (p <= ~16 columns); no attempt at cache blocking.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix transpose(const Matrix& a);
double max_abs(const Matrix& a);
double frobenius(const Matrix& a);

/// Symmetric p x p matrix. Symmetry is validated on construction; entries are
/// stored in full for simplicity.
class SymMatrix {
public:
  SymMatrix() = default;
  /// Validates |m_ij - m_ji| <= tol.symmetry * max(1, |m_ij|).
  explicit SymMatrix(Matrix m, const LinalgTol& tol = LinalgTol{});

  static SymMatrix identity(std::size_t p);
  static SymMatrix diag(const std::vector<double>& d);
  /// Trusted constructor for results that are symmetric by construction;
  /// entries are symmetrized exactly as (a_ij + a_ji)/2.
  static SymMatrix from_symmetric_parts(Matrix m);

  std::size_t dim() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& mat() const { return m_; }

  double trace() const;

private:
  Matrix m_;
};

/// Spectral decomposition S = U^T diag(values) U with the rows of `vectors`
/// holding the eigenvectors, eigenvalues sorted non-increasing.
struct SpectralDecomp {
  Matrix vectors;              // p x p orthogonal, rows are eigenvectors
  std::vector<double> values;  // sorted non-increasing

  /// U^T diag(f(values)) U, exactly symmetrized.
  SymMatrix assemble(const std::vector<double>& fvalues) const;
  SymMatrix reconstruct() const { return assemble(values); }
  double min_value() const { return values.back(); }
  double max_value() const { return values.front(); }
};

/// Thin SVD X = U diag(singulars) V^T with U n x p column-orthonormal and V
/// p x p orthogonal (columns are right singular vectors).
struct Svd {
  Matrix left;                    // n x p
  std::vector<double> singulars;  // non-negative, non-increasing
  Matrix right;                   // p x p
};

/// Cyclic Jacobi eigendecomposition for small symmetric matrices.
/// Deterministic: eigenvalues sorted descending (stable tie order) and each
/// eigenvector's largest-magnitude component made positive.
SpectralDecomp sym_eig(const SymMatrix& s, const LinalgTol& tol = LinalgTol{});

/// Projection onto the positive semidefinite cone: U^T diag(max(0,lambda)) U.
SymMatrix psd_project(const SymMatrix& s, const LinalgTol& tol = LinalgTol{});

/// Thin SVD via sym_eig of X^T X; left factor U = X V diag(1/sigma) with
/// Gram-Schmidt completion for (near-)zero singular values. Requires n >= p.
Svd svd_thin(const Matrix& x, const LinalgTol& tol = LinalgTol{});

/// True iff min eigenvalue of (B - A) >= -slack (Loewner order with slack).
bool loewner_leq(const SymMatrix& a, const SymMatrix& b, double slack,
                 const LinalgTol& tol = LinalgTol{});

/// Fractional power of a positive definite matrix: U^T diag(lambda^r) U.
SymMatrix mat_power(const SymMatrix& s, double r, const LinalgTol& tol = LinalgTol{});

/// Inverse of a positive definite matrix through its spectral decomposition.
SymMatrix spd_inverse(const SymMatrix& s, const LinalgTol& tol = LinalgTol{});

}  // namespace svshrink
