#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "svshrink/linalg.hpp"

using namespace svshrink;

namespace {

Matrix make(std::size_t r, std::size_t c, std::initializer_list<double> vals) {
  Matrix m(r, c);
  std::size_t k = 0;
  for (double v : vals) m.data()[k++] = v;
  REQUIRE(k == r * c);
  return m;
}

}  // namespace

TEST_CASE("matrix arithmetic identities") {
  const Matrix a = make(2, 3, {1, 2, 3, 4, 5, 6});
  const Matrix b = make(3, 2, {7, 8, 9, 10, 11, 12});
  const Matrix ab = a * b;
  CHECK(ab(0, 0) == doctest::Approx(58.0));
  CHECK(ab(0, 1) == doctest::Approx(64.0));
  CHECK(ab(1, 0) == doctest::Approx(139.0));
  CHECK(ab(1, 1) == doctest::Approx(154.0));
  CHECK(transpose(transpose(a)) == a);
  CHECK(max_abs(a - a) == 0.0);
  CHECK(frobenius(make(1, 2, {3, 4})) == doctest::Approx(5.0));
  const Matrix i3 = Matrix::identity(3);
  CHECK(a * i3 == a);
  CHECK((2.0 * a)(1, 2) == doctest::Approx(12.0));
}

TEST_CASE("symmetric wrapper validates input") {
  Matrix bad = make(2, 2, {1, 0.5, 0.4, 1});
  CHECK_THROWS_AS(SymMatrix{bad}, std::invalid_argument);
  Matrix rect(2, 3);
  CHECK_THROWS_AS(SymMatrix{rect}, std::invalid_argument);
  // from_symmetric_parts averages the off-diagonal pair exactly
  const SymMatrix s = SymMatrix::from_symmetric_parts(bad);
  CHECK(s(0, 1) == doctest::Approx(0.45));
  CHECK(s(0, 1) == s(1, 0));
  CHECK(SymMatrix::diag({2, 3}).trace() == doctest::Approx(5.0));
}

TEST_CASE("eigendecomposition of a known 2x2") {
  // [[2,1],[1,2]] has eigenvalues 3 and 1 with eigenvectors (1,1)/sqrt2, (1,-1)/sqrt2
  const SymMatrix s(make(2, 2, {2, 1, 1, 2}));
  const SpectralDecomp dec = sym_eig(s);
  CHECK(dec.values[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(dec.values[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dec.max_value() == doctest::Approx(3.0));
  CHECK(dec.min_value() == doctest::Approx(1.0));
  // rows of `vectors` are the eigenvectors
  CHECK(std::abs(dec.vectors(0, 0)) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
  CHECK(dec.vectors(0, 0) * dec.vectors(0, 1) > 0.0);
  CHECK(dec.vectors(1, 0) * dec.vectors(1, 1) < 0.0);
  const SymMatrix back = dec.reconstruct();
  CHECK(max_abs(back.mat() - s.mat()) < 1e-12);
}

TEST_CASE("eigendecomposition handles larger symmetric matrices") {
  const std::size_t p = 6;
  Matrix m(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      m(i, j) = 1.0 / static_cast<double>(i + j + 1);  // Hilbert, SPD
    }
  }
  const SymMatrix s(m);
  const SpectralDecomp dec = sym_eig(s);
  for (std::size_t k = 1; k < p; ++k) CHECK(dec.values[k - 1] >= dec.values[k]);
  CHECK(dec.min_value() > 0.0);
  CHECK(max_abs(dec.reconstruct().mat() - s.mat()) < 1e-10);
  // eigenvector rows are orthonormal
  const Matrix vvt = dec.vectors * transpose(dec.vectors);
  CHECK(max_abs(vvt - Matrix::identity(p)) < 1e-10);
}

TEST_CASE("psd projection zeroes the negative part") {
  // [[1,2],[2,1]] = 3/2 * [[1,1],[1,1]] after dropping the eigenvalue -1
  const SymMatrix s(make(2, 2, {1, 2, 2, 1}));
  const SymMatrix proj = psd_project(s);
  CHECK(proj(0, 0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(proj(0, 1) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(proj(1, 1) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(sym_eig(proj).min_value() >= -1e-12);
  // an already-psd matrix is unchanged
  const SymMatrix spd = SymMatrix(make(2, 2, {2, 1, 1, 2}));
  CHECK(max_abs(psd_project(spd).mat() - spd.mat()) < 1e-12);
}

TEST_CASE("thin svd reconstructs and is orthonormal") {
  const Matrix x = make(4, 2, {1, 2, 3, 4, 5, 6, 7, 9});
  const Svd f = svd_thin(x);
  REQUIRE(f.singulars.size() == 2);
  CHECK(f.singulars[0] >= f.singulars[1]);
  CHECK(f.singulars[1] > 0.0);
  Matrix d(2, 2);
  d(0, 0) = f.singulars[0];
  d(1, 1) = f.singulars[1];
  CHECK(max_abs(f.left * d * transpose(f.right) - x) < 1e-10);
  CHECK(max_abs(transpose(f.left) * f.left - Matrix::identity(2)) < 1e-10);
  CHECK(max_abs(transpose(f.right) * f.right - Matrix::identity(2)) < 1e-10);
}

TEST_CASE("loewner comparison") {
  const SymMatrix a = SymMatrix::diag({1, 2});
  const SymMatrix b = SymMatrix::diag({1.5, 2.5});
  CHECK(loewner_leq(a, b, 0.0));
  CHECK_FALSE(loewner_leq(b, a, 0.0));
  CHECK(loewner_leq(b, a, 0.6));  // slack absorbs the gap of 0.5
  const SymMatrix c(make(2, 2, {2, 1, 1, 2}));
  CHECK(loewner_leq(SymMatrix::diag({1, 1}), c, 1e-10));
}

TEST_CASE("matrix powers and the spd inverse") {
  const SymMatrix s(make(2, 2, {2, 1, 1, 2}));
  const SymMatrix root = mat_power(s, 0.5);
  CHECK(max_abs((root.mat() * root.mat()) - s.mat()) < 1e-10);
  const SymMatrix inv = spd_inverse(s);
  CHECK(max_abs(inv.mat() * s.mat() - Matrix::identity(2)) < 1e-10);
  CHECK(max_abs(mat_power(s, -1.0).mat() - inv.mat()) < 1e-10);
  // fractional power of a diagonal matrix is entrywise
  const SymMatrix d = mat_power(SymMatrix::diag({4, 9}), 1.5);
  CHECK(d(0, 0) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(d(1, 1) == doctest::Approx(27.0).epsilon(1e-12));
  CHECK_THROWS_AS(spd_inverse(SymMatrix::diag({1, 0})), std::domain_error);
}
