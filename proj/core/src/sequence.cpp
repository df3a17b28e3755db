#include "svshrink/sequence.hpp"

#include <cmath>

namespace svshrink {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

EllipsoidSpec::EllipsoidSpec(double beta_in, SymMatrix q_in)
    : beta(beta_in), q(std::move(q_in)) {
  if (!(beta > 0.0))
    throw std::invalid_argument("EllipsoidSpec: beta must be positive");
  if (sym_eig(q).min_value() <= 0.0)
    throw std::invalid_argument("EllipsoidSpec: Q must be positive definite");
}

double sobolev_coeff(double beta, std::size_t i) {
  if (i == 0) throw std::invalid_argument("sobolev_coeff: index starts at 1");
  const double base = static_cast<double>(i % 2 == 0 ? i : i - 1);
  return std::pow(base, beta);
}

double ellipsoid_norm(const SequenceParam& theta, const EllipsoidSpec& spec) {
  const std::size_t p = theta.dim();
  if (p != spec.q.dim())
    throw std::invalid_argument("ellipsoid_norm: dimension mismatch");
  const SymMatrix qinv = spd_inverse(spec.q);
  double total = 0.0;
  for (std::size_t i = 1; i <= theta.trunc(); ++i) {
    const double a = sobolev_coeff(spec.beta, i);
    if (a == 0.0) continue;
    const double* t = theta.coeff(i);
    double quad = 0.0;
    for (std::size_t r = 0; r < p; ++r) {
      double row = 0.0;
      for (std::size_t c = 0; c < p; ++c) row += qinv(r, c) * t[c];
      quad += t[r] * row;
    }
    total += a * a * quad;
  }
  return total;
}

SequenceParam sample_near_boundary(const EllipsoidSpec& spec, std::size_t n,
                                   std::uint64_t seed, std::uint64_t stream) {
  const std::size_t p = spec.q.dim();
  SequenceParam theta(p, n);
  const SymMatrix qhalf = mat_power(spec.q, 0.5);
  const double scale = std::sqrt(12.0 / (kPi * kPi * static_cast<double>(p)));
  GaussianStream gauss(seed, stream);
  std::vector<double> z(p);
  for (std::size_t i = 2; i <= n; ++i) {
    const double base = static_cast<double>(i % 2 == 0 ? i : i - 1);
    const double b = std::pow(base, -spec.beta - 1.0);
    const double sd = scale * b;
    for (std::size_t j = 0; j < p; ++j) z[j] = gauss.next();
    double* t = theta.coeff(i);
    for (std::size_t r = 0; r < p; ++r) {
      double v = 0.0;
      for (std::size_t c = 0; c < p; ++c) v += qhalf(r, c) * z[c];
      t[r] = sd * v;
    }
  }
  return theta;
}

double fourier_basis(std::size_t i, double x) {
  if (i == 0) throw std::invalid_argument("fourier_basis: index starts at 1");
  if (i == 1) return 1.0;
  const double k = static_cast<double>(i / 2);
  const double arg = 2.0 * kPi * k * x;
  return i % 2 == 0 ? std::sqrt(2.0) * std::cos(arg) : std::sqrt(2.0) * std::sin(arg);
}

SampledFunction synthesize(const SequenceParam& theta, const std::vector<double>& grid) {
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid[k] < 0.0 || grid[k] > 1.0)
      throw std::invalid_argument("synthesize: grid point outside [0,1]");
    if (k > 0 && grid[k] <= grid[k - 1])
      throw std::invalid_argument("synthesize: grid not strictly increasing");
  }
  const std::size_t p = theta.dim();
  const std::size_t n = theta.trunc();
  const double sqrt2 = std::sqrt(2.0);
  SampledFunction out;
  out.grid = grid;
  out.values.assign(grid.size(), std::vector<double>(p, 0.0));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double>& f = out.values[g];
    const double* t1 = theta.coeff(1);
    for (std::size_t j = 0; j < p; ++j) f[j] = t1[j];
    // cos/sin of 2 pi k x by recurrence over the frequency k.
    const double c1 = std::cos(2.0 * kPi * grid[g]);
    const double s1 = std::sin(2.0 * kPi * grid[g]);
    double ck = 1.0, sk = 0.0;
    for (std::size_t k = 1; 2 * k <= n; ++k) {
      const double cn = ck * c1 - sk * s1;
      const double sn = sk * c1 + ck * s1;
      ck = cn;
      sk = sn;
      const double* te = theta.coeff(2 * k);
      for (std::size_t j = 0; j < p; ++j) f[j] += te[j] * sqrt2 * ck;
      if (2 * k + 1 <= n) {
        const double* to = theta.coeff(2 * k + 1);
        for (std::size_t j = 0; j < p; ++j) f[j] += to[j] * sqrt2 * sk;
      }
    }
  }
  return out;
}

SequenceParam simulate_observation(const SequenceParam& theta, NoiseLevel eps,
                                   std::uint64_t seed, std::uint64_t stream) {
  SequenceParam y = theta;
  GaussianStream gauss(seed, stream);
  for (std::size_t i = 1; i <= y.trunc(); ++i) {
    double* v = y.coeff(i);
    for (std::size_t j = 0; j < y.dim(); ++j) v[j] += eps.epsilon * gauss.next();
  }
  return y;
}

std::pair<double, double> sobolev_seminorm_check(const SequenceParam& theta,
                                                 double beta, const SymMatrix& l,
                                                 std::size_t quad_points) {
  const double rounded = std::round(beta);
  if (!(beta > 0.0) || std::fabs(beta - rounded) > 0.0)
    throw std::invalid_argument("sobolev_seminorm_check: beta must be a positive integer");
  const int b = static_cast<int>(rounded);
  const std::size_t p = theta.dim();
  if (l.dim() != p)
    throw std::invalid_argument("sobolev_seminorm_check: dimension mismatch");
  const SymMatrix l2 = SymMatrix::from_symmetric_parts(l.mat() * l.mat());
  const SymMatrix l2inv = spd_inverse(l2);

  const std::size_t n = theta.trunc();
  double rhs = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double a = sobolev_coeff(beta, i);
    if (a == 0.0) continue;
    const double* t = theta.coeff(i);
    double quad = 0.0;
    for (std::size_t r = 0; r < p; ++r) {
      double row = 0.0;
      for (std::size_t c = 0; c < p; ++c) row += l2inv(r, c) * t[c];
      quad += t[r] * row;
    }
    rhs += a * a * quad;
  }
  rhs *= std::pow(kPi, 2.0 * beta);

  // Derivative coefficients: each differentiation maps the frequency-k pair
  // (c_even, c_odd) to (2 pi k) * (c_odd, -c_even).
  const std::size_t pairs = n / 2;  // frequencies with a nonzero even coefficient
  std::vector<double> ce(pairs * p, 0.0), co(pairs * p, 0.0);
  for (std::size_t m = 1; m <= pairs; ++m) {
    const double omega = 2.0 * kPi * static_cast<double>(m);
    for (std::size_t j = 0; j < p; ++j) {
      double e = theta.at(2 * m, j);
      double o = (2 * m + 1 <= n) ? theta.at(2 * m + 1, j) : 0.0;
      for (int d = 0; d < b; ++d) {
        const double en = omega * o;
        const double on = -omega * e;
        e = en;
        o = on;
      }
      ce[(m - 1) * p + j] = e;
      co[(m - 1) * p + j] = o;
    }
  }

  const double sqrt2 = std::sqrt(2.0);
  std::vector<double> f(p);
  double lhs = 0.0;
  for (std::size_t t = 0; t < quad_points; ++t) {
    const double x = (static_cast<double>(t) + 0.5) / static_cast<double>(quad_points);
    const double c1 = std::cos(2.0 * kPi * x);
    const double s1 = std::sin(2.0 * kPi * x);
    double ck = 1.0, sk = 0.0;
    for (std::size_t j = 0; j < p; ++j) f[j] = 0.0;
    for (std::size_t m = 1; m <= pairs; ++m) {
      const double cn = ck * c1 - sk * s1;
      const double sn = sk * c1 + ck * s1;
      ck = cn;
      sk = sn;
      const double* e = &ce[(m - 1) * p];
      const double* o = &co[(m - 1) * p];
      for (std::size_t j = 0; j < p; ++j) f[j] += sqrt2 * (e[j] * ck + o[j] * sk);
    }
    double quad = 0.0;
    for (std::size_t r = 0; r < p; ++r) {
      double row = 0.0;
      for (std::size_t c = 0; c < p; ++c) row += l2inv(r, c) * f[c];
      quad += f[r] * row;
    }
    lhs += quad;
  }
  lhs /= static_cast<double>(quad_points);
  return {lhs, rhs};
}

}  // namespace svshrink
