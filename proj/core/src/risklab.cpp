#include "svshrink/risklab.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "svshrink/rng.hpp"

namespace svshrink {

std::size_t worker_count() {
  if (const char* env = std::getenv("SVSHRINK_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (env[0] == '\0' || end == nullptr || *end != '\0' || v < 1 || v > 4096) {
      throw std::invalid_argument(
          "SVSHRINK_WORKERS must be an integer in [1, 4096]");
    }
    return static_cast<std::size_t>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

namespace {

// Replicates are processed in fixed leaves of this many; each leaf lands in
// its own slot and the slots are folded by a fixed pairwise tree, so the sum
// is a pure function of (seed, reps) whatever the worker count or schedule.
constexpr std::uint64_t kLeafSize = 1024;

template <class Accum, class Fn>
Accum parallel_reduce(std::uint64_t reps, const Accum& zero, const Fn& fn) {
  if (reps == 0) throw std::invalid_argument("monte carlo: reps must be >= 1");
  const std::uint64_t leaves = (reps + kLeafSize - 1) / kLeafSize;
  std::vector<Accum> slots(static_cast<std::size_t>(leaves), zero);
  std::atomic<std::uint64_t> next{0};
  std::mutex error_mu;
  std::exception_ptr error;

  const auto drain = [&] {
    try {
      for (;;) {
        const std::uint64_t k = next.fetch_add(1, std::memory_order_relaxed);
        if (k >= leaves) return;
        Accum acc = zero;
        const std::uint64_t lo = k * kLeafSize;
        const std::uint64_t hi = std::min(reps, lo + kLeafSize);
        for (std::uint64_t r = lo; r < hi; ++r) fn(acc, r);
        slots[static_cast<std::size_t>(k)] = std::move(acc);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
      next.store(leaves, std::memory_order_relaxed);  // stop claiming leaves
    }
  };

  const std::uint64_t nw64 = std::min<std::uint64_t>(worker_count(), leaves);
  const std::size_t nw = static_cast<std::size_t>(nw64);
  if (nw <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (std::size_t w = 0; w < nw; ++w) pool.emplace_back(drain);
    for (std::thread& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  const std::function<Accum(std::uint64_t, std::uint64_t)> fold =
      [&](std::uint64_t lo, std::uint64_t hi) -> Accum {
    if (hi - lo == 1) return std::move(slots[static_cast<std::size_t>(lo)]);
    const std::uint64_t mid = lo + (hi - lo) / 2;
    Accum left = fold(lo, mid);
    left.merge(fold(mid, hi));
    return left;
  };
  return fold(0, leaves);
}

// Sums and squared sums for a fixed set of scalar statistics.
struct VecAccum {
  std::vector<double> sum, sumsq;
  explicit VecAccum(std::size_t k) : sum(k, 0.0), sumsq(k, 0.0) {}
  void add(std::size_t j, double v) {
    sum[j] += v;
    sumsq[j] += v * v;
  }
  void merge(const VecAccum& o) {
    for (std::size_t j = 0; j < sum.size(); ++j) {
      sum[j] += o.sum[j];
      sumsq[j] += o.sumsq[j];
    }
  }
};

double mean_of(const VecAccum& a, std::size_t j, std::uint64_t reps) {
  return a.sum[j] / static_cast<double>(reps);
}

// Standard error of the mean from sums and squared sums.
double se_of(const VecAccum& a, std::size_t j, std::uint64_t reps) {
  if (reps < 2) return 0.0;
  const double n = static_cast<double>(reps);
  const double m = a.sum[j] / n;
  const double var = std::max(0.0, (a.sumsq[j] - n * m * m) / (n - 1.0));
  return std::sqrt(var / n);
}

// Entrywise sums and squared sums of a p x p matrix statistic.
struct MatAccum {
  Matrix sum, sumsq;
  explicit MatAccum(std::size_t p) : sum(p, p), sumsq(p, p) {}
  void add(const Matrix& g) {
    for (std::size_t i = 0; i < sum.rows(); ++i) {
      for (std::size_t j = 0; j < sum.cols(); ++j) {
        const double v = g(i, j);
        sum(i, j) += v;
        sumsq(i, j) += v * v;
      }
    }
  }
  void merge(const MatAccum& o) {
    for (std::size_t i = 0; i < sum.rows(); ++i) {
      for (std::size_t j = 0; j < sum.cols(); ++j) {
        sum(i, j) += o.sum(i, j);
        sumsq(i, j) += o.sumsq(i, j);
      }
    }
  }
};

Matrix draw_matrix_observation(const MeanMatrix& mean, double sd,
                               GaussianStream& g) {
  Matrix x = mean;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) += sd * g.next();
  }
  return x;
}

Matrix james_stein_matrix(const Matrix& x, double noise_var) {
  const double k = static_cast<double>(x.rows() * x.cols());
  double ss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) ss += x(i, j) * x(i, j);
  }
  if (k < 3.0 || ss == 0.0) return x;
  const double factor = 1.0 - noise_var * (k - 2.0) / ss;
  Matrix out = x;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) *= factor;
  }
  return out;
}

Matrix apply_matrix_estimator(MatrixEstimator kind, const Matrix& x,
                              double noise_var, const SymMatrix* oracle) {
  switch (kind) {
    case MatrixEstimator::kMaxLikelihood:
      return x;
    case MatrixEstimator::kEfronMorris:
      return efron_morris(x, noise_var);
    case MatrixEstimator::kJamesSteinVec:
      return james_stein_matrix(x, noise_var);
    case MatrixEstimator::kLinearOracle:
      return x * oracle->mat();
  }
  throw std::invalid_argument("unknown matrix estimator");
}

// G = (Mhat - M)^T (Mhat - M); exactly symmetric entry by entry.
Matrix loss_gram(const Matrix& est, const Matrix& mean) {
  const std::size_t n = est.rows(), p = est.cols();
  Matrix g(p, p);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < p; ++i) {
      const double di = est(r, i) - mean(r, i);
      for (std::size_t j = 0; j < p; ++j) {
        g(i, j) += di * (est(r, j) - mean(r, j));
      }
    }
  }
  return g;
}

double frobenius_sq_diff(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double d = a(i, j) - b(i, j);
      s += d * d;
    }
  }
  return s;
}

double trace_prod(const SymMatrix& q, const SymMatrix& s) {  // tr(Q S)
  double t = 0.0;
  for (std::size_t i = 0; i < q.dim(); ++i) {
    for (std::size_t j = 0; j < q.dim(); ++j) t += q(i, j) * s(j, i);
  }
  return t;
}

void require_reps(std::uint64_t reps, std::uint64_t floor, const char* where) {
  if (reps < floor) {
    throw std::invalid_argument(std::string(where) + ": reps must be >= " +
                                std::to_string(floor));
  }
}

}  // namespace

MatrixRiskReport mc_matrix_risk(MatrixEstimator kind, const MeanMatrix& mean,
                                double noise_var, std::uint64_t reps,
                                std::uint64_t seed, std::uint64_t point) {
  require_reps(reps, 100, "mc_matrix_risk");
  const std::size_t n = mean.rows(), p = mean.cols();
  if (n == 0 || p == 0) {
    throw std::invalid_argument("mc_matrix_risk: empty mean matrix");
  }
  if (!(noise_var > 0.0) || !std::isfinite(noise_var)) {
    throw std::invalid_argument("mc_matrix_risk: noise_var must be positive");
  }
  if (kind == MatrixEstimator::kEfronMorris && n < p + 2) {
    throw std::invalid_argument("mc_matrix_risk: Efron-Morris needs n >= p+2");
  }

  SymMatrix oracle;
  if (kind == MatrixEstimator::kLinearOracle) {
    oracle = linear_oracle_coeff(mean, noise_var);
  }
  const double sd = std::sqrt(noise_var);

  const MatAccum acc = parallel_reduce(
      reps, MatAccum(p), [&](MatAccum& a, std::uint64_t r) {
        GaussianStream g(seed, stream_id(StreamKind::kMatrixRisk, point, r));
        const Matrix x = draw_matrix_observation(mean, sd, g);
        const Matrix est = apply_matrix_estimator(kind, x, noise_var, &oracle);
        a.add(loss_gram(est, mean));
      });

  const double nr = static_cast<double>(reps);
  Matrix m(p, p), se(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const double mu = acc.sum(i, j) / nr;
      const double var =
          std::max(0.0, (acc.sumsq(i, j) - nr * mu * mu) / (nr - 1.0));
      m(i, j) = mu;
      se(i, j) = std::sqrt(var / nr);
    }
  }
  MatrixRiskReport out;
  out.estimate = SymMatrix::from_symmetric_parts(m);
  out.std_err = SymMatrix::from_symmetric_parts(se);
  out.reps = reps;
  out.seed = seed;
  return out;
}

MeanMatrix embed_singulars(std::size_t n, std::size_t p,
                           const std::vector<double>& sigmas) {
  if (sigmas.size() != p) {
    throw std::invalid_argument("embed_singulars: need exactly p singular values");
  }
  if (n < p) throw std::invalid_argument("embed_singulars: need n >= p");
  MeanMatrix m(n, p);
  for (std::size_t j = 0; j < p; ++j) {
    if (!(sigmas[j] >= 0.0)) {
      throw std::invalid_argument("embed_singulars: singular values must be >= 0");
    }
    m(j, j) = sigmas[j];
  }
  return m;
}

namespace {

// Monte Carlo point of a fig1-style sweep: Efron-Morris and flattened
// James-Stein losses on common draws.
void em_js_point(std::size_t n, std::size_t p, const std::vector<double>& sigmas,
                 double noise_var, std::uint64_t reps, std::uint64_t seed,
                 std::uint64_t point, double out_mean[2], double out_se[2]) {
  const MeanMatrix mean = embed_singulars(n, p, sigmas);
  const double sd = std::sqrt(noise_var);
  const VecAccum acc = parallel_reduce(
      reps, VecAccum(2), [&](VecAccum& a, std::uint64_t r) {
        GaussianStream g(seed, stream_id(StreamKind::kMatrixRisk, point, r));
        const Matrix x = draw_matrix_observation(mean, sd, g);
        a.add(0, frobenius_sq_diff(efron_morris(x, noise_var), mean));
        a.add(1, frobenius_sq_diff(james_stein_matrix(x, noise_var), mean));
      });
  for (std::size_t c = 0; c < 2; ++c) {
    out_mean[c] = mean_of(acc, c, reps);
    out_se[c] = se_of(acc, c, reps);
  }
}

SweepResult common_sigma_sweep(const std::string& label, std::size_t n,
                               std::size_t p, double noise_var,
                               const std::vector<double>& axis,
                               std::uint64_t reps, std::uint64_t seed) {
  SweepResult out;
  out.label = label;
  out.n = n;
  out.p = p;
  out.noise_var = noise_var;
  out.axis = axis;
  out.reps = reps;
  out.seed = seed;
  SweepColumn em{"em", {}, {}, true};
  SweepColumn bound{"bound", {}, {}, false};
  SweepColumn conjecture{"conjecture", {}, {}, false};
  const double sd = std::sqrt(noise_var);
  for (std::size_t k = 0; k < axis.size(); ++k) {
    const std::vector<double> sigmas(p, axis[k]);
    const MeanMatrix mean = embed_singulars(n, p, sigmas);
    const VecAccum acc = parallel_reduce(
        reps, VecAccum(1), [&](VecAccum& a, std::uint64_t r) {
          GaussianStream g(seed, stream_id(StreamKind::kMatrixRisk, k, r));
          const Matrix x = draw_matrix_observation(mean, sd, g);
          a.add(0, frobenius_sq_diff(efron_morris(x, noise_var), mean));
        });
    em.values.push_back(mean_of(acc, 0, reps));
    em.std_errs.push_back(se_of(acc, 0, reps));
    const double oracle_tr = oracle_risk(mean, noise_var).trace();
    const double pp1 = static_cast<double>(p) * static_cast<double>(p + 1);
    bound.values.push_back(oracle_tr + 2.0 * pp1 * noise_var);
    bound.std_errs.push_back(0.0);
    conjecture.values.push_back(oracle_tr + pp1 * noise_var);
    conjecture.std_errs.push_back(0.0);
  }
  out.columns = {std::move(em), std::move(bound), std::move(conjecture)};
  return out;
}

std::vector<double> unit_axis_0_20() {
  std::vector<double> axis(21);
  for (std::size_t k = 0; k < axis.size(); ++k) axis[k] = static_cast<double>(k);
  return axis;
}

}  // namespace

SweepResult figure_em_sweep(const std::string& preset, std::uint64_t reps,
                            std::uint64_t seed) {
  require_reps(reps, 100, "figure_em_sweep");
  const std::vector<double> axis = unit_axis_0_20();
  if (preset == "fig2-left" || preset == "fig2-right") {
    const std::size_t n = preset == "fig2-left" ? 10 : 100;
    return common_sigma_sweep(preset, n, 5, 1.0, axis, reps, seed);
  }
  if (preset != "fig1-left" && preset != "fig1-right") {
    throw std::invalid_argument("figure_em_sweep: unknown preset " + preset);
  }

  const bool left = preset == "fig1-left";
  SweepResult out;
  out.label = preset;
  out.n = 10;
  out.p = 3;
  out.noise_var = 1.0;
  out.axis = axis;
  out.reps = reps;
  out.seed = seed;
  SweepColumn em{"em", {}, {}, true};
  SweepColumn js{"js", {}, {}, true};
  for (std::size_t k = 0; k < axis.size(); ++k) {
    // left panel: sigma = (20, x, 0); right panel: sigma = (x, 0, 0)
    const std::vector<double> sigmas =
        left ? std::vector<double>{20.0, axis[k], 0.0}
             : std::vector<double>{axis[k], 0.0, 0.0};
    double m[2], se[2];
    em_js_point(out.n, out.p, sigmas, out.noise_var, reps, seed, k, m, se);
    em.values.push_back(m[0]);
    em.std_errs.push_back(se[0]);
    js.values.push_back(m[1]);
    js.std_errs.push_back(se[1]);
  }
  out.columns = {std::move(em), std::move(js)};
  return out;
}

SweepResult custom_em_sweep(std::size_t n, std::size_t p, double noise_var,
                            const std::vector<double>& sigmas,
                            std::uint64_t reps, std::uint64_t seed) {
  require_reps(reps, 100, "custom_em_sweep");
  if (n < p + 2) {
    throw std::invalid_argument("custom_em_sweep: need n >= p+2");
  }
  if (!(noise_var > 0.0) || !std::isfinite(noise_var)) {
    throw std::invalid_argument("custom_em_sweep: noise_var must be positive");
  }
  if (sigmas.empty()) {
    throw std::invalid_argument("custom_em_sweep: empty sigma axis");
  }
  return common_sigma_sweep("custom", n, p, noise_var, sigmas, reps, seed);
}

OracleGapReport oracle_gap_scan(std::size_t n, std::size_t p, double noise_var,
                                const std::vector<std::vector<double>>& sigma_patterns,
                                const std::vector<SymMatrix>& qs,
                                std::uint64_t reps, std::uint64_t seed) {
  if (sigma_patterns.empty()) {
    throw std::invalid_argument("oracle_gap_scan: no singular-value patterns");
  }
  for (const SymMatrix& q : qs) {
    if (q.dim() != p) {
      throw std::invalid_argument("oracle_gap_scan: loss matrix dimension mismatch");
    }
  }

  OracleGapReport report;
  report.n = n;
  report.p = p;
  report.noise_var = noise_var;
  report.all_ok = true;
  const double two_p1 = 2.0 * static_cast<double>(p + 1) * noise_var;

  for (std::size_t k = 0; k < sigma_patterns.size(); ++k) {
    const MeanMatrix mean = embed_singulars(n, p, sigma_patterns[k]);
    const MatrixRiskReport mc = mc_matrix_risk(MatrixEstimator::kEfronMorris,
                                               mean, noise_var, reps, seed, k);
    const SymMatrix oracle = oracle_risk(mean, noise_var);

    OracleGapEntry entry;
    entry.sigmas = sigma_patterns[k];
    entry.risk = mc.estimate;
    entry.std_err = mc.std_err;

    Matrix bound = oracle.mat();
    Matrix conjecture = oracle.mat();
    for (std::size_t j = 0; j < p; ++j) {
      bound(j, j) += two_p1;
      conjecture(j, j) += 0.5 * two_p1;
    }
    const SymMatrix bound_sym = SymMatrix::from_symmetric_parts(bound);
    const double slack = 3.0 * frobenius(mc.std_err.mat());
    entry.loewner_ok = loewner_leq(mc.estimate, bound_sym, slack);
    entry.loewner_margin =
        sym_eig(SymMatrix::from_symmetric_parts(bound - mc.estimate.mat()))
            .min_value();
    entry.conjecture_margin =
        sym_eig(SymMatrix::from_symmetric_parts(conjecture - mc.estimate.mat()))
            .min_value();
    report.all_ok = report.all_ok && entry.loewner_ok;

    for (const SymMatrix& q : qs) {
      const double rhs = trace_prod(q, oracle) + two_p1 * q.trace();
      const double lhs = trace_prod(q, mc.estimate);
      double q_slack = 0.0;
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
          q_slack += std::abs(q(i, j)) * mc.std_err(j, i);
        }
      }
      const double margin = rhs - lhs;
      const bool ok = margin >= -3.0 * q_slack;
      entry.trace_margins.push_back(margin);
      entry.trace_ok.push_back(ok);
      report.all_ok = report.all_ok && ok;
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

SequenceEstimatorSpec bem_spec(BlockPartition part) {
  SequenceEstimatorSpec s;
  s.kind = SequenceEstimator::kBlockwiseEm;
  s.part = std::move(part);
  return s;
}

SequenceEstimatorSpec bjs_spec(BlockPartition part) {
  SequenceEstimatorSpec s;
  s.kind = SequenceEstimator::kBlockwiseJs;
  s.part = std::move(part);
  return s;
}

SequenceEstimatorSpec linear_spec(std::vector<SymMatrix> coeffs) {
  SequenceEstimatorSpec s;
  s.kind = SequenceEstimator::kLinear;
  s.coeffs = std::move(coeffs);
  return s;
}

SequenceEstimatorSpec zero_spec() { return SequenceEstimatorSpec{}; }

SequenceEstimatorSpec truncation_spec(std::size_t trunc) {
  SequenceEstimatorSpec s;
  s.kind = SequenceEstimator::kTruncatedIdentity;
  s.trunc = trunc;
  return s;
}

namespace {

SequenceParam apply_sequence_estimator(const SequenceEstimatorSpec& est,
                                       const SequenceParam& y, NoiseLevel eps) {
  switch (est.kind) {
    case SequenceEstimator::kBlockwiseEm:
      return blockwise_em(y, eps, *est.part);
    case SequenceEstimator::kBlockwiseJs:
      return blockwise_js(y, eps, *est.part);
    case SequenceEstimator::kLinear: {
      const std::size_t p = y.dim();
      SequenceParam out(p, y.trunc());
      for (std::size_t i = 1; i <= est.coeffs.size() && i <= y.trunc(); ++i) {
        const SymMatrix& c = est.coeffs[i - 1];
        for (std::size_t k = 0; k < p; ++k) {
          double acc = 0.0;
          for (std::size_t l = 0; l < p; ++l) acc += c(k, l) * y.at(i, l);
          out.at(i, k) = acc;
        }
      }
      return out;
    }
    case SequenceEstimator::kTruncatedIdentity:
      return y;
    case SequenceEstimator::kZero:
      return SequenceParam(y.dim(), y.trunc());
  }
  throw std::invalid_argument("unknown sequence estimator");
}

std::size_t estimator_reach(const SequenceEstimatorSpec& est, std::size_t p) {
  switch (est.kind) {
    case SequenceEstimator::kBlockwiseEm:
    case SequenceEstimator::kBlockwiseJs:
      if (!est.part || !est.part->valid()) {
        throw std::invalid_argument("sequence_risk_mc: missing or invalid block partition");
      }
      if (est.kind == SequenceEstimator::kBlockwiseJs && p != 1) {
        throw std::invalid_argument("sequence_risk_mc: blockwise JS needs p = 1");
      }
      return est.part->n;
    case SequenceEstimator::kLinear:
      for (const SymMatrix& c : est.coeffs) {
        if (c.dim() != p) {
          throw std::invalid_argument("sequence_risk_mc: coefficient dimension mismatch");
        }
      }
      return est.coeffs.size();
    case SequenceEstimator::kTruncatedIdentity:
      return est.trunc;
    case SequenceEstimator::kZero:
      return 0;
  }
  throw std::invalid_argument("unknown sequence estimator");
}

}  // namespace

ScalarRiskReport sequence_risk_mc(const SequenceEstimatorSpec& est,
                                  const SequenceParam& theta, NoiseLevel eps,
                                  const SymMatrix& qloss, std::uint64_t reps,
                                  std::uint64_t seed, std::uint64_t point) {
  const std::size_t p = theta.dim();
  if (p == 0) throw std::invalid_argument("sequence_risk_mc: empty theta");
  if (qloss.dim() != p) {
    throw std::invalid_argument("sequence_risk_mc: loss dimension mismatch");
  }
  const std::size_t reach = estimator_reach(est, p);

  // Beyond the estimator's reach theta_hat is zero, so that part of the risk
  // is the deterministic tail bias.
  double tail = 0.0;
  for (std::size_t i = reach + 1; i <= theta.trunc(); ++i) {
    for (std::size_t k = 0; k < p; ++k) {
      for (std::size_t l = 0; l < p; ++l) {
        tail += theta.at(i, k) * qloss(k, l) * theta.at(i, l);
      }
    }
  }
  if (reach == 0) return {tail, 0.0, reps, seed};
  require_reps(reps, 2, "sequence_risk_mc");

  SequenceParam head(p, reach);
  const std::size_t copy_to = std::min(reach, theta.trunc());
  for (std::size_t i = 1; i <= copy_to; ++i) {
    for (std::size_t k = 0; k < p; ++k) head.at(i, k) = theta.at(i, k);
  }

  const VecAccum acc = parallel_reduce(
      reps, VecAccum(1), [&](VecAccum& a, std::uint64_t r) {
        const SequenceParam y = simulate_observation(
            head, eps, seed, stream_id(StreamKind::kObservation, point, r));
        const SequenceParam hat = apply_sequence_estimator(est, y, eps);
        double loss = 0.0;
        for (std::size_t i = 1; i <= reach; ++i) {
          for (std::size_t k = 0; k < p; ++k) {
            const double dk = hat.at(i, k) - head.at(i, k);
            for (std::size_t l = 0; l < p; ++l) {
              loss += dk * qloss(k, l) * (hat.at(i, l) - head.at(i, l));
            }
          }
        }
        a.add(0, loss);
      });

  return {mean_of(acc, 0, reps) + tail, se_of(acc, 0, reps), reps, seed};
}

namespace {

// Stream points for the adaptivity experiment, kept below 2^24 so they fit
// the point field of stream_id.
std::uint64_t adapt_theta_point(std::size_t b, std::size_t q, std::size_t d) {
  return (static_cast<std::uint64_t>(b) * 16 + q) * 1024 + d;
}

std::uint64_t adapt_obs_point(std::size_t b, std::size_t q, std::size_t e,
                              std::size_t d) {
  return ((static_cast<std::uint64_t>(b) * 16 + q) * 16 + e) * 1024 + d;
}

// Single-frequency ellipsoid boundary point in eigendirection j of Q, at the
// last sequence index the minimax rule keeps active in that direction.
SequenceParam spike_theta(double beta, const SpectralDecomp& dec, double kappa,
                          std::size_t j) {
  const double lam = dec.values[j];
  std::size_t last = 2;
  for (std::size_t i = 2; i <= 10'000'000; ++i) {
    if (!(sobolev_coeff(beta, i) * kappa < lam)) break;
    last = i;
    if (i == 10'000'000) {
      throw std::runtime_error("spike_theta: active set scan did not terminate");
    }
  }
  const std::size_t p = dec.values.size();
  SequenceParam theta(p, last);
  const double mag = std::sqrt(lam) / sobolev_coeff(beta, last);
  for (std::size_t c = 0; c < p; ++c) theta.at(last, c) = mag * dec.vectors(j, c);
  return theta;
}

}  // namespace

AdaptTable adaptivity_experiment(const std::vector<double>& betas,
                                 const std::vector<std::pair<std::string, SymMatrix>>& qs,
                                 const std::vector<double>& eps_list,
                                 std::size_t draws, std::uint64_t reps,
                                 std::uint64_t seed, bool add_spikes) {
  if (betas.empty() || qs.empty() || eps_list.empty()) {
    throw std::invalid_argument("adaptivity_experiment: empty grid");
  }
  if (betas.size() > 16 || qs.size() > 16 || eps_list.size() > 16) {
    throw std::invalid_argument("adaptivity_experiment: grid too large (max 16 per axis)");
  }
  if (draws == 0) {
    throw std::invalid_argument("adaptivity_experiment: need at least one draw");
  }
  std::size_t max_p = 0;
  for (const auto& entry : qs) max_p = std::max(max_p, entry.second.dim());
  if (draws + max_p > 1024) {
    throw std::invalid_argument("adaptivity_experiment: too many draws");
  }
  require_reps(reps, 2, "adaptivity_experiment");

  constexpr std::size_t kThetaTrunc = 20001;
  AdaptTable table;
  table.draws = draws;
  table.reps = reps;
  table.seed = seed;
  table.spikes = add_spikes;

  for (std::size_t b = 0; b < betas.size(); ++b) {
    for (std::size_t qi = 0; qi < qs.size(); ++qi) {
      const auto& [q_label, q] = qs[qi];
      const EllipsoidSpec spec(betas[b], q);
      const std::size_t p = q.dim();

      // One set of near-boundary draws per (beta, Q), reused for every eps.
      std::vector<SequenceParam> thetas;
      thetas.reserve(draws);
      for (std::size_t d = 0; d < draws; ++d) {
        thetas.push_back(sample_near_boundary(
            spec, kThetaTrunc, seed,
            stream_id(StreamKind::kBoundarySampler, adapt_theta_point(b, qi, d), 0)));
      }

      for (std::size_t e = 0; e < eps_list.size(); ++e) {
        const NoiseLevel eps(eps_list[e]);
        const BlockPartition part = weakly_geometric(eps.epsilon);
        const SequenceEstimatorSpec bem = bem_spec(part);
        const MinimaxValue mm = minimax_value_sequence(spec, eps);

        AdaptRow row;
        row.beta = betas[b];
        row.q_label = q_label;
        row.eps = eps.epsilon;
        row.trunc_n = part.n;
        row.rho = 1.0 / std::log(1.0 / eps.epsilon);
        row.blocks_j = part.block_count();
        row.first_block = part.block_size(0);

        double sup = -1.0, sup_se = 0.0;
        const auto consider = [&](const SequenceParam& theta, std::size_t d) {
          const ScalarRiskReport r =
              sequence_risk_mc(bem, theta, eps, q, reps, seed,
                               adapt_obs_point(b, qi, e, d));
          if (r.estimate > sup) {
            sup = r.estimate;
            sup_se = r.std_err;
          }
        };
        for (std::size_t d = 0; d < draws; ++d) consider(thetas[d], d);
        if (add_spikes) {
          const double kappa = solve_kappa_sequence(spec, eps);
          const SpectralDecomp dec = sym_eig(q);
          for (std::size_t j = 0; j < p; ++j) {
            consider(spike_theta(betas[b], dec, kappa, j), draws + j);
          }
        }

        row.sup_bem = sup;
        row.sup_se = sup_se;
        row.pinsker_exact = mm.exact;
        row.asymptotic = mm.asymptotic;
        row.ratio_exact = sup / mm.exact;
        row.ratio_asymp = sup / mm.asymptotic;
        row.bound_rhs =
            (1.0 + 3.0 * row.rho) * mm.exact +
            (2.0 * static_cast<double>(p + 1) * static_cast<double>(row.blocks_j) +
             static_cast<double>(row.first_block)) *
                q.trace() * eps.epsilon * eps.epsilon;
        row.bound_ok = sup <= row.bound_rhs + 3.0 * sup_se;
        table.rows.push_back(std::move(row));
      }
    }
  }
  return table;
}

SanityReport appendix_b_sanity(std::uint64_t reps, std::uint64_t seed) {
  require_reps(reps, 100, "appendix_b_sanity");

  // Fixed weight profiles for the tail-bound settings, drawn once per seed.
  CounterRng wrng(seed, stream_id(StreamKind::kGeneric, 1, 0));
  std::vector<double> b50(50), b20(20);
  for (double& b : b50) b = wrng.next_unit();
  for (double& b : b20) b = wrng.next_unit();
  const std::vector<double> b100(100, 1.0);

  struct TailSetting {
    const std::vector<double>* b;
    double t;
    std::string label;
  };
  const std::vector<double> b50sq = [&] {
    std::vector<double> v(b50.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = b50[i] * b50[i];
    return v;
  }();
  const std::array<TailSetting, 5> settings = {{
      {&b50, 0.5, "tail u50 t=0.5"},
      {&b50, 1.0, "tail u50 t=1"},
      {&b50, 2.0, "tail u50 t=2"},
      {&b20, 1.0, "tail u20 t=1"},
      {&b100, 0.5, "tail eq100 t=0.5"},
  }};

  std::array<double, 5> sum_b2{}, max_b2{};
  for (std::size_t s = 0; s < settings.size(); ++s) {
    for (double b : *settings[s].b) {
      sum_b2[s] += b * b;
      max_b2[s] = std::max(max_b2[s], b * b);
    }
  }

  // Bayes-risk settings (diagonal prior and loss).
  const std::vector<double> sigA{1.0, 1.0, 1.0}, qA{1.0, 1.0, 1.0};
  const double epsA = 1.0;
  const std::vector<double> sigB{2.0, 1.0, 0.5}, qB{5.0, 1.0, 1.0};
  const double epsB = 0.7;

  // Accumulator slots: 0-4 exceedance indicators, 5 second moment of the
  // u50-weighted sum, 6-7 posterior-mean losses.
  const VecAccum acc = parallel_reduce(
      reps, VecAccum(8), [&](VecAccum& a, std::uint64_t r) {
        GaussianStream g(seed, stream_id(StreamKind::kGeneric, 0, r));
        std::array<double, 100> z;
        for (double& v : z) v = g.next();

        double w50 = 0.0;  // sum b_i^2 X_i^2 over the 50-weight profile
        for (std::size_t i = 0; i < 50; ++i) w50 += b50sq[i] * z[i] * z[i];
        double w20 = 0.0;
        for (std::size_t i = 0; i < 20; ++i) w20 += b20[i] * b20[i] * z[i] * z[i];
        double w100 = 0.0;
        for (std::size_t i = 0; i < 100; ++i) w100 += z[i] * z[i];
        const std::array<double, 5> centered = {
            w50 - sum_b2[0], w50 - sum_b2[1], w50 - sum_b2[2],
            w20 - sum_b2[3], w100 - sum_b2[4]};
        for (std::size_t s = 0; s < 5; ++s) {
          a.add(s, centered[s] >= settings[s].t * sum_b2[s] ? 1.0 : 0.0);
        }
        a.add(5, w50 * w50);

        double lossA = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
          const double th = std::sqrt(sigA[j]) * g.next();
          const double y = th + epsA * g.next();
          const double hat = sigA[j] / (sigA[j] + epsA * epsA) * y;
          lossA += qA[j] * (hat - th) * (hat - th);
        }
        a.add(6, lossA);

        double lossB = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
          const double th = std::sqrt(sigB[j]) * g.next();
          const double y = th + epsB * g.next();
          const double hat = sigB[j] / (sigB[j] + epsB * epsB) * y;
          lossB += qB[j] * (hat - th) * (hat - th);
        }
        a.add(7, lossB);
      });

  SanityReport report;
  report.reps = reps;
  report.seed = seed;
  report.all_ok = true;
  const auto push = [&](const std::string& label, double observed,
                        double reference, double se, bool ok) {
    report.checks.push_back({label, observed, reference, se, ok});
    report.all_ok = report.all_ok && ok;
  };

  for (std::size_t s = 0; s < 5; ++s) {
    const double emp = mean_of(acc, s, reps);
    const double bound =
        std::exp(-settings[s].t * settings[s].t * sum_b2[s] / (8.0 * max_b2[s]));
    push(settings[s].label, emp, bound, se_of(acc, s, reps), emp <= bound);
  }
  {
    const double obs = mean_of(acc, 5, reps);
    const double se = se_of(acc, 5, reps);
    const double ref = 3.0 * sum_b2[0] * sum_b2[0];
    push("moment2 u50", obs, ref, se, obs <= ref + 3.0 * se);
  }
  {
    const double obs = mean_of(acc, 6, reps);
    const double se = se_of(acc, 6, reps);
    const double ref = gaussian_prior_bayes_risk(
        SymMatrix::diag(qA), SymMatrix::diag(sigA), NoiseLevel(epsA));
    push("bayes id p=3", obs, ref, se, std::abs(obs - ref) <= 3.0 * se);
  }
  {
    const double obs = mean_of(acc, 7, reps);
    const double se = se_of(acc, 7, reps);
    const double ref = gaussian_prior_bayes_risk(
        SymMatrix::diag(qB), SymMatrix::diag(sigB), NoiseLevel(epsB));
    push("bayes diag p=3", obs, ref, se, std::abs(obs - ref) <= 3.0 * se);
  }
  return report;
}

SequenceParam sample_least_favorable(const EllipsoidSpec& spec, NoiseLevel eps,
                                     double delta, std::uint64_t seed,
                                     std::uint64_t point) {
  if (!(delta > 0.0) || delta > 1.0) {
    throw std::invalid_argument("sample_least_favorable: delta must be in (0, 1]");
  }
  const double kappa = solve_kappa_sequence(spec, eps);
  const SpectralDecomp dec = sym_eig(spec.q);
  const double lam1 = dec.values.front();
  const std::size_t p = dec.values.size();

  std::size_t support = 1;
  for (std::size_t i = 2; i <= 10'000'000; ++i) {
    if (!(sobolev_coeff(spec.beta, i) * kappa < lam1)) break;
    support = i;
    if (i == 10'000'000) {
      throw std::runtime_error("sample_least_favorable: support scan did not terminate");
    }
  }

  SequenceParam theta(p, support);
  GaussianStream g(seed, stream_id(StreamKind::kPriorSampler, point, 0));
  for (std::size_t i = 2; i <= support; ++i) {
    const double ai = sobolev_coeff(spec.beta, i);
    for (std::size_t j = 0; j < p; ++j) {
      const double var = std::max(0.0, dec.values[j] - ai * kappa) / (ai * kappa);
      const double scale = delta * eps.epsilon * std::sqrt(var) * g.next();
      for (std::size_t c = 0; c < p; ++c) {
        theta.at(i, c) += scale * dec.vectors(j, c);
      }
    }
  }
  return theta;
}

}  // namespace svshrink
