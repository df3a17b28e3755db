#include <cmath>
#include <stdexcept>
#include <cstdlib>
#include <string>
#include <vector>

#include <doctest.h>

#include "svshrink/risklab.hpp"

using namespace svshrink;

namespace {

double sym_trace(const SymMatrix& s) { return s.trace(); }

}  // namespace

TEST_CASE("risk estimates are identical for any worker count") {
  const MeanMatrix mean = embed_singulars(10, 3, {5.0, 2.0, 0.0});
  setenv("SVSHRINK_WORKERS", "1", 1);
  const MatrixRiskReport one = mc_matrix_risk(MatrixEstimator::kEfronMorris, mean,
                                              1.0, 3000, 99);
  setenv("SVSHRINK_WORKERS", "4", 1);
  const MatrixRiskReport four = mc_matrix_risk(MatrixEstimator::kEfronMorris, mean,
                                               1.0, 3000, 99);
  unsetenv("SVSHRINK_WORKERS");
  CHECK(one.estimate.mat() == four.estimate.mat());  // bitwise
  CHECK(one.std_err.mat() == four.std_err.mat());
}

TEST_CASE("worker count env validation") {
  setenv("SVSHRINK_WORKERS", "0", 1);
  CHECK_THROWS_AS(worker_count(), std::invalid_argument);
  setenv("SVSHRINK_WORKERS", "banana", 1);
  CHECK_THROWS_AS(worker_count(), std::invalid_argument);
  setenv("SVSHRINK_WORKERS", "3", 1);
  CHECK(worker_count() == 3);
  unsetenv("SVSHRINK_WORKERS");
  CHECK(worker_count() >= 1);
}

TEST_CASE("matrix rule risk at the origin matches its exact identity") {
  // E (M-hat - M)^T (M-hat - M) = (p+1) nv I at M = 0
  const std::size_t n = 10, p = 3;
  const MeanMatrix mean(n, p);
  const MatrixRiskReport rep =
      mc_matrix_risk(MatrixEstimator::kEfronMorris, mean, 1.0, 20000, 314);
  for (std::size_t r = 0; r < p; ++r) {
    for (std::size_t c = 0; c < p; ++c) {
      const double target = r == c ? 4.0 : 0.0;
      CHECK(std::abs(rep.estimate(r, c) - target) <=
            4.0 * rep.std_err(r, c) + 1e-12);
    }
  }
}

TEST_CASE("flattened scalar shrinkage risk at the origin") {
  // shrinking an np-vector at zero leaves exactly 2 nv of trace risk
  const MeanMatrix mean(10, 3);
  const MatrixRiskReport rep =
      mc_matrix_risk(MatrixEstimator::kJamesSteinVec, mean, 1.0, 20000, 2718);
  double se_tr = 0.0;
  for (std::size_t j = 0; j < 3; ++j) se_tr += rep.std_err(j, j);
  CHECK(std::abs(sym_trace(rep.estimate) - 2.0) <= 4.0 * se_tr);
}

TEST_CASE("identity estimator risk is n nv per column") {
  const MeanMatrix mean = embed_singulars(8, 2, {3.0, 1.0});
  const MatrixRiskReport rep =
      mc_matrix_risk(MatrixEstimator::kMaxLikelihood, mean, 0.5, 20000, 11);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(std::abs(rep.estimate(j, j) - 4.0) <= 4.0 * rep.std_err(j, j));
  }
  CHECK(std::abs(rep.estimate(0, 1)) <= 4.0 * rep.std_err(0, 1) + 1e-12);
}

TEST_CASE("input validation for the monte carlo driver") {
  const MeanMatrix mean(10, 3);
  CHECK_THROWS_AS(mc_matrix_risk(MatrixEstimator::kEfronMorris, mean, 1.0, 50, 1),
                  std::invalid_argument);  // too few replicates
  CHECK_THROWS_AS(mc_matrix_risk(MatrixEstimator::kEfronMorris, MeanMatrix(4, 3),
                                 1.0, 1000, 1),
                  std::invalid_argument);  // n < p + 2
  CHECK_THROWS_AS(mc_matrix_risk(MatrixEstimator::kEfronMorris, mean, 0.0, 1000, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(embed_singulars(2, 3, {1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(embed_singulars(5, 3, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(figure_em_sweep("fig9", 1000, 1), std::invalid_argument);
}

TEST_CASE("custom sweep carries exact reference columns") {
  const SweepResult sweep = custom_em_sweep(10, 3, 1.0, {0.0, 20.0}, 5000, 77);
  REQUIRE(sweep.columns.size() == 3);
  CHECK(sweep.columns[0].name == "em");
  CHECK(sweep.columns[1].name == "bound");
  CHECK(sweep.columns[2].name == "conjecture");
  CHECK(sweep.columns[1].stochastic == false);
  // at sigma = 0 the oracle is zero: bound = 2 p (p+1) nv, conjecture = half gap
  CHECK(sweep.columns[1].values[0] == doctest::Approx(24.0).epsilon(1e-12));
  CHECK(sweep.columns[2].values[0] == doctest::Approx(12.0).epsilon(1e-12));
  // at sigma = 20 (common): oracle trace = p c 400/(400+c) with c = 10
  const double oracle = 3.0 * 10.0 * 400.0 / 410.0;
  CHECK(sweep.columns[1].values[1] == doctest::Approx(oracle + 24.0).epsilon(1e-12));
  // monte carlo column sits near its exact origin value p (p+1)
  CHECK(std::abs(sweep.columns[0].values[0] - 12.0) <=
        5.0 * sweep.columns[0].std_errs[0]);
}

TEST_CASE("oracle gap scan accepts the risk envelope") {
  const std::vector<std::vector<double>> patterns{
      {0.0, 0.0, 0.0}, {20.0, 1.0, 1.0}, {5.0, 5.0, 5.0}};
  const std::vector<SymMatrix> qs{SymMatrix::identity(3),
                                  SymMatrix::diag({5.0, 1.0, 1.0})};
  const OracleGapReport rep = oracle_gap_scan(10, 3, 1.0, patterns, qs, 8000, 5);
  CHECK(rep.entries.size() == 3);
  CHECK(rep.all_ok);
  for (const OracleGapEntry& e : rep.entries) {
    CHECK(e.loewner_ok);
    CHECK(e.loewner_margin > -1e-9);
    REQUIRE(e.trace_margins.size() == 2);
    for (bool ok : e.trace_ok) CHECK(ok);
  }
}

TEST_CASE("sequence risk driver matches exact linear risk") {
  const EllipsoidSpec spec(1.0, SymMatrix::diag({5.0, 1.0}));
  const NoiseLevel eps(0.1);
  const PinskerSolution sol = pinsker_coeffs(spec, eps);
  SequenceParam theta(2, 30);
  theta.at(2, 0) = 0.2;
  theta.at(3, 1) = -0.15;
  theta.at(9, 0) = 0.05;
  theta.at(30, 1) = 0.4;  // beyond the support: pure bias
  const double exact = linear_risk_exact(sol.coeffs, theta, eps, spec.q);
  const ScalarRiskReport rep =
      sequence_risk_mc(linear_spec(sol.coeffs), theta, eps, spec.q, 20000, 606);
  CHECK(std::abs(rep.estimate - exact) <= 4.0 * rep.std_err);
}

TEST_CASE("zero and truncation estimators have closed-form risk") {
  const SymMatrix q = SymMatrix::diag({2.0, 1.0});
  const NoiseLevel eps(0.25);
  SequenceParam theta(2, 6);
  theta.at(2, 0) = 1.0;
  theta.at(5, 1) = -0.5;
  // zero estimator: risk = sum theta^T Q theta, computed without simulation
  const ScalarRiskReport zr = sequence_risk_mc(zero_spec(), theta, eps, q, 100, 1);
  CHECK(zr.estimate == doctest::Approx(2.0 + 0.25).epsilon(1e-12));
  CHECK(zr.std_err == 0.0);
  // truncation at 3: noise on 1..3 plus bias beyond
  const ScalarRiskReport tr =
      sequence_risk_mc(truncation_spec(3), theta, eps, q, 20000, 9);
  const double exact = 3.0 * 0.0625 * 3.0 + 0.25;  // trunc eps^2 tr(Q) + tail
  CHECK(std::abs(tr.estimate - exact) <= 4.0 * tr.std_err);
}

TEST_CASE("common random numbers make risk additive across losses") {
  const NoiseLevel eps(0.2);
  const BlockPartition part = weakly_geometric(0.2);
  SequenceParam theta(2, part.n);
  for (std::size_t i = 1; i <= part.n; ++i) {
    theta.at(i, 0) = 1.0 / static_cast<double>(i * i);
    theta.at(i, 1) = 0.5 / static_cast<double>(i * i + 1);
  }
  const SymMatrix q1 = SymMatrix::diag({5.0, 1.0});
  const SymMatrix q2 = SymMatrix::diag({1.0, 2.0});
  const SymMatrix q12 = SymMatrix::diag({6.0, 3.0});
  const SequenceEstimatorSpec est = bem_spec(part);
  const ScalarRiskReport r1 = sequence_risk_mc(est, theta, eps, q1, 2000, 404);
  const ScalarRiskReport r2 = sequence_risk_mc(est, theta, eps, q2, 2000, 404);
  const ScalarRiskReport r12 = sequence_risk_mc(est, theta, eps, q12, 2000, 404);
  CHECK(r12.estimate ==
        doctest::Approx(r1.estimate + r2.estimate).epsilon(1e-12));
}

TEST_CASE("blockwise scalar path at p = 1 in the sequence driver") {
  const NoiseLevel eps(0.3);
  const BlockPartition part = weakly_geometric(0.3);
  SequenceParam theta(1, part.n);
  for (std::size_t i = 1; i <= part.n; ++i) {
    theta.at(i, 0) = 1.0 / static_cast<double>(i);
  }
  const SymMatrix q = SymMatrix::identity(1);
  const ScalarRiskReport em =
      sequence_risk_mc(bem_spec(part), theta, eps, q, 2000, 123);
  const ScalarRiskReport js =
      sequence_risk_mc(bjs_spec(part), theta, eps, q, 2000, 123);
  CHECK(em.estimate == js.estimate);  // same rule, same draws
  CHECK_THROWS_AS(sequence_risk_mc(bjs_spec(part), SequenceParam(2, part.n), eps,
                                   SymMatrix::identity(2), 2000, 1),
                  std::invalid_argument);
}

TEST_CASE("least favorable draws average to the minimax value") {
  const EllipsoidSpec spec(1.0, SymMatrix::diag({5.0, 1.0}));
  const NoiseLevel eps(0.1);
  const PinskerSolution sol = pinsker_coeffs(spec, eps);
  const MinimaxValue mv = minimax_value_sequence(spec, eps);
  const std::size_t draws = 4000;
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    const SequenceParam theta = sample_least_favorable(spec, eps, 1.0, 55, d);
    const double risk = linear_risk_exact(sol.coeffs, theta, eps, spec.q);
    sum += risk;
    sumsq += risk * risk;
  }
  const double mean = sum / draws;
  const double var = sumsq / draws - mean * mean;
  const double se = std::sqrt(var / draws);
  CHECK(std::abs(mean - mv.exact) <= 4.0 * se);
  CHECK_THROWS_AS(sample_least_favorable(spec, eps, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_least_favorable(spec, eps, 1.5, 1), std::invalid_argument);
}

TEST_CASE("appendix-style sanity battery holds at moderate replication") {
  const SanityReport rep = appendix_b_sanity(20000, 616);
  REQUIRE(rep.checks.size() == 8);
  CHECK(rep.all_ok);
  for (const SanityCheck& c : rep.checks) {
    CAPTURE(c.label);
    CHECK(c.ok);
  }
}

TEST_CASE("adaptivity experiment table structure") {
  const std::vector<std::pair<std::string, SymMatrix>> qs{
      {"identity:2", SymMatrix::identity(2)}};
  const AdaptTable table =
      adaptivity_experiment({1.0}, qs, {0.3}, 3, 200, 808, true);
  REQUIRE(table.rows.size() == 1);
  const AdaptRow& r = table.rows[0];
  CHECK(r.beta == 1.0);
  CHECK(r.q_label == "identity:2");
  CHECK(r.trunc_n == 11);  // floor(0.3^-2)
  CHECK(r.rho == doctest::Approx(1.0 / std::log(1.0 / 0.3)));
  CHECK(r.blocks_j >= 1);
  CHECK(r.sup_bem > 0.0);
  CHECK(r.ratio_exact == doctest::Approx(r.sup_bem / r.pinsker_exact));
  CHECK(r.bound_rhs > 0.0);
  const double remainder =
      (2.0 * 3.0 * static_cast<double>(r.blocks_j) +
       static_cast<double>(r.first_block)) *
      2.0 * 0.09;
  CHECK(r.bound_rhs ==
        doctest::Approx((1.0 + 3.0 * r.rho) * r.pinsker_exact + remainder));
}
