// Command-line front end: risk sweeps for the matrix estimators, minimax
// solutions on smoothness ellipsoids, near-boundary function sampling, and
// the blockwise-adaptivity experiment. All Monte Carlo output is a pure
// function of (arguments, seed); the worker count never changes results.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "svshrink/emit.hpp"
#include "svshrink/risklab.hpp"

namespace {

using namespace svshrink;

bool consume_prefix(std::string& text, const char* prefix) {
  const std::size_t len = std::string(prefix).size();
  if (text.rfind(prefix, 0) != 0) return false;
  text = text.substr(len);
  return true;
}

double parse_double(const std::string& token, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + ": bad number '" + token + "'");
  }
  if (used != token.size()) {
    throw std::invalid_argument(std::string(what) + ": bad number '" + token + "'");
  }
  return v;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(parse_double(tok, what));
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  return out;
}

// Loss/ellipsoid matrix grammar:
//   identity:P          identity of size P
//   diag:a,b,...        diagonal entries
//   file:PATH           whitespace-separated square matrix
//   a,b,...             bare numbers, shorthand for diag
SymMatrix parse_q(std::string text) {
  const std::string original = text;
  if (consume_prefix(text, "identity:")) {
    const double p = parse_double(text, "matrix size");
    if (p < 1.0 || p != std::floor(p) || p > 64.0) {
      throw std::invalid_argument("matrix: identity size must be an integer in [1, 64]");
    }
    return SymMatrix::identity(static_cast<std::size_t>(p));
  }
  if (consume_prefix(text, "diag:")) {
    return SymMatrix::diag(parse_double_list(text, "matrix diagonal"));
  }
  if (consume_prefix(text, "file:")) {
    std::ifstream in(text);
    if (!in) throw std::invalid_argument("matrix: cannot open file " + text);
    std::vector<double> entries;
    double v = 0.0;
    while (in >> v) entries.push_back(v);
    if (!in.eof()) throw std::invalid_argument("matrix: non-numeric data in " + text);
    const std::size_t p = static_cast<std::size_t>(std::llround(std::sqrt(
        static_cast<double>(entries.size()))));
    if (entries.empty() || p * p != entries.size()) {
      throw std::invalid_argument("matrix: file must hold a square matrix");
    }
    Matrix m(p, p);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < p; ++j) m(i, j) = entries[i * p + j];
    }
    return SymMatrix(m);  // validates symmetry
  }
  return SymMatrix::diag(parse_double_list(original, "matrix diagonal"));
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t chosen) {
  if (opt->count() > 0) return chosen;
  const std::uint64_t s = entropy_seed();
  std::printf("seed: %" PRIu64 "\n", s);  // record it so the run can be repeated
  return s;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt_general(v[i]);
  }
  return out;
}

// ---- em-risk ----------------------------------------------------------

struct EmRiskOpts {
  std::string preset;
  std::uint64_t n = 0, p = 0;
  double noise_var = 1.0;
  std::vector<double> sigma;
  std::uint64_t reps = 100000;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string output;
  std::string format = "dat";
};

int run_em_risk(EmRiskOpts& o) {
  o.seed = resolve_seed(o.seed_opt, o.seed);
  SweepResult sweep;
  std::string config;
  if (!o.preset.empty()) {
    sweep = figure_em_sweep(o.preset, o.reps, o.seed);
    config = "cmd=em-risk preset=" + o.preset;
  } else {
    if (o.n == 0 || o.p == 0 || o.sigma.empty()) {
      throw std::invalid_argument(
          "em-risk: give --preset, or --n, --p and --sigma for a custom sweep");
    }
    sweep = custom_em_sweep(o.n, o.p, o.noise_var, o.sigma, o.reps, o.seed);
    config = "cmd=em-risk n=" + std::to_string(o.n) + " p=" + std::to_string(o.p) +
             " noise_var=" + fmt_general(o.noise_var) + " sigma=" + join_doubles(o.sigma);
  }
  config += " reps=" + std::to_string(o.reps) + " seed=" + std::to_string(o.seed);

  Table t;
  t.columns.push_back("x");
  for (const SweepColumn& c : sweep.columns) t.columns.push_back(c.name);
  for (const SweepColumn& c : sweep.columns) {
    if (c.stochastic) t.columns.push_back(c.name + "_se");
  }
  const bool dat = o.format == "dat";
  const auto fmt = [&](double v) { return dat ? fmt_fixed(v, 4) : fmt_general(v); };
  for (std::size_t k = 0; k < sweep.axis.size(); ++k) {
    std::vector<std::string> row;
    row.push_back(fmt(sweep.axis[k]));
    for (const SweepColumn& c : sweep.columns) row.push_back(fmt(c.values[k]));
    for (const SweepColumn& c : sweep.columns) {
      if (c.stochastic) row.push_back(fmt(c.std_errs[k]));
    }
    t.rows.push_back(std::move(row));
  }

  TableMeta meta{"svshrink em-risk", o.seed, o.reps, config};
  const std::string path =
      !o.output.empty() ? o.output
                        : (o.preset.empty() ? std::string("em-risk") : o.preset) +
                              (dat ? ".dat" : ".csv");
  write_text_file(path, dat ? render_dat(meta, t) : render_csv(meta, t));
  std::printf("wrote %s (%zu rows)\n", path.c_str(), t.rows.size());
  return 0;
}

// ---- pinsker ----------------------------------------------------------

struct PinskerOpts {
  double beta = 0.0;
  CLI::Option* beta_opt = nullptr;
  std::string q_text = "identity:1";
  double eps = 0.0;
  bool finite_dim = false;
  std::uint64_t n = 1;
  std::string dump_coeffs;
};

int run_pinsker(PinskerOpts& o) {
  const SymMatrix q = parse_q(o.q_text);
  const NoiseLevel eps(o.eps);

  if (o.finite_dim) {
    const FiniteDimPinsker sol = finite_dim_pinsker(q, eps, o.n);
    std::printf("model: finite n=%" PRIu64 "\n", o.n);
    std::printf("kappa: %.15g\n", sol.kappa);
    std::printf("value: %.15g\n", sol.value);
    std::printf("coeff:\n");
    for (std::size_t i = 0; i < q.dim(); ++i) {
      std::string line = " ";
      for (std::size_t j = 0; j < q.dim(); ++j) {
        line += " " + fmt_general(sol.coeff(i, j));
      }
      std::printf("%s\n", line.c_str());
    }
    return 0;
  }

  if (o.beta_opt->count() == 0) {
    throw std::invalid_argument("pinsker: --beta is required without --finite-dim");
  }
  const EllipsoidSpec spec(o.beta, q);
  const PinskerSolution sol = pinsker_coeffs(spec, eps);
  const MinimaxValue value = minimax_value_sequence(spec, eps);
  const double residual = kappa_eq_residual(spec, eps, sol.kappa);
  const double fixed_point = kappa_fixed_point(spec, eps, sol.kappa);

  std::printf("kappa: %.15g\n", sol.kappa);
  std::printf("kappa_star: %.15g\n", sol.kappa_star);
  std::printf("kappa_residual: %.3e\n", residual);
  std::printf("fixed_point_gap: %.3e\n",
              std::abs(fixed_point - sol.kappa) / sol.kappa);
  std::printf("support: %zu\n", sol.support);
  std::printf("constant_p: %.15g\n", sol.constant_p);
  std::printf("minimax_exact: %.15g\n", value.exact);
  std::printf("minimax_asymptotic: %.15g\n", value.asymptotic);

  if (!o.dump_coeffs.empty()) {
    Table t;
    t.columns.push_back("i");
    const std::size_t p = q.dim();
    for (std::size_t k = 0; k < p; ++k) {
      for (std::size_t l = 0; l < p; ++l) {
        t.columns.push_back("c" + std::to_string(k) + std::to_string(l));
      }
    }
    for (std::size_t i = 1; i <= sol.support; ++i) {
      std::vector<std::string> row{std::to_string(i)};
      const SymMatrix& c = sol.coeffs[i - 1];
      for (std::size_t k = 0; k < p; ++k) {
        for (std::size_t l = 0; l < p; ++l) row.push_back(fmt_general(c(k, l)));
      }
      t.rows.push_back(std::move(row));
    }
    const std::string config = "cmd=pinsker beta=" + fmt_general(o.beta) +
                               " q=" + o.q_text + " eps=" + fmt_general(o.eps);
    TableMeta meta{"svshrink pinsker", 0, 0, config};
    write_text_file(o.dump_coeffs, render_csv(meta, t));
    std::printf("wrote %s (%zu rows)\n", o.dump_coeffs.c_str(), t.rows.size());
  }
  return 0;
}

// ---- sobolev-sample ---------------------------------------------------

struct SobolevOpts {
  std::uint64_t preset = 0;  // 0 = custom
  double beta = 0.0;
  CLI::Option* beta_opt = nullptr;
  std::string l_text;
  std::uint64_t grid = 1001;
  std::uint64_t trunc = 20001;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string output = "sobolev-sample.dat";
};

int run_sobolev_sample(SobolevOpts& o) {
  double beta = o.beta;
  SymMatrix l;
  if (o.preset > 0) {
    switch (o.preset) {
      case 1:
        beta = 0.5;
        l = SymMatrix::identity(2);
        break;
      case 2:
        beta = 1.0;
        l = SymMatrix::diag({5.0, 1.0});
        break;
      case 3: {
        beta = 0.5;
        Matrix m(2, 2);
        m(0, 0) = m(1, 1) = 1.0;
        m(0, 1) = m(1, 0) = 0.7;
        l = SymMatrix(m);
        break;
      }
      case 4: {
        beta = 1.0;
        Matrix m(2, 2);
        m(0, 0) = m(1, 1) = 1.0;
        m(0, 1) = m(1, 0) = -0.7;
        l = SymMatrix(m);
        break;
      }
      default:
        throw std::invalid_argument("sobolev-sample: preset must be 1..4");
    }
  } else {
    if (o.beta_opt->count() == 0 || o.l_text.empty()) {
      throw std::invalid_argument("sobolev-sample: give --preset or both --beta and --l");
    }
    l = parse_q(o.l_text);
  }
  if (o.grid < 2) throw std::invalid_argument("sobolev-sample: --grid must be >= 2");
  if (o.trunc < 1) throw std::invalid_argument("sobolev-sample: --trunc must be >= 1");
  o.seed = resolve_seed(o.seed_opt, o.seed);

  // Ellipsoid matrix of the smoothness ball of radius matrix L:
  // Q = L^2 / pi^(2 beta).
  const double pi = 3.14159265358979323846;
  const Matrix l2 = (1.0 / std::pow(pi, 2.0 * beta)) * (l.mat() * l.mat());
  const EllipsoidSpec spec(beta, SymMatrix::from_symmetric_parts(l2));

  const SequenceParam theta = sample_near_boundary(spec, o.trunc, o.seed);
  std::vector<double> grid(o.grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid[k] = static_cast<double>(k) / static_cast<double>(o.grid - 1);
  }
  const SampledFunction f = synthesize(theta, grid);
  const double norm = ellipsoid_norm(theta, spec);

  Table t;
  t.columns.push_back("x");
  for (std::size_t j = 0; j < spec.q.dim(); ++j) {
    t.columns.push_back("f" + std::to_string(j + 1));
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<std::string> row{fmt_fixed(grid[k], 6)};
    for (std::size_t j = 0; j < spec.q.dim(); ++j) {
      row.push_back(fmt_fixed(f.values[k][j], 6));
    }
    t.rows.push_back(std::move(row));
  }
  std::string config = "cmd=sobolev-sample beta=" + fmt_general(beta);
  config += o.preset > 0 ? " preset=" + std::to_string(o.preset) : " l=" + o.l_text;
  config += " grid=" + std::to_string(o.grid) + " trunc=" + std::to_string(o.trunc) +
            " seed=" + std::to_string(o.seed);
  TableMeta meta{"svshrink sobolev-sample", o.seed, 0, config};
  write_text_file(o.output, render_dat(meta, t));
  std::printf("ellipsoid_norm: %.6f\n", norm);
  std::printf("wrote %s (%zu rows)\n", o.output.c_str(), t.rows.size());
  return 0;
}

// ---- adapt ------------------------------------------------------------

struct AdaptOpts {
  std::vector<double> betas{1.0, 2.0};
  std::vector<std::string> q_texts{"identity:2", "diag:5,1"};
  std::vector<double> eps_list{0.05, 0.02, 0.01};
  std::uint64_t draws = 20;
  std::uint64_t reps = 600;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  bool spikes = true;
  std::string output = "adapt.csv";
};

int run_adapt(AdaptOpts& o) {
  o.seed = resolve_seed(o.seed_opt, o.seed);
  std::vector<std::pair<std::string, SymMatrix>> qs;
  for (const std::string& text : o.q_texts) qs.emplace_back(text, parse_q(text));

  const AdaptTable table = adaptivity_experiment(o.betas, qs, o.eps_list, o.draws,
                                                 o.reps, o.seed, o.spikes);

  Table t;
  t.columns = {"beta", "q", "eps", "n", "rho", "blocks", "first_block",
               "sup_bem", "sup_se", "pinsker_exact", "asymptotic",
               "ratio_exact", "ratio_asymp", "bound_rhs", "bound_ok"};
  for (const AdaptRow& r : table.rows) {
    t.rows.push_back({fmt_general(r.beta), r.q_label, fmt_general(r.eps),
                      std::to_string(r.trunc_n), fmt_general(r.rho),
                      std::to_string(r.blocks_j), std::to_string(r.first_block),
                      fmt_general(r.sup_bem), fmt_general(r.sup_se),
                      fmt_general(r.pinsker_exact), fmt_general(r.asymptotic),
                      fmt_general(r.ratio_exact), fmt_general(r.ratio_asymp),
                      fmt_general(r.bound_rhs), r.bound_ok ? "1" : "0"});
  }
  std::string config = "cmd=adapt beta=" + join_doubles(o.betas) + " q=";
  for (std::size_t i = 0; i < o.q_texts.size(); ++i) {
    if (i) config += ';';
    config += o.q_texts[i];
  }
  config += " eps=" + join_doubles(o.eps_list) + " draws=" + std::to_string(o.draws) +
            " reps=" + std::to_string(o.reps) + " spikes=" + (o.spikes ? "1" : "0") +
            " seed=" + std::to_string(o.seed);
  TableMeta meta{"svshrink adapt", o.seed, o.reps, config};
  write_text_file(o.output, render_csv(meta, t));
  std::printf("wrote %s (%zu rows)\n", o.output.c_str(), t.rows.size());

  bool all_bounds = true;
  for (const AdaptRow& r : table.rows) all_bounds = all_bounds && r.bound_ok;
  std::printf("bound_ok: %s\n", all_bounds ? "all" : "VIOLATED");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Singular-value shrinkage: matrix risk sweeps, ellipsoid minimax\n"
      "solutions, near-boundary samples, and blockwise adaptivity tables."};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI file (command line wins)");
  app.allow_config_extras(false);
  app.footer(
      "Exit codes: 0 success, 1 numeric/degenerate failure, 2 usage error.\n"
      "SVSHRINK_WORKERS sets the Monte Carlo worker count; results are\n"
      "byte-identical for every worker count.");

  EmRiskOpts em;
  CLI::App* em_cmd = app.add_subcommand(
      "em-risk", "Monte Carlo risk sweep over a singular-value axis");
  em_cmd->add_option("--preset", em.preset,
                     "fig1-left | fig1-right | fig2-left | fig2-right")
      ->check(CLI::IsMember({"fig1-left", "fig1-right", "fig2-left", "fig2-right"}));
  em_cmd->add_option("--n", em.n, "rows of the mean matrix (custom sweep)");
  em_cmd->add_option("--p", em.p, "columns of the mean matrix (custom sweep)");
  em_cmd->add_option("--noise-var", em.noise_var, "noise variance (default 1)");
  em_cmd->add_option("--sigma", em.sigma, "comma-separated common singular values")
      ->delimiter(',');
  em_cmd->add_option("--reps", em.reps, "Monte Carlo replicates (default 100000)");
  em.seed_opt = em_cmd->add_option("--seed", em.seed, "RNG seed (default: entropy)");
  em_cmd->add_option("-o,--output", em.output, "output path (default <preset>.dat)");
  em_cmd->add_option("--format", em.format, "dat | csv")
      ->check(CLI::IsMember({"dat", "csv"}));

  PinskerOpts pk;
  CLI::App* pk_cmd = app.add_subcommand(
      "pinsker", "solve the ellipsoid minimax problem at a noise level");
  pk.beta_opt = pk_cmd->add_option("--beta", pk.beta, "smoothness index (> 0)")
                    ->check(CLI::PositiveNumber);
  pk_cmd->add_option("--q", pk.q_text,
                     "ellipsoid/loss matrix (identity:P | diag:a,b | file:PATH | a,b)");
  pk_cmd->add_option("--eps", pk.eps, "noise level (> 0)")
      ->required()
      ->check(CLI::PositiveNumber);
  pk_cmd->add_flag("--finite-dim", pk.finite_dim,
                   "finite model on n coordinates instead of the sequence model");
  pk_cmd->add_option("--n", pk.n, "coordinate count for --finite-dim (default 1)");
  pk_cmd->add_option("--dump-coeffs", pk.dump_coeffs,
                     "write the coefficient matrices to a CSV file");

  SobolevOpts sb;
  CLI::App* sb_cmd = app.add_subcommand(
      "sobolev-sample", "draw a near-boundary function and tabulate it");
  sb_cmd->add_option("--preset", sb.preset, "built-in (beta, L) pair, 1..4");
  sb.beta_opt = sb_cmd->add_option("--beta", sb.beta, "smoothness index (> 0)")
                    ->check(CLI::PositiveNumber);
  sb_cmd->add_option("--l", sb.l_text, "radius matrix L of the smoothness ball");
  sb_cmd->add_option("--grid", sb.grid, "grid points on [0,1] (default 1001)");
  sb_cmd->add_option("--trunc", sb.trunc, "coefficients to draw (default 20001)");
  sb.seed_opt = sb_cmd->add_option("--seed", sb.seed, "RNG seed (default: entropy)");
  sb_cmd->add_option("-o,--output", sb.output, "output path (default sobolev-sample.dat)");

  AdaptOpts ad;
  CLI::App* ad_cmd = app.add_subcommand(
      "adapt", "blockwise shrinkage risk against the exact minimax value");
  ad_cmd->add_option("--beta", ad.betas, "smoothness indices (default 1,2)")
      ->delimiter(',');
  ad_cmd->add_option("--q", ad.q_texts,
                     "matrix specs, repeatable (default identity:2 and diag:5,1)");
  ad_cmd->add_option("--eps", ad.eps_list, "noise levels (default 0.05,0.02,0.01)")
      ->delimiter(',');
  ad_cmd->add_option("--draws", ad.draws, "near-boundary draws per cell (default 20)");
  ad_cmd->add_option("--reps", ad.reps, "Monte Carlo replicates per draw (default 600)");
  ad.seed_opt = ad_cmd->add_option("--seed", ad.seed, "RNG seed (default: entropy)");
  ad_cmd->add_flag("--spikes,!--no-spikes", ad.spikes,
                   "append single-frequency boundary points (default on)");
  ad_cmd->add_option("-o,--output", ad.output, "output path (default adapt.csv)");

  try {
    app.parse(argc, argv);
    if (*em_cmd) return run_em_risk(em);
    if (*pk_cmd) return run_pinsker(pk);
    if (*sb_cmd) return run_sobolev_sample(sb);
    if (*ad_cmd) return run_adapt(ad);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const degenerate_input_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
