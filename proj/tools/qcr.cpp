// qcr: command-line front end.
//
//   qcr gen      write a planted instance
//   qcr solve    decompose a matrix or instance file
//   qcr certify  build and check the dual certificate of an instance
//   qcr grid     run a recovery sweep and export CSV/PGM/manifest
//   qcr norms    print the six matrix norms of a file
//
// Exit codes: 0 ok, 1 certificate failed, 2 bad arguments, 3 I/O error,
// 4 solver did not converge, 5 Neumann series diverges, 130 interrupted.

#include "qcr/certificate.hpp"
#include "qcr/experiment.hpp"
#include "qcr/instance.hpp"
#include "qcr/report.hpp"
#include "qcr/solver.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace qcr;

namespace {

enum Exit : int {
  kOk = 0,
  kCertificateFailed = 1,
  kValidation = 2,
  kIo = 3,
  kNonconvergence = 4,
  kNeumann = 5,
  kInterrupted = 130,
};

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

// ---------------------------------------------------------------- config file

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Flat "key = value" lines become "--key=value" tokens placed ahead of the
// command-line flags, so explicit flags win.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
      value = value.substr(1, value.size() - 2);
    for (char& c : key)
      if (c == '_') c = '-';
    if (key.empty()) throw InvalidArgument(path + ":" + std::to_string(lineno) + ": empty key");
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string(what) + ": bad value '" + item + "'");
    }
  }
  if (out.empty()) throw InvalidArgument(std::string(what) + ": empty list");
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::string default_output(const std::string& input, const std::string& suffix) {
  fs::path p(input);
  p.replace_extension();
  return p.string() + suffix;
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw IoError("cannot create directory '" + parent.string() + "': " + ec.message());
}

// --------------------------------------------------------------------- options

struct Globals {
  std::size_t threads = 0;
  int verbosity = 0;
};

struct GenArgs {
  InstanceParams params{50, 25, 0.85, 0.25, 0};
  std::string out = "instance.txt";
};

struct SolveArgs {
  std::string input;
  std::string out;
  std::string mode = "rpca";
  std::optional<double> lambda;
  std::optional<double> mu0;
  double tol = SolverOptions{}.tol_primal;
  double tol_dual = SolverOptions{}.tol_dual;
  std::size_t max_iters = SolverOptions{}.max_iters;
  std::optional<double> gamma;
  std::optional<std::ptrdiff_t> eta;
  std::string eta_sweep;
  bool history = false;
};

struct CertifyArgs {
  std::string input;
  std::string out;
  std::optional<double> lambda;
  std::uint64_t seed = 0;
  std::optional<std::size_t> k0;
  std::optional<double> p;
  double c0 = 1.0;
  bool matrices = false;
};

struct GridArgs {
  std::string kind = "size";
  std::ptrdiff_t n_max = 100;
  std::ptrdiff_t n = 100;
  std::ptrdiff_t nc = 85;
  std::optional<double> gamma;
  std::optional<double> rho;
  std::string sizes;
  std::string fractions;
  std::string gammas;
  std::string rhos;
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::string prefix;
};

struct NormsArgs {
  std::string input;
  bool json = false;
};

std::size_t resolve_threads(const Globals& g) {
  if (g.threads > 0) return g.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// -------------------------------------------------------------------- commands

int cmd_gen(const GenArgs& a) {
  a.params.validate();
  const PlantedInstance inst = gen_planted(a.params);
  ensure_parent(a.out);
  write_instance_file(a.out, inst);
  std::cout << "wrote " << a.out << "\n"
            << "n = " << a.params.n << ", n_c = " << a.params.n_c << ", gamma = " << a.params.gamma
            << ", rho = " << a.params.rho << ", seed = " << a.params.seed << "\n"
            << "|gamma_support| = " << inst.gamma_support.size() << "\n"
            << "|noise_support| = " << inst.noise_support.size() << "\n";
  return kOk;
}

int cmd_solve(const SolveArgs& a, const Globals& g) {
  SolverOptions opts;
  opts.lambda = a.lambda;
  opts.mu0 = a.mu0;
  opts.tol_primal = a.tol;
  opts.tol_dual = a.tol_dual;
  opts.max_iters = a.max_iters;
  opts.mode = solver_mode_from_string(a.mode);
  opts.record_history = a.history;
  opts.validate();

  const MatrixFile file = read_matrix_file(a.input);
  require_square(file.M, "solve");
  const std::string out = a.out.empty() ? default_output(a.input, ".result.json") : a.out;
  const auto& truth = file.truth;

  if (opts.mode == SolverMode::quasi_clique_constrained) {
    const double gamma = a.gamma ? *a.gamma : truth ? truth->params.gamma : 0.0;
    if (!a.gamma && !truth) throw InvalidArgument("quasi_clique mode needs --gamma when the input has no ground truth");
    if (!a.eta_sweep.empty()) {
      std::vector<std::ptrdiff_t> etas;
      for (double v : parse_list(a.eta_sweep, "--eta-sweep")) {
        if (v != std::floor(v)) throw InvalidArgument("--eta-sweep: values must be integers");
        etas.push_back(static_cast<std::ptrdiff_t>(v));
      }
      const auto results = run_eta_sweep(file.M, gamma, etas, opts);
      Json j = Json::array();
      for (const auto& r : results) {
        Json item = {{"eta", r.eta}, {"ok", r.ok}};
        if (r.ok) {
          item["result"] = to_json(r.result, default_output(out, ".eta" + std::to_string(r.eta)));
          std::cout << "eta = " << r.eta << ": iterations " << r.result.iterations << ", residual "
                    << fmt(r.result.primal_residual) << (r.result.converged ? "" : " (not converged)") << "\n";
        } else {
          item["error"] = r.error;
          std::cout << "eta = " << r.eta << ": " << r.error << "\n";
        }
        j.push_back(std::move(item));
      }
      ensure_parent(out);
      write_json_file(out, j);
      std::cout << "wrote " << out << "\n";
      return kOk;
    }
    if (!a.eta && !truth) throw InvalidArgument("quasi_clique mode needs --eta when the input has no ground truth");
    const std::ptrdiff_t eta = a.eta ? *a.eta : truth->params.n_c;
    QuasiCliqueParams qc{gamma, eta};
    qc.validate();
    if (g.verbosity > 0) std::cerr << "solving quasi-clique program, gamma = " << gamma << ", eta = " << eta << "\n";
    DecompositionResult res = solve_quasi_clique(file.M, qc, opts);
    Json j = to_json(res, default_output(out, ""));
    j["input"] = a.input;
    j["gamma"] = gamma;
    j["eta"] = eta;
    const double mass = res.B_star.sum();
    j["mass"] = mass;
    j["feasible"] = mass >= qc.target_mass() - 1e-6 && res.B_star.minCoeff() >= 0.0 && res.B_star.maxCoeff() <= 1.0;
    std::cout << "iterations " << res.iterations << ", residual " << fmt(res.primal_residual) << ", objective "
              << fmt(res.objective) << "\n"
              << "sum X* = " << fmt(mass) << " (target " << fmt(qc.target_mass()) << "), "
              << (j["feasible"].get<bool>() ? "feasible" : "infeasible") << "\n";
    if (truth) {
      const double err = relative_error(res.B_star, truth->B0);
      j["relative_error"] = err;
      j["recovered"] = err <= kRecoveryTolerance;
      std::cout << (err <= kRecoveryTolerance ? "recovered" : "not recovered") << ", relative error " << fmt(err)
                << "\n";
    }
    ensure_parent(out);
    write_json_file(out, j);
    std::cout << "wrote " << out << "\n";
    return res.converged ? kOk : kNonconvergence;
  }

  DecompositionResult res = solve_rpca(file.M, opts);
  Json j = to_json(res, default_output(out, ""));
  j["input"] = a.input;
  std::cout << "iterations " << res.iterations << ", residual " << fmt(res.primal_residual) << ", objective "
            << fmt(res.objective) << ", lambda " << fmt(res.lambda) << "\n";
  if (truth) {
    const double err = relative_error(res.B_star, truth->B0);
    const bool ok = res.converged && err <= kRecoveryTolerance;
    j["relative_error"] = err;
    j["recovered"] = ok;
    std::cout << (ok ? "recovered" : "not recovered") << ", relative error " << fmt(err) << "\n";
  }
  ensure_parent(out);
  write_json_file(out, j);
  std::cout << "wrote " << out << "\n";
  if (!res.converged) {
    std::cerr << "solver stopped after " << res.iterations << " iterations without reaching tolerance\n";
    return kNonconvergence;
  }
  return kOk;
}

int cmd_certify(const CertifyArgs& a) {
  if (a.lambda && !(*a.lambda > 0.0)) throw InvalidArgument("--lambda must be positive");
  if (a.k0 && *a.k0 == 0) throw InvalidArgument("--k0 must be positive");
  if (a.p && !(*a.p >= 0.0 && *a.p <= 1.0)) throw InvalidArgument("--p must lie in [0, 1]");
  const MatrixFile file = read_matrix_file(a.input);
  if (!file.truth) throw InvalidArgument("'" + a.input + "' has no ground truth; certify needs a planted instance");
  const PlantedInstance& inst = *file.truth;
  const double lambda = a.lambda ? *a.lambda : 1.0 / std::sqrt(static_cast<double>(inst.params.n));
  GolfingConfig cfg = a.p ? GolfingConfig::from_p(*a.p, a.k0 ? *a.k0 : default_golfing_batches(inst.params.n), a.seed)
                          : GolfingConfig::for_instance(inst, a.seed, a.k0);
  CertificateOptions opts;
  opts.c0 = a.c0;

  const CertificateReport rep = verify_certificate(inst, lambda, cfg, opts);
  const std::string out = a.out.empty() ? default_output(a.input, ".certificate.json") : a.out;
  ensure_parent(out);
  write_json_file(out, to_json(rep, a.matrices));

  struct Line {
    const char* label;
    double value;
    double threshold;
  };
  const Line lines[5] = {
      {"(i)   ||Q_B||                   ", rep.norm_QB, 1.0 / 8.0},
      {"(ii)  ||P_G(UV' + Q_B)||_F      ", rep.residual_golfing, lambda / 8.0},
      {"(iii) ||P_G^c(UV' + Q_B)||_inf  ", rep.linf_complement_B, lambda / 4.0},
      {"(iv)  ||Q_C||                   ", rep.norm_QC, 1.0 / 8.0},
      {"(v)   ||P_G^c Q_C||_inf         ", rep.linf_complement_C, 1.0 / 4.0},
  };
  for (int k = 0; k < 5; ++k)
    std::cout << lines[k].label << fmt(lines[k].value) << " < " << fmt(lines[k].threshold) << "  "
              << (rep.conditions[static_cast<std::size_t>(k)] ? "pass" : "FAIL") << "\n";
  std::cout << "||P_G P_T|| = " << fmt(rep.opnorm_PGPT) << " (<= 0.5 " << (rep.opnorm_PGPT <= 0.5 ? "pass" : "FAIL")
            << "), lambda = " << fmt(lambda) << ", mu = " << fmt(rep.incoherence.mu) << ", |Gamma| = " << rep.gamma_size
            << "\n"
            << "regime gamma >= c0 mu r log n / n: " << fmt(rep.regime_p) << " vs " << fmt(rep.regime_bound)
            << (rep.in_regime ? " (inside)" : " (outside)") << "\n"
            << "certificate " << (rep.overall ? "holds" : "fails") << "\n"
            << "wrote " << out << "\n";
  return rep.overall ? kOk : kCertificateFailed;
}

int cmd_grid(const GridArgs& a, const Globals& g) {
  GridSpec spec;
  if (a.kind == "size") {
    spec = GridSpec::size_default(a.n_max);
    if (!a.sizes.empty()) spec.axis1.values = parse_list(a.sizes, "--sizes");
    if (!a.fractions.empty()) spec.axis2.values = parse_list(a.fractions, "--fractions");
    if (a.gamma) spec.fixed.gamma = *a.gamma;
    if (a.rho) spec.fixed.rho = *a.rho;
  } else if (a.kind == "phase") {
    spec = GridSpec::phase_default(a.n, a.nc);
    if (!a.gammas.empty()) spec.axis1.values = parse_list(a.gammas, "--gammas");
    if (!a.rhos.empty()) spec.axis2.values = parse_list(a.rhos, "--rhos");
    InstanceParams probe = spec.fixed;
    probe.validate();
  } else {
    throw InvalidArgument("--kind must be 'size' or 'phase'");
  }
  spec.trials = a.trials;
  spec.base_seed = a.seed;
  spec.threads = resolve_threads(g);
  spec.validate();
  if (spec.axis1.values.empty()) throw InvalidArgument("grid: no sizes up to --n-max");

  const std::string prefix = (fs::path(a.out_dir) / (a.prefix.empty() ? a.kind : a.prefix)).string();
  ensure_parent(prefix);

  GridControl control;
  control.cancel = &g_interrupted;
  if (g.verbosity > 0)
    control.progress = [](std::size_t done, std::size_t total) {
      if (done % 10 == 0 || done == total) std::fprintf(stderr, "\r%zu / %zu trials", done, total);
      if (done == total) std::fputc('\n', stderr);
    };

  std::signal(SIGINT, on_sigint);
  const auto t0 = std::chrono::steady_clock::now();
  const RecoveryGrid grid = a.kind == "size" ? run_size_grid(spec, control) : run_phase_grid(spec, control);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::signal(SIGINT, SIG_DFL);

  ManifestInfo info;
  info.kind = a.kind;
  info.csv_path = prefix + ".csv";
  info.pgm_path = prefix + ".pgm";
  info.error_csv_path = prefix + ".error.csv";
  info.elapsed_seconds = elapsed;
  info.interrupted = g_interrupted.load();
  export_grid(grid, prefix);
  write_grid_csv(grid, grid.mean_rel_error, info.error_csv_path);
  write_json_file(prefix + ".manifest.json", grid_manifest(grid, info));

  std::cout << spec.axis1.name << " \\ " << spec.axis2.name << " success rate\n       ";
  for (double v : spec.axis2.values) std::cout << std::setw(6) << fmt(v);
  std::cout << "\n";
  for (Eigen::Index i = 0; i < grid.success_rate.rows(); ++i) {
    std::cout << std::setw(7) << fmt(spec.axis1.values[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < grid.success_rate.cols(); ++j)
      std::cout << std::setw(6) << fmt(grid.success_rate(i, j));
    std::cout << "\n";
  }
  if (!grid.failures.empty()) std::cout << grid.failures.size() << " trial(s) raised errors; see the manifest\n";
  std::cout << "wrote " << info.csv_path << ", " << info.pgm_path << ", " << prefix << ".manifest.json (" << fmt(elapsed)
            << " s)\n";
  if (!grid.complete || info.interrupted) {
    std::cerr << "interrupted: partial results written, manifest marked incomplete\n";
    return kInterrupted;
  }
  return kOk;
}

int cmd_norms(const NormsArgs& a) {
  const MatrixFile file = read_matrix_file(a.input);
  Json j;
  for (NormKind k : {NormKind::nuclear, NormKind::spectral, NormKind::frobenius, NormKind::l1, NormKind::linf,
                     NormKind::linf2}) {
    const double v = norm(file.M, k);
    if (a.json) j[to_string(k)] = v;
    else std::cout << std::left << std::setw(10) << to_string(k) << format_double(v) << "\n";
  }
  if (a.json) std::cout << j.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planted quasi-clique recovery by rank-sparsity decomposition", "qcr"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", code_version());

  Globals globals;
  std::string config_path;
  app.add_option("--config", config_path, "Flat key = value file; flags on the command line take precedence");
  app.add_option("--threads", globals.threads, "Worker threads for grid runs (default: all cores)")
      ->envname("QCR_THREADS");
  app.add_flag("-v,--verbose", globals.verbosity, "Progress output on stderr");

  GenArgs gen;
  auto* sub_gen = app.add_subcommand("gen", "Write a planted quasi-clique instance");
  sub_gen->add_option("--n", gen.params.n, "Number of vertices");
  sub_gen->add_option("--nc", gen.params.n_c, "Size of the planted block");
  sub_gen->add_option("--gamma", gen.params.gamma, "Edge probability inside the block");
  sub_gen->add_option("--rho", gen.params.rho, "Probability of a diversionary edge");
  sub_gen->add_option("--seed", gen.params.seed, "Random seed");
  sub_gen->add_option("-o,--out", gen.out, "Output instance file");

  SolveArgs solve;
  auto* sub_solve = app.add_subcommand("solve", "Decompose a matrix or instance file");
  sub_solve->add_option("input", solve.input, "Instance or matrix file (.csv for dense CSV)")->required();
  sub_solve->add_option("-o,--out", solve.out, "Result JSON (default <input>.result.json)");
  sub_solve->add_option("--mode", solve.mode, "rpca or quasi_clique");
  sub_solve->add_option("--lambda", solve.lambda, "Weight of the l1 term (default 1/sqrt(n))");
  sub_solve->add_option("--mu0", solve.mu0, "Initial penalty (default 0.25/mean|M|)");
  sub_solve->add_option("--tol", solve.tol, "Relative primal residual tolerance");
  sub_solve->add_option("--tol-dual", solve.tol_dual, "Relative dual residual tolerance");
  sub_solve->add_option("--max-iters", solve.max_iters, "Iteration cap");
  sub_solve->add_option("--gamma", solve.gamma, "Target density (quasi_clique mode)");
  sub_solve->add_option("--eta", solve.eta, "Target block size (quasi_clique mode)");
  sub_solve->add_option("--eta-sweep", solve.eta_sweep, "Comma-separated eta values to try in turn");
  sub_solve->add_flag("--history", solve.history, "Record per-iteration diagnostics");

  CertifyArgs certify;
  auto* sub_cert = app.add_subcommand("certify", "Construct and check the dual certificate of an instance");
  sub_cert->add_option("input", certify.input, "Instance file with ground truth")->required();
  sub_cert->add_option("-o,--out", certify.out, "Report JSON (default <input>.certificate.json)");
  sub_cert->add_option("--lambda", certify.lambda, "Weight of the l1 term (default 1/sqrt(n))");
  sub_cert->add_option("--seed", certify.seed, "Seed of the golfing batches");
  sub_cert->add_option("--k0", certify.k0, "Number of golfing batches (default 20 ceil(ln n))");
  sub_cert->add_option("--p", certify.p, "Probability of an index lying in Gamma (default |Gamma|/n^2)");
  sub_cert->add_option("--c0", certify.c0, "Constant of the regime diagnostic");
  sub_cert->add_flag("--matrices", certify.matrices, "Include Q_B and Q_C in the report");

  GridArgs grid;
  auto* sub_grid = app.add_subcommand("grid", "Run a recovery sweep");
  sub_grid->add_option("--kind", grid.kind, "size (n x fraction) or phase (gamma x rho)");
  sub_grid->add_option("--n-max", grid.n_max, "Largest n of the size grid (steps of 25)");
  sub_grid->add_option("--n", grid.n, "Graph size of the phase grid");
  sub_grid->add_option("--nc", grid.nc, "Block size of the phase grid");
  sub_grid->add_option("--gamma", grid.gamma, "Block density of the size grid");
  sub_grid->add_option("--rho", grid.rho, "Noise level of the size grid");
  sub_grid->add_option("--sizes", grid.sizes, "Comma-separated n values (size grid)");
  sub_grid->add_option("--fractions", grid.fractions, "Comma-separated block fractions (size grid)");
  sub_grid->add_option("--gammas", grid.gammas, "Comma-separated gamma values (phase grid)");
  sub_grid->add_option("--rhos", grid.rhos, "Comma-separated rho values (phase grid)");
  sub_grid->add_option("--trials", grid.trials, "Trials per cell");
  sub_grid->add_option("--seed", grid.seed, "Base seed");
  sub_grid->add_option("--out-dir", grid.out_dir, "Output directory");
  sub_grid->add_option("--prefix", grid.prefix, "Output file prefix (default: the grid kind)");

  NormsArgs norms;
  auto* sub_norms = app.add_subcommand("norms", "Print the six norms of a matrix file");
  sub_norms->add_option("input", norms.input, "Instance or matrix file")->required();
  sub_norms->add_flag("--json", norms.json, "Print as JSON");

  // Splice config-file tokens in after the subcommand name.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    for (std::size_t k = 0; k < args.size(); ++k) {
      std::string path;
      std::size_t drop = 0;
      if (args[k] == "--config" && k + 1 < args.size()) {
        path = args[k + 1];
        drop = 2;
      } else if (args[k].rfind("--config=", 0) == 0) {
        path = args[k].substr(9);
        drop = 1;
      }
      if (drop == 0) continue;
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(k), args.begin() + static_cast<std::ptrdiff_t>(k + drop));
      const auto tokens = read_config(path);
      std::size_t at = 0;
      for (std::size_t s = 0; s < args.size(); ++s)
        if (args[s] == "gen" || args[s] == "solve" || args[s] == "certify" || args[s] == "grid" || args[s] == "norms") {
          at = s + 1;
          break;
        }
      args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), tokens.begin(), tokens.end());
      break;
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (*sub_gen) return cmd_gen(gen);
    if (*sub_solve) return cmd_solve(solve, globals);
    if (*sub_cert) return cmd_certify(certify);
    if (*sub_grid) return cmd_grid(grid, globals);
    if (*sub_norms) return cmd_norms(norms);
  } catch (const NeumannNonconvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNeumann;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const InfeasibleTarget& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
  return kValidation;
}
