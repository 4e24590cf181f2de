#pragma once

// Monte-Carlo recovery sweeps over planted instances: the size grid
// (graph size x block fraction) and the phase grid (gamma x rho).

#include "qcr/instance.hpp"
#include "qcr/solver.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qcr {

struct Axis {
  std::string name;
  std::vector<double> values;
};

struct GridSpec {
  Axis axis1;
  Axis axis2;
  InstanceParams fixed;  // fields not named by an axis; fixed.seed is unused
  std::size_t trials = 10;
  std::uint64_t base_seed = 0;
  std::size_t threads = 1;
  SolverOptions solver;  // lambda left unset means 1/sqrt(n) per instance

  void validate() const;

  /// n in {25, 50, 75, 100} (up to n_max in steps of 25), fraction 0.1..1.0,
  /// gamma = 0.85, rho = 0.25.
  static GridSpec size_default(std::ptrdiff_t n_max = 100);
  /// gamma in {0.5, ..., 1.0}, rho in {0.0, ..., 0.7} at fixed (n, n_c).
  static GridSpec phase_default(std::ptrdiff_t n = 100, std::ptrdiff_t n_c = 85);
};

struct TrialOutcome {
  bool success = false;
  double rel_error = 0.0;  // NaN when the trial threw
  double seconds = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::string error;
};

struct RecoveryGrid {
  GridSpec spec;
  Matrix success_rate;    // successes / completed trials, NaN for cells with none
  Matrix mean_rel_error;  // over trials that produced an error value
  Matrix wall_times;      // summed seconds per cell
  Eigen::MatrixXi completed;
  Eigen::MatrixXi successes;
  bool complete = true;
  std::vector<std::string> failures;  // "(i, j, t): message" for trials that threw
  // Every trial in (i, j, t) order; unfinished trials keep default values.
  std::vector<TrialOutcome> trials;
  std::vector<bool> finished;
};

struct GridControl {
  const std::atomic<bool>* cancel = nullptr;
  // Called after each finished trial with (done, total); may run on any thread.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Seed of trial t in cell (i, j).
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t i, std::size_t j, std::size_t t);

/// Axes (n, fraction); n_c = max(1, round(fraction * n)).
[[nodiscard]] RecoveryGrid run_size_grid(const GridSpec& spec, const GridControl& control = {});

/// Axes (gamma, rho) at the fixed n, n_c.
[[nodiscard]] RecoveryGrid run_phase_grid(const GridSpec& spec, const GridControl& control = {});

struct EtaOutcome {
  std::ptrdiff_t eta = 0;
  bool ok = false;
  DecompositionResult result;
  std::string error;
};

/// One constrained solve per eta, in order; failures are recorded and the
/// sweep continues.
[[nodiscard]] std::vector<EtaOutcome> run_eta_sweep(const Matrix& A, double gamma,
                                                    const std::vector<std::ptrdiff_t>& eta_values,
                                                    const SolverOptions& opts = {});

struct GridTable {
  std::string axis1_name;
  std::string axis2_name;
  std::vector<double> axis1;
  std::vector<double> axis2;
  Matrix values;
};

/// Writes <prefix>.csv and <prefix>.pgm of the success rates.
void export_grid(const RecoveryGrid& grid, const std::string& path_prefix);
void write_grid_csv(const RecoveryGrid& grid, const Matrix& values, const std::string& path);
void write_grid_pgm(const Matrix& rates, const std::string& path);
[[nodiscard]] GridTable read_grid_csv(const std::string& path);

}  // namespace qcr
