#pragma once

// Rank-sparsity decomposition
//
//     min ||B||_* + lambda ||C||_1   s.t.  B + C = M
//
// and its density-constrained quasi-clique variant
//
//     min ||X||_* + lambda ||A - X||_1   s.t.  sum X >= gamma eta^2,  0 <= X <= 1
//
// both solved by alternating-direction augmented Lagrangian iterations built
// from the proximal kernels in linalg.hpp.

#include "qcr/linalg.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcr {

enum class SolverMode { plain_decomposition, quasi_clique_constrained };

[[nodiscard]] std::string to_string(SolverMode mode);
[[nodiscard]] SolverMode solver_mode_from_string(const std::string& name);

struct SolverOptions {
  std::optional<double> lambda;  // 1/sqrt(n) when unset
  std::optional<double> mu0;     // 0.25 / mean|M_ij| when unset
  double mu_growth = 1.5;
  // mu grows by mu_growth when the primal residual has not dropped below
  // stall_factor x its value stall_window iterations earlier, and shrinks
  // by it when the dual residual is the one stalling.
  std::size_t stall_window = 10;
  double stall_factor = 0.9;
  double tol_primal = 1e-8;
  // Stop only once mu ||C_k - C_{k-1}||_F / ||M||_F is below this too;
  // primal feasibility alone can be reached at a non-optimal point.
  double tol_dual = 1e-6;
  std::size_t max_iters = 2000;
  SolverMode mode = SolverMode::plain_decomposition;
  bool record_history = false;

  void validate() const;
  [[nodiscard]] double lambda_for(std::ptrdiff_t n) const;
};

struct QuasiCliqueParams {
  double gamma = 1.0;
  std::ptrdiff_t eta = 1;

  void validate() const;
  [[nodiscard]] double target_mass() const { return gamma * static_cast<double>(eta) * static_cast<double>(eta); }
};

struct IterationStats {
  std::size_t iteration = 0;
  double mu = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  // Augmented Lagrangian with the multiplier of this iteration held fixed,
  // before and after the primal block updates.
  double lagrangian_before = 0.0;
  double lagrangian_after = 0.0;
};

struct DecompositionResult {
  Matrix B_star;
  Matrix C_star;
  std::size_t iterations = 0;
  double primal_residual = 0.0;  // ||M - B - C||_F / ||M||_F of the returned pair
  double dual_residual = 0.0;
  double objective = 0.0;
  bool converged = false;
  double lambda = 0.0;
  SolverMode mode = SolverMode::plain_decomposition;
  std::vector<IterationStats> history;
};

/// The requested density mass cannot be met.
class InfeasibleTarget : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

[[nodiscard]] DecompositionResult solve_rpca(const Matrix& M, const SolverOptions& opts = {});

[[nodiscard]] DecompositionResult solve_quasi_clique(const Matrix& A, const QuasiCliqueParams& qc,
                                                     const SolverOptions& opts = {});

/// Euclidean projection onto { X : 0 <= X_ij <= 1, sum X >= mass }.
[[nodiscard]] Matrix project_box_mass(const Matrix& V, double mass);

inline constexpr double kRecoveryTolerance = 1e-6;

/// ||B0 - B*||_F / ||B0||_F, or ||B*||_F when B0 = 0.
[[nodiscard]] double relative_error(const Matrix& B_star, const Matrix& B0);

/// relative_error <= 1e-6 (inclusive).
[[nodiscard]] bool recovery_success(const Matrix& B_star, const Matrix& B0);

}  // namespace qcr
