#include "qcr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qcr {

std::string to_string(SolverMode mode) {
  return mode == SolverMode::plain_decomposition ? "plain_decomposition" : "quasi_clique_constrained";
}

SolverMode solver_mode_from_string(const std::string& name) {
  if (name == "plain_decomposition" || name == "rpca" || name == "plain")
    return SolverMode::plain_decomposition;
  if (name == "quasi_clique_constrained" || name == "quasi_clique")
    return SolverMode::quasi_clique_constrained;
  throw InvalidArgument("unknown solver mode '" + name + "'");
}

void SolverOptions::validate() const {
  if (lambda && !(*lambda > 0.0 && std::isfinite(*lambda))) throw InvalidArgument("lambda must be positive");
  if (mu0 && !(*mu0 > 0.0 && std::isfinite(*mu0))) throw InvalidArgument("mu0 must be positive");
  if (!(mu_growth >= 1.0)) throw InvalidArgument("mu_growth must be at least 1");
  if (!(tol_primal > 0.0)) throw InvalidArgument("tol_primal must be positive");
  if (!(tol_dual > 0.0)) throw InvalidArgument("tol_dual must be positive");
  if (max_iters == 0) throw InvalidArgument("max_iters must be positive");
  if (stall_window == 0) throw InvalidArgument("stall_window must be positive");
}

double SolverOptions::lambda_for(std::ptrdiff_t n) const {
  return lambda ? *lambda : 1.0 / std::sqrt(static_cast<double>(n));
}

void QuasiCliqueParams::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in (0, 1]");
  if (eta < 1) throw InvalidArgument("eta must be at least 1");
}

namespace {

// mu moves by mu_growth at most once per stall window: up when the primal
// residual has stalled, down when the dual residual has stalled and sits
// further from its tolerance. Only growing lets the primal side reach
// round-off while the iterate is still far from optimal.
class PenaltySchedule {
 public:
  PenaltySchedule(double mu0, const SolverOptions& opts)
      : mu_(mu0), mu_min_(mu0 * 1e-10), mu_max_(mu0 * 1e10), opts_(opts) {}

  [[nodiscard]] double mu() const { return mu_; }

  void observe(double primal, double dual) {
    primal_.push_back(primal / opts_.tol_primal);
    dual_.push_back(dual / opts_.tol_dual);
    const std::size_t k = primal_.size() - 1;
    if (k < since_ + opts_.stall_window) return;
    const std::size_t back = k - opts_.stall_window;
    const double p = primal_[k], d = dual_[k];
    if (p > 1.0 && p >= d && p > opts_.stall_factor * primal_[back]) {
      mu_ = std::min(mu_ * opts_.mu_growth, mu_max_);
      since_ = k;
    } else if (d > 1.0 && d > p && d > opts_.stall_factor * dual_[back]) {
      mu_ = std::max(mu_ / opts_.mu_growth, mu_min_);
      since_ = k;
    }
  }

 private:
  double mu_;
  double mu_min_;
  double mu_max_;
  const SolverOptions& opts_;
  std::vector<double> primal_;
  std::vector<double> dual_;
  std::size_t since_ = 0;
};

double default_mu0(const Matrix& M) {
  const double mean_abs = M.cwiseAbs().mean();
  return mean_abs > 0.0 ? 0.25 / mean_abs : 1.0;
}

double augmented_lagrangian(double nuclear, double l1, double lambda, const Matrix& Y,
                            const Matrix& R, double mu) {
  return nuclear + lambda * l1 + inner(Y, R) + 0.5 * mu * R.squaredNorm();
}

}  // namespace

DecompositionResult solve_rpca(const Matrix& M, const SolverOptions& opts) {
  require_square(M, "solve_rpca");
  require_finite(M, "solve_rpca");
  opts.validate();

  const auto n = M.rows();
  DecompositionResult res;
  res.mode = SolverMode::plain_decomposition;
  res.lambda = opts.lambda_for(n);
  const double lambda = res.lambda;
  const double m_norm = M.norm();
  if (m_norm == 0.0) {
    res.B_star = Matrix::Zero(n, n);
    res.C_star = Matrix::Zero(n, n);
    res.converged = true;
    return res;
  }

  PenaltySchedule schedule(opts.mu0 ? *opts.mu0 : default_mu0(M), opts);
  Matrix B = Matrix::Zero(n, n);
  Matrix C = Matrix::Zero(n, n);
  Matrix Y = Matrix::Zero(n, n);
  double nuclear_B = 0.0;

  Matrix best_B = B, best_C = C;
  double best_score = std::numeric_limits<double>::infinity();
  double best_nuclear = 0.0;

  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    const double mu = schedule.mu();
    IterationStats stats;
    if (opts.record_history) {
      stats.lagrangian_before =
          augmented_lagrangian(nuclear_B, C.cwiseAbs().sum(), lambda, Y, M - B - C, mu);
    }

    ShrinkResult shrink = shrink_singular_values(M - C + Y / mu, 1.0 / mu);
    B = std::move(shrink.value);
    nuclear_B = shrink.nuclear_norm;
    Matrix C_next = soft_threshold(M - B + Y / mu, lambda / mu);
    const double dual = mu * (C_next - C).norm() / m_norm;
    C = std::move(C_next);
    const Matrix R = M - B - C;

    if (opts.record_history)
      stats.lagrangian_after = augmented_lagrangian(nuclear_B, C.cwiseAbs().sum(), lambda, Y, R, mu);

    Y += mu * R;
    const double residual = R.norm() / m_norm;
    res.iterations = it;

    if (opts.record_history) {
      stats.iteration = it;
      stats.mu = mu;
      stats.primal_residual = residual;
      stats.dual_residual = dual;
      res.history.push_back(stats);
    }

    const double score = std::max(residual / opts.tol_primal, dual / opts.tol_dual);
    if (score < best_score) {
      best_score = score;
      best_B = B;
      best_C = C;
      best_nuclear = nuclear_B;
      res.primal_residual = residual;
      res.dual_residual = dual;
    }
    if (score <= 1.0) {
      res.converged = true;
      break;
    }
    schedule.observe(residual, dual);
  }

  res.B_star = std::move(best_B);
  res.C_star = std::move(best_C);
  res.objective = best_nuclear + lambda * res.C_star.cwiseAbs().sum();
  return res;
}

Matrix project_box_mass(const Matrix& V, double mass) {
  Matrix clipped = V.cwiseMax(0.0).cwiseMin(1.0);
  if (clipped.sum() >= mass) return clipped;
  if (mass > static_cast<double>(V.size())) throw InfeasibleTarget("project_box_mass: mass exceeds entry count");

  // The multiplier of the mass constraint shifts every entry by the same
  // t > 0: X = clip(V + t). g(t) = sum clip(V + t) is piecewise linear and
  // nondecreasing with breakpoints at -V_ij and 1 - V_ij.
  const auto count = static_cast<std::size_t>(V.size());
  std::vector<double> breaks;
  breaks.reserve(2 * count);
  for (Eigen::Index k = 0; k < V.size(); ++k) {
    breaks.push_back(-V.data()[k]);
    breaks.push_back(1.0 - V.data()[k]);
  }
  std::sort(breaks.begin(), breaks.end());

  auto g = [&](double t) { return (V.array() + t).max(0.0).min(1.0).sum(); };
  // Binary search for the first breakpoint with g >= mass; g is linear on the
  // interval before it.
  std::size_t lo = 0, hi = breaks.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (g(breaks[mid]) >= mass) hi = mid;
    else lo = mid + 1;
  }
  double t_hi = breaks[lo];
  double t_lo = lo > 0 ? std::max(breaks[lo - 1], 0.0) : 0.0;
  t_lo = std::min(t_lo, t_hi);
  const double g_lo = g(t_lo), g_hi = g(t_hi);
  double t = t_hi;
  if (g_hi > g_lo) t = t_lo + (mass - g_lo) * (t_hi - t_lo) / (g_hi - g_lo);
  Matrix X = (V.array() + t).max(0.0).min(1.0).matrix();
  // Round-off can leave the mass a hair short; nudge the free entries.
  const double deficit = mass - X.sum();
  if (deficit > 0.0) {
    const auto free_count = ((X.array() > 0.0) && (X.array() < 1.0)).count();
    if (free_count > 0) {
      const double bump = deficit / static_cast<double>(free_count);
      X = ((X.array() > 0.0) && (X.array() < 1.0)).select((X.array() + bump).min(1.0), X.array()).matrix();
    }
  }
  return X;
}

DecompositionResult solve_quasi_clique(const Matrix& A, const QuasiCliqueParams& qc,
                                       const SolverOptions& opts) {
  require_square(A, "solve_quasi_clique");
  require_finite(A, "solve_quasi_clique");
  qc.validate();
  opts.validate();

  const auto n = A.rows();
  const double mass = qc.target_mass();
  const double cells = static_cast<double>(n) * static_cast<double>(n);
  if (mass > cells) {
    std::ostringstream os;
    os << "gamma*eta^2 = " << mass << " exceeds n^2 = " << cells;
    throw InfeasibleTarget(os.str());
  }
  const double edge_mass = A.sum();
  if (mass > edge_mass) {
    std::ostringstream os;
    os << "gamma*eta^2 = " << mass << " exceeds the edge mass of A (" << edge_mass
       << "); no subgraph of A can meet it";
    throw InfeasibleTarget(os.str());
  }

  DecompositionResult res;
  res.mode = SolverMode::quasi_clique_constrained;
  res.lambda = opts.lambda_for(n);
  const double lambda = res.lambda;
  const double scale = std::max(1.0, A.norm());

  // Consensus splitting: X carries the nuclear norm, Z the l1 term on A - Z,
  // W the indicator of the box/mass set; X = Z and X = W are dualized.
  PenaltySchedule schedule(opts.mu0 ? *opts.mu0 : default_mu0(A), opts);
  Matrix X = Matrix::Zero(n, n);
  Matrix Z = Matrix::Zero(n, n);
  Matrix W = Matrix::Zero(n, n);
  Matrix Y1 = Matrix::Zero(n, n);
  Matrix Y2 = Matrix::Zero(n, n);

  Matrix best_W = project_box_mass(W, mass);
  double best_score = std::numeric_limits<double>::infinity();

  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    const double mu = schedule.mu();
    const Matrix avg = 0.5 * ((Z - Y1 / mu) + (W - Y2 / mu));
    X = sv_threshold(avg, 0.5 / mu);
    Matrix Z_next = A - soft_threshold(A - X - Y1 / mu, lambda / mu);
    Matrix W_next = project_box_mass(X + Y2 / mu, mass);
    const double dual = mu * std::sqrt((Z_next - Z).squaredNorm() + (W_next - W).squaredNorm()) / scale;
    Z = std::move(Z_next);
    W = std::move(W_next);
    const Matrix R1 = X - Z;
    const Matrix R2 = X - W;
    Y1 += mu * R1;
    Y2 += mu * R2;
    const double residual = std::sqrt(R1.squaredNorm() + R2.squaredNorm()) / scale;
    res.iterations = it;
    if (opts.record_history) {
      IterationStats stats;
      stats.iteration = it;
      stats.mu = mu;
      stats.primal_residual = residual;
      stats.dual_residual = dual;
      res.history.push_back(stats);
    }
    const double score = std::max(residual / opts.tol_primal, dual / opts.tol_dual);
    if (score < best_score) {
      best_score = score;
      best_W = W;
      res.primal_residual = residual;
      res.dual_residual = dual;
    }
    if (score <= 1.0) {
      res.converged = true;
      break;
    }
    schedule.observe(residual, dual);
  }

  res.B_star = std::move(best_W);
  res.C_star = A - res.B_star;
  res.objective = norm(res.B_star, NormKind::nuclear) + lambda * res.C_star.cwiseAbs().sum();
  return res;
}

double relative_error(const Matrix& B_star, const Matrix& B0) {
  if (B_star.rows() != B0.rows() || B_star.cols() != B0.cols())
    throw InvalidArgument("relative_error: shape mismatch");
  const double denom = B0.norm();
  if (denom == 0.0) return B_star.norm();
  return (B0 - B_star).norm() / denom;
}

bool recovery_success(const Matrix& B_star, const Matrix& B0) {
  return relative_error(B_star, B0) <= kRecoveryTolerance;
}

}  // namespace qcr
