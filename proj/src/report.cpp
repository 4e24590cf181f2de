#include "qcr/report.hpp"

#include <cmath>
#include <fstream>

#ifndef QCR_VERSION
#define QCR_VERSION "unknown"
#endif

namespace qcr {

namespace {

// JSON has no NaN; unfinished cells become null.
Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json grid_matrix(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(number_or_null(M(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

const char* code_version() { return QCR_VERSION; }

Json matrix_to_json(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("matrix JSON must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j.front().size()) : 0;
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw InvalidArgument("matrix JSON rows must all have the same length");
    for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return M;
}

Json to_json(const DecompositionResult& res, const std::string& sidecar_prefix) {
  Json j;
  j["mode"] = to_string(res.mode);
  j["lambda"] = res.lambda;
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  j["primal_residual"] = res.primal_residual;
  j["dual_residual"] = res.dual_residual;
  j["objective"] = res.objective;
  j["rank_B"] = svd(res.B_star).rank();
  j["nnz_C"] = (res.C_star.array().abs() > 1e-9).count();
  if (res.B_star.rows() <= kInlineMatrixLimit) {
    j["B_star"] = matrix_to_json(res.B_star);
    j["C_star"] = matrix_to_json(res.C_star);
  } else {
    const std::string b = sidecar_prefix + ".B.csv", c = sidecar_prefix + ".C.csv";
    write_dense_csv_file(b, res.B_star);
    write_dense_csv_file(c, res.C_star);
    j["B_star_file"] = b;
    j["C_star_file"] = c;
  }
  if (!res.history.empty()) {
    Json h = Json::array();
    for (const auto& s : res.history)
      h.push_back({{"iteration", s.iteration},
                   {"mu", s.mu},
                   {"primal_residual", s.primal_residual},
                   {"dual_residual", s.dual_residual},
                   {"lagrangian_before", s.lagrangian_before},
                   {"lagrangian_after", s.lagrangian_after}});
    j["history"] = std::move(h);
  }
  return j;
}

Json to_json(const IncoherenceReport& rep) {
  return {{"mu_row", rep.mu_row}, {"mu_col", rep.mu_col}, {"mu_joint", rep.mu_joint},
          {"mu", rep.mu},         {"r", rep.r},           {"n", rep.n}};
}

Json to_json(const CertificateReport& rep, bool include_matrices) {
  Json j;
  j["lambda"] = rep.lambda;
  j["norm_QB"] = rep.norm_QB;
  j["residual_golfing"] = rep.residual_golfing;
  j["linf_complement_B"] = rep.linf_complement_B;
  j["norm_QC"] = rep.norm_QC;
  j["linf_complement_C"] = rep.linf_complement_C;
  j["opnorm_PGPT"] = rep.opnorm_PGPT;
  j["conditions"] = rep.conditions;
  j["overall"] = rep.overall;
  j["gamma_size"] = rep.gamma_size;
  j["incoherence"] = to_json(rep.incoherence);
  j["golfing"] = {{"k0", rep.golfing.k0}, {"q", rep.golfing.q}, {"p", rep.golfing.p}, {"seed", rep.golfing.seed}};
  j["golfing_trace"] = rep.golfing_trace;
  j["neumann_terms"] = rep.neumann_terms;
  j["neumann_converged"] = rep.neumann_converged;
  j["regime"] = {{"p", rep.regime_p}, {"bound", rep.regime_bound}, {"satisfied", rep.in_regime}};
  j["combined"] = {{"norm_Q", rep.norm_Q},
                   {"residual", rep.residual_combined},
                   {"linf_complement", rep.linf_complement_Q}};
  if (include_matrices) {
    j["Q_B"] = matrix_to_json(rep.Q_B);
    j["Q_C"] = matrix_to_json(rep.Q_C);
  }
  return j;
}

Json to_json(const GridSpec& spec) {
  Json j;
  j["axis1"] = {{"name", spec.axis1.name}, {"values", spec.axis1.values}};
  j["axis2"] = {{"name", spec.axis2.name}, {"values", spec.axis2.values}};
  j["fixed"] = {{"n", spec.fixed.n}, {"n_c", spec.fixed.n_c}, {"gamma", spec.fixed.gamma}, {"rho", spec.fixed.rho}};
  j["trials"] = spec.trials;
  j["base_seed"] = spec.base_seed;
  j["threads"] = spec.threads;
  j["solver"] = {{"lambda", spec.solver.lambda ? Json(*spec.solver.lambda) : Json("1/sqrt(n)")},
                 {"tol_primal", spec.solver.tol_primal},
                 {"tol_dual", spec.solver.tol_dual},
                 {"max_iters", spec.solver.max_iters},
                 {"mu_growth", spec.solver.mu_growth}};
  return j;
}

Json grid_manifest(const RecoveryGrid& grid, const ManifestInfo& info) {
  Json j;
  j["code_version"] = code_version();
  j["kind"] = info.kind;
  j["complete"] = grid.complete && !info.interrupted;
  j["spec"] = to_json(grid.spec);
  j["files"] = {{"success_rate_csv", info.csv_path}, {"success_rate_pgm", info.pgm_path},
                {"mean_rel_error_csv", info.error_csv_path}};
  j["elapsed_seconds"] = info.elapsed_seconds;
  j["success_rate"] = grid_matrix(grid.success_rate);
  j["mean_rel_error"] = grid_matrix(grid.mean_rel_error);
  j["cell_seconds"] = grid_matrix(grid.wall_times);
  j["completed_trials"] = grid_matrix(grid.completed.cast<double>());
  j["failures"] = grid.failures;
  return j;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << j.dump(2) << '\n';
  if (!os) throw IoError("write to '" + path + "' failed");
}

}  // namespace qcr
