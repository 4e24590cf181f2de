#pragma once

// JSON views of solver results, certificate reports and grid runs.

#include "qcr/certificate.hpp"
#include "qcr/experiment.hpp"
#include "qcr/solver.hpp"

#include <json.hpp>

#include <string>

namespace qcr {

using Json = nlohmann::ordered_json;

/// Matrices up to this size are inlined as nested arrays; larger ones go to
/// CSV files next to the JSON.
inline constexpr std::ptrdiff_t kInlineMatrixLimit = 500;

[[nodiscard]] Json matrix_to_json(const Matrix& M);
[[nodiscard]] Matrix matrix_from_json(const Json& j);

/// `sidecar_prefix` names the CSV files used when n exceeds the inline limit
/// (<prefix>.B.csv, <prefix>.C.csv).
[[nodiscard]] Json to_json(const DecompositionResult& res, const std::string& sidecar_prefix);
[[nodiscard]] Json to_json(const IncoherenceReport& rep);
[[nodiscard]] Json to_json(const CertificateReport& rep, bool include_matrices = false);
[[nodiscard]] Json to_json(const GridSpec& spec);

struct ManifestInfo {
  std::string kind;  // "size" or "phase"
  std::string csv_path;
  std::string pgm_path;
  std::string error_csv_path;
  double elapsed_seconds = 0.0;
  bool interrupted = false;
};

[[nodiscard]] Json grid_manifest(const RecoveryGrid& grid, const ManifestInfo& info);

void write_json_file(const std::string& path, const Json& j);

[[nodiscard]] const char* code_version();

}  // namespace qcr
