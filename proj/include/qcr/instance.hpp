#pragma once

// Seeded planted quasi-clique instances and the random matrices used by the
// property tests.
//
// Planted model: vertices 0..n_c-1 form the block Omega (diagonal
// included). Each upper-triangle pair (i <= j) consumes exactly one uniform
// draw, in row-major order: inside Omega it becomes an edge with probability
// gamma, outside with probability rho; edges are mirrored.
//
//   X     = sampled quasi-clique adjacency (supported in Omega)
//   X_hat = diversionary adjacency (supported outside Omega)
//   A     = X + X_hat
//
// The decomposition targets are B0 = 1 on Omega (rank one) and
// C0 = A - B0, which is -1 on missing quasi-clique pairs and +1 on
// diversionary edges.

#include "qcr/linalg.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace qcr {

struct InstanceParams {
  std::ptrdiff_t n = 0;
  std::ptrdiff_t n_c = 0;
  double gamma = 1.0;
  double rho = 0.0;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument naming the violated bound.
  void validate() const;
  bool operator==(const InstanceParams&) const = default;
};

struct PlantedInstance {
  InstanceParams params;
  Matrix A;
  Matrix X;       // sampled quasi-clique adjacency
  Matrix X_hat;   // diversionary edges
  Matrix B0;      // indicator of Omega
  Matrix C0;      // A - B0
  SupportSet omega;
  SupportSet gamma_support;  // nonzeros of X
  SupportSet noise_support;  // nonzeros of C0 (Gamma)

  /// Sgn(C0).
  [[nodiscard]] Matrix sign_C0() const;
};

[[nodiscard]] PlantedInstance gen_planted(const InstanceParams& params);

/// Rebuilds every derived field from (params, A); A must be symmetric binary
/// with vertex block 0..n_c-1 as Omega.
[[nodiscard]] PlantedInstance planted_from_adjacency(const InstanceParams& params, Matrix A);

/// Each (i, j) independently with probability p. With symmetric = true only
/// i <= j is drawn and mirrored.
[[nodiscard]] SupportSet gen_bernoulli_support(std::ptrdiff_t n, double p, std::uint64_t seed,
                                               bool symmetric = false);

/// Entries +1 w.p. p/2, -1 w.p. p/2, 0 otherwise.
[[nodiscard]] Matrix gen_random_sign_sparse(std::ptrdiff_t n, double p, std::uint64_t seed,
                                            bool symmetric = false);

/// G H^T with n x r standard normal factors.
[[nodiscard]] Matrix gen_low_rank(std::ptrdiff_t n, std::ptrdiff_t r, std::uint64_t seed);

// ------------------------------------------------------------------ file I/O
//
// Instance text format:
//
//   n n_c gamma rho seed
//   i j v            (one line per nonzero of A, row-major, 0-based)
//
// n_c = 0 marks a bare matrix without ground truth; gamma/rho/seed are then
// ignored. Values are printed in shortest round-trip form.

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MatrixFile {
  Matrix M;
  std::optional<PlantedInstance> truth;
};

void write_instance(std::ostream& os, const PlantedInstance& inst);
void write_instance_file(const std::string& path, const PlantedInstance& inst);
void write_matrix(std::ostream& os, const Matrix& M);
void write_matrix_file(const std::string& path, const Matrix& M);

/// Reads the triplet format, or dense CSV when the path ends in ".csv".
[[nodiscard]] MatrixFile read_matrix_file(const std::string& path);
[[nodiscard]] MatrixFile read_instance(std::istream& is, const std::string& origin = "<stream>");

void write_dense_csv(std::ostream& os, const Matrix& M);
void write_dense_csv_file(const std::string& path, const Matrix& M);
[[nodiscard]] Matrix read_dense_csv(std::istream& is, const std::string& origin = "<stream>");

/// Shortest decimal form that round-trips a double exactly.
[[nodiscard]] std::string format_double(double v);

}  // namespace qcr
