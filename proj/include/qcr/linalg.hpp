#pragma once

// Dense kernels shared by every other module: SVD, matrix norms, proximal
// operators and the projections onto T, T-perp and a support set.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qcr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised for malformed arguments: shape mismatches, non-finite entries,
/// out-of-range parameters.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDefaultRankTol = 1e-8;

struct SvdFactors {
  Matrix U;            // n x r, orthonormal columns
  Vector sigma;        // r values, nonincreasing, all > rank_tol * sigma_max
  Matrix V;            // n x r, orthonormal columns
  Vector spectrum;     // all n singular values, nonincreasing
  double rank_tol = kDefaultRankTol;

  [[nodiscard]] std::ptrdiff_t rank() const { return sigma.size(); }
  [[nodiscard]] Matrix reconstruct() const;
};

/// Index set over an n x n grid, stored as a dense mask.
class SupportSet {
 public:
  SupportSet() = default;
  explicit SupportSet(std::ptrdiff_t n);

  static SupportSet full(std::ptrdiff_t n);
  static SupportSet from_indices(std::ptrdiff_t n,
                                 const std::vector<std::pair<std::ptrdiff_t, std::ptrdiff_t>>& idx);
  /// Nonzero pattern of M (square).
  static SupportSet nonzeros_of(const Matrix& M);

  [[nodiscard]] std::ptrdiff_t dim() const { return n_; }
  [[nodiscard]] std::size_t size() const { return count_; }
  [[nodiscard]] bool empty() const { return count_ == 0; }
  [[nodiscard]] bool contains(std::ptrdiff_t i, std::ptrdiff_t j) const;

  void insert(std::ptrdiff_t i, std::ptrdiff_t j);
  void erase(std::ptrdiff_t i, std::ptrdiff_t j);

  [[nodiscard]] SupportSet complement() const;
  [[nodiscard]] SupportSet intersect(const SupportSet& other) const;
  [[nodiscard]] SupportSet unite(const SupportSet& other) const;
  [[nodiscard]] bool is_subset_of(const SupportSet& other) const;
  [[nodiscard]] bool disjoint_from(const SupportSet& other) const;

  /// Row-major list of member indices.
  [[nodiscard]] std::vector<std::pair<std::ptrdiff_t, std::ptrdiff_t>> indices() const;
  [[nodiscard]] const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& mask() const { return mask_; }

  bool operator==(const SupportSet& other) const;

 private:
  void check_index(std::ptrdiff_t i, std::ptrdiff_t j) const;

  std::ptrdiff_t n_ = 0;
  std::size_t count_ = 0;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask_;
};

/// T = { U X^T + Y V^T }. An r = 0 space is the zero subspace.
struct TangentSpace {
  Matrix U;
  Matrix V;

  TangentSpace() = default;
  TangentSpace(Matrix u, Matrix v);
  static TangentSpace from_svd(const SvdFactors& f) { return {f.U, f.V}; }

  [[nodiscard]] std::ptrdiff_t dim() const { return U.rows(); }
  [[nodiscard]] std::ptrdiff_t rank() const { return U.cols(); }
};

enum class NormKind { nuclear, spectral, frobenius, l1, linf, linf2 };

[[nodiscard]] std::string to_string(NormKind kind);
[[nodiscard]] NormKind norm_kind_from_string(const std::string& name);

void require_finite(const Matrix& M, const char* what);
void require_square(const Matrix& M, const char* what);

/// Thin SVD with numerical rank r = #{sigma_i > rank_tol * sigma_1}.
/// Symmetric inputs go through the self-adjoint eigensolver; everything else
/// through divide-and-conquer SVD.
[[nodiscard]] SvdFactors svd(const Matrix& M, double rank_tol = kDefaultRankTol);

/// All singular values, nonincreasing.
[[nodiscard]] Vector singular_values(const Matrix& M);

[[nodiscard]] double norm(const Matrix& M, NormKind kind);

/// max |M_ij - M_ji|
[[nodiscard]] double asymmetry(const Matrix& M);
[[nodiscard]] bool is_symmetric(const Matrix& M, double tol = 1e-12);

/// Entrywise sign(m) * max(|m| - tau, 0).
[[nodiscard]] Matrix soft_threshold(const Matrix& M, double tau);

/// U diag(max(sigma - tau, 0)) V^T.
[[nodiscard]] Matrix sv_threshold(const Matrix& M, double tau);

struct ShrinkResult {
  Matrix value;
  double nuclear_norm = 0.0;  // of value
  std::ptrdiff_t rank = 0;    // singular values kept
};

/// sv_threshold that also reports the nuclear norm and rank of the result.
[[nodiscard]] ShrinkResult shrink_singular_values(const Matrix& M, double tau);

[[nodiscard]] Matrix project_T(const Matrix& Z, const TangentSpace& T);
[[nodiscard]] Matrix project_T_perp(const Matrix& Z, const TangentSpace& T);
[[nodiscard]] Matrix project_support(const Matrix& Z, const SupportSet& S);

/// Trace inner product <A, B>.
[[nodiscard]] double inner(const Matrix& A, const Matrix& B);

struct OpNormEstimate {
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
};

inline constexpr std::size_t kPowerIterationCap = 10000;

/// ||P_S P_T|| by power iteration on P_T P_S P_T from a seeded random start.
/// Stops when successive Rayleigh quotients differ by less than tol; on
/// hitting the cap the best estimate is returned with converged = false.
[[nodiscard]] OpNormEstimate opnorm_PGammaPT(const SupportSet& S, const TangentSpace& T,
                                             double tol = 1e-9,
                                             std::size_t max_iters = kPowerIterationCap,
                                             std::uint64_t seed = 0x5eed);

}  // namespace qcr
