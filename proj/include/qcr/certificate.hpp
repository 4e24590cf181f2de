#pragma once

// Dual certificate for the planted decomposition: Q = Q_B + Q_C with Q_B
// built by the golfing scheme over batches of Gamma^C and Q_C by a truncated
// Neumann series, plus the incoherence parameters of the low-rank part.

#include "qcr/instance.hpp"
#include "qcr/linalg.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace qcr {

struct IncoherenceReport {
  double mu_row = 0.0;    // n/r max_i ||U^T e_i||^2
  double mu_col = 0.0;    // n/r max_i ||V^T e_i||^2
  double mu_joint = 0.0;  // n^2/r ||U V^T||_inf^2
  double mu = 0.0;
  std::ptrdiff_t r = 0;
  std::ptrdiff_t n = 0;
};

[[nodiscard]] IncoherenceReport incoherence(const Matrix& B0, double rank_tol = kDefaultRankTol);
[[nodiscard]] IncoherenceReport incoherence(const TangentSpace& T);

/// 20 * ceil(ln n), at least 1.
[[nodiscard]] std::size_t default_golfing_batches(std::ptrdiff_t n);

struct GolfingConfig {
  std::size_t k0 = 1;
  double q = 1.0;  // per-batch sampling probability
  double p = 0.0;  // probability that an index lies in Gamma; (1 - q)^k0 = p
  std::uint64_t seed = 0;

  /// q derived from p so that (1 - q)^k0 = p.
  static GolfingConfig from_p(double p, std::size_t k0, std::uint64_t seed);
  /// p = |Gamma| / n^2 of the instance, k0 = default_golfing_batches(n).
  static GolfingConfig for_instance(const PlantedInstance& inst, std::uint64_t seed,
                                    std::optional<std::size_t> k0 = {});

  void validate() const;
};

/// Gamma_1..Gamma_k0: i.i.d. Bernoulli(q) over the full grid, each
/// intersected with Gamma^C.
[[nodiscard]] std::vector<SupportSet> partition_complement(const SupportSet& Gamma,
                                                           const GolfingConfig& cfg);

struct GolfingResult {
  Matrix Q_B;
  Matrix Y;                    // Y_k0
  std::vector<double> trace;   // ||Z_k||_F for k = 0..k0, Z_0 = U V^T
};

/// Y_k = Y_{k-1} + P_{Gamma_k} P_T (U V^T - Y_{k-1}) / sampling_rate,
/// Q_B = P_T-perp Y_k0.
[[nodiscard]] GolfingResult golfing_QB(const TangentSpace& T, const std::vector<SupportSet>& batches,
                                       double sampling_rate);

/// Raised when ||P_Gamma P_T|| is too close to 1 for the series to converge.
class NeumannNonconvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kNeumannTol = 1e-10;
inline constexpr std::size_t kNeumannMaxTerms = 200;

struct NeumannResult {
  Matrix Q_C;
  std::size_t terms = 0;
  bool converged = false;   // tolerance reached before max_terms
  double opnorm = 0.0;      // ||P_Gamma P_T|| used for the divergence check
};

/// Q_C = lambda P_T-perp sum_k (P_Gamma P_T P_Gamma)^k Sgn(C0), truncated once
/// a term drops below tol * ||Sgn(C0)||_F (that term is kept) or after
/// max_terms terms. Pass a known ||P_Gamma P_T|| to skip the power iteration.
[[nodiscard]] NeumannResult neumann_QC(const SupportSet& Gamma, const TangentSpace& T, const Matrix& sign_C0,
                                       double lambda, double tol = kNeumannTol,
                                       std::size_t max_terms = kNeumannMaxTerms,
                                       std::optional<double> known_opnorm = {});

struct CertificateOptions {
  double c0 = 1.0;  // constant in the regime diagnostic p >= c0 mu r log n / n
  double neumann_tol = kNeumannTol;
  std::size_t neumann_max_terms = kNeumannMaxTerms;
  double opnorm_tol = 1e-9;
};

struct CertificateReport {
  Matrix Q_B;
  Matrix Q_C;
  double norm_QB = 0.0;
  double residual_golfing = 0.0;   // ||P_Gamma (U V^T + Q_B)||_F
  double linf_complement_B = 0.0;  // ||P_Gamma-perp (U V^T + Q_B)||_inf
  double norm_QC = 0.0;
  double linf_complement_C = 0.0;  // ||P_Gamma-perp Q_C||_inf
  double opnorm_PGPT = 0.0;
  double lambda = 0.0;
  std::array<bool, 5> conditions{};
  bool overall = false;

  IncoherenceReport incoherence;
  GolfingConfig golfing;
  std::vector<double> golfing_trace;
  std::size_t neumann_terms = 0;
  bool neumann_converged = false;
  std::size_t gamma_size = 0;

  // Regime diagnostic, never a gate: gamma >= c0 mu r log n / n.
  double regime_p = 0.0;
  double regime_bound = 0.0;
  bool in_regime = false;

  // Conditions on the combined Q = Q_B + Q_C.
  double norm_Q = 0.0;                 // want < 1/2
  double residual_combined = 0.0;      // ||P_Gamma(U V^T - lambda Sgn + Q)||_F, want <= lambda/4
  double linf_complement_Q = 0.0;      // ||P_Gamma-perp(U V^T + Q)||_inf, want < lambda/2
};

[[nodiscard]] CertificateReport verify_certificate(const PlantedInstance& inst, double lambda,
                                                   const GolfingConfig& cfg,
                                                   const CertificateOptions& opts = {});

struct ConcentrationReport {
  double p = 0.0;
  double log_n = 0.0;
  double z_linf = 0.0;
  double z_linf2 = 0.0;
  double mu = 0.0;
  // ||(p^-1 P_Gamma - I) Z|| against c(log n / p ||Z||_inf + sqrt(log n / p) ||Z||_inf2)
  double sampling_spectral = 0.0;
  double sampling_bound = 0.0;
  // the same left side against c sqrt(n log n / p) ||Z||_inf
  double sampling_bound_linf = 0.0;
  // ||(P_T - p^-1 P_T P_Gamma) Z||_inf2 against 1/2 sqrt(n/(mu r)) ||Z||_inf + 1/2 ||Z||_inf2
  double tangent_linf2 = 0.0;
  double tangent_linf2_bound = 0.0;
  // ||(P_T - p^-1 P_T P_Gamma P_T) Z||_inf against 1/2 ||Z||_inf
  double tangent_linf = 0.0;
  double tangent_linf_bound = 0.0;
};

/// Measured sides of the concentration inequalities used by the golfing
/// analysis, with constant c in the spectral bounds.
[[nodiscard]] ConcentrationReport check_concentration(const TangentSpace& T, const SupportSet& Gamma_k,
                                                      double p, const Matrix& Z, double c = 1.0);

/// ||P_T - p^-1 P_T P_Gamma P_T|| as an operator on T, by power iteration.
[[nodiscard]] OpNormEstimate tangent_deviation_norm(const TangentSpace& T, const SupportSet& Gamma,
                                                    double p, double tol = 1e-9,
                                                    std::size_t max_iters = kPowerIterationCap,
                                                    std::uint64_t seed = 0x5eed);

}  // namespace qcr
