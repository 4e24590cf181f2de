#include "qcr/certificate.hpp"

#include "qcr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qcr {

IncoherenceReport incoherence(const TangentSpace& T) {
  if (T.rank() == 0) throw InvalidArgument("incoherence: rank-zero factors");
  IncoherenceReport rep;
  rep.n = T.dim();
  rep.r = T.rank();
  const double n = static_cast<double>(rep.n);
  const double r = static_cast<double>(rep.r);
  rep.mu_row = n / r * T.U.rowwise().squaredNorm().maxCoeff();
  rep.mu_col = n / r * T.V.rowwise().squaredNorm().maxCoeff();
  const double uv_inf = (T.U * T.V.transpose()).cwiseAbs().maxCoeff();
  rep.mu_joint = n * n / r * uv_inf * uv_inf;
  rep.mu = std::max({rep.mu_row, rep.mu_col, rep.mu_joint});
  return rep;
}

IncoherenceReport incoherence(const Matrix& B0, double rank_tol) {
  require_square(B0, "incoherence");
  require_finite(B0, "incoherence");
  if (B0.cwiseAbs().maxCoeff() == 0.0) throw InvalidArgument("incoherence: zero matrix has rank 0");
  return incoherence(TangentSpace::from_svd(svd(B0, rank_tol)));
}

std::size_t default_golfing_batches(std::ptrdiff_t n) {
  if (n < 1) throw InvalidArgument("default_golfing_batches: n must be positive");
  const auto k = static_cast<std::size_t>(20.0 * std::ceil(std::log(static_cast<double>(n))));
  return std::max<std::size_t>(k, 1);
}

GolfingConfig GolfingConfig::from_p(double p, std::size_t k0, std::uint64_t seed) {
  GolfingConfig cfg;
  cfg.p = p;
  cfg.k0 = k0;
  cfg.seed = seed;
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("golfing: p must lie in [0, 1]");
  if (k0 == 0) throw InvalidArgument("golfing: k0 must be positive");
  // 1 - q = p^(1/k0), computed without cancellation.
  cfg.q = p == 0.0 ? 1.0 : -std::expm1(std::log(p) / static_cast<double>(k0));
  cfg.validate();
  return cfg;
}

GolfingConfig GolfingConfig::for_instance(const PlantedInstance& inst, std::uint64_t seed,
                                          std::optional<std::size_t> k0) {
  const auto n = inst.params.n;
  const double cells = static_cast<double>(n) * static_cast<double>(n);
  const double p = static_cast<double>(inst.noise_support.size()) / cells;
  return from_p(p, k0 ? *k0 : default_golfing_batches(n), seed);
}

void GolfingConfig::validate() const {
  if (k0 == 0) throw InvalidArgument("golfing: k0 must be positive");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("golfing: q must lie in [0, 1]");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("golfing: p must lie in [0, 1]");
  const double implied = std::pow(1.0 - q, static_cast<double>(k0));
  if (std::abs(implied - p) > 1e-12) {
    std::ostringstream os;
    os << "golfing: (1 - q)^k0 = " << implied << " does not match p = " << p;
    throw InvalidArgument(os.str());
  }
}

std::vector<SupportSet> partition_complement(const SupportSet& Gamma, const GolfingConfig& cfg) {
  cfg.validate();
  const auto n = Gamma.dim();
  const SupportSet complement = Gamma.complement();
  std::vector<SupportSet> batches;
  batches.reserve(cfg.k0);
  for (std::size_t k = 0; k < cfg.k0; ++k) {
    const SupportSet draw = gen_bernoulli_support(n, cfg.q, hash_words({cfg.seed, 0x601f, k}));
    batches.push_back(draw.intersect(complement));
  }
  return batches;
}

GolfingResult golfing_QB(const TangentSpace& T, const std::vector<SupportSet>& batches,
                         double sampling_rate) {
  if (!(sampling_rate > 0.0 && sampling_rate <= 1.0))
    throw InvalidArgument("golfing_QB: sampling rate must lie in (0, 1]");
  if (batches.empty()) throw InvalidArgument("golfing_QB: no batches");
  const auto n = T.dim();
  for (const auto& b : batches)
    if (b.dim() != n) throw InvalidArgument("golfing_QB: batch dimension differs from tangent space");

  const Matrix UV = T.U * T.V.transpose();
  GolfingResult res;
  res.Y = Matrix::Zero(n, n);
  Matrix Z = UV;
  res.trace.push_back(Z.norm());
  for (const auto& batch : batches) {
    res.Y += project_support(Z, batch) / sampling_rate;
    Z = UV - project_T(res.Y, T);
    res.trace.push_back(Z.norm());
  }
  res.Q_B = project_T_perp(res.Y, T);
  return res;
}

NeumannResult neumann_QC(const SupportSet& Gamma, const TangentSpace& T, const Matrix& sign_C0,
                         double lambda, double tol, std::size_t max_terms,
                         std::optional<double> known_opnorm) {
  const auto n = T.dim();
  if (Gamma.dim() != n || sign_C0.rows() != n || sign_C0.cols() != n)
    throw InvalidArgument("neumann_QC: dimension mismatch");
  if (!(tol > 0.0)) throw InvalidArgument("neumann_QC: tol must be positive");
  if (max_terms == 0) throw InvalidArgument("neumann_QC: max_terms must be positive");

  NeumannResult res;
  res.Q_C = Matrix::Zero(n, n);
  const double sgn_norm = sign_C0.norm();
  if (Gamma.empty() || sgn_norm == 0.0) {
    res.converged = true;
    return res;
  }
  if ((project_support(sign_C0, Gamma.complement())).cwiseAbs().maxCoeff() != 0.0)
    throw InvalidArgument("neumann_QC: sign matrix is not supported on Gamma");

  res.opnorm = known_opnorm ? *known_opnorm : opnorm_PGammaPT(Gamma, T).value;
  if (res.opnorm >= 1.0 - 1e-6) {
    std::ostringstream os;
    os << "Neumann series does not converge: ||P_Gamma P_T|| = " << res.opnorm;
    throw NeumannNonconvergence(os.str());
  }

  Matrix term = sign_C0;
  Matrix sum = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < max_terms; ++k) {
    sum += term;
    res.terms = k + 1;
    if (term.norm() < tol * sgn_norm) {
      res.converged = true;
      break;
    }
    term = project_support(project_T(term, T), Gamma);
  }
  res.Q_C = lambda * project_T_perp(sum, T);
  return res;
}

CertificateReport verify_certificate(const PlantedInstance& inst, double lambda, const GolfingConfig& cfg,
                                     const CertificateOptions& opts) {
  if (!(lambda > 0.0)) throw InvalidArgument("verify_certificate: lambda must be positive");
  cfg.validate();
  const auto n = inst.params.n;
  const SvdFactors f = svd(inst.B0);
  if (f.rank() == 0) throw InvalidArgument("verify_certificate: B0 is zero");
  const TangentSpace T = TangentSpace::from_svd(f);
  const SupportSet& Gamma = inst.noise_support;
  const SupportSet off = Gamma.complement();
  const Matrix sgn = inst.sign_C0();
  const Matrix UV = T.U * T.V.transpose();

  CertificateReport rep;
  rep.lambda = lambda;
  rep.golfing = cfg;
  rep.gamma_size = Gamma.size();
  rep.incoherence = incoherence(T);

  const double ln = std::log(static_cast<double>(n));
  rep.regime_p = inst.params.gamma;
  rep.regime_bound = opts.c0 * rep.incoherence.mu * static_cast<double>(T.rank()) * ln / static_cast<double>(n);
  rep.in_regime = rep.regime_p >= rep.regime_bound;

  rep.opnorm_PGPT = opnorm_PGammaPT(Gamma, T, opts.opnorm_tol).value;

  GolfingResult golf = golfing_QB(T, partition_complement(Gamma, cfg), cfg.q);
  rep.Q_B = std::move(golf.Q_B);
  rep.golfing_trace = std::move(golf.trace);

  NeumannResult neu = neumann_QC(Gamma, T, sgn, lambda, opts.neumann_tol, opts.neumann_max_terms,
                                 rep.opnorm_PGPT);
  rep.Q_C = std::move(neu.Q_C);
  rep.neumann_terms = neu.terms;
  rep.neumann_converged = neu.converged;

  const Matrix UVQB = UV + rep.Q_B;
  rep.norm_QB = norm(rep.Q_B, NormKind::spectral);
  rep.residual_golfing = project_support(UVQB, Gamma).norm();
  rep.linf_complement_B = norm(project_support(UVQB, off), NormKind::linf);
  rep.norm_QC = norm(rep.Q_C, NormKind::spectral);
  rep.linf_complement_C = norm(project_support(rep.Q_C, off), NormKind::linf);

  rep.conditions = {rep.norm_QB < 1.0 / 8.0, rep.residual_golfing < lambda / 8.0,
                    rep.linf_complement_B < lambda / 4.0, rep.norm_QC < 1.0 / 8.0,
                    rep.linf_complement_C < 1.0 / 4.0};
  rep.overall = std::all_of(rep.conditions.begin(), rep.conditions.end(), [](bool b) { return b; }) &&
                rep.opnorm_PGPT <= 0.5 && lambda < 1.0;

  const Matrix Q = rep.Q_B + rep.Q_C;
  rep.norm_Q = norm(Q, NormKind::spectral);
  rep.residual_combined = project_support(UV - lambda * sgn + Q, Gamma).norm();
  rep.linf_complement_Q = norm(project_support(UV + Q, off), NormKind::linf);
  return rep;
}

ConcentrationReport check_concentration(const TangentSpace& T, const SupportSet& Gamma_k, double p,
                                        const Matrix& Z, double c) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("check_concentration: p must lie in (0, 1]");
  const auto n = T.dim();
  if (Gamma_k.dim() != n || Z.rows() != n || Z.cols() != n)
    throw InvalidArgument("check_concentration: dimension mismatch");

  ConcentrationReport rep;
  rep.p = p;
  rep.log_n = std::log(static_cast<double>(n));
  rep.z_linf = norm(Z, NormKind::linf);
  rep.z_linf2 = norm(Z, NormKind::linf2);
  rep.mu = T.rank() > 0 ? incoherence(T).mu : 0.0;

  const Matrix sampled = project_support(Z, Gamma_k) / p;
  rep.sampling_spectral = norm(sampled - Z, NormKind::spectral);
  rep.sampling_bound = c * (rep.log_n / p * rep.z_linf + std::sqrt(rep.log_n / p) * rep.z_linf2);
  rep.sampling_bound_linf = c * std::sqrt(static_cast<double>(n) * rep.log_n / p) * rep.z_linf;

  rep.tangent_linf2 = norm(project_T(Z, T) - project_T(sampled, T), NormKind::linf2);
  rep.tangent_linf2_bound =
      rep.mu > 0.0
          ? 0.5 * std::sqrt(static_cast<double>(n) / (rep.mu * static_cast<double>(T.rank()))) * rep.z_linf +
                0.5 * rep.z_linf2
          : 0.5 * rep.z_linf2;

  const Matrix PTZ = project_T(Z, T);
  rep.tangent_linf = norm(PTZ - project_T(project_support(PTZ, Gamma_k), T) / p, NormKind::linf);
  rep.tangent_linf_bound = 0.5 * rep.z_linf;
  return rep;
}

OpNormEstimate tangent_deviation_norm(const TangentSpace& T, const SupportSet& Gamma, double p, double tol,
                                      std::size_t max_iters, std::uint64_t seed) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("tangent_deviation_norm: p must lie in (0, 1]");
  if (Gamma.dim() != T.dim()) throw InvalidArgument("tangent_deviation_norm: dimension mismatch");
  OpNormEstimate est;
  if (T.rank() == 0) return est;

  const auto n = T.dim();
  auto apply = [&](const Matrix& X) {
    return Matrix(X - project_T(project_support(X, Gamma), T) / p);
  };
  CounterRng rng(seed);
  Matrix X(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = rng.normal();
  X = project_T(X, T);
  X /= X.norm();

  // The operator is self-adjoint on T; iterate its square.
  double prev = -1.0, value = 0.0;
  est.converged = false;
  for (std::size_t it = 1; it <= max_iters; ++it) {
    const Matrix Y = apply(X);
    value = Y.norm();
    est.iterations = it;
    if (value == 0.0) {
      est.converged = true;
      break;
    }
    const Matrix W = apply(Y);
    const double nw = W.norm();
    if (nw == 0.0) {
      est.converged = true;
      break;
    }
    X = W / nw;
    if (prev >= 0.0 && std::abs(value - prev) <= tol * value) {
      est.converged = true;
      break;
    }
    prev = value;
  }
  est.value = value;
  return est;
}

}  // namespace qcr
