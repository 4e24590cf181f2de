#include "qcr/linalg.hpp"

#include "qcr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qcr {

namespace {

std::string shape_of(const Matrix& M) {
  std::ostringstream os;
  os << M.rows() << "x" << M.cols();
  return os.str();
}

// Full (untruncated) singular triplets of a square matrix, sorted
// nonincreasing.
struct FullSvd {
  Matrix U;
  Vector s;
  Matrix V;
};

FullSvd full_svd(const Matrix& M) {
  const auto n = M.rows();
  FullSvd out;
  if (n == 0) {
    out.U.resize(0, 0);
    out.V.resize(0, 0);
    out.s.resize(0);
    return out;
  }
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if (is_symmetric(M, 1e-12 * scale)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    const Vector& lam = es.eigenvalues();
    const Matrix& Q = es.eigenvectors();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return std::abs(lam(a)) > std::abs(lam(b));
    });
    out.U.resize(n, n);
    out.V.resize(n, n);
    out.s.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Index src = order[static_cast<std::size_t>(k)];
      out.s(k) = std::abs(lam(src));
      out.U.col(k) = Q.col(src);
      out.V.col(k) = lam(src) < 0.0 ? Vector(-Q.col(src)) : Vector(Q.col(src));
    }
    return out;
  }
  Eigen::BDCSVD<Matrix> sv(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.U = sv.matrixU();
  out.s = sv.singularValues();
  out.V = sv.matrixV();
  return out;
}

}  // namespace

// ---------------------------------------------------------------- SvdFactors

Matrix SvdFactors::reconstruct() const {
  if (rank() == 0) return Matrix::Zero(U.rows(), V.rows());
  return U * sigma.asDiagonal() * V.transpose();
}

// ---------------------------------------------------------------- SupportSet

SupportSet::SupportSet(std::ptrdiff_t n) : n_(n), mask_(n, n) {
  if (n < 0) throw InvalidArgument("SupportSet: negative dimension");
  mask_.setConstant(false);
}

SupportSet SupportSet::full(std::ptrdiff_t n) {
  SupportSet s(n);
  s.mask_.setConstant(true);
  s.count_ = static_cast<std::size_t>(n * n);
  return s;
}

SupportSet SupportSet::from_indices(
    std::ptrdiff_t n, const std::vector<std::pair<std::ptrdiff_t, std::ptrdiff_t>>& idx) {
  SupportSet s(n);
  for (const auto& [i, j] : idx) s.insert(i, j);
  return s;
}

SupportSet SupportSet::nonzeros_of(const Matrix& M) {
  require_square(M, "SupportSet::nonzeros_of");
  SupportSet s(M.rows());
  s.mask_ = M.array() != 0.0;
  s.count_ = static_cast<std::size_t>(s.mask_.count());
  return s;
}

void SupportSet::check_index(std::ptrdiff_t i, std::ptrdiff_t j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) {
    std::ostringstream os;
    os << "SupportSet: index (" << i << ", " << j << ") outside [0, " << n_ << ")^2";
    throw InvalidArgument(os.str());
  }
}

bool SupportSet::contains(std::ptrdiff_t i, std::ptrdiff_t j) const {
  check_index(i, j);
  return mask_(i, j);
}

void SupportSet::insert(std::ptrdiff_t i, std::ptrdiff_t j) {
  check_index(i, j);
  if (!mask_(i, j)) {
    mask_(i, j) = true;
    ++count_;
  }
}

void SupportSet::erase(std::ptrdiff_t i, std::ptrdiff_t j) {
  check_index(i, j);
  if (mask_(i, j)) {
    mask_(i, j) = false;
    --count_;
  }
}

SupportSet SupportSet::complement() const {
  SupportSet s(n_);
  s.mask_ = !mask_;
  s.count_ = static_cast<std::size_t>(n_ * n_) - count_;
  return s;
}

SupportSet SupportSet::intersect(const SupportSet& other) const {
  if (other.n_ != n_) throw InvalidArgument("SupportSet::intersect: dimension mismatch");
  SupportSet s(n_);
  s.mask_ = mask_ && other.mask_;
  s.count_ = static_cast<std::size_t>(s.mask_.count());
  return s;
}

SupportSet SupportSet::unite(const SupportSet& other) const {
  if (other.n_ != n_) throw InvalidArgument("SupportSet::unite: dimension mismatch");
  SupportSet s(n_);
  s.mask_ = mask_ || other.mask_;
  s.count_ = static_cast<std::size_t>(s.mask_.count());
  return s;
}

bool SupportSet::is_subset_of(const SupportSet& other) const {
  return intersect(other).size() == count_;
}

bool SupportSet::disjoint_from(const SupportSet& other) const { return intersect(other).empty(); }

std::vector<std::pair<std::ptrdiff_t, std::ptrdiff_t>> SupportSet::indices() const {
  std::vector<std::pair<std::ptrdiff_t, std::ptrdiff_t>> out;
  out.reserve(count_);
  for (std::ptrdiff_t i = 0; i < n_; ++i)
    for (std::ptrdiff_t j = 0; j < n_; ++j)
      if (mask_(i, j)) out.emplace_back(i, j);
  return out;
}

bool SupportSet::operator==(const SupportSet& other) const {
  return n_ == other.n_ && count_ == other.count_ && (n_ == 0 || (mask_ == other.mask_).all());
}

// -------------------------------------------------------------- TangentSpace

TangentSpace::TangentSpace(Matrix u, Matrix v) : U(std::move(u)), V(std::move(v)) {
  if (U.rows() != V.rows() || U.cols() != V.cols())
    throw InvalidArgument("TangentSpace: U is " + shape_of(U) + " but V is " + shape_of(V));
}

// --------------------------------------------------------------------- norms

std::string to_string(NormKind kind) {
  switch (kind) {
    case NormKind::nuclear: return "nuclear";
    case NormKind::spectral: return "spectral";
    case NormKind::frobenius: return "frobenius";
    case NormKind::l1: return "l1";
    case NormKind::linf: return "linf";
    case NormKind::linf2: return "linf2";
  }
  return "?";
}

NormKind norm_kind_from_string(const std::string& name) {
  for (NormKind k : {NormKind::nuclear, NormKind::spectral, NormKind::frobenius, NormKind::l1,
                     NormKind::linf, NormKind::linf2})
    if (to_string(k) == name) return k;
  throw InvalidArgument("unknown norm kind '" + name + "'");
}

void require_finite(const Matrix& M, const char* what) {
  if (!M.allFinite()) throw InvalidArgument(std::string(what) + ": matrix has non-finite entries");
}

void require_square(const Matrix& M, const char* what) {
  if (M.rows() != M.cols())
    throw InvalidArgument(std::string(what) + ": expected a square matrix, got " + shape_of(M));
}

double asymmetry(const Matrix& M) {
  require_square(M, "asymmetry");
  if (M.size() == 0) return 0.0;
  return (M - M.transpose()).cwiseAbs().maxCoeff();
}

bool is_symmetric(const Matrix& M, double tol) {
  return M.rows() == M.cols() && asymmetry(M) <= tol;
}

SvdFactors svd(const Matrix& M, double rank_tol) {
  require_square(M, "svd");
  require_finite(M, "svd");
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw InvalidArgument("svd: rank_tol must lie in (0, 1)");

  FullSvd full = full_svd(M);
  SvdFactors f;
  f.rank_tol = rank_tol;
  f.spectrum = full.s;
  Eigen::Index r = 0;
  if (full.s.size() > 0 && full.s(0) > 0.0) {
    const double cut = rank_tol * full.s(0);
    while (r < full.s.size() && full.s(r) > cut) ++r;
  }
  f.U = full.U.leftCols(r);
  f.V = full.V.leftCols(r);
  f.sigma = full.s.head(r);
  return f;
}

Vector singular_values(const Matrix& M) {
  require_square(M, "singular_values");
  require_finite(M, "singular_values");
  if (M.size() == 0) return Vector(0);
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  Vector s;
  if (is_symmetric(M, 1e-12 * scale)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
    s = es.eigenvalues().cwiseAbs();
  } else {
    Eigen::BDCSVD<Matrix> sv(M);
    s = sv.singularValues();
  }
  std::sort(s.data(), s.data() + s.size(), std::greater<>());
  return s;
}

double norm(const Matrix& M, NormKind kind) {
  require_finite(M, "norm");
  if (kind == NormKind::nuclear || kind == NormKind::spectral || kind == NormKind::linf2)
    require_square(M, "norm");
  if (M.size() == 0) return 0.0;
  switch (kind) {
    case NormKind::nuclear: return singular_values(M).sum();
    case NormKind::spectral: return singular_values(M)(0);
    case NormKind::frobenius: return M.norm();
    case NormKind::l1: return M.cwiseAbs().sum();
    case NormKind::linf: return M.cwiseAbs().maxCoeff();
    case NormKind::linf2:
      return std::max(M.rowwise().norm().maxCoeff(), M.colwise().norm().maxCoeff());
  }
  return 0.0;
}

// ---------------------------------------------------------------------- prox

Matrix soft_threshold(const Matrix& M, double tau) {
  if (!(tau >= 0.0)) throw InvalidArgument("soft_threshold: tau must be nonnegative");
  return (M.array().sign() * (M.array().abs() - tau).max(0.0)).matrix();
}

ShrinkResult shrink_singular_values(const Matrix& M, double tau) {
  require_square(M, "sv_threshold");
  require_finite(M, "sv_threshold");
  if (!(tau >= 0.0)) throw InvalidArgument("sv_threshold: tau must be nonnegative");
  FullSvd f = full_svd(M);
  Eigen::Index k = 0;
  while (k < f.s.size() && f.s(k) > tau) ++k;
  ShrinkResult out;
  out.rank = k;
  if (k == 0) {
    out.value = Matrix::Zero(M.rows(), M.cols());
    return out;
  }
  const Vector shrunk = (f.s.head(k).array() - tau).matrix();
  out.nuclear_norm = shrunk.sum();
  out.value = f.U.leftCols(k) * shrunk.asDiagonal() * f.V.leftCols(k).transpose();
  return out;
}

Matrix sv_threshold(const Matrix& M, double tau) { return shrink_singular_values(M, tau).value; }

// --------------------------------------------------------------- projections

namespace {

void require_compatible(const Matrix& Z, const TangentSpace& T, const char* what) {
  if (Z.rows() != T.U.rows() || Z.cols() != T.V.rows()) {
    std::ostringstream os;
    os << what << ": matrix is " << shape_of(Z) << " but tangent space acts on " << T.U.rows()
       << "x" << T.V.rows();
    throw InvalidArgument(os.str());
  }
}

}  // namespace

Matrix project_T(const Matrix& Z, const TangentSpace& T) {
  require_compatible(Z, T, "project_T");
  if (T.rank() == 0) return Matrix::Zero(Z.rows(), Z.cols());
  const Matrix UtZ = T.U.transpose() * Z;
  const Matrix ZV = Z * T.V;
  const Matrix UtZV = UtZ * T.V;
  return T.U * UtZ + ZV * T.V.transpose() - T.U * UtZV * T.V.transpose();
}

Matrix project_T_perp(const Matrix& Z, const TangentSpace& T) {
  require_compatible(Z, T, "project_T_perp");
  if (T.rank() == 0) return Z;
  // (I - UU^T) Z (I - VV^T)
  const Matrix left = Z - T.U * (T.U.transpose() * Z);
  return left - (left * T.V) * T.V.transpose();
}

Matrix project_support(const Matrix& Z, const SupportSet& S) {
  if (Z.rows() != S.dim() || Z.cols() != S.dim())
    throw InvalidArgument("project_support: matrix is " + shape_of(Z) + " but support is over " +
                          std::to_string(S.dim()) + "x" + std::to_string(S.dim()));
  return S.mask().select(Z, 0.0);
}

double inner(const Matrix& A, const Matrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw InvalidArgument("inner: shapes " + shape_of(A) + " and " + shape_of(B) + " differ");
  return (A.array() * B.array()).sum();
}

OpNormEstimate opnorm_PGammaPT(const SupportSet& S, const TangentSpace& T, double tol,
                               std::size_t max_iters, std::uint64_t seed) {
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidArgument("opnorm_PGammaPT: tol must lie in (0, 1)");
  if (S.dim() != T.dim()) throw InvalidArgument("opnorm_PGammaPT: support and tangent space dimensions differ");
  OpNormEstimate est;
  if (S.empty() || T.rank() == 0) return est;

  const auto n = S.dim();
  CounterRng rng(seed);
  Matrix X(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = rng.normal();
  X = project_T(X, T);
  X /= X.norm();

  // P_T P_S P_T is self-adjoint PSD with top eigenvalue ||P_S P_T||^2.
  double rq_prev = -1.0;
  double rq = 0.0;
  est.converged = false;
  for (std::size_t it = 1; it <= max_iters; ++it) {
    Matrix Y = project_T(project_support(X, S), T);
    rq = inner(X, Y);
    const double ny = Y.norm();
    est.iterations = it;
    if (ny == 0.0) {
      rq = 0.0;
      est.converged = true;
      break;
    }
    X = Y / ny;
    if (rq_prev >= 0.0 && std::abs(rq - rq_prev) <= tol * std::max(rq, 1e-300)) {
      est.converged = true;
      break;
    }
    rq_prev = rq;
  }
  est.value = std::sqrt(std::max(rq, 0.0));
  return est;
}

}  // namespace qcr
