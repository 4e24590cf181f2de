#include "qcr/instance.hpp"

#include "qcr/rng.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace qcr {

namespace {

// Stream keys are separated by a tag so that e.g. gen_bernoulli_support and
// gen_random_sign_sparse with the same seed do not share draws.
enum class StreamTag : std::uint64_t { planted = 1, bernoulli = 2, signs = 3, low_rank = 4 };

CounterRng make_stream(std::uint64_t seed, StreamTag tag) {
  return CounterRng(hash_words({seed, static_cast<std::uint64_t>(tag)}));
}

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << what << ": probability " << p << " outside [0, 1]";
    throw InvalidArgument(os.str());
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void InstanceParams::validate() const {
  std::ostringstream os;
  if (n < 1) os << "n (" << n << ") must be at least 1";
  else if (n_c < 1) os << "n_c (" << n_c << ") must be at least 1";
  else if (n_c > n) os << "n_c (" << n_c << ") must not exceed n (" << n << ")";
  else if (!(gamma > 0.0 && gamma <= 1.0)) os << "gamma (" << gamma << ") must lie in (0, 1]";
  else if (!(rho >= 0.0 && rho < 1.0)) os << "rho (" << rho << ") must lie in [0, 1)";
  if (!os.str().empty()) throw InvalidArgument(os.str());
}

Matrix PlantedInstance::sign_C0() const { return C0.array().sign().matrix(); }

PlantedInstance planted_from_adjacency(const InstanceParams& params, Matrix A) {
  params.validate();
  const auto n = params.n;
  const auto nc = params.n_c;
  if (A.rows() != n || A.cols() != n)
    throw InvalidArgument("planted_from_adjacency: adjacency is not " + std::to_string(n) + "x" +
                          std::to_string(n));
  if (!((A.array() == 0.0) || (A.array() == 1.0)).all())
    throw InvalidArgument("planted_from_adjacency: adjacency must be binary");
  if (asymmetry(A) != 0.0) throw InvalidArgument("planted_from_adjacency: adjacency must be symmetric");

  PlantedInstance inst;
  inst.params = params;
  inst.omega = SupportSet(n);
  for (std::ptrdiff_t i = 0; i < nc; ++i)
    for (std::ptrdiff_t j = 0; j < nc; ++j) inst.omega.insert(i, j);

  inst.B0 = Matrix::Zero(n, n);
  inst.B0.topLeftCorner(nc, nc).setOnes();
  inst.X = project_support(A, inst.omega);
  inst.X_hat = A - inst.X;
  inst.C0 = A - inst.B0;
  inst.A = std::move(A);
  inst.gamma_support = SupportSet::nonzeros_of(inst.X);
  inst.noise_support = SupportSet::nonzeros_of(inst.C0);
  return inst;
}

PlantedInstance gen_planted(const InstanceParams& params) {
  params.validate();
  const auto n = params.n;
  const auto nc = params.n_c;
  CounterRng rng = make_stream(params.seed, StreamTag::planted);
  Matrix A = Matrix::Zero(n, n);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = i; j < n; ++j) {
      const bool in_block = i < nc && j < nc;
      const double u = rng.uniform();
      if (u < (in_block ? params.gamma : params.rho)) {
        A(i, j) = 1.0;
        A(j, i) = 1.0;
      }
    }
  }
  return planted_from_adjacency(params, std::move(A));
}

SupportSet gen_bernoulli_support(std::ptrdiff_t n, double p, std::uint64_t seed, bool symmetric) {
  require_probability(p, "gen_bernoulli_support");
  if (n < 0) throw InvalidArgument("gen_bernoulli_support: negative dimension");
  CounterRng rng = make_stream(seed, StreamTag::bernoulli);
  SupportSet s(n);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = symmetric ? i : 0; j < n; ++j) {
      if (rng.bernoulli(p)) {
        s.insert(i, j);
        if (symmetric) s.insert(j, i);
      }
    }
  }
  return s;
}

Matrix gen_random_sign_sparse(std::ptrdiff_t n, double p, std::uint64_t seed, bool symmetric) {
  require_probability(p, "gen_random_sign_sparse");
  if (n < 0) throw InvalidArgument("gen_random_sign_sparse: negative dimension");
  CounterRng rng = make_stream(seed, StreamTag::signs);
  Matrix M = Matrix::Zero(n, n);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = symmetric ? i : 0; j < n; ++j) {
      const double u = rng.uniform();
      const double v = u < 0.5 * p ? 1.0 : (u < p ? -1.0 : 0.0);
      M(i, j) = v;
      if (symmetric) M(j, i) = v;
    }
  }
  return M;
}

Matrix gen_low_rank(std::ptrdiff_t n, std::ptrdiff_t r, std::uint64_t seed) {
  if (r < 1 || r > n) {
    throw InvalidArgument("gen_low_rank: rank " + std::to_string(r) + " outside [1, " +
                          std::to_string(n) + "]");
  }
  CounterRng rng = make_stream(seed, StreamTag::low_rank);
  Matrix G(n, r), H(n, r);
  for (std::ptrdiff_t i = 0; i < n; ++i)
    for (std::ptrdiff_t k = 0; k < r; ++k) G(i, k) = rng.normal();
  for (std::ptrdiff_t i = 0; i < n; ++i)
    for (std::ptrdiff_t k = 0; k < r; ++k) H(i, k) = rng.normal();
  return G * H.transpose();
}

// ---------------------------------------------------------------------- I/O

namespace {

void write_triplets(std::ostream& os, const Matrix& M) {
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      if (M(i, j) != 0.0) os << i << ' ' << j << ' ' << format_double(M(i, j)) << '\n';
}

template <typename Fn>
void write_file(const std::string& path, Fn&& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  body(os);
  os.flush();
  if (!os) throw IoError("write to '" + path + "' failed");
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void write_instance(std::ostream& os, const PlantedInstance& inst) {
  const auto& p = inst.params;
  os << p.n << ' ' << p.n_c << ' ' << format_double(p.gamma) << ' ' << format_double(p.rho) << ' '
     << p.seed << '\n';
  write_triplets(os, inst.A);
}

void write_instance_file(const std::string& path, const PlantedInstance& inst) {
  write_file(path, [&](std::ostream& os) { write_instance(os, inst); });
}

void write_matrix(std::ostream& os, const Matrix& M) {
  require_square(M, "write_matrix");
  os << M.rows() << " 0 0 0 0\n";
  write_triplets(os, M);
}

void write_matrix_file(const std::string& path, const Matrix& M) {
  write_file(path, [&](std::ostream& os) { write_matrix(os, M); });
}

MatrixFile read_instance(std::istream& is, const std::string& origin) {
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) -> IoError {
    return IoError(origin + ":" + std::to_string(lineno) + ": " + msg);
  };

  InstanceParams params;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream hs(line);
    if (!(hs >> params.n >> params.n_c >> params.gamma >> params.rho >> params.seed))
      throw fail("expected header 'n n_c gamma rho seed'");
    break;
  }
  if (lineno == 0 || params.n < 1) throw fail("missing or invalid header");

  Matrix M = Matrix::Zero(params.n, params.n);
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::ptrdiff_t i = 0, j = 0;
    double v = 0.0;
    if (!(ls >> i >> j >> v)) throw fail("expected triplet 'i j v'");
    if (i < 0 || j < 0 || i >= params.n || j >= params.n) throw fail("index out of range");
    M(i, j) = v;
  }

  MatrixFile out;
  if (params.n_c > 0) {
    try {
      out.truth = planted_from_adjacency(params, M);
    } catch (const InvalidArgument& e) {
      throw IoError(origin + ": inconsistent ground truth: " + e.what());
    }
  }
  out.M = std::move(M);
  return out;
}

MatrixFile read_matrix_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  if (ends_with(path, ".csv")) {
    MatrixFile out;
    out.M = read_dense_csv(is, path);
    return out;
  }
  return read_instance(is, path);
}

void write_dense_csv(std::ostream& os, const Matrix& M) {
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) os << ',';
      os << format_double(M(i, j));
    }
    os << '\n';
  }
}

void write_dense_csv_file(const std::string& path, const Matrix& M) {
  write_file(path, [&](std::ostream& os) { write_dense_csv(os, M); });
}

Matrix read_dense_csv(std::istream& is, const std::string& origin) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t end = std::min(line.find(',', pos), line.size());
      const char* first = line.data() + pos;
      while (first < line.data() + end && *first == ' ') ++first;
      double v = 0.0;
      auto res = std::from_chars(first, line.data() + end, v);
      if (res.ec != std::errc{})
        throw IoError(origin + ":" + std::to_string(lineno) + ": bad number");
      row.push_back(v);
      pos = end + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError(origin + ":" + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(origin + ": empty CSV");
  Matrix M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return M;
}

}  // namespace qcr
