// Acceptance checks. Each criterion prints one PASS or FAIL line; the exit
// status is nonzero when any requested criterion fails.
//
//   acceptance [criterion ...]     (no arguments: all of them)

#include "qcr/certificate.hpp"
#include "qcr/experiment.hpp"
#include "qcr/instance.hpp"
#include "qcr/solver.hpp"
#include "support.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

using namespace qcr;
using qcr::testing::random_matrix;
using qcr::testing::random_support;
using qcr::testing::random_tangent;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::size_t worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string row_text(const Matrix& M, Eigen::Index i) {
  std::ostringstream os;
  os << "[";
  for (Eigen::Index j = 0; j < M.cols(); ++j) os << (j ? " " : "") << M(i, j);
  os << "]";
  return os.str();
}

// ---------------------------------------------------------------------------

Verdict size_grid() {
  const auto t0 = Clock::now();
  GridSpec spec = GridSpec::size_default(100);
  spec.base_seed = 2024;
  spec.threads = worker_count();
  const RecoveryGrid g = run_size_grid(spec);
  const double secs = seconds_since(t0);

  std::ostringstream os;
  bool ok = g.complete && g.failures.empty();
  for (std::size_t i = 0; i < spec.axis1.values.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double n = spec.axis1.values[i];
    for (std::size_t j = 0; j < spec.axis2.values.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double f = spec.axis2.values[j];
      const double rate = g.success_rate(ii, jj);
      if (std::abs(f - 0.1) < 1e-9 && !(rate <= 0.1)) {
        ok = false;
        os << " n=" << n << " fraction 0.1 rate " << rate << ";";
      }
      if (n >= 50 && f >= 0.6 - 1e-9 && !(rate >= 0.9)) {
        ok = false;
        os << " n=" << n << " fraction " << f << " rate " << rate << ";";
      }
    }
  }
  if (secs > 15 * 60) {
    ok = false;
    os << " took " << secs << " s;";
  }
  os << " rows n=25..100: ";
  for (Eigen::Index i = 0; i < g.success_rate.rows(); ++i) os << row_text(g.success_rate, i);
  os << " in " << fmt(secs) << " s";
  return {ok, os.str()};
}

Verdict phase_grid() {
  const auto t0 = Clock::now();
  GridSpec spec = GridSpec::phase_default(100, 85);
  spec.base_seed = 2024;
  spec.threads = worker_count();
  const RecoveryGrid g = run_phase_grid(spec);
  const double secs = seconds_since(t0);

  std::ostringstream os;
  bool ok = g.complete && g.failures.empty();
  const Matrix& R = g.success_rate;
  for (std::size_t j = 0; j < spec.axis2.values.size(); ++j) {
    const double rho = spec.axis2.values[j];
    const auto jj = static_cast<Eigen::Index>(j);
    if (rho >= 0.6 - 1e-9) {
      for (Eigen::Index i = 0; i < R.rows(); ++i)
        if (R(i, jj) != 0.0) {
          ok = false;
          os << " rho " << rho << " gamma " << spec.axis1.values[static_cast<std::size_t>(i)] << " rate " << R(i, jj)
             << ";";
        }
    }
    if (rho <= 0.25) {
      // from 0 at the lowest gamma to 1 at the highest, never dropping
      bool mono = R(0, jj) == 0.0 && R(R.rows() - 1, jj) == 1.0;
      for (Eigen::Index i = 1; i < R.rows(); ++i) mono = mono && R(i, jj) >= R(i - 1, jj);
      if (!mono) {
        ok = false;
        os << " rho " << rho << " column not a 0 to 1 rise;";
      }
    }
  }
  if (secs > 20 * 60) {
    ok = false;
    os << " took " << secs << " s;";
  }
  os << " rows gamma=0.5..1.0: ";
  for (Eigen::Index i = 0; i < R.rows(); ++i) os << row_text(R, i);
  os << " in " << fmt(secs) << " s";
  return {ok, os.str()};
}

Verdict recovery_fidelity() {
  // Re-derive every trial of a small grid and recompute its error from scratch.
  GridSpec spec = GridSpec::size_default(50);
  spec.axis2.values = {0.1, 0.4, 0.6, 1.0};
  spec.trials = 3;
  spec.base_seed = 99;
  spec.threads = worker_count();
  const RecoveryGrid g = run_size_grid(spec);

  bool ok = g.complete && kRecoveryTolerance == 1e-6;
  int successes = 0, failures = 0, mismatches = 0;
  const std::size_t cols = spec.axis2.values.size();
  for (std::size_t i = 0; i < spec.axis1.values.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      for (std::size_t t = 0; t < spec.trials; ++t) {
        const TrialOutcome& o = g.trials[(i * cols + j) * spec.trials + t];
        InstanceParams p = spec.fixed;
        p.n = static_cast<std::ptrdiff_t>(spec.axis1.values[i]);
        p.n_c = std::max<std::ptrdiff_t>(1, std::lround(spec.axis2.values[j] * static_cast<double>(p.n)));
        p.seed = trial_seed(spec.base_seed, i, j, t);
        const PlantedInstance inst = gen_planted(p);
        const DecompositionResult res = solve_rpca(inst.A, spec.solver);
        double num = 0.0, den = 0.0;
        for (Eigen::Index a = 0; a < p.n; ++a)
          for (Eigen::Index b = 0; b < p.n; ++b) {
            const double d = inst.B0(a, b) - res.B_star(a, b);
            num += d * d;
            den += inst.B0(a, b) * inst.B0(a, b);
          }
        const double rel = std::sqrt(num) / std::sqrt(den);
        const bool expect = res.converged && rel <= 1e-6;
        if (o.success != expect || std::abs(o.rel_error - rel) > 1e-12 * std::max(1.0, rel)) ++mismatches;
        (o.success ? successes : failures) += 1;
      }
  ok = ok && mismatches == 0 && successes > 0 && failures > 0;

  // the threshold itself is inclusive
  Matrix unit = Matrix::Zero(2, 2);
  unit(0, 0) = 1.0;
  Matrix edge = unit;
  edge(1, 1) = 1e-6;
  ok = ok && recovery_success(edge, unit);
  edge(1, 1) = std::nextafter(1e-6, 1.0);
  ok = ok && !recovery_success(edge, unit);

  std::ostringstream os;
  os << successes + failures << " trials audited (" << successes << " successes, " << failures << " failures), "
     << mismatches << " disagreements with the recomputed error";
  return {ok, os.str()};
}

Verdict solver_oracle() {
  const auto t0 = Clock::now();
  std::ifstream is(std::string(QCR_TEST_DATA) + "/rpca_oracle.json");
  if (!is) return {false, "oracle fixture missing"};
  const auto data = nlohmann::json::parse(is);
  const auto& cases = data.at("cases");
  double worst = 0.0;
  int bad = 0, not_converged = 0, max_n = 0;
  for (const auto& c : cases) {
    const auto n = c.at("n").get<std::size_t>();
    max_n = std::max(max_n, static_cast<int>(n));
    Matrix M(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c.at("M").at(i).at(j).get<double>();
    SolverOptions opts;
    opts.lambda = c.at("lambda").get<double>();
    const DecompositionResult res = solve_rpca(M, opts);
    const double expect = c.at("objective").get<double>();
    const double rel = std::abs(res.objective - expect) / std::abs(expect);
    worst = std::max(worst, rel);
    if (!(rel <= 1e-4)) ++bad;
    if (!res.converged) ++not_converged;
  }
  const double secs = seconds_since(t0);
  const bool ok = cases.size() == 20 && max_n <= 15 && bad == 0 && secs <= 120;
  std::ostringstream os;
  os << cases.size() << " instances (n <= " << max_n << "), worst relative objective gap " << worst << ", "
     << not_converged << " unconverged, " << fmt(secs) << " s";
  return {ok, os.str()};
}

Verdict certificate_suite() {
  const auto t0 = Clock::now();
  const double lambda = 0.1;
  int low = 0, high = 0, low_errors = 0, high_errors = 0;
  int fails[5] = {0, 0, 0, 0, 0};
  double qc_sum = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    for (double rho : {0.1, 0.7}) {
      const PlantedInstance inst = gen_planted({100, 85, 0.85, rho, s});
      try {
        const CertificateReport rep = verify_certificate(inst, lambda, GolfingConfig::for_instance(inst, s));
        if (rho < 0.5) {
          low += rep.overall ? 1 : 0;
          for (int k = 0; k < 5; ++k) fails[k] += rep.conditions[static_cast<std::size_t>(k)] ? 0 : 1;
          qc_sum += rep.norm_QC;
        } else {
          high += rep.overall ? 1 : 0;
        }
      } catch (const NeumannNonconvergence&) {
        (rho < 0.5 ? low_errors : high_errors) += 1;
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = low >= 90 && high <= 10 && secs <= 600;
  std::ostringstream os;
  os << "rho=0.1: " << low << "/100 certified (need >= 90), failures per condition (i..v) " << fails[0] << " "
     << fails[1] << " " << fails[2] << " " << fails[3] << " " << fails[4] << ", mean ||Q_C|| " << qc_sum / 100.0
     << "; rho=0.7: " << high << "/100 certified (need <= 10); " << low_errors + high_errors
     << " Neumann divergences; " << fmt(secs) << " s";
  return {ok, os.str()};
}

Verdict certificate_internals() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::ostringstream os;

  // fixed point and membership in the complement of T on the planted instances
  double worst_fixed = 0.0, worst_perp = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const PlantedInstance inst = gen_planted({100, 85, 0.85, 0.1, s});
    const double lambda = 0.1;
    const CertificateReport rep = verify_certificate(inst, lambda, GolfingConfig::for_instance(inst, s));
    const TangentSpace T = TangentSpace::from_svd(svd(inst.B0));
    const Matrix sgn = inst.sign_C0();
    const double fixed = (project_support(rep.Q_C, inst.noise_support) - lambda * sgn).norm() /
                         (10.0 * kNeumannTol * lambda * sgn.norm());
    worst_fixed = std::max(worst_fixed, fixed);
    for (const Matrix* Q : {&rep.Q_B, &rep.Q_C})
      worst_perp = std::max(worst_perp, project_T(*Q, T).norm() / std::max(1.0, Q->norm()));
    ok = ok && rep.neumann_converged;
  }
  ok = ok && worst_fixed <= 1.0 && worst_perp <= 1e-10;
  os << "fixed-point residual at " << worst_fixed << " of its bound, ||P_T Q|| / max(1, ||Q||) <= " << worst_perp;

  // Golfing contraction on n = 200, n_c = 200, gamma = 0.995, rho = 0. Ratios
  // are taken while ||Z_k|| is above the round-off floor of 1e-12 ||Z_0||.
  std::vector<double> medians;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const PlantedInstance inst = gen_planted({200, 200, 0.995, 0.0, s});
    const GolfingConfig cfg = GolfingConfig::for_instance(inst, s);
    const TangentSpace T = TangentSpace::from_svd(svd(inst.B0));
    const GolfingResult g = golfing_QB(T, partition_complement(inst.noise_support, cfg), cfg.q);
    std::vector<double> ratios;
    for (std::size_t k = 1; k < g.trace.size() && g.trace[k - 1] > 1e-12 * g.trace[0]; ++k)
      ratios.push_back(g.trace[k] / g.trace[k - 1]);
    if (ratios.empty()) {
      medians.push_back(0.0);
      continue;
    }
    std::nth_element(ratios.begin(), ratios.begin() + static_cast<std::ptrdiff_t>(ratios.size() / 2), ratios.end());
    medians.push_back(ratios[ratios.size() / 2]);
  }
  const double worst_median = *std::max_element(medians.begin(), medians.end());
  ok = ok && worst_median <= 0.5;
  os << "; golfing median step ratio <= " << worst_median << " over 50 seeds; " << fmt(seconds_since(t0)) << " s";
  return {ok, os.str()};
}

Verdict property_suites() {
  const auto t0 = Clock::now();
  int failed = 0;
  std::string first;
  auto expect = [&](bool cond, const std::string& what, std::uint64_t seed) {
    if (cond) return;
    if (failed++ == 0) first = what + " (case " + std::to_string(seed) + ")";
  };

  for (std::uint64_t c = 0; c < 1000; ++c) {
    CounterRng rng(hash_words({0xacce, c}));
    const auto n = static_cast<std::ptrdiff_t>(2 + rng.next_u64() % 11);
    const auto r = static_cast<std::ptrdiff_t>(1 + rng.next_u64() % static_cast<std::uint64_t>(n));
    const double slack = 1e-10;

    // rank-r matrix: ||Z|| <= ||Z||_F <= ||Z||_* <= sqrt(r) ||Z||_F <= r ||Z||
    const Matrix Z = random_matrix(n, r, 10 * c) * random_matrix(r, n, 10 * c + 1);
    const double s = norm(Z, NormKind::spectral), f = norm(Z, NormKind::frobenius), nuc = norm(Z, NormKind::nuclear);
    const double rr = static_cast<double>(r);
    expect(s <= f * (1 + slack) && f <= nuc * (1 + slack) && nuc <= std::sqrt(rr) * f * (1 + slack) &&
               std::sqrt(rr) * f <= rr * s * (1 + slack),
           "norm chain", c);

    // ||Z||_inf <= ||Z||_inf,2 <= sqrt(n) ||Z||_inf
    const Matrix W = random_matrix(n, n, 10 * c + 2);
    const double linf = norm(W, NormKind::linf), l2 = norm(W, NormKind::linf2);
    expect(linf <= l2 * (1 + slack) && l2 <= std::sqrt(static_cast<double>(n)) * linf * (1 + slack), "linf2 range",
           c);

    // ||U V^T||_inf,2 <= sqrt(mu r / n)
    const TangentSpace T = random_tangent(n, r, 10 * c + 3);
    const IncoherenceReport inc = incoherence(T);
    expect(norm(T.U * T.V.transpose(), NormKind::linf2) <=
               std::sqrt(inc.mu * rr / static_cast<double>(n)) * (1 + slack),
           "incoherence linf2 bound", c);
    expect(inc.mu >= 1.0 - slack, "mu >= 1", c);

    // projectors
    const Matrix X = random_matrix(n, n, 10 * c + 4), Y = random_matrix(n, n, 10 * c + 5);
    const Matrix PX = project_T(X, T);
    const double scale = X.norm() * Y.norm();
    expect((project_T(PX, T) - PX).norm() <= 1e-10 * X.norm(), "P_T idempotent", c);
    expect((PX + project_T_perp(X, T) - X).norm() <= 1e-10 * X.norm(), "P_T + P_T-perp = I", c);
    expect(std::abs(inner(PX, project_T_perp(Y, T))) <= 1e-10 * scale, "P_T orthogonal to P_T-perp", c);
    expect(std::abs(inner(PX, Y) - inner(X, project_T(Y, T))) <= 1e-10 * scale, "P_T self-adjoint", c);
    const SupportSet S = random_support(n, rng.next_u64() % static_cast<std::uint64_t>(n * n + 1), 10 * c + 6);
    const Matrix PS = project_support(X, S);
    expect(project_support(PS, S) == PS, "P_Gamma idempotent", c);
    expect(PS + project_support(X, S.complement()) == X, "P_Gamma + P_Gamma-perp = I", c);

    // prox operators: optimality against perturbations
    const double tau = 0.05 + rng.uniform();
    const Matrix st = soft_threshold(X, tau);
    auto l1_obj = [&](const Matrix& A) { return tau * A.cwiseAbs().sum() + 0.5 * (A - X).squaredNorm(); };
    const Matrix svt = sv_threshold(X, tau);
    auto nuc_obj = [&](const Matrix& A) { return tau * norm(A, NormKind::nuclear) + 0.5 * (A - X).squaredNorm(); };
    const double base_l1 = l1_obj(st), base_nuc = nuc_obj(svt);
    for (int k = 0; k < 3; ++k) {
      const Matrix E = 1e-3 * random_matrix(n, n, 10 * c + 7 + static_cast<std::uint64_t>(k) * 100000);
      expect(base_l1 <= l1_obj(st + E) + 1e-12, "soft threshold is the l1 prox", c);
      expect(base_nuc <= nuc_obj(svt + E) + 1e-10, "singular value threshold is the nuclear prox", c);
    }
    // subgradient condition of the l1 prox
    const Matrix G = (X - st) / tau;
    bool sub = true;
    for (Eigen::Index k = 0; k < G.size(); ++k) {
      const double x = st.data()[k], gk = G.data()[k];
      sub = sub && (x == 0.0 ? std::abs(gk) <= 1 + 1e-12 : std::abs(gk - (x > 0 ? 1.0 : -1.0)) <= 1e-12);
    }
    expect(sub, "l1 prox subgradient", c);

    // instance determinism
    if (c % 10 == 0) {
      const InstanceParams p{n + 5, std::max<std::ptrdiff_t>(1, n / 2), 0.5 + 0.5 * rng.uniform(),
                             0.5 * rng.uniform(), rng.next_u64()};
      std::ostringstream a, b;
      write_instance(a, gen_planted(p));
      write_instance(b, gen_planted(p));
      expect(a.str() == b.str(), "instance determinism", c);
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream os;
  os << "1000 randomized cases, " << failed << " violations" << (failed ? " (first: " + first + ")" : "") << ", "
     << fmt(secs) << " s";
  return {failed == 0 && secs <= 60, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"size_grid", size_grid},
      {"phase_grid", phase_grid},
      {"recovery_fidelity", recovery_fidelity},
      {"solver_oracle", solver_oracle},
      {"certificate_suite", certificate_suite},
      {"certificate_internals", certificate_internals},
      {"property_suites", property_suites},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  if (wanted.empty())
    for (const auto& c : criteria) wanted.push_back(c.first);

  int failures = 0;
  for (const auto& name : wanted) {
    const auto it = std::find_if(criteria.begin(), criteria.end(), [&](const auto& c) { return c.first == name; });
    if (it == criteria.end()) {
      std::cerr << "unknown criterion '" << name << "'\n";
      return 2;
    }
    Verdict v;
    try {
      v = it->second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
