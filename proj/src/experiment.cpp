#include "qcr/experiment.hpp"

#include "qcr/rng.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace qcr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> linspace_steps(double first, double step, int count) {
  std::vector<double> v;
  // Built from integer multiples so the values print as short decimals.
  for (int k = 0; k < count; ++k) v.push_back(std::round((first + step * k) * 1e6) / 1e6);
  return v;
}

void require_axes(const GridSpec& spec, const char* a, const char* b, const char* who) {
  if (spec.axis1.name != a || spec.axis2.name != b) {
    std::ostringstream os;
    os << who << ": expected axes (" << a << ", " << b << "), got (" << spec.axis1.name << ", "
       << spec.axis2.name << ")";
    throw InvalidArgument(os.str());
  }
}

using ParamsFor = std::function<InstanceParams(std::size_t i, std::size_t j)>;

TrialOutcome run_trial(const InstanceParams& params, const SolverOptions& opts) {
  TrialOutcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const PlantedInstance inst = gen_planted(params);
    const DecompositionResult res = solve_rpca(inst.A, opts);
    out.rel_error = relative_error(res.B_star, inst.B0);
    out.iterations = res.iterations;
    out.converged = res.converged;
    out.success = res.converged && out.rel_error <= kRecoveryTolerance;
  } catch (const std::exception& e) {
    out.rel_error = kNaN;
    out.error = e.what();
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

RecoveryGrid run_grid(const GridSpec& spec, const ParamsFor& params_for, const GridControl& control) {
  const std::size_t rows = spec.axis1.values.size();
  const std::size_t cols = spec.axis2.values.size();
  const std::size_t total = rows * cols * spec.trials;

  // Instance parameters are built and validated up front so a bad axis value
  // fails before any trial runs.
  std::vector<InstanceParams> cell_params;
  cell_params.reserve(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      InstanceParams p = params_for(i, j);
      p.validate();
      cell_params.push_back(p);
    }

  std::vector<TrialOutcome> outcomes(total);
  std::vector<char> done(total, 0);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> finished{0};

  auto worker = [&] {
    for (;;) {
      if (control.cancel && control.cancel->load()) return;
      const std::size_t job = next.fetch_add(1);
      if (job >= total) return;
      const std::size_t cell = job / spec.trials;
      const std::size_t t = job % spec.trials;
      InstanceParams p = cell_params[cell];
      p.seed = trial_seed(spec.base_seed, cell / cols, cell % cols, t);
      outcomes[job] = run_trial(p, spec.solver);
      done[job] = 1;
      const std::size_t n_done = finished.fetch_add(1) + 1;
      if (control.progress) control.progress(n_done, total);
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(spec.threads, total));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
  }

  RecoveryGrid grid;
  grid.spec = spec;
  const auto R = static_cast<Eigen::Index>(rows), C = static_cast<Eigen::Index>(cols);
  grid.success_rate = Matrix::Constant(R, C, kNaN);
  grid.mean_rel_error = Matrix::Constant(R, C, kNaN);
  grid.wall_times = Matrix::Zero(R, C);
  grid.completed = Eigen::MatrixXi::Zero(R, C);
  grid.successes = Eigen::MatrixXi::Zero(R, C);

  // Aggregate in (i, j, t) order so sums do not depend on the schedule.
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      double err_sum = 0.0;
      int err_count = 0;
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      for (std::size_t t = 0; t < spec.trials; ++t) {
        const std::size_t job = (i * cols + j) * spec.trials + t;
        if (!done[job]) {
          grid.complete = false;
          continue;
        }
        const TrialOutcome& o = outcomes[job];
        grid.completed(ii, jj) += 1;
        grid.successes(ii, jj) += o.success ? 1 : 0;
        grid.wall_times(ii, jj) += o.seconds;
        if (std::isfinite(o.rel_error)) {
          err_sum += o.rel_error;
          ++err_count;
        }
        if (!o.error.empty()) {
          std::ostringstream os;
          os << "(" << i << ", " << j << ", " << t << "): " << o.error;
          grid.failures.push_back(os.str());
        }
      }
      if (grid.completed(ii, jj) > 0)
        grid.success_rate(ii, jj) =
            static_cast<double>(grid.successes(ii, jj)) / static_cast<double>(grid.completed(ii, jj));
      if (err_count > 0) grid.mean_rel_error(ii, jj) = err_sum / err_count;
    }
  grid.trials = std::move(outcomes);
  grid.finished.assign(done.begin(), done.end());
  return grid;
}

}  // namespace

void GridSpec::validate() const {
  if (trials < 1) throw InvalidArgument("grid: trials must be at least 1");
  if (axis1.values.empty()) throw InvalidArgument("grid: axis '" + axis1.name + "' is empty");
  if (axis2.values.empty()) throw InvalidArgument("grid: axis '" + axis2.name + "' is empty");
  if (axis1.name == axis2.name) throw InvalidArgument("grid: both axes vary '" + axis1.name + "'");
  if (threads < 1) throw InvalidArgument("grid: threads must be at least 1");
  solver.validate();
}

GridSpec GridSpec::size_default(std::ptrdiff_t n_max) {
  GridSpec spec;
  spec.axis1.name = "n";
  for (std::ptrdiff_t n = 25; n <= n_max; n += 25) spec.axis1.values.push_back(static_cast<double>(n));
  spec.axis2 = {"fraction", linspace_steps(0.1, 0.1, 10)};
  spec.fixed.gamma = 0.85;
  spec.fixed.rho = 0.25;
  return spec;
}

GridSpec GridSpec::phase_default(std::ptrdiff_t n, std::ptrdiff_t n_c) {
  GridSpec spec;
  spec.axis1 = {"gamma", linspace_steps(0.5, 0.1, 6)};
  spec.axis2 = {"rho", linspace_steps(0.0, 0.1, 8)};
  spec.fixed.n = n;
  spec.fixed.n_c = n_c;
  return spec;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t i, std::size_t j, std::size_t t) {
  return hash_words({base_seed, i, j, t});
}

RecoveryGrid run_size_grid(const GridSpec& spec, const GridControl& control) {
  spec.validate();
  require_axes(spec, "n", "fraction", "run_size_grid");
  for (double v : spec.axis1.values)
    if (!(v >= 1.0 && v == std::floor(v))) throw InvalidArgument("run_size_grid: n values must be positive integers");
  for (double f : spec.axis2.values)
    if (!(f > 0.0 && f <= 1.0)) throw InvalidArgument("run_size_grid: fractions must lie in (0, 1]");
  return run_grid(
      spec,
      [&](std::size_t i, std::size_t j) {
        InstanceParams p = spec.fixed;
        p.n = static_cast<std::ptrdiff_t>(spec.axis1.values[i]);
        p.n_c = std::max<std::ptrdiff_t>(1, std::lround(spec.axis2.values[j] * static_cast<double>(p.n)));
        return p;
      },
      control);
}

RecoveryGrid run_phase_grid(const GridSpec& spec, const GridControl& control) {
  spec.validate();
  require_axes(spec, "gamma", "rho", "run_phase_grid");
  return run_grid(
      spec,
      [&](std::size_t i, std::size_t j) {
        InstanceParams p = spec.fixed;
        p.gamma = spec.axis1.values[i];
        p.rho = spec.axis2.values[j];
        return p;
      },
      control);
}

std::vector<EtaOutcome> run_eta_sweep(const Matrix& A, double gamma, const std::vector<std::ptrdiff_t>& eta_values,
                                      const SolverOptions& opts) {
  if (eta_values.empty()) throw InvalidArgument("run_eta_sweep: no eta values");
  for (auto eta : eta_values)
    if (eta < 1) throw InvalidArgument("run_eta_sweep: eta values must be at least 1");
  std::vector<EtaOutcome> out;
  for (auto eta : eta_values) {
    EtaOutcome o;
    o.eta = eta;
    try {
      o.result = solve_quasi_clique(A, {gamma, eta}, opts);
      o.ok = true;
    } catch (const std::exception& e) {
      o.error = e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

void write_grid_csv(const RecoveryGrid& grid, const Matrix& values, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << grid.spec.axis1.name << '\\' << grid.spec.axis2.name;
  for (double v : grid.spec.axis2.values) os << ',' << format_double(v);
  os << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    os << format_double(grid.spec.axis1.values[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < values.cols(); ++j) os << ',' << format_double(values(i, j));
    os << '\n';
  }
  if (!os) throw IoError("write to '" + path + "' failed");
}

void write_grid_pgm(const Matrix& rates, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << "P5\n" << rates.cols() << ' ' << rates.rows() << "\n255\n";
  for (Eigen::Index i = 0; i < rates.rows(); ++i)
    for (Eigen::Index j = 0; j < rates.cols(); ++j) {
      const double r = std::isfinite(rates(i, j)) ? std::clamp(rates(i, j), 0.0, 1.0) : 0.0;
      os.put(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * r))));
    }
  if (!os) throw IoError("write to '" + path + "' failed");
}

void export_grid(const RecoveryGrid& grid, const std::string& path_prefix) {
  write_grid_csv(grid, grid.success_rate, path_prefix + ".csv");
  write_grid_pgm(grid.success_rate, path_prefix + ".pgm");
}

GridTable read_grid_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  auto number = [&](const std::string& s, std::size_t lineno) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
      throw IoError(path + ":" + std::to_string(lineno) + ": bad number '" + s + "'");
    return v;
  };

  GridTable table;
  std::string line;
  if (!std::getline(is, line)) throw IoError(path + ": empty grid file");
  auto header = split(line);
  const auto slash = header.empty() ? std::string::npos : header[0].find('\\');
  if (slash == std::string::npos) throw IoError(path + ":1: missing axis names");
  table.axis1_name = header[0].substr(0, slash);
  table.axis2_name = header[0].substr(slash + 1);
  for (std::size_t k = 1; k < header.size(); ++k) table.axis2.push_back(number(header[k], 1));

  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != table.axis2.size() + 1)
      throw IoError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(table.axis2.size() + 1) +
                    " fields");
    table.axis1.push_back(number(cells[0], lineno));
    std::vector<double> row;
    for (std::size_t k = 1; k < cells.size(); ++k) row.push_back(number(cells[k], lineno));
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.axis2.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return table;
}

}  // namespace qcr
