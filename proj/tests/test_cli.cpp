#include "qcr/instance.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;  // stdout and stderr together
};

Run run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" + QCR_CLI + "' " + args + " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), got);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream is(path);
  return nlohmann::json::parse(is);
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("qcr_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  [[nodiscard]] std::string operator/(const std::string& f) const { return (path / f).string(); }
};

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("gen writes the same file twice") {
  TempDir dir("gen");
  const std::string flags = "--n 50 --nc 30 --gamma 0.85 --rho 0.25 --seed 7";
  const Run a = run_cli("gen " + flags + " -o " + (dir / "a.txt"));
  CHECK(a.code == 0);
  CHECK(contains(a.output, "|noise_support|"));
  const Run b = run_cli("gen " + flags + " -o " + (dir / "b.txt"));
  CHECK(b.code == 0);
  CHECK(slurp(dir / "a.txt") == slurp(dir / "b.txt"));
  const qcr::MatrixFile f = qcr::read_matrix_file(dir / "a.txt");
  REQUIRE(f.truth.has_value());
  CHECK(f.truth->params == qcr::InstanceParams{50, 30, 0.85, 0.25, 7});
}

TEST_CASE("validation failures exit 2 without output files") {
  TempDir dir("bad");
  const Run r = run_cli("gen --nc 60 --n 50 -o " + (dir / "x.txt"));
  CHECK(r.code == 2);
  CHECK(contains(r.output, "n_c (60) must not exceed n (50)"));
  CHECK_FALSE(fs::exists(dir / "x.txt"));

  REQUIRE(run_cli("gen --n 20 --nc 10 -o " + (dir / "i.txt")).code == 0);
  CHECK(run_cli("solve " + (dir / "i.txt") + " --lambda 0 -o " + (dir / "r.json")).code == 2);
  CHECK_FALSE(fs::exists(dir / "r.json"));
  CHECK(run_cli("grid --kind phase --n 20 --nc 10 --trials 0 --out-dir " + (dir / "g")).code == 2);
  CHECK_FALSE(fs::exists(dir / "g"));
  CHECK(run_cli("grid --kind cube").code == 2);
  CHECK(run_cli("solve").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
}

TEST_CASE("missing files exit 3") {
  const Run r = run_cli("solve /nonexistent/instance.txt");
  CHECK(r.code == 3);
  CHECK(contains(r.output, "/nonexistent/instance.txt"));
}

TEST_CASE("solve reports recovery against the ground truth") {
  TempDir dir("solve");
  REQUIRE(run_cli("gen --n 50 --nc 30 --gamma 0.85 --rho 0.25 --seed 0 -o " + (dir / "i.txt")).code == 0);
  const Run r = run_cli("solve " + (dir / "i.txt") + " -o " + (dir / "r.json"));
  CHECK(r.code == 0);
  CHECK(contains(r.output, "recovered, relative error"));
  CHECK_FALSE(contains(r.output, "not recovered"));
  const auto j = read_json(dir / "r.json");
  CHECK(j["recovered"] == true);
  CHECK(j["relative_error"].get<double>() <= 1e-6);
  CHECK(j["converged"] == true);

  // stopping early: result still written, exit 4
  const Run early = run_cli("solve " + (dir / "i.txt") + " --max-iters 2 -o " + (dir / "early.json"));
  CHECK(early.code == 4);
  CHECK(fs::exists(dir / "early.json"));
}

TEST_CASE("solve the constrained program") {
  TempDir dir("qc");
  REQUIRE(run_cli("gen --n 100 --nc 85 --gamma 0.85 --rho 0.25 --seed 11 -o " + (dir / "i.txt")).code == 0);
  const Run r = run_cli("solve " + (dir / "i.txt") + " --mode quasi_clique --eta 85 --gamma 0.85 -o " + (dir / "r.json"));
  CHECK(r.code == 0);
  CHECK(contains(r.output, "feasible"));
  CHECK_FALSE(contains(r.output, "infeasible"));
  const auto j = read_json(dir / "r.json");
  CHECK(j["feasible"] == true);
  CHECK(j["mode"] == "quasi_clique_constrained");

  const Run sweep =
      run_cli("solve " + (dir / "i.txt") + " --mode quasi_clique --gamma 0.85 --eta-sweep 200,85 -o " + (dir / "s.json"));
  CHECK(sweep.code == 0);
  const auto s = read_json(dir / "s.json");
  REQUIRE(s.size() == 2);
  CHECK(s[0]["ok"] == false);
  CHECK(s[1]["ok"] == true);
}

TEST_CASE("certify exit codes") {
  TempDir dir("cert");
  REQUIRE(run_cli("gen --n 40 --nc 34 --gamma 0.85 --rho 0.7 --seed 2 -o " + (dir / "noisy.txt")).code == 0);
  const Run r = run_cli("certify " + (dir / "noisy.txt") + " -o " + (dir / "c.json"));
  CHECK(r.code == 1);
  CHECK(contains(r.output, "FAIL"));
  const auto j = read_json(dir / "c.json");
  CHECK(j["overall"] == false);
  CHECK(j["conditions"].size() == 5);

  std::ofstream(dir / "bare.csv") << "1,0\n0,1\n";
  CHECK(run_cli("certify " + (dir / "bare.csv")).code == 2);
}

TEST_CASE("grid writes csv, image and manifest") {
  TempDir dir("grid");
  const std::string flags = "grid --kind phase --n 20 --nc 12 --gammas 0.7,1 --rhos 0,0.2 --trials 2 --seed 3 ";
  const Run a = run_cli(flags + "--out-dir " + (dir / "a"), "QCR_THREADS=2");
  CHECK(a.code == 0);
  const Run b = run_cli(flags + "--threads 1 --out-dir " + (dir / "b"));
  CHECK(b.code == 0);
  for (const char* f : {"phase.csv", "phase.pgm", "phase.error.csv", "phase.manifest.json"})
    CHECK(fs::exists(dir.path / "a" / f));
  CHECK(slurp(dir.path / "a" / "phase.csv") == slurp(dir.path / "b" / "phase.csv"));
  CHECK(slurp(dir.path / "a" / "phase.pgm") == slurp(dir.path / "b" / "phase.pgm"));
  const auto m = read_json(dir.path / "a" / "phase.manifest.json");
  CHECK(m["complete"] == true);
  CHECK(m["spec"]["threads"] == 2);
  CHECK(m["spec"]["trials"] == 2);
  CHECK(m["success_rate"][1][0] == 1.0);
}

TEST_CASE("config files sit under command-line flags") {
  TempDir dir("cfg");
  std::ofstream(dir / "c.cfg") << "# instance\nn = 30\nnc = 12\nseed = 3\n";
  REQUIRE(run_cli("--config " + (dir / "c.cfg") + " gen -o " + (dir / "a.txt")).code == 0);
  CHECK(qcr::read_matrix_file(dir / "a.txt").truth->params == qcr::InstanceParams{30, 12, 0.85, 0.25, 3});
  REQUIRE(run_cli("--config " + (dir / "c.cfg") + " gen --nc 20 -o " + (dir / "b.txt")).code == 0);
  CHECK(qcr::read_matrix_file(dir / "b.txt").truth->params.n_c == 20);

  std::ofstream(dir / "bad.cfg") << "trials = 0\n";
  CHECK(run_cli("--config " + (dir / "bad.cfg") + " grid --kind phase --n 20 --nc 10 --out-dir " + (dir / "g")).code ==
        2);
  CHECK(run_cli("--config " + (dir / "missing.cfg") + " gen").code == 3);
}

TEST_CASE("norms") {
  TempDir dir("norms");
  std::ofstream(dir / "m.csv") << "3,0\n0,-4\n";
  const Run r = run_cli("norms --json " + (dir / "m.csv"));
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.output);
  CHECK(j["nuclear"] == 7.0);
  CHECK(j["spectral"] == 4.0);
  CHECK(j["l1"] == 7.0);
  CHECK(j["linf"] == 4.0);
  CHECK(j["frobenius"] == 5.0);
}
