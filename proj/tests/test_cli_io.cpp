#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "frsm/cli.hpp"
#include "frsm/config.hpp"
#include "frsm/snapshot.hpp"
#include "frsm/stepper.hpp"
#include "support.hpp"

using namespace frsm;
using namespace frsm::test;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("frsm_test_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& b) {
  std::ofstream(path, std::ios::binary).write(reinterpret_cast<const char*>(b.data()), std::streamsize(b.size()));
}

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "frsm");
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

State random_snapshot_state() {
  std::mt19937_64 rng(41);
  const GridD grid(16, 3.5);
  State s = random_state(grid, rng, grid.dealias_cutoff());
  s.t = 0.375;
  return s;
}

}  // namespace

TEST_CASE("snapshot save and load round trip bit-exactly") {
  TempDir dir;
  const State s = random_snapshot_state();
  Params p;
  p.chi0 = 0.3;
  p.lambda_p = 7.0;
  save_snapshot(s, p, dir / "a.frsm");
  const Snapshot snap = load_snapshot(dir / "a.frsm");
  CHECK(snap.n == 16);
  CHECK(snap.length == 3.5);
  CHECK(snap.time == 0.375);
  CHECK(snap.params == p);
  CHECK(snap == Snapshot::from_state(s, p));
  const State back = snap.to_state();
  CHECK(rel_diff(back.u[0].to_physical(), s.u[0].to_physical()) < 1e-15);
  CHECK(rel_diff(back.omega.to_physical(), s.omega.to_physical()) < 1e-15);
  CHECK(rel_diff(back.M[1].to_physical(), s.M[1].to_physical()) < 1e-15);
  CHECK(validate(back).ok());

  save_snapshot(snap, dir / "b.frsm");
  CHECK(read_bytes(dir / "a.frsm") == read_bytes(dir / "b.frsm"));
  CHECK(read_bytes(dir / "a.frsm").size() == Snapshot::kHeaderBytes + 5 * 16 * 16 * 8);
}

TEST_CASE("snapshot header is little-endian") {
  const Snapshot snap = Snapshot::from_state(random_snapshot_state(), Params{});
  const auto bytes = snap.encode();
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "FRSM");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 0);
  CHECK(bytes[8] == 16);
  CHECK(bytes[9] == 0);
}

TEST_CASE("snapshot format errors") {
  const auto good = Snapshot::from_state(random_snapshot_state(), Params{}).encode();
  auto message = [](std::vector<std::uint8_t> b) {
    try {
      (void)Snapshot::decode(b);
    } catch (const SnapshotError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  auto truncated = good;
  truncated.pop_back();
  const std::string m = message(truncated);
  CHECK(m.find(std::to_string(good.size())) != std::string::npos);
  CHECK(m.find(std::to_string(good.size() - 1)) != std::string::npos);

  auto magic = good;
  magic[0] = 'X';
  CHECK(message(magic).find("header") != std::string::npos);

  auto version = good;
  version[4] = 2;
  CHECK(message(version).find("version") != std::string::npos);

  auto size = good;
  size[8] = 12;
  CHECK(message(size).find("power of two") != std::string::npos);

  CHECK(message({good.begin(), good.begin() + 10}).find("truncated") != std::string::npos);
  CHECK_THROWS_AS(load_snapshot("/nonexistent/x.frsm"), SnapshotError);
}

TEST_CASE("energy recomputed from written snapshots matches the run ledger") {
  TempDir dir;
  write_text(dir / "run.cfg", "grid.n = 16\nic.kind = random\nic.seed = 4\nic.kmax = 4\n"
                              "forcing.modes[0] = 1 1 0.3 0 cosine 1.5\n"
                              "stepper.dt = 0.01\nstepper.t_end = 0.1\noutput.every = 5\noutput.dir = " +
                                  dir.path.string() + "\n");
  const CliResult r = cli({"run", "--config", dir / "run.cfg"});
  REQUIRE(r.code == kExitOk);
  const RunConfig cfg = load_config(dir / "run.cfg");
  const RunResult ref = run(cfg);
  REQUIRE(ref.ledger.size() == 3);
  for (const LedgerRow& row : ref.ledger) {
    std::ostringstream name;
    name << "snapshot_" << std::setw(6) << std::setfill('0') << row.step << ".frsm";
    const State s = load_snapshot(dir / name.str()).to_state();
    const LedgerRow again = audit_step(s, cfg.forcing, cfg.params, resolved_kmax(cfg.stepper, s.grid()));
    CHECK(again.energy == doctest::Approx(row.energy).epsilon(1e-12));
  }
  CHECK(fs::exists(dir / "ledger.csv"));
}

TEST_CASE("cli run on zero data writes zero snapshots and an all-zero ledger") {
  TempDir dir;
  write_text(dir / "zero.cfg", "grid.n = 16\nic.kind = zero\nstepper.dt = 0.01\nstepper.t_end = 0.03\n"
                               "output.dir = " + dir.path.string() + "\n");
  const CliResult r = cli({"run", "--config", dir / "zero.cfg"});
  CHECK(r.code == kExitOk);
  const State s = load_snapshot(dir / "snapshot_000003.frsm").to_state();
  CHECK(norm(s.u) + norm(s.omega) + norm(s.M) == 0.0);

  std::ifstream is(dir / "ledger.csv");
  std::string line;
  std::getline(is, line);
  int rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string cell;
    int col = 0;
    while (std::getline(fields, cell, ',')) {
      if (col++ >= 2) CHECK(std::stod(cell) == 0.0);
    }
  }
  CHECK(rows == 4);
}

TEST_CASE("cli verify") {
  TempDir dir;
  save_snapshot(random_snapshot_state(), Params{}, dir / "ok.frsm");
  CHECK(cli({"verify", "--snapshot", dir / "ok.frsm"}).code == kExitOk);

  auto bytes = read_bytes(dir / "ok.frsm");
  bytes[1] = '?';
  write_bytes(dir / "bad.frsm", bytes);
  const CliResult bad = cli({"verify", "--snapshot", dir / "bad.frsm"});
  CHECK(bad.code == kExitUsage);
  CHECK(bad.err.find("header") != std::string::npos);

  // A velocity with a gradient part fails validation.
  State s = random_snapshot_state();
  s.u += gradient(sample(s.grid(), [](double x, double) { return std::cos(x); }));
  save_snapshot(s, Params{}, dir / "div.frsm");
  const CliResult div = cli({"verify", "--snapshot", dir / "ok.frsm", "--snapshot", dir / "div.frsm"});
  CHECK(div.code == kExitRuntime);
  CHECK(div.out.find("div-residual") != std::string::npos);
}

TEST_CASE("cli usage and configuration errors exit with 2") {
  TempDir dir;
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"explode"}).code == kExitUsage);
  CHECK(cli({"run"}).code == kExitUsage);
  CHECK(cli({"run", "--config", dir / "missing.cfg"}).code == kExitUsage);
  write_text(dir / "bad.cfg", "grid.n = 16\nparams.sigma = -1\n");
  const CliResult r = cli({"run", "--config", dir / "bad.cfg"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("params.sigma") != std::string::npos);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("cli runtime failure exits with 1 and writes the last good state") {
  TempDir dir;
  // Explicit coupling rate 2 zeta / (rho0 kappa) = 2e4 with dt = 0.1 blows up.
  write_text(dir / "blow.cfg", "grid.n = 16\nparams.zeta = 10000\nstepper.dt = 0.1\nstepper.t_end = 100\n"
                               "output.every = 1000000\noutput.dir = " + dir.path.string() + "\n");
  const CliResult r = cli({"run", "--config", dir / "blow.cfg"});
  CHECK(r.code == kExitRuntime);
  CHECK(r.err.find("step failure") != std::string::npos);
  CHECK(fs::exists(dir / "last_good.frsm"));
}

TEST_CASE("cli convergence and twin") {
  TempDir dir;
  write_text(dir / "c.cfg", "grid.n = 32\nstepper.dt = 0.02\nstepper.t_end = 0.2\n");
  const CliResult c = cli({"convergence", "--config", dir / "c.cfg", "--cutoffs", "2,4"});
  CHECK(c.code == kExitOk);
  CHECK(c.out.find("gap_H1/2") != std::string::npos);
  const CliResult t = cli({"twin", "--config", dir / "c.cfg", "--size", "1e-8"});
  CHECK(t.code == kExitOk);
  CHECK(t.out.find("ratio_L2") != std::string::npos);
  const CliResult b = cli({"batteries", "--grid", "16", "--samples", "8", "--orders", "1"});
  CHECK(b.out.find("interpolation") != std::string::npos);
}
