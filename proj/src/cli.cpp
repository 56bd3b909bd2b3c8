#include "frsm/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "frsm/batteries.hpp"
#include "frsm/config.hpp"
#include "frsm/diagnostics.hpp"
#include "frsm/snapshot.hpp"
#include "frsm/stepper.hpp"

namespace frsm {

namespace {

RunConfig read_config(const std::string& path, std::ostream& err) {
  std::vector<std::string> notes;
  RunConfig cfg = load_config(path, &notes);
  for (const auto& n : notes) err << "note: " << n << "\n";
  return cfg;
}

std::string snapshot_name(std::int64_t step) {
  std::ostringstream os;
  os << "snapshot_" << std::setw(6) << std::setfill('0') << step << ".frsm";
  return os.str();
}

int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = read_config(config_path, err);
  const std::filesystem::path dir = std::filesystem::path(cfg.output_dir.empty() ? "." : cfg.output_dir);
  std::filesystem::create_directories(dir);

  std::vector<LedgerRow> rows;
  RunHooks hooks;
  hooks.on_output = [&](const State& s, const LedgerRow& row) {
    rows.push_back(row);
    save_snapshot(s, cfg.params, (dir / snapshot_name(row.step)).string());
  };
  auto write_ledger = [&] {
    std::ofstream os(dir / "ledger.csv");
    write_ledger_csv(os, rows);
  };

  try {
    const RunResult result = run(cfg, hooks);
    write_ledger();
    std::uint32_t flags = 0;
    for (const auto& r : rows) flags |= r.flags;
    out << "steps " << result.steps << ", t = " << result.final_state.t << ", audits " << rows.size()
        << ", flags " << flags << "\n";
    if (!rows.empty()) {
      out << "E(0) = " << rows.front().energy << ", E(T) = " << rows.back().energy << "\n";
    }
    out << "ledger: " << (dir / "ledger.csv").string() << "\n";
    return kExitOk;
  } catch (const StepFailure& e) {
    write_ledger();
    const std::string path = (dir / "last_good.frsm").string();
    save_snapshot(e.last_good(), cfg.params, path);
    err << "step failure at step " << e.step() << " (t = " << e.last_good().t << "): " << e.what() << "\n"
        << "last good state written to " << path << "\n";
    return kExitRuntime;
  }
}

int cmd_verify(const std::vector<std::string>& paths, const std::string& config_path, std::ostream& out,
               std::ostream& err) {
  std::optional<RunConfig> cfg;
  if (!config_path.empty()) cfg = read_config(config_path, err);

  int code = kExitOk;
  for (const auto& path : paths) {
    const Snapshot snap = load_snapshot(path);
    const State state = snap.to_state();
    const Forcing forcing = cfg ? cfg->forcing : Forcing{};
    const double kmax = cfg ? resolved_kmax(cfg->stepper, state.grid()) : state.grid().dealias_cutoff();

    const ValidationReport report = validate(state);
    const LedgerRow row = audit_step(state, forcing, snap.params, kmax);
    const IdentityResiduals& r = row.residuals;
    out << path << ": N = " << snap.n << ", t = " << snap.time << ", E = " << row.energy << "\n"
        << "  max identity residual " << r.max_cancellation() << ", psMH " << r.ps_mh << ", half pairing "
        << r.half_pairing << ", zeta positivity " << r.zeta_positivity << "\n"
        << "  magnetostatic div " << row.magnetostatic_div << ", curl " << row.magnetostatic_curl << "\n";
    bool ok = true;
    if (!report.ok()) {
      out << "  validation: " << report.to_string() << "\n";
      ok = false;
    }
    if (row.flags != 0) {
      out << "  flagged (mask " << row.flags << ")\n";
      ok = false;
    }
    out << (ok ? "  ok\n" : "  FAILED\n");
    if (!ok) code = kExitRuntime;
  }
  return code;
}

int cmd_convergence(const std::string& config_path, const std::vector<double>& cutoffs, std::ostream& out,
                    std::ostream& err) {
  const RunConfig cfg = read_config(config_path, err);
  const LadderReport ladder = galerkin_ladder(cfg, cutoffs);

  out << "cutoff  grid  gap_L2  gap_H1/2  gap_H1  sup_F\n";
  out << std::scientific << std::setprecision(4);
  for (const auto& e : ladder.entries) {
    out << std::setw(6) << std::defaultfloat << e.cutoff << std::scientific << "  " << std::setw(4) << e.grid_n
        << "  " << e.gap.l2 << "  " << e.gap.h_half << "  " << e.gap.h1 << "  " << e.sup_half_energy << "\n";
  }
  out << "sup_F variation " << ladder.sup_variation() << "\n";

  const ConvergenceReport conv = self_convergence(cfg);
  out << "dt  |U_dt - U_dt/2|  |U_dt/2 - U_dt/4|  ratio  order\n";
  out << conv.dt << "  " << conv.error_coarse << "  " << conv.error_fine << "  " << std::defaultfloat
      << conv.ratio << "  " << conv.order << "\n";

  if (!ladder.strictly_decreasing()) {
    err << "gaps are not strictly decreasing\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_twin(const std::string& config_path, double size, std::ostream& out, std::ostream& err) {
  RunConfig cfg = read_config(config_path, err);
  const TwinReport coarse = twin_run(cfg, size);
  cfg.stepper.dt *= 0.5;
  const TwinReport fine = twin_run(cfg, size);

  out << std::setprecision(6);
  out << "dt          ratio_L2     ratio_H1/2\n";
  out << cfg.stepper.dt * 2.0 << "  " << coarse.ratio_l2 << "  " << coarse.ratio_half << "\n";
  out << cfg.stepper.dt << "  " << fine.ratio_l2 << "  " << fine.ratio_half << "\n";
  const double change = std::abs(fine.ratio_l2 - coarse.ratio_l2) / std::max(std::abs(fine.ratio_l2), 1e-300);
  out << "relative change under dt halving " << change << "\n";
  if (!std::isfinite(coarse.ratio_l2) || !std::isfinite(fine.ratio_l2)) {
    err << "non-finite growth ratio\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_batteries(int n, std::size_t samples, std::uint64_t seed, const std::vector<int>& orders,
                  std::ostream& out) {
  const GridD grid(n);
  bool ok = true;
  const BatteryReport ineq = inequality_battery(grid, samples, seed);
  out << ineq.to_string();
  ok = ok && ineq.passed();
  for (int k : orders) {
    const BatteryReport leib = leibniz_battery(grid, k, samples, seed);
    out << leib.to_string();
    ok = ok && leib.passed();
  }
  return ok ? kExitOk : kExitRuntime;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudo-spectral ferrofluid simulator and diagnostics"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> snapshots;
  std::vector<double> cutoffs = {8, 16, 32};
  double size = 1e-8;
  int grid_n = 64;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  std::vector<int> orders = {1, 2, 3};

  auto* run_cmd = app.add_subcommand("run", "Integrate a configuration, writing snapshots and ledger.csv");
  run_cmd->add_option("--config", config_path, "Configuration file")->required();

  auto* verify_cmd = app.add_subcommand("verify", "Audit one or more snapshots");
  verify_cmd->add_option("--snapshot", snapshots, "Snapshot file (repeatable)")->required();
  verify_cmd->add_option("--config", config_path, "Configuration supplying forcing and cutoff");

  auto* conv_cmd = app.add_subcommand("convergence", "Galerkin cutoff ladder and dt-halving table");
  conv_cmd->add_option("--config", config_path, "Configuration file")->required();
  conv_cmd->add_option("--cutoffs", cutoffs, "Cutoff wavenumbers")->delimiter(',');

  auto* twin_cmd = app.add_subcommand("twin", "Perturbed twin trajectories at dt and dt/2");
  twin_cmd->add_option("--config", config_path, "Configuration file")->required();
  twin_cmd->add_option("--size", size, "L2 size of the velocity perturbation")->check(CLI::NonNegativeNumber);

  auto* bat_cmd = app.add_subcommand("batteries", "Sampled inequality and Leibniz batteries");
  bat_cmd->add_option("--grid", grid_n, "Grid points per axis");
  bat_cmd->add_option("--samples", samples, "Samples per half")->check(CLI::Range(std::size_t{1}, std::size_t{1} << 24));
  bat_cmd->add_option("--seed", seed, "Random seed");
  bat_cmd->add_option("--orders", orders, "Leibniz orders")->delimiter(',')->check(CLI::Range(1, 3));

  std::vector<std::string> argv_store = args;
  if (argv_store.empty()) argv_store.emplace_back("frsm");
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(config_path, out, err);
    if (*verify_cmd) return cmd_verify(snapshots, config_path, out, err);
    if (*conv_cmd) return cmd_convergence(config_path, cutoffs, out, err);
    if (*twin_cmd) return cmd_twin(config_path, size, out, err);
    if (*bat_cmd) return cmd_batteries(grid_n, samples, seed, orders, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SnapshotError& e) {
    err << "snapshot error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace frsm
