#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "mimobc/cli_io.hpp"
#include "mimobc/errors.hpp"

namespace fs = std::filesystem;
using namespace mimobc;

namespace {

struct Flags {
  std::string config_path;
  int M = 0, K = 0, trials = 0, threads = -1;
  std::vector<int> Ns;
  std::vector<double> P_dbs;
  std::uint64_t seed = 0;
  std::string threshold_mode, schemes, out_dir;
  double t_fixed = 0.0, beta = -1.0, rho_offset = 0.0;
  bool quick = false;
};

int run(const std::string& sub, const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(cfg.out_dir);

  RunManifest manifest;
  manifest.config_digest = config_digest(cfg);
  manifest.master_seed = cfg.master_seed;
  int exit_code = 0;

  if (sub == "sumrate-vs-users") {
    const auto rows = run_sumrate_vs_users(cfg);
    emit_csv(to_csv(rows), fs::path(cfg.out_dir) / "sumrate_vs_users.csv");
    manifest.table_rows["sumrate_vs_users"] = static_cast<long>(rows.size());
    std::cout << "wrote " << (fs::path(cfg.out_dir) / "sumrate_vs_users.csv").string() << " (" << rows.size()
              << " rows)\n";
  } else if (sub == "threshold-sweep") {
    const auto rows = run_threshold_sweep(cfg);
    emit_csv(to_csv(rows), fs::path(cfg.out_dir) / "threshold_sweep.csv");
    manifest.table_rows["threshold_sweep"] = static_cast<long>(rows.size());
    for (const auto& r : rows)
      std::cout << "N=" << r.N << "  t*=" << format_sig12(r.t_star) << "  rate=" << format_sig12(r.mean_rate_nats)
                << "\n";
  } else if (sub == "sumrate-vs-power") {
    const auto result = run_sumrate_vs_power(cfg);
    emit_csv(to_csv(result.rows), fs::path(cfg.out_dir) / "sumrate_vs_power.csv");
    emit_csv(to_csv(result.slopes), fs::path(cfg.out_dir) / "sumrate_vs_power_slopes.csv");
    manifest.table_rows["sumrate_vs_power"] = static_cast<long>(result.rows.size());
    manifest.table_rows["sumrate_vs_power_slopes"] = static_cast<long>(result.slopes.size());
    for (const auto& s : result.slopes)
      std::cout << scheme_name(s.scheme) << " slope=" << format_sig12(s.slope) << "\n";
  } else if (sub == "feedback") {
    const auto rows = run_feedback_vs_users(cfg);
    emit_csv(to_csv(rows), fs::path(cfg.out_dir) / "feedback_vs_users.csv");
    manifest.table_rows["feedback_vs_users"] = static_cast<long>(rows.size());
    for (const auto& r : rows)
      std::cout << "N=" << r.N << "  " << r.algorithm << "  per-user=" << format_sig12(r.mean_per_user) << "\n";
  } else if (sub == "validate-lemmas") {
    const auto report = run_lemma_validation(cfg);
    emit_csv(to_csv(report), fs::path(cfg.out_dir) / "lemma_validation.csv");
    manifest.table_rows["lemma_validation"] = static_cast<long>(report.stats.size());
    for (const auto& s : report.stats)
      std::cout << (s.pass ? "PASS" : "FAIL") << "  " << s.name << "  value=" << format_sig12(s.value)
                << "  target=" << format_sig12(s.target) << "  n=" << s.samples << "\n";
    for (const auto& w : report.warnings) std::cout << "WARNING  " << w << "\n";
    if (!report.all_pass()) exit_code = 2;
  }

  manifest.wall_seconds =
      std::chrono::duration_cast<std::chrono::duration<double>>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(manifest, fs::path(cfg.out_dir) / "manifest.json");
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold-based eigenmode selection for MIMO broadcast channels: simulator and validation suite"};
  app.require_subcommand(1);

  Flags fl;
  auto* o_config = app.add_option("--config", fl.config_path, "flat key=value config file");
  auto* o_seed = app.add_option("--seed", fl.seed, "master seed (also env MIMO_BC_SEED)");
  auto* o_trials = app.add_option("--trials", fl.trials, "Monte Carlo trials");
  auto* o_M = app.add_option("--M", fl.M, "transmit antennas");
  auto* o_K = app.add_option("--K", fl.K, "receive antennas per user");
  auto* o_N = app.add_option("--N", fl.Ns, "user count (repeatable)");
  auto* o_P = app.add_option("--P-db", fl.P_dbs, "transmit power in dB (repeatable)");
  auto* o_mode = app.add_option("--threshold-mode", fl.threshold_mode,
                                "fixed|theorem1_necessary|theorem2_sufficient|remark1_refined|fig1_empirical");
  auto* o_t = app.add_option("--t", fl.t_fixed, "fixed threshold value (implies --threshold-mode fixed)");
  auto* o_rho = app.add_option("--rho-offset", fl.rho_offset, "free offset of the threshold formula");
  auto* o_beta = app.add_option("--beta", fl.beta, "interactive pruning threshold in [0, 1]");
  auto* o_out = app.add_option("--out-dir", fl.out_dir, "output directory for CSV tables and the manifest");
  auto* o_threads = app.add_option("--threads", fl.threads, "worker threads (0 = hardware default)");
  auto* o_schemes = app.add_option("--schemes", fl.schemes, "comma-separated scheme list");
  auto* o_quick = app.add_flag("--quick", fl.quick, "reduced sample counts and widened tolerances");

  for (auto* sub : {app.add_subcommand("sumrate-vs-users", "mean sum rate per scheme across the user-count grid"),
                    app.add_subcommand("threshold-sweep", "rate-maximizing gain threshold per user count"),
                    app.add_subcommand("sumrate-vs-power", "mean sum rate per scheme across the power grid, with slopes"),
                    app.add_subcommand("feedback", "fed-back real values per user for both selection algorithms"),
                    app.add_subcommand("validate-lemmas", "statistical validation report (exit 2 on assertion failure)")})
    sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg;
    if (const char* env = std::getenv("MIMO_BC_SEED")) {
      try {
        cfg.master_seed = std::stoull(env);
      } catch (...) {
        throw ConfigError("environment variable MIMO_BC_SEED: cannot parse as an unsigned integer");
      }
    }
    if (o_config->count()) cfg = parse_config_file(fl.config_path, cfg);

    if (o_M->count()) apply_config_entry(cfg, "m", std::to_string(fl.M));
    if (o_K->count()) apply_config_entry(cfg, "k", std::to_string(fl.K));
    if (o_trials->count()) apply_config_entry(cfg, "trials", std::to_string(fl.trials));
    if (o_seed->count()) cfg.master_seed = fl.seed;
    if (o_N->count()) {
      cfg.N_grid.clear();
      for (int n : fl.Ns) {
        if (n < 1) throw ConfigError("config key 'n': out of range (every N must be >= 1)");
        cfg.N_grid.push_back(n);
      }
    }
    if (o_P->count()) cfg.P_grid_db = fl.P_dbs;
    if (o_mode->count()) apply_config_entry(cfg, "threshold_mode", fl.threshold_mode);
    if (o_rho->count()) cfg.threshold.rho_offset = fl.rho_offset;
    if (o_t->count()) apply_config_entry(cfg, "t", format_sig12(fl.t_fixed));
    if (o_beta->count()) apply_config_entry(cfg, "beta", format_sig12(fl.beta));
    if (o_out->count()) cfg.out_dir = fl.out_dir;
    if (o_threads->count()) apply_config_entry(cfg, "threads", std::to_string(fl.threads));
    if (o_schemes->count()) apply_config_entry(cfg, "schemes", fl.schemes);
    if (o_quick->count()) cfg.quick = true;
    validate_config(cfg);

    return run(app.get_subcommands().front()->get_name(), cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
