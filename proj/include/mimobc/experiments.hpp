#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mimobc/baselines.hpp"
#include "mimobc/precoding.hpp"
#include "mimobc/selection.hpp"

namespace mimobc {

enum class Scheme {
  proposed_wf,
  proposed_uniform,
  exhaustive,
  random_zf,
  tdma,
  random_dpc,
  dpc_opt,
  no_csi,
};

const char* scheme_name(Scheme s);
std::optional<Scheme> scheme_from_name(const std::string& name);

/// Monte Carlo experiment settings. `threads` = 0 selects the hardware
/// default; worker count never affects results. `beta` empty derives the
/// pruning threshold from the preset.
struct ExperimentConfig {
  int M = 2;
  int K = 1;
  std::vector<int> N_grid{100};
  std::vector<double> P_grid_db{10.0};
  int trials = 1000;
  std::vector<Scheme> schemes{Scheme::proposed_wf, Scheme::proposed_uniform, Scheme::random_zf,
                              Scheme::tdma,        Scheme::random_dpc,       Scheme::dpc_opt};
  ThresholdPreset threshold{};
  std::optional<double> beta;
  std::uint64_t master_seed = 1;
  double epsilon_orth = 0.3;
  int threads = 0;
  long exhaustive_budget = 2'000'000;
  bool quick = false;
  std::string out_dir = ".";

  double beta_for(int N) const;
  double power_linear(double db) const;  // 10^(db/10); noise power is 1
};

/// One trial's achieved rate under one scheme. A NaN rate marks a trial the
/// scheme dropped (singular coordinate matrix); valid rates are nonnegative.
struct RateSample {
  Scheme scheme = Scheme::proposed_wf;
  double rate_nats = 0.0;
  int trial_id = 0;
  int N = 0;
  int M = 0;
  int K = 0;
  double P = 0.0;
};

struct SumRateRow {
  int N = 0;
  Scheme scheme = Scheme::proposed_wf;
  double mean_rate_nats = 0.0;
  double std_error = 0.0;
  long singular_trials = 0;
};

struct ThresholdSweepRow {
  int N = 0;
  double t_star = 0.0;
  double mean_rate_nats = 0.0;
  double std_error = 0.0;
};

struct PowerSweepRow {
  double P_db = 0.0;
  Scheme scheme = Scheme::proposed_wf;
  double mean_rate_nats = 0.0;
  double std_error = 0.0;
  long singular_trials = 0;
};

struct SchemeSlope {
  Scheme scheme = Scheme::proposed_wf;
  double slope = 0.0;  // nats per ln P over the top decade
};

struct FeedbackRow {
  int N = 0;
  std::string algorithm;  // "algorithm1" | "algorithm2"
  double mean_per_user = 0.0;
  double std_error = 0.0;
};

struct PowerSweepResult {
  std::vector<PowerSweepRow> rows;
  std::vector<SchemeSlope> slopes;
};

struct LemmaStat {
  std::string name;
  double value = 0.0;
  double std_error = 0.0;
  long samples = 0;
  double target = 0.0;
  bool pass = true;
  std::string note;
};

struct ValidationReport {
  std::vector<LemmaStat> stats;
  std::vector<std::string> warnings;
  bool all_pass() const;
  const LemmaStat* find(const std::string& name) const;
};

/// One shared channel ensemble per (N, trial); every configured scheme is
/// evaluated on it (paired comparison). Singular trials are dropped from the
/// scheme's mean and counted. Runs at P_grid_db.front().
std::vector<SumRateRow> run_sumrate_vs_users(const ExperimentConfig& cfg);

/// Sweeps the gain threshold over [ln N - 2 ln ln N, ln N + 1] (step 0.25,
/// or an explicit grid) with common random numbers across grid points and
/// reports the rate-maximizing threshold per N.
std::vector<ThresholdSweepRow> run_threshold_sweep(const ExperimentConfig& cfg,
                                                   std::optional<std::vector<double>> t_grid = std::nullopt);

/// Mean rate per scheme across the power grid plus the least-squares slope of
/// rate against ln P over the top decade. Uses N_grid.front().
PowerSweepResult run_sumrate_vs_power(const ExperimentConfig& cfg);

/// Mean fed-back real values per user for the one-shot and interactive
/// selection algorithms, at the configured threshold preset and beta.
std::vector<FeedbackRow> run_feedback_vs_users(const ExperimentConfig& cfg);

/// Statistical validation of the analytic results at finite user counts.
/// Quick mode shrinks sample counts and widens tolerances (trend checks
/// become informational).
ValidationReport run_lemma_validation(const ExperimentConfig& cfg);

namespace detail {
/// Runs body(trial) for trial in [0, trials) on `threads` workers. Results
/// must be written to per-trial slots so scheduling cannot change output.
void parallel_trials(int trials, int threads, const std::function<void(int)>& body);

int resolve_threads(int requested);

/// Channel ensemble for one (seed, trial): users 0..N-1.
std::vector<ChannelMatrix> sample_ensemble(int N, int K, int M, std::uint64_t seed, std::uint64_t trial);

/// Candidate modes above t, decomposing only users whose top eigenvalue
/// clears the threshold.
CandidateSet threshold_pool(const std::vector<ChannelMatrix>& channels, double t);
}  // namespace detail

}  // namespace mimobc
