#include <sstream>

#include "doctest.h"
#include "mimobc/cli_io.hpp"
#include "mimobc/experiments.hpp"

using namespace mimobc;

namespace {

ExperimentConfig small_cfg() {
  ExperimentConfig cfg;
  cfg.M = 2;
  cfg.K = 1;
  cfg.N_grid = {8, 24};
  cfg.trials = 60;
  cfg.threshold = {ThresholdMode::fixed, 1.0};
  cfg.schemes = {Scheme::proposed_wf, Scheme::proposed_uniform, Scheme::random_zf, Scheme::tdma,
                 Scheme::random_dpc,  Scheme::dpc_opt,          Scheme::no_csi};
  cfg.master_seed = 77;
  return cfg;
}

std::string csv_of(const std::vector<SumRateRow>& rows) {
  std::ostringstream out;
  emit_csv(to_csv(rows), out);
  return out.str();
}

}  // namespace

TEST_CASE("sum-rate table is reproducible and worker-count independent") {
  ExperimentConfig cfg = small_cfg();
  cfg.threads = 1;
  const std::string a = csv_of(run_sumrate_vs_users(cfg));
  const std::string b = csv_of(run_sumrate_vs_users(cfg));
  CHECK(a == b);
  cfg.threads = 4;
  CHECK(csv_of(run_sumrate_vs_users(cfg)) == a);
}

TEST_CASE("pairwise scheme orderings hold per table") {
  ExperimentConfig cfg = small_cfg();
  const auto rows = run_sumrate_vs_users(cfg);
  auto mean_of = [&](int N, Scheme s) {
    for (const auto& r : rows)
      if (r.N == N && r.scheme == s) return r.mean_rate_nats;
    FAIL("row missing");
    return 0.0;
  };
  for (int N : cfg.N_grid) {
    CHECK(mean_of(N, Scheme::proposed_uniform) <= mean_of(N, Scheme::proposed_wf) + 1e-9);
    CHECK(mean_of(N, Scheme::proposed_wf) <= mean_of(N, Scheme::dpc_opt) + 1e-6);
    CHECK(mean_of(N, Scheme::tdma) <= mean_of(N, Scheme::dpc_opt) + 1e-6);
  }
}

TEST_CASE("proposed rate trend in the user count") {
  ExperimentConfig cfg = small_cfg();
  cfg.N_grid = {20, 120};
  cfg.trials = 150;
  cfg.threshold = {ThresholdMode::fig1_empirical};
  cfg.schemes = {Scheme::proposed_wf};
  const auto rows = run_sumrate_vs_users(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].mean_rate_nats + 2.0 * (rows[0].std_error + rows[1].std_error) >= rows[0].mean_rate_nats);
}

TEST_CASE("threshold sweep reports the grid argmax") {
  ExperimentConfig cfg = small_cfg();
  cfg.N_grid = {40};
  cfg.trials = 80;
  cfg.threshold = {ThresholdMode::fig1_empirical};
  const auto rows = run_threshold_sweep(cfg);
  REQUIRE(rows.size() == 1);
  const double l1 = std::log(40.0);
  CHECK(rows[0].t_star >= l1 - 2.0 * std::log(l1) - 1e-9);
  CHECK(rows[0].t_star <= l1 + 1.0 + 1e-9);

  // explicit grids are honored
  const auto fixed = run_threshold_sweep(cfg, std::vector<double>{1.0, 2.0});
  REQUIRE(fixed.size() == 1);
  CHECK((fixed[0].t_star == 1.0 || fixed[0].t_star == 2.0));
}

TEST_CASE("power sweep slopes approach the antenna count") {
  ExperimentConfig cfg = small_cfg();
  cfg.N_grid = {60};
  cfg.P_grid_db = {20.0, 25.0, 30.0};
  cfg.trials = 120;
  cfg.threshold = {ThresholdMode::fig1_empirical};
  cfg.schemes = {Scheme::proposed_wf, Scheme::tdma};
  const PowerSweepResult res = run_sumrate_vs_power(cfg);
  REQUIRE(res.slopes.size() == 2);
  for (const auto& s : res.slopes) {
    if (s.scheme == Scheme::proposed_wf) CHECK(std::abs(s.slope - 2.0) < 0.2);
    if (s.scheme == Scheme::tdma) CHECK(std::abs(s.slope - 1.0) < 0.15);  // K = 1
  }
}

TEST_CASE("feedback accounting under a vacuous threshold") {
  // every mode passes, so the one-shot ledger is exactly 2*M*K per user
  ExperimentConfig cfg = small_cfg();
  cfg.N_grid = {12};
  cfg.K = 2;
  cfg.trials = 10;
  cfg.threshold = {ThresholdMode::fixed, -1e12};
  cfg.beta = 0.5;
  const auto rows = run_feedback_vs_users(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].algorithm == "algorithm1");
  CHECK(rows[0].mean_per_user == doctest::Approx(2.0 * cfg.M * cfg.K).epsilon(1e-12));
  CHECK(rows[0].std_error == doctest::Approx(0.0));
}

TEST_CASE("interactive feedback beats one-shot feedback at matched presets") {
  ExperimentConfig cfg = small_cfg();
  cfg.N_grid = {100};
  cfg.trials = 400;
  cfg.threshold = {ThresholdMode::theorem2_sufficient, 2.0};
  cfg.beta.reset();
  const auto rows = run_feedback_vs_users(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].mean_per_user < rows[0].mean_per_user);
}

TEST_CASE("quick lemma validation runs and reports") {
  ExperimentConfig cfg;
  cfg.quick = true;
  cfg.master_seed = 5;
  const ValidationReport rep = run_lemma_validation(cfg);
  CHECK(rep.stats.size() >= 12);
  CHECK(rep.find("eta") != nullptr);
  CHECK(rep.find("ks_overlap_M2") != nullptr);
  for (const auto& s : rep.stats) CHECK(s.samples > 0);
}

TEST_CASE("scheme names round-trip") {
  for (Scheme s : {Scheme::proposed_wf, Scheme::proposed_uniform, Scheme::exhaustive, Scheme::random_zf,
                   Scheme::tdma, Scheme::random_dpc, Scheme::dpc_opt, Scheme::no_csi}) {
    const auto back = scheme_from_name(scheme_name(s));
    REQUIRE(back.has_value());
    CHECK(*back == s);
  }
  CHECK(!scheme_from_name("nonsense").has_value());
}
