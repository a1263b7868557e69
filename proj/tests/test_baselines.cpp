#include <cmath>

#include "doctest.h"
#include "mimobc/baselines.hpp"
#include "mimobc/errors.hpp"
#include "mimobc/precoding.hpp"
#include "mimobc/stats.hpp"
#include "oracles.hpp"

using namespace mimobc;

TEST_CASE("single user scalar capacity") {
  ChannelMatrix h;
  h.user_id = 0;
  h.entries.resize(1, 1);
  h.entries(0, 0) = std::complex<double>(0.8, -0.6);
  const double P = 5.0;
  const double expected = std::log1p(P * std::norm(h.entries(0, 0)));
  CHECK(dpc_sum_capacity({h}, P).rate_nats == doctest::Approx(expected).epsilon(1e-9));
  CHECK(tdma_rate({h}, P) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("single user MIMO matches closed-form water-filling") {
  RngStream s(3);
  for (int rep = 0; rep < 20; ++rep) {
    const ChannelMatrix h = sample_channel(2, 3, s, 0);
    const double P = 0.5 + 20.0 * s.uniform01();
    const DpcResult r = dpc_sum_capacity({h}, P);
    CHECK(r.rate_nats == doctest::Approx(single_user_capacity(h, P)).epsilon(1e-6));
    CHECK(r.converged);
  }
}

TEST_CASE("two identical users add nothing beyond power pooling") {
  RngStream s(5);
  ChannelMatrix h = sample_channel(1, 1, s, 0);
  ChannelMatrix h2 = h;
  h2.user_id = 1;
  const double P = 4.0;
  const double joint = dpc_sum_capacity({h, h2}, P).rate_nats;
  CHECK(joint == doctest::Approx(std::log1p(P * std::norm(h.entries(0, 0)))).epsilon(1e-7));
}

TEST_CASE("two-user scalar capacity matches the grid oracle") {
  RngStream s(7);
  for (int rep = 0; rep < 25; ++rep) {
    ChannelMatrix h1 = sample_channel(1, 1, s, 0);
    ChannelMatrix h2 = sample_channel(1, 1, s, 1);
    const double P = 1.0 + 9.0 * s.uniform01();
    const double solver = dpc_sum_capacity({h1, h2}, P).rate_nats;
    const double grid = oracles::grid_two_user_scalar(std::norm(h1.entries(0, 0)), std::norm(h2.entries(0, 0)), P);
    CHECK(std::abs(solver - grid) < 1e-3);
  }
}

TEST_CASE("dpc objective is monotone across sweeps") {
  RngStream s(11);
  DpcOptions opts;
  opts.keep_history = true;
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<ChannelMatrix> channels;
    for (int u = 0; u < 6; ++u) channels.push_back(sample_channel(2, 2, s, u));
    const DpcResult r = dpc_sum_capacity(channels, 10.0, opts);
    for (size_t i = 1; i < r.sweep_objectives.size(); ++i)
      CHECK(r.sweep_objectives[i] >= r.sweep_objectives[i - 1] - 1e-12);
    CHECK(r.converged);
    CHECK(r.gap <= 1e-7);
  }
}

TEST_CASE("dpc covariances are feasible") {
  RngStream s(13);
  DpcOptions opts;
  opts.keep_state = true;
  std::vector<ChannelMatrix> channels;
  for (int u = 0; u < 8; ++u) channels.push_back(sample_channel(2, 3, s, u));
  const double P = 10.0;
  const DpcResult r = dpc_sum_capacity(channels, P, opts);
  CHECK(r.state.total_power <= P + 1e-8);
  for (const auto& Q : r.state.covariances) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(Q, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
  }
  // the stored state reproduces the returned objective
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Identity(3, 3);
  for (size_t n = 0; n < channels.size(); ++n)
    T += channels[n].entries.adjoint() * r.state.covariances[n] * channels[n].entries;
  CHECK(std::log(T.determinant().real()) == doctest::Approx(r.rate_nats).epsilon(1e-8));
}

TEST_CASE("tdma grows with the user pool and stays under dpc") {
  RngStream s(17);
  std::vector<ChannelMatrix> channels;
  double prev = 0.0;
  for (int u = 0; u < 12; ++u) {
    channels.push_back(sample_channel(2, 2, s, u));
    const double r = tdma_rate(channels, 10.0);
    CHECK(r + 1e-12 >= prev);
    prev = r;
  }
  for (int rep = 0; rep < 60; ++rep) {
    std::vector<ChannelMatrix> batch;
    for (int u = 0; u < 6; ++u) batch.push_back(sample_channel(2, 2, s, u));
    CHECK(tdma_rate(batch, 10.0) <= dpc_sum_capacity(batch, 10.0).rate_nats + 1e-6);
  }
}

TEST_CASE("tdma near its large-N scale") {
  // N = 1000, M = K = 2, P = 10: mean within 25% of M ln((P/M^2) ln N)
  const int N = 1000, trials = 80;
  const double P = 10.0;
  const double target = 2.0 * std::log(P / 4.0 * std::log(static_cast<double>(N)));
  double mean = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    double best = 0.0;
    for (int u = 0; u < N; ++u) {
      RngStream s = RngStream::channel_stream(909, trial, u);
      const ChannelMatrix h = sample_channel(2, 2, s, u);
      best = std::max(best, single_user_capacity(h, P));
    }
    mean += best;
  }
  mean /= trials;
  CHECK(std::abs(mean - target) < 0.25 * target);
}

TEST_CASE("random dpc equals full dpc when everyone is selected") {
  RngStream s(19);
  std::vector<ChannelMatrix> channels;
  for (int u = 0; u < 4; ++u) channels.push_back(sample_channel(1, 2, s, u));
  RngStream task = RngStream::task_stream(19, 0, 2);
  const double all = dpc_sum_capacity(channels, 10.0).rate_nats;
  CHECK(random_dpc_rate(channels, 4, 10.0, task).rate_nats == doctest::Approx(all).epsilon(1e-7));
}

TEST_CASE("random dpc restriction never beats the full optimum") {
  RngStream s(23);
  for (int rep = 0; rep < 40; ++rep) {
    std::vector<ChannelMatrix> channels;
    for (int u = 0; u < 10; ++u) channels.push_back(sample_channel(1, 2, s, u));
    RngStream task = RngStream::task_stream(23, rep, 2);
    CHECK(random_dpc_rate(channels, 2, 10.0, task).rate_nats <=
          dpc_sum_capacity(channels, 10.0).rate_nats + 1e-6);
  }
}

TEST_CASE("random dpc mean does not depend on the population size") {
  const int trials = 120;
  auto mean_at = [&](int N, std::uint64_t salt) {
    std::vector<double> vals(trials);
    for (int trial = 0; trial < trials; ++trial) {
      std::vector<ChannelMatrix> channels;
      for (int u = 0; u < N; ++u) {
        RngStream s = RngStream::channel_stream(salt, trial, u);
        channels.push_back(sample_channel(1, 2, s, u));
      }
      RngStream task = RngStream::task_stream(salt, trial, 2);
      vals[trial] = random_dpc_rate(channels, 2, 10.0, task).rate_nats;
    }
    return stats::mean_stderr(vals);
  };
  const auto a = mean_at(50, 1001);
  const auto b = mean_at(500, 1002);
  const double se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
  CHECK(std::abs(a.mean - b.mean) < 3.0 * se);
}

TEST_CASE("no-CSI rate basics and quadrature mean") {
  ChannelMatrix zero;
  zero.entries = Eigen::MatrixXcd::Zero(2, 2);
  CHECK(no_csi_rate(zero, 10.0) == 0.0);

  ChannelMatrix unit;
  unit.entries.resize(1, 1);
  unit.entries(0, 0) = 1.0;
  CHECK(no_csi_rate(unit, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // M = 2, K = 1, P = 10: E ln(1 + 5 |h|^2) with |h|^2 ~ Gamma(2, 1)
  RngStream s(29);
  const int n = 100000;
  double mean = 0.0;
  for (int i = 0; i < n; ++i) mean += no_csi_rate(sample_channel(1, 2, s), 10.0);
  mean /= n;
  const double quad =
      oracles::integrate([](double x) { return std::log1p(5.0 * x) * x * std::exp(-x); }, 0.0, 60.0, 1e-11);
  CHECK(std::abs(mean - quad) < 0.01 * quad);
}

TEST_CASE("zero-forcing schemes stay under the dpc optimum") {
  RngStream s(31);
  for (int rep = 0; rep < 60; ++rep) {
    const int M = 2;
    std::vector<ChannelMatrix> channels;
    std::vector<EigenMode> modes;
    for (int u = 0; u < 8; ++u) {
      channels.push_back(sample_channel(1, M, s, u));
      for (auto& m : svd_modes(channels.back())) modes.push_back(std::move(m));
    }
    const double P = 10.0;
    const double dpc = dpc_sum_capacity(channels, P).rate_nats;
    const SelectionResult sel = greedy_select(preselect(modes, 1.0), M);
    if (sel.coordinates.empty()) continue;
    try {
      const double zf = zf_sum_rate(coordinate_matrix(sel), P, PowerPolicy::waterfilled);
      CHECK(zf <= dpc + 1e-6);
    } catch (const SingularityError&) {
    }
  }
}
