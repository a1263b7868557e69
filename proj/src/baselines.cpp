#include "mimobc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mimobc/errors.hpp"
#include "mimobc/precoding.hpp"

namespace mimobc {

namespace {

double logdet_hermitian(const Eigen::MatrixXcd& A) {
  Eigen::LLT<Eigen::MatrixXcd> llt(A);
  if (llt.info() == Eigen::Success) {
    double ld = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) ld += std::log(llt.matrixLLT()(i, i).real());
    return 2.0 * ld;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(A, Eigen::EigenvaluesOnly);
  double ld = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) ld += std::log(std::max(eig.eigenvalues()(i), 1e-300));
  return ld;
}

// Water-filled powers across per-mode gains: maximize sum ln(1 + lam_i q_i)
// under sum q_i <= P. Shares the precoding bisection via gamma_i = 1/lam_i.
struct GainWaterfill {
  Eigen::VectorXd q;      // transmit power per mode
  double rate = 0.0;
};

GainWaterfill waterfill_gains(const Eigen::VectorXd& lams, double P) {
  GainWaterfill out;
  std::vector<int> keep;
  for (int i = 0; i < lams.size(); ++i)
    if (lams(i) > 1e-14) keep.push_back(i);
  out.q = Eigen::VectorXd::Zero(lams.size());
  if (keep.empty()) return out;
  Eigen::VectorXd gammas(keep.size());
  for (size_t i = 0; i < keep.size(); ++i) gammas(i) = 1.0 / lams(keep[i]);
  const Eigen::VectorXd snr = waterfill_powers(gammas, P);
  for (size_t i = 0; i < keep.size(); ++i) {
    out.q(keep[i]) = snr(i) * gammas(i);
    out.rate += std::log1p(snr(i));
  }
  return out;
}

double lambda_max_hermitian(const Eigen::MatrixXcd& Z) {
  const Eigen::Index k = Z.rows();
  if (k == 1) return Z(0, 0).real();
  if (k == 2) {
    const double a = Z(0, 0).real(), c = Z(1, 1).real();
    const double b2 = std::norm(Z(0, 1));
    return 0.5 * (a + c) + std::sqrt(0.25 * (a - c) * (a - c) + b2);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(Z, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(k - 1);
}

}  // namespace

double single_user_capacity(const ChannelMatrix& channel, double P) {
  if (!(P > 0.0)) throw std::domain_error("single_user_capacity: power must be positive");
  return waterfill_gains(gram_eigenvalues(channel), P).rate;
}

double tdma_rate(const std::vector<ChannelMatrix>& channels, double P) {
  if (channels.empty()) throw std::invalid_argument("tdma_rate: no channels");
  double best = 0.0;
  for (const ChannelMatrix& ch : channels) best = std::max(best, single_user_capacity(ch, P));
  return best;
}

double no_csi_rate(const ChannelMatrix& channel, double P) {
  if (!(P > 0.0)) throw std::domain_error("no_csi_rate: power must be positive");
  const int M = channel.transmit_antennas();
  const Eigen::VectorXd lams = gram_eigenvalues(channel);
  double rate = 0.0;
  for (int i = 0; i < lams.size(); ++i) rate += std::log1p(P / M * lams(i));
  return rate;
}

DpcResult dpc_sum_capacity(const std::vector<ChannelMatrix>& channels, double P, const DpcOptions& opts) {
  if (channels.empty()) throw std::invalid_argument("dpc_sum_capacity: no channels");
  if (!(P > 0.0)) throw std::domain_error("dpc_sum_capacity: power must be positive");
  const int Nu = static_cast<int>(channels.size());
  const int M = channels.front().transmit_antennas();
  for (const ChannelMatrix& ch : channels)
    if (ch.transmit_antennas() != M) throw std::invalid_argument("dpc_sum_capacity: mismatched antenna counts");

  // working set: the sweep runs on a small candidate set; users violating the
  // global optimality conditions are pulled in afterwards, so the final value
  // is optimal for the full user population
  std::vector<char> in_set(Nu, 0);
  std::vector<int> work;
  {
    const int seed_cap = std::max(16, 4 * M * M + 8);
    std::vector<int> order(Nu);
    std::iota(order.begin(), order.end(), 0);
    if (Nu > seed_cap) {
      std::partial_sort(order.begin(), order.begin() + seed_cap, order.end(), [&](int a, int b) {
        return channels[a].entries.squaredNorm() > channels[b].entries.squaredNorm();
      });
      order.resize(seed_cap);
      std::sort(order.begin(), order.end());
    }
    for (int n : order) {
      in_set[n] = 1;
      work.push_back(n);
    }
  }

  std::vector<Eigen::MatrixXcd> Q(Nu);
  auto K_of = [&](int n) { return channels[n].receive_antennas(); };
  for (int n = 0; n < Nu; ++n) Q[n] = Eigen::MatrixXcd::Zero(K_of(n), K_of(n));

  // start from the best single-user point so the objective dominates TDMA
  // from the first sweep on
  {
    int best = work.front();
    double best_rate = -1.0;
    for (int n : work) {
      const double r = single_user_capacity(channels[n], P);
      if (r > best_rate) {
        best_rate = r;
        best = n;
      }
    }
    const Eigen::MatrixXcd gram = channels[best].entries * channels[best].entries.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
    const GainWaterfill wf = waterfill_gains(eig.eigenvalues(), P);
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(K_of(best), K_of(best));
    for (int i = 0; i < wf.q.size(); ++i) D(i, i) = wf.q(i);
    Q[best] = eig.eigenvectors() * D * eig.eigenvectors().adjoint();
  }

  auto accumulate_T = [&]() {
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Identity(M, M);
    for (int n : work)
      if (Q[n].trace().real() > 0.0) T += channels[n].entries.adjoint() * Q[n] * channels[n].entries;
    return T;
  };

  Eigen::MatrixXcd T = accumulate_T();
  double f = logdet_hermitian(T);

  DpcResult res;
  if (opts.keep_history) res.sweep_objectives.push_back(f);

  double gap = std::numeric_limits<double>::infinity();
  int sweeps = 0;
  const int max_new_per_round = 8;

  while (sweeps < opts.max_sweeps) {
    ++sweeps;
    const Eigen::MatrixXcd W = T.llt().solve(Eigen::MatrixXcd::Identity(M, M));

    // per-user water-filling against the interference-plus-identity of the
    // others, jointly across the working set under the sum power budget
    std::vector<Eigen::MatrixXcd> V_of(work.size());
    std::vector<Eigen::VectorXd> lam_of(work.size());
    std::vector<double> levels;
    for (size_t wi = 0; wi < work.size(); ++wi) {
      const int n = work[wi];
      const Eigen::MatrixXcd& H = channels[n].entries;
      Eigen::MatrixXcd Z;
      if (Q[n].trace().real() > 0.0) {
        const Eigen::MatrixXcd G = T - H.adjoint() * Q[n] * H;
        Z = H * G.llt().solve(H.adjoint());
      } else {
        Z = H * W * H.adjoint();
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(Z);
      V_of[wi] = eig.eigenvectors();
      lam_of[wi] = eig.eigenvalues();
      for (int k = 0; k < lam_of[wi].size(); ++k) levels.push_back(std::max(lam_of[wi](k), 0.0));
    }
    Eigen::VectorXd all_lams = Eigen::Map<Eigen::VectorXd>(levels.data(), static_cast<int>(levels.size()));
    const GainWaterfill wf = waterfill_gains(all_lams, P);

    Eigen::MatrixXcd T_S = Eigen::MatrixXcd::Identity(M, M);
    std::vector<Eigen::MatrixXcd> S(work.size());
    {
      int offset = 0;
      for (size_t wi = 0; wi < work.size(); ++wi) {
        const int k = static_cast<int>(lam_of[wi].size());
        Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(k, k);
        bool nonzero = false;
        for (int j = 0; j < k; ++j) {
          D(j, j) = wf.q(offset + j);
          if (wf.q(offset + j) > 0.0) nonzero = true;
        }
        offset += k;
        S[wi] = nonzero ? Eigen::MatrixXcd(V_of[wi] * D * V_of[wi].adjoint())
                        : Eigen::MatrixXcd::Zero(k, k);
        if (nonzero) T_S += channels[work[wi]].entries.adjoint() * S[wi] * channels[work[wi]].entries;
      }
    }

    // backtracking convex combination with the previous iterate: full
    // water-filling step when it helps, halved toward the old point until the
    // objective is non-decreasing
    double step = 1.0;
    double f_new = f;
    Eigen::MatrixXcd T_new = T;
    while (step > 1e-12) {
      T_new = (1.0 - step) * T + step * T_S;
      f_new = logdet_hermitian(T_new);
      if (f_new >= f) break;
      step *= 0.5;
    }
    const double gain = f_new - f;
    if (f_new >= f) {
      for (size_t wi = 0; wi < work.size(); ++wi)
        Q[work[wi]] = (1.0 - step) * Q[work[wi]] + step * S[wi];
      T = T_new;
      f = f_new;
    }
    if (opts.keep_history) res.sweep_objectives.push_back(f);

    // optimality certificate over the whole population: the linearized head
    // room bounds the distance to the optimum
    const Eigen::MatrixXcd W_new = T.llt().solve(Eigen::MatrixXcd::Identity(M, M));
    double inside_max = 0.0;
    std::vector<std::pair<double, int>> outside;
    for (int n = 0; n < Nu; ++n) {
      const Eigen::MatrixXcd& H = channels[n].entries;
      const double g = lambda_max_hermitian(H * W_new * H.adjoint());
      if (in_set[n])
        inside_max = std::max(inside_max, g);
      else
        outside.emplace_back(g, n);
    }
    double outside_best = 0.0;
    for (const auto& [g, n] : outside) outside_best = std::max(outside_best, g);
    gap = P * std::max(inside_max, outside_best) - (M - W_new.trace().real());

    bool expanded = false;
    if (gap > opts.gap_tol && outside_best > inside_max * (1.0 - 1e-12)) {
      // pull in the strongest outside users when one of them leads
      const size_t take = std::min<size_t>(max_new_per_round, outside.size());
      std::partial_sort(outside.begin(), outside.begin() + take, outside.end(), std::greater<>());
      for (size_t i = 0; i < take; ++i) {
        if (outside[i].first <= inside_max * (1.0 - 1e-12)) break;
        in_set[outside[i].second] = 1;
        work.push_back(outside[i].second);
        expanded = true;
      }
      if (expanded) std::sort(work.begin(), work.end());
    }

    if (!expanded && gap <= opts.gap_tol) break;
    if (!expanded && gain < opts.tol && gap <= std::max(opts.gap_tol, 1e-7)) break;
    if (!expanded && gain < opts.tol && step <= 1e-12) break;  // stalled
  }

  res.rate_nats = f;
  res.sweeps = sweeps;
  res.gap = gap;
  res.converged = gap <= std::max(opts.gap_tol, 1e-7);
  if (opts.keep_state) {
    res.state.covariances = Q;
    res.state.objective_nats = f;
    double tp = 0.0;
    for (int n = 0; n < Nu; ++n) tp += Q[n].trace().real();
    res.state.total_power = tp;
  }
  return res;
}

DpcResult random_dpc_rate(const std::vector<ChannelMatrix>& channels, int M_users, double P, RngStream& stream,
                          const DpcOptions& opts) {
  const int Nu = static_cast<int>(channels.size());
  if (M_users < 1 || Nu < M_users) throw std::domain_error("random_dpc_rate: requires at least M_users channels");
  std::vector<int> idx(Nu);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<ChannelMatrix> subset;
  subset.reserve(M_users);
  for (int i = 0; i < M_users; ++i) {
    const int j = i + static_cast<int>(stream.below(Nu - i));
    std::swap(idx[i], idx[j]);
    subset.push_back(channels[idx[i]]);
  }
  return dpc_sum_capacity(subset, P, opts);
}

}  // namespace mimobc
