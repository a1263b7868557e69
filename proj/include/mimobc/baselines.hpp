#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mimobc/channel.hpp"
#include "mimobc/rng.hpp"

namespace mimobc {

/// Transmit covariances of the dual multiple-access problem behind the
/// broadcast sum capacity: one K x K PSD matrix per user, traces summing to
/// at most the power budget.
struct DualMacState {
  std::vector<Eigen::MatrixXcd> covariances;
  double total_power = 0.0;
  double objective_nats = 0.0;
};

struct DpcOptions {
  double tol = 1e-8;       // minimum objective gain per sweep before stopping
  int max_sweeps = 500;
  double gap_tol = 1e-9;   // optimality-gap certificate target
  bool keep_state = false; // retain per-user covariances in the result
  bool keep_history = false;
};

struct DpcResult {
  double rate_nats = 0.0;
  bool converged = false;
  int sweeps = 0;
  double gap = 0.0;  // upper bound on the distance to the optimum
  DualMacState state;
  std::vector<double> sweep_objectives;  // filled when keep_history is set
};

/// Sum-rate capacity max log det(I_M + sum_n H_n^* Q_n H_n) over PSD
/// covariances with sum Tr(Q_n) <= P. Solved by sweeps of per-user
/// water-filling against the interference-plus-identity of the other users,
/// with a backtracking convex combination toward the previous iterate so the
/// objective never decreases. Large user counts are handled by an exact
/// active-set outer loop: the sweep runs on a working set and users violating
/// the global optimality conditions are pulled in until none remain. The
/// returned value is always an achievable lower bound; `converged` reports
/// whether the gap certificate closed before the sweep budget ran out.
DpcResult dpc_sum_capacity(const std::vector<ChannelMatrix>& channels, double P, const DpcOptions& opts = {});

/// Best single-user rate: max over users of the water-filled MIMO capacity
/// log det(I + H Q H^*) at power P.
double tdma_rate(const std::vector<ChannelMatrix>& channels, double P);

/// dpc_sum_capacity restricted to M_users users drawn uniformly at random.
DpcResult random_dpc_rate(const std::vector<ChannelMatrix>& channels, int M_users, double P, RngStream& stream,
                          const DpcOptions& opts = {});

/// Rate without transmitter channel knowledge for one realization:
/// log det(I + (P/M) H H^*). The expectation is taken by the caller.
double no_csi_rate(const ChannelMatrix& channel, double P);

/// Closed-form single-user water-filling capacity from the Gram eigenvalues.
double single_user_capacity(const ChannelMatrix& channel, double P);

}  // namespace mimobc
