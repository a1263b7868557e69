#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "mimobc/channel.hpp"
#include "mimobc/rng.hpp"

namespace mimobc {

/// Eigenmodes that survived the gain threshold, sorted by (user_id,
/// mode_index) so tie-breaking is reproducible.
struct CandidateSet {
  std::vector<EigenMode> entries;
  double threshold_t = 0.0;
};

/// Count of real scalars the users send to the base station, plus the
/// per-round candidate-set sizes. One "real value" per scalar, 2M per
/// complex M-vector.
struct FeedbackLedger {
  long real_values_fed_back = 0;
  int rounds = 0;
  std::vector<long> per_round_survivors;  // |S_0|, |S_1|, ...
};

/// Ordered coordinates chosen by a selection strategy, with the accumulated
/// orthogonality score each pick had at selection time (0 for the first) and
/// the number of unfilled slots.
struct SelectionResult {
  std::vector<EigenMode> coordinates;
  std::vector<double> gamma_scores;
  int shortfall = 0;
  FeedbackLedger ledger;
};

enum class ThresholdMode {
  fixed,
  theorem1_necessary,
  theorem2_sufficient,
  remark1_refined,
  fig1_empirical,
};

/// Gain-threshold formulas, all in natural logs. `rho_offset` is the free
/// part of rho(N) (resp. psi(N)); NaN picks a per-mode default. For the fixed
/// mode the offset IS the threshold. Non-fixed modes require N >= 16 so the
/// iterated logarithms are defined.
struct ThresholdPreset {
  ThresholdMode mode = ThresholdMode::fig1_empirical;
  double rho_offset = std::numeric_limits<double>::quiet_NaN();

  double effective_offset() const;
  double value_at(int N, int M, int K) const;
  /// q(N) = rho(N) - ln ln ln N; defined for the theorem modes.
  double q_at(int N) const;
  /// Pruning threshold e^(-q(N)/M) clamped to [0, 1].
  double beta_at(int N, int M) const;
};

/// Free-function form of ThresholdPreset::value_at.
double threshold_preset(int N, int M, int K, const ThresholdPreset& preset);

/// Modes with lambda strictly above t. An empty result is legal.
CandidateSet preselect(const std::vector<EigenMode>& modes, double t);

/// Greedy coordinate selection: first pick the candidate with the largest
/// lambda, then repeatedly the candidate with the smallest accumulated
/// squared overlap against the picks so far. Ties resolve to the
/// lexicographically smallest (user_id, mode_index). The ledger charges 2M
/// real values per candidate (eigenvector plus singular value).
SelectionResult greedy_select(const CandidateSet& candidates, int M);

/// Interactive two-threshold variant: identical greedy picks restricted to
/// the survivors of a beta-pruning after each round (candidates whose squared
/// overlap with the latest pick is >= beta drop out and send nothing more).
/// The ledger counts |S_0| gain scalars, one score scalar per survivor per
/// round, and 2M reals per broadcast pick eigenvector. Terminates early with
/// a shortfall when a round empties.
SelectionResult interactive_select(const std::vector<EigenMode>& modes, double t, double beta, int M);

enum class ExhaustiveCriterion { waterfilled_rate, uniform_rate, min_defect };

/// Best size-M subset by brute force over all candidate combinations.
/// Rate criteria are evaluated at total power P; min_defect ignores P. Ties
/// break to the lexicographically smallest coordinate sequence. Throws
/// BudgetExceededError when C(|candidates|, M) exceeds `budget` (raise t to
/// shrink the pool).
SelectionResult exhaustive_select(const CandidateSet& candidates, int M, ExhaustiveCriterion criterion,
                                  double total_power, long budget = 2'000'000);

/// Uniformly random selection. Without `pool_threshold`: M distinct users,
/// each contributing its maximum-lambda mode; throws std::domain_error when
/// fewer than M users exist. With `pool_threshold`: M distinct entries drawn
/// from preselect(modes, *pool_threshold), with a shortfall when the pool is
/// smaller than M.
SelectionResult random_select(const std::vector<EigenMode>& modes, int M, RngStream& stream,
                              std::optional<double> pool_threshold = std::nullopt);

}  // namespace mimobc
