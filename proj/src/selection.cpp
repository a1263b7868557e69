#include "mimobc/selection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "mimobc/errors.hpp"
#include "mimobc/precoding.hpp"

namespace mimobc {

namespace {

bool lex_less(const EigenMode& a, const EigenMode& b) {
  return std::tie(a.user_id, a.mode_index) < std::tie(b.user_id, b.mode_index);
}

struct IterLogs {
  double l1, l2, l3, l4;  // ln N, ln ln N, ln ln ln N, ln ln ln ln N
};

IterLogs iter_logs(int N) {
  if (N < 16) throw std::domain_error("threshold preset: N must be at least 16 for iterated logarithms");
  IterLogs v{};
  v.l1 = std::log(static_cast<double>(N));
  v.l2 = std::log(v.l1);
  v.l3 = std::log(v.l2);
  v.l4 = std::log(v.l3);
  return v;
}

long combination_count(long n, long m, long cap) {
  // C(n, m), saturating just above cap
  if (m < 0 || m > n) return 0;
  m = std::min(m, n - m);
  double c = 1.0;
  for (long i = 1; i <= m; ++i) {
    c *= static_cast<double>(n - m + i) / static_cast<double>(i);
    if (c > 2.0 * static_cast<double>(cap)) return cap + 1;
  }
  return static_cast<long>(c + 0.5);
}

}  // namespace

double ThresholdPreset::effective_offset() const {
  if (!std::isnan(rho_offset)) return rho_offset;
  switch (mode) {
    case ThresholdMode::fixed:
      return 0.0;
    case ThresholdMode::theorem1_necessary:
    case ThresholdMode::theorem2_sufficient:
      return 2.0;
    case ThresholdMode::remark1_refined:
      return 1.0;
    case ThresholdMode::fig1_empirical:
      return 0.0;
  }
  return 0.0;
}

double ThresholdPreset::value_at(int N, int M, int K) const {
  if (M < 1 || K < 1) throw std::domain_error("threshold preset: M and K must be positive");
  const double off = effective_offset();
  if (mode == ThresholdMode::fixed) return off;
  if (mode == ThresholdMode::fig1_empirical) {
    if (N < 3) throw std::domain_error("threshold preset: N too small");
    const double l1 = std::log(static_cast<double>(N));
    return l1 - std::log(l1) + off;
  }
  const IterLogs v = iter_logs(N);
  switch (mode) {
    case ThresholdMode::theorem1_necessary: {
      const double rho = v.l4 + std::log(std::tgamma(K) * std::tgamma(M)) + off;
      return v.l1 + (M + K - 2) * v.l2 - rho;
    }
    case ThresholdMode::theorem2_sufficient: {
      const double rho = v.l4 + off;
      return v.l1 + (M + K - 2) * v.l2 - rho;
    }
    case ThresholdMode::remark1_refined:
      return v.l1 + (K - 2) * v.l2 + M * v.l3 - v.l4 - off;
    default:
      break;
  }
  throw std::logic_error("threshold preset: unknown mode");
}

double ThresholdPreset::q_at(int N) const {
  // q(N) = rho(N) - ln ln ln N; the Gamma-product share of rho is not part of q
  const double off = effective_offset();
  switch (mode) {
    case ThresholdMode::theorem1_necessary:
    case ThresholdMode::theorem2_sufficient: {
      const IterLogs v = iter_logs(N);
      return v.l4 - v.l3 + off;
    }
    default:
      throw std::domain_error("threshold preset: q(N) is defined for the theorem modes only");
  }
}

double ThresholdPreset::beta_at(int N, int M) const {
  switch (mode) {
    case ThresholdMode::theorem1_necessary:
    case ThresholdMode::theorem2_sufficient:
      return std::clamp(std::exp(-q_at(N) / M), 0.0, 1.0);
    case ThresholdMode::remark1_refined: {
      // here q(N) = M (lnln N - lnlnln N) + psi, so q/M carries a psi/M share
      const IterLogs v = iter_logs(N);
      const double q_over_m = (v.l2 - v.l3) + effective_offset() / M;
      return std::clamp(std::exp(-q_over_m), 0.0, 1.0);
    }
    default:
      return 0.5;  // no q(N) exists for empirical/fixed thresholds
  }
}

double threshold_preset(int N, int M, int K, const ThresholdPreset& preset) { return preset.value_at(N, M, K); }

CandidateSet preselect(const std::vector<EigenMode>& modes, double t) {
  CandidateSet cs;
  cs.threshold_t = t;
  for (const EigenMode& m : modes)
    if (m.lambda > t) cs.entries.push_back(m);
  std::sort(cs.entries.begin(), cs.entries.end(), lex_less);
  return cs;
}

SelectionResult greedy_select(const CandidateSet& candidates, int M) {
  if (M < 1) throw std::invalid_argument("greedy_select: M must be positive");
  std::vector<EigenMode> pool = candidates.entries;
  std::sort(pool.begin(), pool.end(), lex_less);
  const int L = static_cast<int>(pool.size());

  SelectionResult res;
  res.ledger.real_values_fed_back = 2L * static_cast<long>(M) * L;
  if (L == 0) {
    res.shortfall = M;
    res.ledger.per_round_survivors = {0};
    return res;
  }

  std::vector<double> gamma(L, 0.0);
  std::vector<char> alive(L, 1);
  int last = -1;

  for (int pick = 0; pick < M; ++pick) {
    const int remaining = L - pick;
    if (remaining <= 0) break;
    res.ledger.per_round_survivors.push_back(remaining);
    int best = -1;
    if (pick == 0) {
      for (int i = 0; i < L; ++i)
        if (alive[i] && (best < 0 || pool[i].lambda > pool[best].lambda)) best = i;
    } else {
      for (int i = 0; i < L; ++i) {
        if (!alive[i]) continue;
        gamma[i] += orthogonality(pool[last].right_vector, pool[i].right_vector);
        if (best < 0 || gamma[i] < gamma[best]) best = i;
      }
    }
    alive[best] = 0;
    last = best;
    res.coordinates.push_back(pool[best]);
    res.gamma_scores.push_back(pick == 0 ? 0.0 : gamma[best]);
    ++res.ledger.rounds;
  }
  res.shortfall = M - static_cast<int>(res.coordinates.size());
  return res;
}

SelectionResult interactive_select(const std::vector<EigenMode>& modes, double t, double beta, int M) {
  if (M < 1) throw std::invalid_argument("interactive_select: M must be positive");
  if (beta < 0.0 || beta > 1.0) throw std::domain_error("interactive_select: beta must be in [0, 1]");

  const CandidateSet cs = preselect(modes, t);
  const std::vector<EigenMode>& pool = cs.entries;
  const int L = static_cast<int>(pool.size());

  SelectionResult res;
  res.ledger.real_values_fed_back = L;  // one gain scalar per preselected mode
  res.ledger.per_round_survivors.push_back(L);
  if (L == 0) {
    res.shortfall = M;
    return res;
  }

  std::vector<double> gamma(L, 0.0);
  std::vector<char> alive(L, 1);

  int best = 0;
  for (int i = 1; i < L; ++i)
    if (pool[i].lambda > pool[best].lambda) best = i;
  alive[best] = 0;
  int last = best;
  res.coordinates.push_back(pool[best]);
  res.gamma_scores.push_back(0.0);
  res.ledger.real_values_fed_back += 2L * M;  // broadcast pick eigenvector
  res.ledger.rounds = 1;

  for (int m = 1; m < M; ++m) {
    long survivors = 0;
    int next = -1;
    for (int i = 0; i < L; ++i) {
      if (!alive[i]) continue;
      const double z = orthogonality(pool[last].right_vector, pool[i].right_vector);
      if (z < beta) {
        gamma[i] += z;
        ++survivors;
        if (next < 0 || gamma[i] < gamma[next]) next = i;
      } else {
        alive[i] = 0;  // pruned; sends nothing more
      }
    }
    res.ledger.per_round_survivors.push_back(survivors);
    res.ledger.real_values_fed_back += survivors;  // one score scalar each
    if (survivors == 0) break;
    alive[next] = 0;
    last = next;
    res.coordinates.push_back(pool[next]);
    res.gamma_scores.push_back(gamma[next]);
    res.ledger.real_values_fed_back += 2L * M;
    ++res.ledger.rounds;
  }
  res.shortfall = M - static_cast<int>(res.coordinates.size());
  return res;
}

namespace {

Eigen::MatrixXcd subset_rows(const std::vector<EigenMode>& pool, const std::vector<int>& idx) {
  const int m = static_cast<int>(idx.size());
  const int M = static_cast<int>(pool[idx[0]].right_vector.size());
  Eigen::MatrixXcd rows(m, M);
  for (int i = 0; i < m; ++i)
    rows.row(i) = std::sqrt(pool[idx[i]].lambda) * pool[idx[i]].right_vector.adjoint();
  return rows;
}

// prod_i |row_i|^2 / det(R R^*); +inf when numerically singular
double row_defect(const Eigen::MatrixXcd& rows) {
  const Eigen::MatrixXcd gram = rows * rows.adjoint();
  double norm_prod = 1.0;
  for (Eigen::Index i = 0; i < gram.rows(); ++i) norm_prod *= gram(i, i).real();
  const double det = gram.partialPivLu().determinant().real();
  if (!(det > 0.0) || det < norm_prod * 1e-300) return std::numeric_limits<double>::infinity();
  return norm_prod / det;
}

}  // namespace

SelectionResult exhaustive_select(const CandidateSet& candidates, int M, ExhaustiveCriterion criterion,
                                  double total_power, long budget) {
  if (M < 1) throw std::invalid_argument("exhaustive_select: M must be positive");
  std::vector<EigenMode> pool = candidates.entries;
  std::sort(pool.begin(), pool.end(), lex_less);
  const int n = static_cast<int>(pool.size());
  const int m = std::min(M, n);

  SelectionResult res;
  res.ledger.real_values_fed_back = 2L * static_cast<long>(M) * n;
  res.ledger.per_round_survivors = {n};
  res.shortfall = M - m;
  if (m == 0) return res;

  if (combination_count(n, m, budget) > budget)
    throw BudgetExceededError("exhaustive_select: subset count exceeds the configured budget; raise the preselection threshold t");

  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;

  std::vector<int> best_idx = idx;
  double best_score = -std::numeric_limits<double>::infinity();

  auto score_of = [&](const std::vector<int>& sel) -> double {
    const Eigen::MatrixXcd rows = subset_rows(pool, sel);
    if (criterion == ExhaustiveCriterion::min_defect) {
      const double d = row_defect(rows);
      return std::isfinite(d) ? -d : -std::numeric_limits<double>::infinity();
    }
    SelectionResult tmp;
    for (int i : sel) tmp.coordinates.push_back(pool[i]);
    CoordinateMatrix cm{rows, std::move(tmp)};
    try {
      return zf_sum_rate(cm, total_power,
                         criterion == ExhaustiveCriterion::waterfilled_rate ? PowerPolicy::waterfilled
                                                                            : PowerPolicy::uniform);
    } catch (const SingularityError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  for (;;) {
    const double s = score_of(idx);
    if (s > best_score) {
      best_score = s;
      best_idx = idx;
    }
    // next combination in lexicographic order
    int pos = m - 1;
    while (pos >= 0 && idx[pos] == n - m + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < m; ++i) idx[i] = idx[i - 1] + 1;
  }

  for (int i : best_idx) res.coordinates.push_back(pool[i]);
  res.ledger.rounds = m;
  return res;
}

SelectionResult random_select(const std::vector<EigenMode>& modes, int M, RngStream& stream,
                              std::optional<double> pool_threshold) {
  if (M < 1) throw std::invalid_argument("random_select: M must be positive");

  SelectionResult res;
  if (pool_threshold) {
    // pool of preselected eigenmodes; entries drawn uniformly without replacement
    CandidateSet cs = preselect(modes, *pool_threshold);
    std::vector<EigenMode>& pool = cs.entries;
    const int L = static_cast<int>(pool.size());
    const int m = std::min(M, L);
    res.ledger.real_values_fed_back = 2L * static_cast<long>(M) * L;
    res.ledger.per_round_survivors = {L};
    std::vector<int> idx(L);
    for (int i = 0; i < L; ++i) idx[i] = i;
    for (int i = 0; i < m; ++i) {
      const int j = i + static_cast<int>(stream.below(L - i));
      std::swap(idx[i], idx[j]);
      res.coordinates.push_back(pool[idx[i]]);
      res.gamma_scores.push_back(0.0);
    }
    res.ledger.rounds = m;
    res.shortfall = M - m;
    return res;
  }

  // one coordinate per user: the maximum-lambda mode of M distinct users
  std::vector<EigenMode> sorted = modes;
  std::sort(sorted.begin(), sorted.end(), lex_less);
  std::vector<EigenMode> tops;
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (i == 0 || sorted[i].user_id != sorted[i - 1].user_id)
      tops.push_back(sorted[i]);
    else if (sorted[i].lambda > tops.back().lambda)
      tops.back() = sorted[i];
  }
  const int users = static_cast<int>(tops.size());
  if (users < M) throw std::domain_error("random_select: fewer than M users");
  std::vector<int> idx(users);
  for (int i = 0; i < users; ++i) idx[i] = i;
  for (int i = 0; i < M; ++i) {
    const int j = i + static_cast<int>(stream.below(users - i));
    std::swap(idx[i], idx[j]);
    res.coordinates.push_back(tops[idx[i]]);
    res.gamma_scores.push_back(0.0);
  }
  res.ledger.real_values_fed_back = 2L * static_cast<long>(M) * M;
  res.ledger.per_round_survivors = {users};
  res.ledger.rounds = M;
  return res;
}

}  // namespace mimobc
