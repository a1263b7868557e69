#include "mimobc/precoding.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "mimobc/errors.hpp"

namespace mimobc {

namespace {

Eigen::JacobiSVD<Eigen::MatrixXcd> checked_svd(const Eigen::MatrixXcd& rows) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rows, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0) || s(0) / smin > kConditionCap)
    throw SingularityError("coordinate matrix is singular or beyond the condition cap");
  return svd;
}

}  // namespace

CoordinateMatrix coordinate_matrix(const SelectionResult& sel) {
  if (sel.coordinates.empty()) throw std::invalid_argument("coordinate_matrix: empty selection");
  const int m = static_cast<int>(sel.coordinates.size());
  const int M = static_cast<int>(sel.coordinates.front().right_vector.size());
  CoordinateMatrix cm;
  cm.rows.resize(m, M);
  for (int i = 0; i < m; ++i) {
    const EigenMode& mode = sel.coordinates[i];
    cm.rows.row(i) = std::sqrt(mode.lambda) * mode.right_vector.adjoint();
  }
  cm.selection = sel;
  return cm;
}

Eigen::VectorXcd zero_forcing_precode(const CoordinateMatrix& cm, const Eigen::VectorXcd& u) {
  if (cm.rows.rows() != cm.rows.cols())
    throw std::invalid_argument("zero_forcing_precode: requires a full square selection");
  if (u.size() != cm.rows.rows()) throw std::invalid_argument("zero_forcing_precode: size mismatch");
  const auto svd = checked_svd(cm.rows);
  return svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal() * (svd.matrixU().adjoint() * u);
}

Eigen::VectorXd effective_noise_gammas(const CoordinateMatrix& cm) {
  const auto svd = checked_svd(cm.rows);
  // (R R^*)^{-1} = U S^{-2} U^*; only the diagonal is needed
  const auto& s = svd.singularValues();
  const auto& U = svd.matrixU();
  const int m = static_cast<int>(cm.rows.rows());
  Eigen::VectorXd gammas(m);
  for (int i = 0; i < m; ++i) {
    double g = 0.0;
    for (int j = 0; j < s.size(); ++j) g += std::norm(U(i, j)) / (s(j) * s(j));
    gammas(i) = g;
  }
  return gammas;
}

Eigen::VectorXd waterfill_powers(const Eigen::VectorXd& gammas, double P) {
  const int m = static_cast<int>(gammas.size());
  if (m == 0) throw std::invalid_argument("waterfill_powers: empty gains");
  if (!(P > 0.0)) throw std::domain_error("waterfill_powers: total power must be positive");
  double gmin = gammas.minCoeff();
  if (!(gmin > 0.0)) throw std::domain_error("waterfill_powers: gains must be positive");
  const double gsum = gammas.sum();

  // KKT form P_m = max(0, 1/(nu gamma_m) - 1); the spend
  // g(nu) = sum_m gamma_m P_m is decreasing in nu
  auto spend = [&](double nu) {
    const double w = 1.0 / nu;
    double s = 0.0;
    for (int i = 0; i < m; ++i)
      if (gammas(i) < w) s += w - gammas(i);
    return s;
  };

  double lo = 1.0 / (P + gsum);  // spend(lo) >= P
  double hi = 1.0 / gmin;        // spend(hi) == 0
  for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (spend(mid) > P)
      lo = mid;
    else
      hi = mid;
  }

  // resolve the active set at the bracketed dual variable, then bind the
  // constraint exactly on it
  Eigen::VectorXd powers = Eigen::VectorXd::Zero(m);
  double nu = 0.5 * (lo + hi);
  for (int rounds = 0; rounds < m + 2; ++rounds) {
    double active_sum = 0.0;
    int active = 0;
    const double w_probe = 1.0 / nu;
    for (int i = 0; i < m; ++i)
      if (gammas(i) < w_probe) {
        active_sum += gammas(i);
        ++active;
      }
    if (active == 0) break;
    const double w = (P + active_sum) / active;
    bool consistent = true;
    for (int i = 0; i < m; ++i) {
      const bool in = gammas(i) < w_probe;
      if (in != (gammas(i) < w)) consistent = false;
    }
    nu = 1.0 / w;
    if (consistent) break;
  }
  const double w = 1.0 / nu;
  for (int i = 0; i < m; ++i) powers(i) = std::max(0.0, (w - gammas(i)) / gammas(i));
  return powers;
}

PowerAllocation power_allocation(const Eigen::VectorXd& gammas, double P, PowerPolicy policy) {
  PowerAllocation alloc;
  alloc.gammas = gammas;
  alloc.total_power = P;
  if (policy == PowerPolicy::uniform)
    alloc.powers = Eigen::VectorXd::Constant(gammas.size(), P / gammas.sum());
  else
    alloc.powers = waterfill_powers(gammas, P);
  return alloc;
}

double sum_rate(const Eigen::VectorXd& gammas, double P, PowerPolicy policy) {
  const PowerAllocation alloc = power_allocation(gammas, P, policy);
  double rate = 0.0;
  for (int i = 0; i < alloc.powers.size(); ++i) rate += std::log1p(alloc.powers(i));
  return rate;
}

double zf_sum_rate(const CoordinateMatrix& cm, double P, PowerPolicy policy) {
  return sum_rate(effective_noise_gammas(cm), P, policy);
}

}  // namespace mimobc
