#pragma once

#include <Eigen/Dense>

#include "mimobc/selection.hpp"

namespace mimobc {

/// Stacked equivalent-channel rows of the selected coordinates:
/// row i = sqrt(lambda_i) * right_vector_i^H, length M.
struct CoordinateMatrix {
  Eigen::MatrixXcd rows;      // m x M, m <= M
  SelectionResult selection;  // provenance of the rows

  int count() const { return static_cast<int>(rows.rows()); }
};

/// Per-coordinate powers under total power P with the effective-noise gains
/// they were computed against. The constraint sum(gamma_m * P_m) <= P binds
/// at the optimum.
struct PowerAllocation {
  Eigen::VectorXd gammas;
  Eigen::VectorXd powers;
  double total_power = 0.0;
};

enum class PowerPolicy { waterfilled, uniform };

/// Condition-number cap beyond which a coordinate matrix is treated as
/// singular rather than inverted.
inline constexpr double kConditionCap = 1e10;

/// Builds the coordinate matrix of a non-empty selection.
CoordinateMatrix coordinate_matrix(const SelectionResult& sel);

/// Channel-inversion precoding x = H^{-1} u for a square full selection.
/// Throws SingularityError when the matrix is singular or its condition
/// number exceeds kConditionCap.
Eigen::VectorXcd zero_forcing_precode(const CoordinateMatrix& cm, const Eigen::VectorXcd& u);

/// Effective-noise gains gamma_m: the diagonal of the inverse Gram of the
/// coordinate rows, (H H^*)^{-1}. On a reduced selection the Gram is the
/// reduced square matrix. Throws SingularityError as above.
Eigen::VectorXd effective_noise_gammas(const CoordinateMatrix& cm);

/// Maximizes sum(ln(1 + P_m)) subject to sum(gamma_m * P_m) <= P via
/// bisection on the dual variable (KKT form P_m = max(0, 1/(nu gamma_m) - 1)),
/// then binds the constraint exactly on the resolved active set.
Eigen::VectorXd waterfill_powers(const Eigen::VectorXd& gammas, double P);

/// Bundles the gains with the chosen per-coordinate powers; uniform splits
/// the budget as P_m = P / sum(gamma).
PowerAllocation power_allocation(const Eigen::VectorXd& gammas, double P, PowerPolicy policy);

/// Achieved sum rate in nats: waterfilled uses waterfill_powers; uniform uses
/// m * ln(1 + P / sum(gamma)) over the (possibly reduced) coordinate count.
double sum_rate(const Eigen::VectorXd& gammas, double P, PowerPolicy policy);

/// Convenience: gammas -> waterfilled/uniform rate for a coordinate matrix.
double zf_sum_rate(const CoordinateMatrix& cm, double P, PowerPolicy policy);

}  // namespace mimobc
