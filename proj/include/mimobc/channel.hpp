#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mimobc/rng.hpp"

namespace mimobc {

/// One user's K x M complex Rayleigh channel realization.
/// Entries are i.i.d. CN(0,1): zero mean, variance 1/2 per real component.
struct ChannelMatrix {
  int user_id = 0;
  Eigen::MatrixXcd entries;  // K x M

  int receive_antennas() const { return static_cast<int>(entries.rows()); }   // K
  int transmit_antennas() const { return static_cast<int>(entries.cols()); }  // M
};

/// A (user, singular-direction) coordinate of the transmission space.
/// `lambda` is an eigenvalue of H H^* (a squared singular value of H); the
/// equivalent scalar channel along `right_vector` has gain sqrt(lambda).
/// Modes of one channel are ordered by non-increasing lambda, mode_index
/// starting at 1.
struct EigenMode {
  int user_id = 0;
  int mode_index = 1;
  double lambda = 0.0;
  Eigen::VectorXcd right_vector;  // unit-norm, length M
  Eigen::VectorXcd left_vector;   // unit-norm, length K
};

/// Draws a fresh K x M channel; deterministic given the stream state.
ChannelMatrix sample_channel(int K, int M, RngStream& stream, int user_id = 0);

/// Decomposes a channel into its min(K, M) eigenmodes, lambda non-increasing.
/// Each right vector carries a canonical phase (first non-negligible component
/// real-positive) so equal-singular-value ties replay identically; the left
/// vector absorbs the conjugate phase, preserving H = U diag(sigma) V^*.
/// Throws DecompositionError if the factorization does not converge and
/// std::domain_error on non-finite input.
std::vector<EigenMode> svd_modes(const ChannelMatrix& h);

/// Squared normalized inner product |v^* psi|^2 / (|v|^2 |psi|^2) in [0, 1].
/// Equals |v^* psi|^2 for unit vectors. Throws std::domain_error on a zero
/// vector.
double orthogonality(const Eigen::VectorXcd& v, const Eigen::VectorXcd& psi);

/// Orthogonality defect of the rows of a square matrix:
/// prod_i |row_i|^2 / det(H H^*). Always >= 1, equal to 1 iff the rows are
/// mutually orthogonal. Throws SingularityError when the matrix is singular
/// (defect infinite) and std::invalid_argument when not square.
double orthogonality_defect(const Eigen::MatrixXcd& rows);

/// Eigenvalues of H H^* in non-increasing order (computed on the smaller Gram
/// side; closed form for 1x1 and 2x2). Cheaper than svd_modes when only the
/// spectrum is needed.
Eigen::VectorXd gram_eigenvalues(const ChannelMatrix& h);

/// Largest eigenvalue of H H^*.
double lambda_max(const ChannelMatrix& h);

}  // namespace mimobc
