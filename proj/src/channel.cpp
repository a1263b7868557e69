#include "mimobc/channel.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

#include "mimobc/errors.hpp"

namespace mimobc {

ChannelMatrix sample_channel(int K, int M, RngStream& stream, int user_id) {
  if (K < 1 || M < 1) throw std::invalid_argument("sample_channel: K and M must be positive");
  ChannelMatrix h;
  h.user_id = user_id;
  h.entries.resize(K, M);
  for (int r = 0; r < K; ++r)
    for (int c = 0; c < M; ++c) h.entries(r, c) = stream.cgaussian();
  return h;
}

std::vector<EigenMode> svd_modes(const ChannelMatrix& h) {
  if (!h.entries.allFinite()) throw std::domain_error("svd_modes: channel has non-finite entries");

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h.entries, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw DecompositionError("svd_modes: factorization did not converge");

  const int r = static_cast<int>(svd.singularValues().size());  // min(K, M)
  std::vector<EigenMode> modes(r);
  for (int j = 0; j < r; ++j) {
    EigenMode& m = modes[j];
    m.user_id = h.user_id;
    m.mode_index = j + 1;
    const double sigma = svd.singularValues()(j);
    m.lambda = sigma * sigma;
    m.right_vector = svd.matrixV().col(j);
    m.left_vector = svd.matrixU().col(j);
    // canonical phase: first non-negligible right-vector component made
    // real-positive; the left vector absorbs the same factor
    for (int p = 0; p < m.right_vector.size(); ++p) {
      const double mag = std::abs(m.right_vector(p));
      if (mag > 1e-12) {
        const std::complex<double> phase = std::conj(m.right_vector(p)) / mag;
        m.right_vector *= phase;
        m.left_vector *= phase;
        break;
      }
    }
  }
  return modes;
}

double orthogonality(const Eigen::VectorXcd& v, const Eigen::VectorXcd& psi) {
  const double nv = v.squaredNorm();
  const double np = psi.squaredNorm();
  if (nv == 0.0 || np == 0.0) throw std::domain_error("orthogonality: zero vector");
  const double inner = std::norm(v.dot(psi));  // |v^* psi|^2
  return inner / (nv * np);
}

double orthogonality_defect(const Eigen::MatrixXcd& rows) {
  if (rows.rows() != rows.cols()) throw std::invalid_argument("orthogonality_defect: matrix must be square");
  const Eigen::MatrixXcd gram = rows * rows.adjoint();
  double norm_prod = 1.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) norm_prod *= gram(i, i).real();
  const double det = gram.partialPivLu().determinant().real();
  if (!(det > 0.0) || !std::isfinite(det) || det < norm_prod * 1e-300)
    throw SingularityError("orthogonality_defect: singular row set");
  return norm_prod / det;
}

Eigen::VectorXd gram_eigenvalues(const ChannelMatrix& h) {
  const Eigen::MatrixXcd& H = h.entries;
  const Eigen::Index K = H.rows(), M = H.cols();
  const Eigen::Index s = std::min(K, M);
  Eigen::VectorXd ev(s);
  if (s == 1) {
    ev(0) = H.squaredNorm();
    return ev;
  }
  Eigen::MatrixXcd gram = (K <= M) ? Eigen::MatrixXcd(H * H.adjoint()) : Eigen::MatrixXcd(H.adjoint() * H);
  if (s == 2) {
    const double a = gram(0, 0).real();
    const double c = gram(1, 1).real();
    const double b2 = std::norm(gram(0, 1));
    const double half = 0.5 * (a + c);
    const double disc = std::sqrt(0.25 * (a - c) * (a - c) + b2);
    ev(0) = half + disc;
    ev(1) = std::max(0.0, half - disc);
    return ev;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < s; ++i) ev(i) = std::max(0.0, eig.eigenvalues()(s - 1 - i));
  return ev;
}

double lambda_max(const ChannelMatrix& h) { return gram_eigenvalues(h)(0); }

}  // namespace mimobc
