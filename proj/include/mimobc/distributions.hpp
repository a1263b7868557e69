#pragma once

namespace mimobc {

// Closed-form densities and tail probabilities used as Monte Carlo oracles.
// Parameters are capped at M, K <= 8; larger orders would need overflow
// handling the desk-scale experiments never exercise.

/// Associated Laguerre polynomial L_n^a(x) by the three-term recurrence.
double associated_laguerre(int n, int a, double x);

/// Density of an unordered eigenvalue of the K x K Wishart matrix H H^*
/// built from a K x M (K <= M) complex Gaussian H.
double wishart_unordered_eig_pdf(double lambda, int M, int K);

/// Leading-order tail Prob{lambda_max(H H^*) > t} for a K x M complex
/// Gaussian H: t^(M+K-2) e^(-t) / (Gamma(M) Gamma(K)), clamped to [0, 1].
/// Asymptotic in t; the omitted correction is O(1/t).
double lambda_max_tail(double t, int M, int K);

/// Exact tail Prob{|H|_F^2 > x} = e^(-x) sum_{m<MK} x^m / m! for a K x M
/// complex Gaussian H (Erlang tail with MK stages).
double frobenius_tail(double x, int M, int K);

/// Density of the squared overlap |v^* psi|^2 of two independent isotropic
/// unit vectors in C^M: (M-1)(1-z)^(M-2) on [0, 1]. Requires M >= 2.
double overlap_pdf(double z, int M);

/// CDF of the squared overlap: 1 - (1-z)^(M-1).
double overlap_cdf(double z, int M);

/// Beta(i, M-i) density of the squared projection of an isotropic unit vector
/// onto an independent i-dimensional subspace of C^M. Requires 1 <= i <= M-1.
double projection_beta_pdf(double z, int i, int M);

/// Regularized incomplete beta I_{r,s}(x) for positive integer parameters,
/// evaluated as the binomial tail Prob{Bin(r+s-1, x) >= r}. I_{r,0} is 0.
double incomplete_beta(int r, int s, double x);

/// CDF of the Beta(i, M-i) projection law, i.e. incomplete_beta(i, M-i, x).
double projection_beta_cdf(double z, int i, int M);

/// Parameter bundle for the distribution family used by validation tooling.
struct DistributionSpec {
  enum class Family { wishart_unordered, lambda_max_tail, frobenius_tail, overlap, projection_beta };
  Family family = Family::overlap;
  int M = 2;
  int K = 1;
  int i = 1;

  /// pdf families evaluate the density, tail families the tail probability.
  double operator()(double x) const;
};

}  // namespace mimobc
