#include "mimobc/distributions.hpp"

#include <cmath>
#include <stdexcept>

namespace mimobc {

namespace {

constexpr int kOrderCap = 8;

void check_order(int M, int K) {
  if (M < 1 || K < 1) throw std::domain_error("distribution parameters must be positive");
  if (M > kOrderCap || K > kOrderCap) throw std::domain_error("distribution parameters capped at 8");
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

double associated_laguerre(int n, int a, double x) {
  if (n < 0) throw std::domain_error("associated_laguerre: negative order");
  if (n == 0) return 1.0;
  double lm1 = 1.0;             // L_0
  double l = 1.0 + a - x;       // L_1
  for (int k = 1; k < n; ++k) {
    const double lp1 = ((2.0 * k + 1.0 + a - x) * l - (k + a) * lm1) / (k + 1.0);
    lm1 = l;
    l = lp1;
  }
  return l;
}

double wishart_unordered_eig_pdf(double lambda, int M, int K) {
  check_order(M, K);
  if (K > M) throw std::domain_error("wishart_unordered_eig_pdf: requires K <= M");
  if (lambda < 0.0) throw std::domain_error("wishart_unordered_eig_pdf: negative eigenvalue");
  const int a = M - K;
  double sum = 0.0;
  for (int i = 0; i < K; ++i) {
    const double coef = factorial(i) / factorial(a + i);
    const double l = associated_laguerre(i, a, lambda);
    sum += coef * l * l;
  }
  return sum / K * std::pow(lambda, a) * std::exp(-lambda);
}

double lambda_max_tail(double t, int M, int K) {
  check_order(M, K);
  if (t <= 0.0) return 1.0;
  const double v = std::pow(t, M + K - 2) * std::exp(-t) / (std::tgamma(M) * std::tgamma(K));
  return std::min(1.0, std::max(0.0, v));
}

double frobenius_tail(double x, int M, int K) {
  check_order(M, K);
  if (x < 0.0) throw std::domain_error("frobenius_tail: negative argument");
  const int stages = M * K;
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m < stages; ++m) {
    term *= x / m;
    sum += term;
  }
  return std::min(1.0, std::exp(-x) * sum);
}

double overlap_pdf(double z, int M) {
  check_order(M, 1);
  if (M < 2) throw std::domain_error("overlap_pdf: requires M >= 2");
  if (z < 0.0 || z > 1.0) throw std::domain_error("overlap_pdf: argument outside [0, 1]");
  return (M - 1) * std::pow(1.0 - z, M - 2);
}

double overlap_cdf(double z, int M) {
  check_order(M, 1);
  if (M < 2) throw std::domain_error("overlap_cdf: requires M >= 2");
  if (z < 0.0 || z > 1.0) throw std::domain_error("overlap_cdf: argument outside [0, 1]");
  return 1.0 - std::pow(1.0 - z, M - 1);
}

double projection_beta_pdf(double z, int i, int M) {
  check_order(M, 1);
  if (i < 1 || i > M - 1) throw std::domain_error("projection_beta_pdf: requires 1 <= i <= M-1");
  if (z < 0.0 || z > 1.0) throw std::domain_error("projection_beta_pdf: argument outside [0, 1]");
  const double norm = std::tgamma(M) / (std::tgamma(i) * std::tgamma(M - i));
  return norm * std::pow(z, i - 1) * std::pow(1.0 - z, M - i - 1);
}

double incomplete_beta(int r, int s, double x) {
  if (r < 1 || s < 0) throw std::domain_error("incomplete_beta: requires r >= 1, s >= 0");
  if (x < 0.0 || x > 1.0) throw std::domain_error("incomplete_beta: argument outside [0, 1]");
  if (s == 0) return 0.0;
  // binomial tail Prob{Bin(r+s-1, x) >= r}
  const int n = r + s - 1;
  double sum = 0.0;
  for (int j = r; j <= n; ++j) {
    const double logc = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
    double term;
    if (x == 0.0) {
      term = (j == 0) ? 1.0 : 0.0;
    } else if (x == 1.0) {
      term = (j == n) ? 1.0 : 0.0;
    } else {
      term = std::exp(logc + j * std::log(x) + (n - j) * std::log1p(-x));
    }
    sum += term;
  }
  return std::min(1.0, sum);
}

double projection_beta_cdf(double z, int i, int M) {
  check_order(M, 1);
  if (i < 1 || i > M - 1) throw std::domain_error("projection_beta_cdf: requires 1 <= i <= M-1");
  return incomplete_beta(i, M - i, z);
}

double DistributionSpec::operator()(double x) const {
  switch (family) {
    case Family::wishart_unordered:
      return wishart_unordered_eig_pdf(x, M, K);
    case Family::lambda_max_tail:
      return lambda_max_tail(x, M, K);
    case Family::frobenius_tail:
      return frobenius_tail(x, M, K);
    case Family::overlap:
      return overlap_pdf(x, M);
    case Family::projection_beta:
      return projection_beta_pdf(x, i, M);
  }
  throw std::logic_error("DistributionSpec: unknown family");
}

}  // namespace mimobc
