#include "mimobc/stats.hpp"

#include <algorithm>
#include <cmath>

namespace mimobc::stats {

MeanStdErr mean_stderr(const std::vector<double>& xs) {
  MeanStdErr out;
  out.n = static_cast<long>(xs.size());
  if (out.n == 0) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / out.n;
  if (out.n < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.std_error = std::sqrt(ss / (out.n - 1) / out.n);
  return out;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f));
  }
  return d;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = std::min(x.size(), y.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < n; ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

double z_proportions(long hits1, long n1, long hits2, long n2) {
  const double p1 = static_cast<double>(hits1) / n1;
  const double p2 = static_cast<double>(hits2) / n2;
  const double pooled = static_cast<double>(hits1 + hits2) / (n1 + n2);
  const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2));
  if (se == 0.0) return 0.0;
  return (p1 - p2) / se;
}

double z_means(const MeanStdErr& a, const MeanStdErr& b) {
  const double se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
  if (se == 0.0) return 0.0;
  return (a.mean - b.mean) / se;
}

double chi2_tail_even_dof(double x, int stages) {
  // Erlang tail with `stages` unit-rate stages evaluated at x/2
  const double h = x / 2.0;
  double term = 1.0;
  double sum = 1.0;
  for (int m = 1; m < stages; ++m) {
    term *= h / m;
    sum += term;
  }
  return std::min(1.0, std::exp(-h) * sum);
}

}  // namespace mimobc::stats
