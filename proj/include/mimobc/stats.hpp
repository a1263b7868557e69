#pragma once

#include <functional>
#include <vector>

namespace mimobc::stats {

struct MeanStdErr {
  double mean = 0.0;
  double std_error = 0.0;
  long n = 0;
};

MeanStdErr mean_stderr(const std::vector<double>& xs);

/// Two-sided Kolmogorov-Smirnov distance between an empirical sample and a
/// reference CDF. The sample is sorted internally.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);

/// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

/// One-sided z statistic for H1: p1 > p2 from hit counts (pooled variance).
double z_proportions(long hits1, long n1, long hits2, long n2);

/// One-sided z statistic for H1: mean(a) > mean(b) (Welch).
double z_means(const MeanStdErr& a, const MeanStdErr& b);

/// Chi-square upper tail for even degrees of freedom 2*stages (Erlang tail).
double chi2_tail_even_dof(double x, int stages);

}  // namespace mimobc::stats
