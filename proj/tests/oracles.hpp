#pragma once

// Test-side oracles. These deliberately avoid the library's computational
// paths: quadrature instead of closed forms, grid search instead of dual
// bisection, endpoint grids instead of covariance sweeps.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

inline double simpson_slice(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                               double fb, double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson_slice(a, m, fa, flm, fm);
  const double right = simpson_slice(m, b, fm, frm, fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps) return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double eps = 1e-10) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  return adaptive_simpson(f, a, b, fa, fm, fb, simpson_slice(a, b, fa, fm, fb), eps, 40);
}

/// Grid-search oracle for 3-coordinate water-filling: maximize
/// sum ln(1+P_i) over gamma1 P1 + gamma2 P2 + gamma3 P3 = P, refining down to
/// a final grid step of 1e-4 on (P1, P2).
inline double grid_waterfill_objective(double g1, double g2, double g3, double P) {
  const auto objective = [&](double p1, double p2) {
    const double rem = P - g1 * p1 - g2 * p2;
    if (rem < -1e-12) return -1.0;
    const double p3 = std::max(0.0, rem / g3);
    return std::log1p(p1) + std::log1p(p2) + std::log1p(p3);
  };
  double lo1 = 0.0, hi1 = P / g1;
  double lo2 = 0.0, hi2 = P / g2;
  double best = -1.0, b1 = 0.0, b2 = 0.0;
  for (double step = std::max({1e-4, (hi1 - lo1) / 300.0, (hi2 - lo2) / 300.0});;
       step = std::max(1e-4, step / 30.0)) {
    best = -1.0;
    for (double p1 = lo1; p1 <= hi1 + 1e-15; p1 += step) {
      for (double p2 = lo2; p2 <= hi2 + 1e-15; p2 += step) {
        const double v = objective(p1, p2);
        if (v > best) {
          best = v;
          b1 = p1;
          b2 = p2;
        }
      }
    }
    if (step <= 1e-4 + 1e-12) break;
    lo1 = std::max(0.0, b1 - 2.0 * step);
    hi1 = std::min(P / g1, b1 + 2.0 * step);
    lo2 = std::max(0.0, b2 - 2.0 * step);
    hi2 = std::min(P / g2, b2 + 2.0 * step);
  }
  return best;
}

/// Brute-force two-user scalar broadcast optimum over a power-split grid:
/// max over q of ln(1 + a1 q + a2 (P - q)).
inline double grid_two_user_scalar(double a1, double a2, double P, int steps = 20000) {
  double best = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double q = P * i / steps;
    best = std::max(best, std::log1p(a1 * q + a2 * (P - q)));
  }
  return best;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracles
