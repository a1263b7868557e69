#include <cmath>

#include "doctest.h"
#include "mimobc/channel.hpp"
#include "mimobc/distributions.hpp"
#include "mimobc/rng.hpp"
#include "oracles.hpp"

using namespace mimobc;

TEST_CASE("wishart pdf spot values") {
  CHECK(wishart_unordered_eig_pdf(1.0, 2, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(wishart_unordered_eig_pdf(0.0, 1, 1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(wishart_unordered_eig_pdf(-0.5, 2, 1), std::domain_error);
  CHECK_THROWS_AS(wishart_unordered_eig_pdf(1.0, 2, 3), std::domain_error);
  CHECK_THROWS_AS(wishart_unordered_eig_pdf(1.0, 9, 1), std::domain_error);
}

TEST_CASE("wishart pdf normalizes") {
  for (const auto& [M, K] : {std::pair{3, 2}, std::pair{2, 2}, std::pair{4, 1}}) {
    const double mass =
        oracles::integrate([&](double x) { return wishart_unordered_eig_pdf(x, M, K); }, 0.0, 50.0, 1e-11);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("wishart pdf matches sampled eigenvalues") {
  // coarse histogram check against the sampler, K=2, M=3
  RngStream s(11);
  const int n = 40000;
  int low = 0;  // lambda < 1
  for (int i = 0; i < n; ++i) {
    const auto ev = gram_eigenvalues(sample_channel(2, 3, s));
    for (int j = 0; j < 2; ++j)
      if (ev(j) < 1.0) ++low;
  }
  const double expected =
      oracles::integrate([](double x) { return wishart_unordered_eig_pdf(x, 3, 2); }, 0.0, 1.0, 1e-11);
  const double phat = static_cast<double>(low) / (2.0 * n);
  CHECK(std::abs(phat - expected) < 4.0 * std::sqrt(expected * (1 - expected) / (2.0 * n)));
}

TEST_CASE("lambda_max_tail values") {
  CHECK(lambda_max_tail(2.0, 1, 1) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  const int N = 1000;
  CHECK(lambda_max_tail(std::log(N), 1, 1) == doctest::Approx(1.0 / N).epsilon(1e-12));
  CHECK(lambda_max_tail(8.0, 2, 2) == doctest::Approx(64.0 * std::exp(-8.0)).epsilon(1e-12));
  CHECK(lambda_max_tail(-1.0, 2, 2) == 1.0);
  CHECK(lambda_max_tail(0.05, 3, 2) <= 1.0);
}

TEST_CASE("frobenius_tail values and monotonicity") {
  CHECK(frobenius_tail(3.0, 1, 1) == doctest::Approx(std::exp(-3.0)).epsilon(1e-12));
  CHECK(frobenius_tail(0.0, 3, 2) == 1.0);
  CHECK(frobenius_tail(1.0, 2, 1) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
  double prev = 1.0;
  for (double x = 0.0; x < 30.0; x += 0.5) {
    const double v = frobenius_tail(x, 2, 2);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

TEST_CASE("overlap pdf and cdf") {
  CHECK(overlap_pdf(0.3, 2) == doctest::Approx(1.0));
  CHECK(overlap_pdf(0.0, 4) == doctest::Approx(3.0));
  CHECK(overlap_cdf(1.0, 5) == doctest::Approx(1.0));
  CHECK_THROWS_AS(overlap_pdf(1.5, 3), std::domain_error);
  for (int M : {2, 3, 4, 6}) {
    const double mass = oracles::integrate([&](double z) { return overlap_pdf(z, M); }, 0.0, 1.0, 1e-11);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("projection beta pdf") {
  CHECK(projection_beta_pdf(0.4, 1, 2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(projection_beta_pdf(0.4, 3, 3), std::domain_error);
  for (const auto& [i, M] : {std::pair{1, 3}, std::pair{2, 3}, std::pair{2, 4}}) {
    const double mass = oracles::integrate([&](double z) { return projection_beta_pdf(z, i, M); }, 0.0, 1.0, 1e-11);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    const double mean = oracles::integrate([&](double z) { return z * projection_beta_pdf(z, i, M); }, 0.0, 1.0, 1e-11);
    CHECK(mean == doctest::Approx(static_cast<double>(i) / M).epsilon(1e-6));
  }
}

TEST_CASE("incomplete beta identity against quadrature") {
  for (int M : {3, 4, 5}) {
    for (double x : {0.1, 0.35, 0.8}) {
      const double direct = incomplete_beta(1, M - 1, x);
      CHECK(direct == doctest::Approx(1.0 - std::pow(1.0 - x, M - 1)).epsilon(1e-12));
      const double quad = oracles::integrate([&](double z) { return projection_beta_pdf(z, 1, M); }, 0.0, x, 1e-11);
      CHECK(direct == doctest::Approx(quad).epsilon(1e-7));
    }
  }
}

TEST_CASE("incomplete beta recursion") {
  // I_{r,s}(x) = Gamma(r+s) x^r (1-x)^{s-1} / (Gamma(r+1) Gamma(s)) + I_{r+1,s-1}(x)
  for (int r = 1; r <= 7; ++r) {
    for (int s = 1; r + s <= 8; ++s) {
      for (double x = 0.05; x < 1.0; x += 0.09) {
        const double head =
            std::tgamma(r + s) * std::pow(x, r) * std::pow(1.0 - x, s - 1) / (std::tgamma(r + 1) * std::tgamma(s));
        const double lhs = incomplete_beta(r, s, x);
        const double rhs = head + incomplete_beta(r + 1, s - 1, x);
        CHECK(std::abs(lhs - rhs) < 1e-10);
        CHECK(lhs + 1e-12 >= incomplete_beta(r + 1, s - 1, x));  // ordering of the family
      }
    }
  }
}

TEST_CASE("laguerre recurrence matches explicit low orders") {
  for (double x : {0.0, 0.7, 2.5, 9.0}) {
    for (int a : {0, 1, 3}) {
      CHECK(associated_laguerre(0, a, x) == doctest::Approx(1.0));
      CHECK(associated_laguerre(1, a, x) == doctest::Approx(1.0 + a - x));
      const double l2 = ((a + 2) * (a + 1) / 2.0) - (a + 2) * x + x * x / 2.0;
      CHECK(associated_laguerre(2, a, x) == doctest::Approx(l2).epsilon(1e-12));
    }
  }
}

TEST_CASE("DistributionSpec dispatch") {
  DistributionSpec spec;
  spec.family = DistributionSpec::Family::frobenius_tail;
  spec.M = 2;
  spec.K = 1;
  CHECK(spec(1.0) == doctest::Approx(frobenius_tail(1.0, 2, 1)));
  spec.family = DistributionSpec::Family::projection_beta;
  spec.M = 4;
  spec.i = 2;
  CHECK(spec(0.3) == doctest::Approx(projection_beta_pdf(0.3, 2, 4)));
}
