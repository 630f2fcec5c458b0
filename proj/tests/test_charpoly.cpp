#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "unimodular/charpoly.hpp"
#include "unimodular/stats.hpp"

using namespace unimodular;

namespace {

AveragedCharPoly solve(int N, double R) { return charpoly_zeros(charpoly_coefficients(N, R, ContourSpec{})); }

// Monomial coefficients of prod (x - z).
std::vector<double> expand(const std::vector<double>& zeros) {
  std::vector<double> e{1.0};
  for (double z : zeros) {
    std::vector<double> next(e.size() + 1, 0.0);
    for (std::size_t k = 0; k < e.size(); ++k) {
      next[k + 1] += e[k];
      next[k] -= z * e[k];
    }
    e = next;
  }
  return e;
}

}  // namespace

TEST(Charpoly, SixByTwoZeros) {
  const auto p = solve(6, 2.0);
  const std::vector<double> expected{0.04436, 0.57774, 1.41726, 2.33579, 3.15342, 3.73701};
  ASSERT_EQ(p.zeros.size(), 6u);
  double prod = 1.0;
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(p.zeros[i], expected[i], 5e-5);
    prod *= p.zeros[i];
  }
  EXPECT_NEAR(prod, 1.0, 1e-6);
}

TEST(Charpoly, TwoByTwoExact) {
  // s1 has density prop. to r - r^{-3} on (1, R), so
  // E[r^2 + r^{-2}] = [(r^4 + r^{-4})/4] / [(r^2 + r^{-2})/2] over (1, R).
  for (double R : {1.5, 2.0, 5.0, 20.0}) {
    const auto p = solve(2, R);
    const double num = 0.25 * (std::pow(R, 4) + std::pow(R, -4) - 2.0);
    const double den = 0.5 * (R * R + 1.0 / (R * R) - 2.0);
    EXPECT_NEAR(p.coefficients[1], -num / den, 1e-9 * num / den) << R;
    EXPECT_NEAR(p.coefficients[0], 1.0, 1e-9);
    EXPECT_NEAR(p.zeros[0] * p.zeros[1], 1.0, 1e-6);
  }
}

TEST(Charpoly, TwoByTwoMonteCarlo) {
  const auto p = solve(2, 2.0);
  const auto mc = mc_charpoly_oracle(2, 2.0, 100000, 17);
  EXPECT_LT(std::abs(mc.coefficients[1] - p.coefficients[1]), 3.0 * mc.standard_errors[1]);
}

TEST(Charpoly, ThreeByFourMonteCarlo) {
  const auto p = solve(3, 4.0);
  const auto mc = mc_charpoly_oracle(3, 4.0, 100000, 23);
  for (int k = 1; k <= 2; ++k)
    EXPECT_LT(std::abs(mc.coefficients[k] - p.coefficients[k]), 3.0 * mc.standard_errors[k]) << "c" << k;
  // Zeros of the Monte Carlo polynomial sit close to the contour ones.
  AveragedCharPoly m;
  m.N = 3;
  m.R = 4.0;
  m.coefficients = mc.coefficients;
  m.coefficients[0] = -1.0;
  m.coefficients[3] = 1.0;
  const auto mz = charpoly_zeros(m, false);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(mz.zeros[i], p.zeros[i], 0.02 * std::max(1.0, p.zeros[i]));
}

TEST(Charpoly, RootCoefficientDuality) {
  for (auto [N, R] : std::vector<std::pair<int, double>>{{3, 2.0}, {5, 3.0}, {8, 2.5}, {12, 2.0}}) {
    const auto p = solve(N, R);
    const auto e = expand(p.zeros);
    for (int k = 0; k <= N; ++k)
      EXPECT_NEAR(e[k], p.coefficients[k], 1e-6 * std::max(1.0, std::abs(p.coefficients[k]))) << N << " " << k;
  }
}

TEST(Charpoly, ZerosInsideSupportAcrossSweep) {
  for (int N = 2; N <= charpoly_max_n; ++N)
    for (double R : {1.2, 2.0, 4.0, 10.0}) {
      if (R < 1.5 && N > 11) continue;  // see ClusteredZerosAreReported
      const auto p = solve(N, R);
      for (double z : p.zeros) {
        EXPECT_GT(z, 0.0);
        EXPECT_LT(z, R * R);
      }
      double prod = 1.0;
      for (double z : p.zeros) prod *= z;
      EXPECT_NEAR(prod, 1.0, 1e-6) << N << " " << R;
    }
}

TEST(Charpoly, ClusteredZerosAreReported) {
  // Fourteen zeros squeezed into (1/R^2, R^2) = (0.69, 1.44) cannot be
  // resolved from double-precision monomial coefficients; this must throw.
  const auto p = charpoly_coefficients(14, 1.2, ContourSpec{});
  EXPECT_NEAR(p.coefficients[0], 1.0, 1e-10);
  EXPECT_ANY_THROW(charpoly_zeros(p));
}

TEST(Charpoly, DegenerateLimit) {
  const auto p = solve(2, 1.001);
  EXPECT_NEAR(p.zeros[0], 1.0, 2e-3);
  EXPECT_NEAR(p.zeros[1], 1.0, 2e-3);
}

TEST(Charpoly, ParallelMatchesSerial) {
  const auto a = charpoly_coefficients(7, 2.0, ContourSpec{}, false);
  const auto b = charpoly_coefficients(7, 2.0, ContourSpec{}, true);
  for (int k = 0; k <= 7; ++k) EXPECT_EQ(a.coefficients[k], b.coefficients[k]);
}

TEST(Charpoly, ZerosSeedAChain) {
  // Chains started from the zeros and from a random state agree.
  const double R = 4.0;
  const auto p = solve(3, R);
  SingularValues from_zeros;
  for (auto it = p.zeros.rbegin(); it != p.zeros.rend(); ++it) from_zeros.sigma.push_back(std::sqrt(*it));
  from_zeros.sigma[2] = 1.0 / (from_zeros.sigma[0] * from_zeros.sigma[1]);
  ASSERT_TRUE(satisfies_constraints(from_zeros, R));
  ChainConfig cfg;
  cfg.steps = 600000;
  cfg.thin = 60;
  cfg.seed = 5;
  std::vector<double> a, b;
  for (const auto& sv : mcmc_sv(3, R, cfg, from_zeros)) a.push_back(sv.sigma[0]);
  SplitMix64 rng(6);
  cfg.seed = 6;
  for (const auto& sv : mcmc_sv(3, R, cfg, dirichlet_initial(3, R, rng))) b.push_back(sv.sigma[0]);
  EXPECT_LT(ks_two_sample(a, b),
            ks_threshold_1pct(static_cast<std::int64_t>(a.size()), static_cast<std::int64_t>(b.size())));
}

TEST(Charpoly, RejectsBadInput) {
  EXPECT_THROW(charpoly_coefficients(1, 2.0, ContourSpec{}), InputError);
  EXPECT_THROW(charpoly_coefficients(16, 2.0, ContourSpec{}), InputError);
  EXPECT_THROW(charpoly_coefficients(3, 1.0, ContourSpec{}), InputError);
  ContourSpec bad;
  bad.abscissa = -1.0;
  EXPECT_THROW(charpoly_coefficients(3, 2.0, bad), InputError);
}

TEST(Charpoly, ComplexRootsReported) {
  AveragedCharPoly p;
  p.N = 2;
  p.R = 2.0;
  p.coefficients = {1.0, 0.0, 1.0};  // x^2 + 1
  EXPECT_THROW(charpoly_zeros(p), ComplexRootPair);
}
