#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "unimodular/analytics.hpp"

using namespace unimodular;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double pi = std::numbers::pi;

template <typename F>
double gk(F f, double a, double b, double tol = 1e-12) {
  if (b <= a) return 0.0;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 20, tol);
}

// Integral of the pdf from the left end of the support, split at the kinks.
template <typename F>
double pdf_mass(F pdf, double lo, double x, std::initializer_list<double> kinks) {
  double acc = 0.0, a = lo;
  for (double k : kinks) {
    if (k >= x) break;
    if (k > a) {
      acc += gk(pdf, a, k);
      a = k;
    }
  }
  return acc + gk(pdf, a, x);
}

double op_norm_2x2(long a, long b, long c, long d) {
  const double f = double(a) * a + double(b) * b + double(c) * c + double(d) * d;
  const double det = double(a) * d - double(b) * c;
  return std::sqrt(0.5 * (f + std::sqrt(std::max(f * f - 4.0 * det * det, 0.0))));
}

long brute_sl2z(double R, Norm norm) {
  const long m = static_cast<long>(std::ceil(R)) + 1;
  long count = 0;
  for (long a = -m; a <= m; ++a)
    for (long b = -m; b <= m; ++b)
      for (long c = -m; c <= m; ++c)
        for (long d = -m; d <= m; ++d) {
          if (a * d - b * c != 1) continue;
          const double n = norm == Norm::two_norm ? std::sqrt(double(a * a + b * b + c * c + d * d))
                                                  : op_norm_2x2(a, b, c, d);
          count += n <= R;
        }
  return count;
}

}  // namespace

TEST(DensityN2, Normalised) {
  EXPECT_NEAR(density_curve(DensityKind::shortest).normalization_check, 1.0, 1e-10);
  EXPECT_NEAR(density_curve(DensityKind::second).normalization_check, 1.0, 1e-7);
  EXPECT_NEAR(density_curve(DensityKind::cosine).normalization_check, 1.0, 1e-9);
}

TEST(DensityN2, ShortestCdfIntegratesPdf) {
  for (double s : {0.3, 0.9, 1.0, 1.03, 1.07}) {
    EXPECT_NEAR(cdf_shortest_n2(s), pdf_mass(pdf_shortest_n2, 0.0, s, {1.0}), 1e-10) << s;
  }
  EXPECT_EQ(cdf_shortest_n2(shortest_length_max), 1.0);
  EXPECT_NEAR(cdf_shortest_n2(shortest_length_max * (1 - 1e-12)), 1.0, 1e-9);
  EXPECT_EQ(pdf_shortest_n2(1.2), 0.0);
}

TEST(DensityN2, SecondCdfIntegratesPdf) {
  for (double s : {1.02, 1.07, 1.2, 2.0, 10.0}) {
    EXPECT_NEAR(cdf_second_n2(s), pdf_mass(pdf_second_n2, 1.0, s, {shortest_length_max}), 1e-10) << s;
  }
  // Tail: 1 - F(s) ~ 3/(pi s^2).
  const double s = 1e4;
  EXPECT_NEAR((1.0 - cdf_second_n2(s)) * s * s, 3.0 / pi, 1e-3);
}

TEST(DensityN2, SecondContinuousAtBranchPoint) {
  const double x = shortest_length_max;
  EXPECT_NEAR(pdf_second_n2(x * (1 - 1e-12)), pdf_second_n2(x * (1 + 1e-12)), 1e-9);
  // Both branches equal (12/pi)/(sqrt(3) x) there.
  EXPECT_NEAR(pdf_second_n2(x), 12.0 / (pi * x * std::sqrt(3.0)), 1e-12);
}

TEST(DensityN2, CosineCdfIntegratesPdf) {
  for (double s : {-0.4, -0.1, 0.1, 0.3, 0.49}) {
    const double mass = s < 0.0 ? gk(pdf_cosine_n2, -0.45, s)
                                : gk(pdf_cosine_n2, -0.45, 0.0) + gk(pdf_cosine_n2, 0.0, s);
    EXPECT_NEAR(cdf_cosine_n2(s) - cdf_cosine_n2(-0.45), mass, 1e-9) << s;
  }
  EXPECT_NEAR(cdf_cosine_n2(0.0), 0.5, 1e-15);
  EXPECT_NEAR(cdf_cosine_n2(-0.5 + 1e-12), 0.0, 1e-9);
  EXPECT_NEAR(cdf_cosine_n2(0.5 - 1e-12), 1.0, 1e-9);
}

TEST(DensityN2, CosineValues) {
  EXPECT_NEAR(pdf_cosine_n2(0.25), 0.72919, 5e-6);
  EXPECT_EQ(pdf_cosine_n2(0.25), pdf_cosine_n2(-0.25));
  EXPECT_EQ(pdf_cosine_n2(0.6), 0.0);
  // With exponent 1/2 the density is not normalised.
  const double mass = 2.0 * gk(pdf_cosine_n2_half_exponent, 1e-12, 0.5, 1e-10);
  EXPECT_NEAR(mass, 0.969, 2e-3);
}

TEST(DensityN2, CurveMetadata) {
  const auto c = density_curve(DensityKind::second);
  EXPECT_EQ(c.lo, 1.0);
  EXPECT_GT(c.hi, 1e3);
  EXPECT_LT(c.pdf(c.hi), 1.1e-12);
  EXPECT_STREQ(to_string(DensityKind::cosine), "cosine");
}

TEST(FundamentalDomain, VolumeTildeGamma) {
  // Region y > 0, |x| <= 1/2, x^2 + y^2 >= 1 with measure dx dy / y^2 gives
  // pi/3; the QR parametrisation contributes the extra angular factor pi.
  const double hyperbolic = gk([](double x) { return 1.0 / std::sqrt(1.0 - x * x); }, -0.5, 0.5);
  EXPECT_NEAR(hyperbolic, pi / 3.0, 1e-12);
  EXPECT_NEAR(vol_tilde_gamma(), pi * hyperbolic, 1e-12);
}

TEST(FloorIdentities, PartialSums) {
  EXPECT_NEAR(floor_moment_partial_sum(1, 1), 3.0 / 8.0, 1e-16);
  // p = 1, 2: 3/8 + 2 (1/4 - 1/9)/2.
  EXPECT_NEAR(floor_moment_partial_sum(1, 2), 3.0 / 8.0 + (0.25 - 1.0 / 9.0), 1e-16);
  EXPECT_THROW(floor_moment_partial_sum(0, 5), InputError);
}

TEST(FloorIdentities, ZetaValues) {
  // int_0^1 floor(1/s) s^k ds = zeta(k+1)/(k+1).
  EXPECT_NEAR(floor_moment_integral(1), pi * pi / 12.0, 1e-12);
  EXPECT_NEAR(floor_moment_integral(2), 1.2020569031595942 / 3.0, 1e-12);
  EXPECT_NEAR(floor_moment_integral(3), pow(pi, 4) / 90.0 / 4.0, 1e-12);
  EXPECT_NEAR(siegel_integral_identity(), 1.0, 1e-12);
}

TEST(Sl2z, SmallCounts) {
  EXPECT_EQ(enumerate_sl2z(1.0, Norm::two_norm), 0);
  // ||gamma||_2 = sqrt(2) only for the four signed rotations +-I, +-J.
  EXPECT_EQ(enumerate_sl2z(std::sqrt(2.0), Norm::two_norm), 4);
  EXPECT_EQ(enumerate_sl2z(1.0, Norm::operator_norm), 4);
}

TEST(Sl2z, MatchesBruteForce) {
  for (double R : {1.7, 2.3, 3.6, 5.3, 7.9}) {
    EXPECT_EQ(enumerate_sl2z(R, Norm::two_norm), brute_sl2z(R, Norm::two_norm)) << R;
    EXPECT_EQ(enumerate_sl2z(R, Norm::operator_norm), brute_sl2z(R, Norm::operator_norm)) << R;
  }
}

TEST(Sl2z, DivisibleByFour) {
  for (double R = 1.5; R < 40.0; R *= 1.37) {
    EXPECT_EQ(enumerate_sl2z(R, Norm::two_norm) % 4, 0) << R;
    EXPECT_EQ(enumerate_sl2z(R, Norm::operator_norm) % 4, 0) << R;
  }
}

TEST(Sl2z, Monotone) {
  long prev = 0;
  for (double R = 1.0; R < 30.0; R += 0.77) {
    const long c = enumerate_sl2z(R, Norm::two_norm);
    EXPECT_GE(c, prev);
    prev = c;
  }
}

TEST(Sl2z, RejectsBadInput) {
  EXPECT_THROW(enumerate_sl2z(250.0, Norm::two_norm), InputError);
  EXPECT_THROW(enumerate_sl2z(-1.0, Norm::two_norm), InputError);
  EXPECT_THROW(enumerate_sl2z(5.0, Norm::condition), InputError);
}
