#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "unimodular/lattice.hpp"
#include "unimodular/sampler.hpp"

using namespace unimodular;

namespace {

// Successive minima by exhaustive search over small coefficients; the input
// basis is reduced first so that |coeff| <= 4 covers the minima.
std::vector<double> brute_minima(const Eigen::MatrixXd& V, int bound = 4) {
  const int N = static_cast<int>(V.cols());
  std::vector<std::pair<double, Eigen::VectorXd>> vecs;
  std::vector<int> c(N, -bound);
  while (true) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(V.rows());
    bool zero = true;
    for (int i = 0; i < N; ++i) {
      x += c[i] * V.col(i);
      zero = zero && c[i] == 0;
    }
    if (!zero) vecs.emplace_back(x.norm(), x);
    int i = 0;
    while (i < N && c[i] == bound) c[i++] = -bound;
    if (i == N) break;
    ++c[i];
  }
  std::sort(vecs.begin(), vecs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> minima;
  Eigen::MatrixXd span(V.rows(), 0);
  for (const auto& [len, v] : vecs) {
    Eigen::MatrixXd trial(V.rows(), span.cols() + 1);
    trial << span, v;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(trial);
    lu.setThreshold(1e-9);
    if (lu.rank() == trial.cols()) {
      span = trial;
      minima.push_back(len);
      if (static_cast<int>(minima.size()) == N) break;
    }
  }
  return minima;
}

Eigen::MatrixXd random_basis(int N, double R, SplitMix64& rng) {
  return assemble_matrix(dirichlet_initial(N, R, rng), rng).M;
}

bool is_integer_unimodular(const Eigen::MatrixXd& U) {
  for (int i = 0; i < U.rows(); ++i)
    for (int j = 0; j < U.cols(); ++j)
      if (U(i, j) != std::round(U(i, j))) return false;
  return std::abs(std::abs(U.determinant()) - 1.0) < 1e-9;
}

}  // namespace

TEST(ClosestInteger, TiesTowardZero) {
  EXPECT_EQ(closest_integer(0.5), 0.0);
  EXPECT_EQ(closest_integer(-0.5), 0.0);
  EXPECT_EQ(closest_integer(1.5), 1.0);
  EXPECT_EQ(closest_integer(-2.5), -2.0);
  EXPECT_EQ(closest_integer(2.51), 3.0);
  EXPECT_EQ(closest_integer(-0.49), 0.0);
}

TEST(MakeBasis, RejectsNonUnimodular) {
  Eigen::MatrixXd B(2, 2);
  B << 2, 0, 0, 1;
  EXPECT_THROW(make_basis(B), InputError);
  B << 0, 1, 1, 0;
  EXPECT_EQ(make_basis(B).det_sign, -1);
  EXPECT_THROW(make_basis(Eigen::MatrixXd::Identity(2, 3)), InputError);
}

TEST(LagrangeGauss, ShearReducesToIdentity) {
  Eigen::MatrixXd B(2, 2);
  B << 1, 7, 0, 1;
  const auto r = lagrange_gauss(make_basis(B));
  EXPECT_NEAR(r.lengths[0], 1.0, 1e-14);
  EXPECT_NEAR(r.lengths[1], 1.0, 1e-14);
  EXPECT_NEAR(r.cosines[0], 0.0, 1e-14);
}

TEST(LagrangeGauss, HexagonalLattice) {
  const double a = std::sqrt(2.0 / std::sqrt(3.0));
  Eigen::MatrixXd B(2, 2);
  B << a, 5.5 * a, 0, a * std::sqrt(3.0) / 2.0;
  const auto r = lagrange_gauss(make_basis(B));
  EXPECT_NEAR(r.lengths[0], a, 1e-12);
  EXPECT_NEAR(r.lengths[1], a, 1e-12);
  EXPECT_NEAR(std::abs(r.cosines[0]), 0.5, 1e-12);
}

TEST(LagrangeGauss, MatchesBruteForceMinima) {
  SplitMix64 rng(41);
  for (int rep = 0; rep < 300; ++rep) {
    const auto B = random_basis(2, 30.0, rng);
    const auto r = lagrange_gauss(make_basis(B));
    EXPECT_TRUE(is_integer_unimodular(r.transform));
    EXPECT_LT((B * r.transform - r.V).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_TRUE(is_minkowski_reduced(r));
    EXPECT_LE(r.lengths[0], r.lengths[1]);
    EXPECT_LE(std::abs(r.cosines[0]), 0.5 + 1e-12);
    const auto m = brute_minima(r.V);
    EXPECT_NEAR(r.lengths[0], m[0], 1e-10);
    EXPECT_NEAR(r.lengths[1], m[1], 1e-10);
    EXPECT_TRUE(same_lattice(B, r.V));
  }
}

TEST(Semaev, MatchesBruteForceMinima) {
  SplitMix64 rng(42);
  for (int rep = 0; rep < 300; ++rep) {
    const auto B = random_basis(3, 50.0, rng);
    const auto r = semaev_reduce(make_basis(B));
    ASSERT_TRUE(is_integer_unimodular(r.transform));
    EXPECT_LT((B * r.transform - r.V).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_TRUE(is_minkowski_reduced(r));
    EXPECT_TRUE(same_lattice(B, r.V));
    const auto m = brute_minima(r.V);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.lengths[i], m[i], 1e-9 * m[i]) << "rep " << rep;
    for (double c : r.cosines) EXPECT_LE(std::abs(c), 0.5 + 1e-9);
  }
}

TEST(Semaev, IntegerBasis) {
  Eigen::MatrixXd B(3, 3);
  B << 1, 4, 9, 0, 1, 3, 0, 0, 1;
  const auto r = semaev_reduce(make_basis(B));
  for (double l : r.lengths) EXPECT_NEAR(l, 1.0, 1e-14);
}

TEST(Minkowski, DetectsUnreducedBasis) {
  Eigen::MatrixXd B(3, 3);
  B << 1, 0, 1, 0, 1, 1, 0, 0, 1;  // b3 - b1 - b2 = e3 is shorter
  ReducedBasis rb;
  rb.V = B;
  EXPECT_FALSE(is_minkowski_reduced(rb));
  Eigen::MatrixXd C(2, 2);
  C << 1, 0.6, 0, 1;
  rb.V = C;
  EXPECT_FALSE(is_minkowski_reduced(rb));
}

TEST(Counting, IntegerLatticeCircleCounts) {
  ReducedBasis z2;
  z2.V = Eigen::MatrixXd::Identity(2, 2);
  // Gauss circle numbers N(r) - 1 for r^2 = 1, 2, 4, 5, 25.
  EXPECT_EQ(count_points_in_ball(z2, 1.0, PairConvention::both_signs), 4);
  EXPECT_EQ(count_points_in_ball(z2, std::sqrt(2.0), PairConvention::both_signs), 8);
  EXPECT_EQ(count_points_in_ball(z2, 2.0, PairConvention::both_signs), 12);
  EXPECT_EQ(count_points_in_ball(z2, std::sqrt(5.0), PairConvention::both_signs), 20);
  EXPECT_EQ(count_points_in_ball(z2, 5.0, PairConvention::both_signs), 80);
  EXPECT_EQ(count_points_in_ball(z2, 5.0), 40);
  ReducedBasis z3;
  z3.V = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_EQ(count_points_in_ball(z3, 1.0, PairConvention::both_signs), 6);
  EXPECT_EQ(count_points_in_ball(z3, std::sqrt(2.0), PairConvention::both_signs), 18);
}

TEST(Counting, InvariantUnderBasisChange) {
  SplitMix64 rng(43);
  for (int rep = 0; rep < 50; ++rep) {
    const auto B = random_basis(3, 5.0, rng);
    const auto r = semaev_reduce(make_basis(B));
    ReducedBasis raw;
    raw.V = B;
    EXPECT_EQ(count_points_in_ball(r, 1.3, PairConvention::both_signs),
              count_points_in_ball(raw, 1.3, PairConvention::both_signs, 2000000000));
  }
}

TEST(Counting, BoxCapIsEnforced) {
  ReducedBasis thin;
  thin.V = Eigen::MatrixXd(2, 2);
  thin.V << 1e-4, 0, 0, 1e4;
  EXPECT_THROW(count_points_in_ball(thin, 2.0, PairConvention::pairs_once, 1000), InputError);
}

TEST(SameLattice, DetectsDifferentLattices) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2), B(2, 2);
  B << 1, 0.5, 0, 1;
  EXPECT_FALSE(same_lattice(A, B));
  B << 1, 3, 0, 1;
  EXPECT_TRUE(same_lattice(A, B));
}
