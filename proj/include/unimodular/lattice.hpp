#pragma once

// Reduction of unimodular lattice bases (Lagrange-Gauss for N = 2, Semaev's
// greedy algorithm for N = 3), Minkowski checks, and lattice point counting.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "unimodular/errors.hpp"

namespace unimodular {

/// Basis vectors as matrix columns.
struct LatticeBasis {
  Eigen::MatrixXd B;
  int det_sign = 1;

  int dim() const { return static_cast<int>(B.cols()); }
};

/// `tol` is relative to the Hadamard bound prod |b_i|, the scale of the
/// rounding error in det B.
inline LatticeBasis make_basis(const Eigen::MatrixXd& B, double tol = 1e-9) {
  require(B.rows() == B.cols() && B.rows() >= 1, "make_basis: basis matrix must be square");
  const double det = B.determinant();
  double hadamard = 1.0;
  for (int i = 0; i < B.cols(); ++i) hadamard *= B.col(i).norm();
  require(std::abs(std::abs(det) - 1.0) <= tol * std::max(1.0, hadamard),
          "make_basis: basis is not unimodular (|det| = " + std::to_string(std::abs(det)) + ")");
  return {B, det > 0.0 ? 1 : -1};
}

struct ReducedBasis {
  Eigen::MatrixXd V;           // reduced vectors as columns, ascending length
  Eigen::MatrixXd transform;   // integer matrix U with V = B U
  std::vector<double> lengths;
  std::vector<double> cosines;  // (1,2) for N = 2; (1,2), (1,3), (2,3) for N = 3
  int iterations = 0;

  int dim() const { return static_cast<int>(V.cols()); }
};

/// Nearest integer; exact half-integers round toward zero.
inline double closest_integer(double x) {
  const double r = std::round(x);
  if (std::abs(r - x) == 0.5) return std::trunc(x);
  return r;
}

namespace detail {

inline void finalize(ReducedBasis& out) {
  const int N = out.dim();
  out.lengths.clear();
  out.cosines.clear();
  for (int i = 0; i < N; ++i) out.lengths.push_back(out.V.col(i).norm());
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j)
      out.cosines.push_back(out.V.col(i).dot(out.V.col(j)) / (out.lengths[i] * out.lengths[j]));
}

inline void sort_by_length(Eigen::MatrixXd& V, Eigen::MatrixXd& U) {
  const int N = static_cast<int>(V.cols());
  std::vector<int> order(N);
  for (int i = 0; i < N; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return V.col(a).squaredNorm() < V.col(b).squaredNorm(); });
  Eigen::MatrixXd V2(V.rows(), N), U2(U.rows(), N);
  for (int i = 0; i < N; ++i) {
    V2.col(i) = V.col(order[i]);
    U2.col(i) = U.col(order[i]);
  }
  V = V2;
  U = U2;
}

// Lagrange-Gauss on columns (a, b) of V, in place; returns iterations.
inline int gauss_pair(Eigen::MatrixXd& V, Eigen::MatrixXd& U, int a, int b) {
  if (V.col(a).squaredNorm() > V.col(b).squaredNorm()) {
    V.col(a).swap(V.col(b));
    U.col(a).swap(U.col(b));
  }
  int iterations = 0;
  while (true) {
    ++iterations;
    const double alpha = closest_integer(V.col(a).dot(V.col(b)) / V.col(a).squaredNorm());
    V.col(b) -= alpha * V.col(a);
    U.col(b) -= alpha * U.col(a);
    if (V.col(b).squaredNorm() < V.col(a).squaredNorm()) {
      V.col(a).swap(V.col(b));
      U.col(a).swap(U.col(b));
    } else {
      return iterations;
    }
    if (iterations > 100000) throw NonConvergence("lagrange_gauss: no termination");
  }
}

}  // namespace detail

inline ReducedBasis lagrange_gauss(const LatticeBasis& basis) {
  require(basis.dim() == 2, "lagrange_gauss: basis must be 2-dimensional");
  ReducedBasis out;
  out.V = basis.B;
  out.transform = Eigen::MatrixXd::Identity(2, 2);
  out.iterations = detail::gauss_pair(out.V, out.transform, 0, 1);
  detail::finalize(out);
  return out;
}

/// Semaev's greedy reduction for N = 3. Step 2 takes the shortest
/// b3 + x2 b2 + x1 b1 over the 3 x 3 neighbourhood of the rounded projection
/// coordinates (the rounded point alone need not be the closest).
inline ReducedBasis semaev_reduce(const LatticeBasis& basis) {
  require(basis.dim() == 3, "semaev_reduce: basis must be 3-dimensional");
  ReducedBasis out;
  out.V = basis.B;
  out.transform = Eigen::MatrixXd::Identity(3, 3);
  Eigen::MatrixXd& V = out.V;
  Eigen::MatrixXd& U = out.transform;
  detail::sort_by_length(V, U);
  bool retried = false;
  for (int round = 0; round < 10000; ++round) {
    out.iterations += detail::gauss_pair(V, U, 0, 1);
    const Eigen::VectorXd b1 = V.col(0), b2 = V.col(1), b3 = V.col(2);
    const double n1 = b1.squaredNorm(), n2 = b2.squaredNorm();
    const double d12 = b1.dot(b2), d13 = b1.dot(b3), d23 = b2.dot(b3);
    const double C = 1.0 - d12 * d12 / (n1 * n2);
    if (C <= 1e-12) {
      if (retried) throw NonConvergence("semaev_reduce: b1, b2 numerically collinear");
      // Re-orthogonalisation retry: a fresh Lagrange-Gauss pass from scratch.
      retried = true;
      detail::sort_by_length(V, U);
      continue;
    }
    const double x2 = -closest_integer((d23 / n2 - (d12 / n2) * (d13 / n1)) / C);
    const double x1 = -closest_integer((d13 / n1 - (d12 / n1) * (d23 / n2)) / C);
    Eigen::VectorXd best = b3 + x2 * b2 + x1 * b1;
    double best_x1 = x1, best_x2 = x2;
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j) {
        const Eigen::VectorXd a = b3 + (x2 + j) * b2 + (x1 + i) * b1;
        if (a.squaredNorm() < best.squaredNorm()) {
          best = a;
          best_x1 = x1 + i;
          best_x2 = x2 + j;
        }
      }
    ++out.iterations;
    if (best.squaredNorm() >= b3.squaredNorm()) {
      detail::finalize(out);
      return out;
    }
    V.col(2) = best;
    U.col(2) = U.col(2) + best_x2 * U.col(1) + best_x1 * U.col(0);
    detail::sort_by_length(V, U);
  }
  throw NonConvergence("semaev_reduce: no termination");
}

/// Minkowski conditions: exact for N = 2; for N = 3 the finite set
/// |n1|, |n2| <= coeff_bound of the defining inequalities.
inline bool is_minkowski_reduced(const ReducedBasis& basis, int coeff_bound = 2, double tol = 1e-9) {
  const int N = basis.dim();
  require(N == 2 || N == 3, "is_minkowski_reduced: N must be 2 or 3");
  const auto& V = basis.V;
  const double slack = 1.0 + tol;
  for (int i = 1; i < N; ++i)
    if (V.col(i).norm() * slack < V.col(i - 1).norm()) return false;
  if (2.0 * std::abs(V.col(0).dot(V.col(1))) > V.col(0).squaredNorm() * slack) return false;
  if (N == 2) return true;
  const double b3 = V.col(2).norm();
  for (int n1 = -coeff_bound; n1 <= coeff_bound; ++n1)
    for (int n2 = -coeff_bound; n2 <= coeff_bound; ++n2) {
      const double len = (V.col(2) + n2 * V.col(1) + n1 * V.col(0)).norm();
      if (len * slack < b3) return false;
    }
  return true;
}

/// +-v counted once (pairs_once) or as two vectors (both_signs).
enum class PairConvention { pairs_once, both_signs };

/// Number of nonzero lattice vectors of norm <= R, enumerating the coefficient
/// box |n_i| <= R sqrt((G^{-1})_{ii}) from the Gram matrix G of the basis.
inline std::int64_t count_points_in_ball(const ReducedBasis& basis, double R,
                                         PairConvention convention = PairConvention::pairs_once,
                                         std::int64_t box_cap = 50000000) {
  require(R > 0.0, "count_points_in_ball: R must be positive");
  const int N = basis.dim();
  require(N >= 1 && N <= 4, "count_points_in_ball: N must be between 1 and 4");
  const Eigen::MatrixXd G = basis.V.transpose() * basis.V;
  const Eigen::MatrixXd Ginv = G.inverse();
  std::vector<std::int64_t> bound(N);
  double box = 1.0;
  for (int i = 0; i < N; ++i) {
    bound[i] = static_cast<std::int64_t>(std::floor(R * std::sqrt(Ginv(i, i)) + 1e-9));
    box *= 2.0 * bound[i] + 1.0;
  }
  if (box > static_cast<double>(box_cap))
    throw InputError("count_points_in_ball: enumeration box of " + std::to_string(box) +
                     " points exceeds the cap; reduce the basis or lower R");
  const double R2 = R * R * (1.0 + 1e-12);
  std::int64_t count = 0;
  std::vector<std::int64_t> n(N);
  for (int i = 0; i < N; ++i) n[i] = -bound[i];
  Eigen::VectorXd coeff(N);
  while (true) {
    bool zero = true;
    for (int i = 0; i < N; ++i) {
      coeff(i) = static_cast<double>(n[i]);
      zero = zero && n[i] == 0;
    }
    if (!zero && coeff.dot(G * coeff) <= R2) ++count;
    int i = 0;
    while (i < N && n[i] == bound[i]) {
      n[i] = -bound[i];
      ++i;
    }
    if (i == N) break;
    ++n[i];
  }
  return convention == PairConvention::both_signs ? count : count / 2;
}

/// Whether two bases generate the same lattice: B^{-1} C must be an integer
/// matrix (to 1e-6) with determinant +-1.
inline bool same_lattice(const Eigen::MatrixXd& B, const Eigen::MatrixXd& C, double tol = 1e-6) {
  if (B.rows() != C.rows() || B.cols() != C.cols()) return false;
  const Eigen::MatrixXd U = B.fullPivLu().solve(C);
  Eigen::MatrixXd rounded = U;
  for (int i = 0; i < U.rows(); ++i)
    for (int j = 0; j < U.cols(); ++j) {
      rounded(i, j) = std::round(U(i, j));
      if (std::abs(U(i, j) - rounded(i, j)) > tol) return false;
    }
  if (std::abs(std::abs(rounded.determinant()) - 1.0) > 1e-9) return false;
  return (B * rounded - C).cwiseAbs().maxCoeff() <= tol * std::max(1.0, C.cwiseAbs().maxCoeff());
}

}  // namespace unimodular
