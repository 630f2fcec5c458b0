#pragma once

// Haar-distributed SL_N(R) matrices with bounded norm, built from their
// singular value decomposition.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "unimodular/errors.hpp"
#include "unimodular/rng.hpp"
#include "unimodular/volumes.hpp"

namespace unimodular {

/// Singular values in descending order with unit product.
struct SingularValues {
  std::vector<double> sigma;

  int size() const { return static_cast<int>(sigma.size()); }
  double product() const {
    double p = 1.0;
    for (double s : sigma) p *= s;
    return p;
  }
  double sum_of_squares() const {
    double acc = 0.0;
    for (double s : sigma) acc += s * s;
    return acc;
  }
  bool strictly_descending() const {
    for (std::size_t i = 1; i < sigma.size(); ++i)
      if (!(sigma[i - 1] > sigma[i])) return false;
    return !sigma.empty() && sigma.back() > 0.0;
  }
};

/// Whether `sv` lies in the truncated constraint set: unit product, strict
/// ordering R > s_1 > ... > s_N > 0, and sum s^2 <= R^2 for the 2-norm.
inline bool satisfies_constraints(const SingularValues& sv, double R, Norm norm = Norm::operator_norm) {
  if (!sv.strictly_descending()) return false;
  if (std::abs(sv.product() - 1.0) > 1e-12) return false;
  if (norm == Norm::two_norm) return sv.sum_of_squares() <= R * R;
  return sv.sigma.front() < R;
}

struct SampleMatrix {
  Eigen::MatrixXd M;
  Eigen::MatrixXd O1;
  Eigen::MatrixXd O2;
  SingularValues sv;
};

struct ChainConfig {
  std::int64_t steps = 500000;
  std::int64_t burn_in = -1;  // negative: 10% of steps
  std::int64_t thin = 10;
  double step_sigma = 1.0;
  double target_rejection = 0.5;
  std::uint64_t seed = 1;
  bool fixed_step = false;  // disable burn-in tuning; step ~ N(0, 1) throughout
  Norm norm = Norm::operator_norm;

  std::int64_t effective_burn_in() const { return burn_in < 0 ? steps / 10 : burn_in; }

  void validate() const {
    require(steps > 0, "ChainConfig: steps must be positive");
    require(effective_burn_in() < steps, "ChainConfig: burn_in must be < steps");
    require(thin >= 1, "ChainConfig: thin must be >= 1");
    require(step_sigma > 0.0, "ChainConfig: step_sigma must be positive");
    require(target_rejection > 0.0 && target_rejection < 1.0,
            "ChainConfig: target_rejection must lie in (0, 1)");
    require(norm != Norm::condition, "ChainConfig: condition-number truncation is not sampled");
  }
};

struct ChainStats {
  std::int64_t proposals = 0;  // after burn-in
  std::int64_t accepted = 0;   // after burn-in
  std::int64_t ordering_rejections = 0;
  std::int64_t emitted = 0;
  double final_step_sigma = 0.0;
  double max_energy_drift = 0.0;

  double acceptance_rate() const {
    return proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  }
};

/// Haar-distributed orthogonal matrix: Gram-Schmidt on a Gaussian matrix
/// (modified Gram-Schmidt, applied twice for orthogonality to rounding level).
inline Eigen::MatrixXd sample_haar_orthogonal(int N, SplitMix64& rng) {
  require(N >= 1, "sample_haar_orthogonal: N must be >= 1");
  Eigen::MatrixXd Q(N, N);
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) Q(i, j) = rng.normal();
    bool degenerate = false;
    for (int j = 0; j < N && !degenerate; ++j) {
      const double original = Q.col(j).norm();
      for (int pass = 0; pass < 2; ++pass)
        for (int k = 0; k < j; ++k) Q.col(j) -= Q.col(k).dot(Q.col(j)) * Q.col(k);
      const double norm = Q.col(j).norm();
      if (norm < 1e-8 * original) degenerate = true;
      else Q.col(j) /= norm;
    }
    if (!degenerate) return Q;
  }
  throw NonConvergence("sample_haar_orthogonal: repeated rank-deficient Gaussian draws");
}

/// Effective operator-norm bound for N = 2: the 2-norm ball s_1^2 + s_1^{-2} <= R^2
/// is s_1 <= R~ with R~^2 = (R^2 + sqrt(R^4 - 4)) / 2.
inline double n2_effective_bound(double R, Norm norm) {
  if (norm == Norm::operator_norm) return R;
  require(norm == Norm::two_norm, "n2_effective_bound: unsupported norm");
  require(R * R > 2.0, "n2_effective_bound: 2-norm bound needs R > sqrt(2)");
  return std::sqrt(0.5 * (R * R + std::sqrt(R * R * R * R - 4.0)));
}

/// Inverse-CDF map for N = 2: u in [0, 1] -> (r, 1/r).
inline SingularValues sv_n2_from_uniform(double R, double u) {
  require(R > 1.0, "sv_n2_from_uniform: R must exceed 1");
  require(u >= 0.0 && u <= 1.0, "sv_n2_from_uniform: u must lie in [0, 1]");
  const double d = R - 1.0 / R;
  const double r = 0.5 * (d * std::sqrt(u) + std::sqrt(d * d * u + 4.0));
  return {{r, 1.0 / r}};
}

/// Exact sample of the N = 2 singular values under the given norm bound.
inline SingularValues sample_sv_n2(double R, SplitMix64& rng, Norm norm = Norm::operator_norm) {
  require(R > 1.0, "sample_sv_n2: R must exceed 1");
  return sv_n2_from_uniform(n2_effective_bound(R, norm), rng.uniform());
}

/// Dirichlet construction from given positive weights y_j.
inline SingularValues dirichlet_from_weights(const std::vector<double>& y, double R) {
  require(y.size() >= 2, "dirichlet_from_weights: need N >= 2 weights");
  require(R > 1.0, "dirichlet_from_weights: R must exceed 1");
  const double total = std::accumulate(y.begin(), y.end(), 0.0);
  const double N = static_cast<double>(y.size());
  std::vector<double> X(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) {
    require(y[j] > 0.0, "dirichlet_from_weights: weights must be positive");
    X[j] = ((y[j] / total - 1.0 / N) / (1.0 - 1.0 / N)) * std::log(R);
  }
  // Centre exactly so that the product is 1 to rounding.
  const double mean = std::accumulate(X.begin(), X.end(), 0.0) / N;
  SingularValues sv;
  for (double x : X) sv.sigma.push_back(std::exp(x - mean));
  std::sort(sv.sigma.begin(), sv.sigma.end(), std::greater<>());
  return sv;
}

/// Random initial configuration satisfying the constraints; for the 2-norm the
/// log-spectrum is shrunk toward 0 until sum s^2 <= R^2 holds.
inline SingularValues dirichlet_initial(int N, double R, SplitMix64& rng, Norm norm = Norm::operator_norm) {
  require(N >= 2, "dirichlet_initial: N must be >= 2");
  require(R > 1.0, "dirichlet_initial: R must exceed 1");
  if (norm == Norm::two_norm) require(R * R > N, "dirichlet_initial: 2-norm bound needs R^2 > N");
  std::vector<double> y(N);
  for (auto& v : y) v = rng.exponential();
  SingularValues sv = dirichlet_from_weights(y, R);
  while (norm == Norm::two_norm && sv.sum_of_squares() > R * R) {
    for (auto& s : sv.sigma) s = std::sqrt(s);
    const double p = sv.product();
    for (auto& s : sv.sigma) s /= std::pow(p, 1.0 / N);
  }
  return sv;
}

namespace detail {

inline double pair_log(double a, double b) { return std::log(std::abs(a * a - b * b)); }

inline double energy(const std::vector<double>& s) {
  double e = 0.0;
  for (std::size_t j = 0; j < s.size(); ++j)
    for (std::size_t k = j + 1; k < s.size(); ++k) e -= pair_log(s[j], s[k]);
  return e;
}

}  // namespace detail

/// Constrained Metropolis chain over (s_1, ..., s_{N-1}) with s_N = 1/prod.
/// `sink(step, sv)` receives every thin-th state after burn-in.
template <typename Sink>
ChainStats mcmc_sv(int N, double R, const ChainConfig& cfg, const SingularValues& init, Sink&& sink) {
  require(N >= 3, "mcmc_sv: N must be >= 3 (use sample_sv_n2 for N = 2)");
  cfg.validate();
  require(init.size() == N, "mcmc_sv: initial state has wrong dimension");
  require(satisfies_constraints(init, R, cfg.norm),
          "mcmc_sv: initial state violates the ordering/product/norm constraints");

  SplitMix64 rng(cfg.seed);
  std::vector<double> s = init.sigma;
  std::vector<double> trial = s;
  double E = detail::energy(s);
  double step = cfg.step_sigma;
  const std::int64_t burn_in = cfg.effective_burn_in();
  const double R2 = R * R;
  ChainStats stats;
  std::int64_t window_rejections = 0;
  std::int64_t window_size = 0;
  SingularValues emitted;

  for (std::int64_t t = 1; t <= cfg.steps; ++t) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(N - 1)));
    const double gamma = step * rng.normal();
    trial[j] = s[j] + gamma;
    double prod = 1.0;
    for (int l = 0; l < N - 1; ++l) prod *= trial[l];
    trial[N - 1] = 1.0 / prod;

    bool valid = trial[0] < R && trial[N - 1] > 0.0;
    for (int l = 1; l < N && valid; ++l) valid = trial[l - 1] > trial[l];
    if (valid && cfg.norm == Norm::two_norm) {
      double sq = 0.0;
      for (double v : trial) sq += v * v;
      valid = sq <= R2;
    }

    bool accepted = false;
    if (valid) {
      // Only pairs touching j or N change.
      double dE = 0.0;
      for (int l = 0; l < N; ++l) {
        if (l != j && l != N - 1) {
          dE -= detail::pair_log(trial[j], trial[l]) - detail::pair_log(s[j], s[l]);
          dE -= detail::pair_log(trial[N - 1], trial[l]) - detail::pair_log(s[N - 1], s[l]);
        }
      }
      dE -= detail::pair_log(trial[j], trial[N - 1]) - detail::pair_log(s[j], s[N - 1]);
      const double ratio = (trial[N - 1] / s[N - 1]) * std::exp(-dE);
      if (ratio >= 1.0 || rng.uniform() < ratio) {
        accepted = true;
        s = trial;
        E += dE;
      }
    }
    if (!accepted) {
      trial = s;
      if (!valid) ++stats.ordering_rejections;
    }

    if (t <= burn_in) {
      if (!cfg.fixed_step) {
        ++window_size;
        if (!accepted) ++window_rejections;
        if (window_size == 500) {
          const double rejection = static_cast<double>(window_rejections) / 500.0;
          step *= (rejection > cfg.target_rejection) ? 0.9 : 1.1;
          window_size = 0;
          window_rejections = 0;
        }
      }
    } else {
      ++stats.proposals;
      if (accepted) ++stats.accepted;
      if ((t - burn_in) % cfg.thin == 0) {
        emitted.sigma = s;
        sink(t, static_cast<const SingularValues&>(emitted));
        ++stats.emitted;
      }
    }

    if (t % 10000 == 0) {
      const double full = detail::energy(s);
      const double drift = std::abs(full - E);
      stats.max_energy_drift = std::max(stats.max_energy_drift, drift);
      if (drift > 1e-9 * std::max(1.0, std::abs(full)))
        throw NonConvergence("mcmc_sv: incremental energy drifted by " + std::to_string(drift));
      E = full;
    }
  }
  stats.final_step_sigma = step;
  return stats;
}

/// Convenience overload collecting the emitted states.
inline std::vector<SingularValues> mcmc_sv(int N, double R, const ChainConfig& cfg,
                                           const SingularValues& init, ChainStats* stats = nullptr) {
  std::vector<SingularValues> out;
  auto st = mcmc_sv(N, R, cfg, init, [&](std::int64_t, const SingularValues& sv) { out.push_back(sv); });
  if (stats) *stats = st;
  return out;
}

/// Density of s_1 at N = 3: d/ds J_3(s) / J_3(R) on (1, R).
inline double p3_density(double s, double R) {
  require(R > 1.0, "p3_density: R must exceed 1");
  if (!(s > 1.0 && s < R)) return 0.0;
  const double numerator =
      0.25 * (std::pow(s, 5) + std::pow(s, -7)) - (s * s + std::pow(s, -4)) + 1.5 / s;
  return numerator / j_closed(3, R).value;
}

inline double p3_cdf(double s, double R) {
  require(R > 1.0, "p3_cdf: R must exceed 1");
  if (s <= 1.0) return 0.0;
  if (s >= R) return 1.0;
  return j_closed(3, s).value / j_closed(3, R).value;
}

/// M = O1 diag(sv) O2^T with Haar O1, O2; a column of O1 is negated if needed so det M = +1.
inline SampleMatrix assemble_matrix(const SingularValues& sv, SplitMix64& rng) {
  const int N = sv.size();
  require(N >= 1, "assemble_matrix: empty spectrum");
  require(std::abs(sv.product() - 1.0) < 1e-9, "assemble_matrix: singular values must have unit product");
  SampleMatrix out;
  out.sv = sv;
  out.O1 = sample_haar_orthogonal(N, rng);
  out.O2 = sample_haar_orthogonal(N, rng);
  if (out.O1.determinant() * out.O2.determinant() < 0.0) out.O1.col(0) *= -1.0;
  Eigen::VectorXd d(N);
  for (int i = 0; i < N; ++i) d(i) = sv.sigma[i];
  out.M = out.O1 * d.asDiagonal() * out.O2.transpose();
  return out;
}

}  // namespace unimodular
