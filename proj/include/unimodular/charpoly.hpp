#pragma once

// Averaged characteristic polynomial of the squared singular values of the
// operator-norm truncated SL_N(R) ensemble, and its zeros.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <string>
#include <vector>

#include "unimodular/errors.hpp"
#include "unimodular/sampler.hpp"
#include "unimodular/specfun.hpp"
#include "unimodular/volumes.hpp"

namespace unimodular {

struct AveragedCharPoly {
  int N = 0;
  double R = 0.0;
  std::vector<double> coefficients;        // c_0 .. c_N
  std::vector<double> coefficient_errors;  // absolute
  std::vector<double> zeros;               // ascending, empty until charpoly_zeros
  double normalization = 0.0;              // J~_N(R)

  double evaluate(double x) const {
    double acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
  double derivative(double x) const {
    double acc = 0.0;
    for (int k = static_cast<int>(coefficients.size()) - 1; k >= 1; --k) acc = acc * x + k * coefficients[k];
    return acc;
  }
};

inline constexpr int charpoly_max_n = 15;

namespace detail {

inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Log of the c_k integrand, including binomial(N, k) R^{-2k}, without the sign and J~.
inline cplx log_charpoly_integrand(int N, int k, double log_R, cplx s) {
  cplx acc = static_cast<double>(N) * (s + 2.0) * log_R - 2.0 * k * log_R + log_binomial(N, k);
  // Gamma(s)/Gamma(s+k) and Gamma(N+s+1+k)/Gamma(N+s+1) as finite products.
  for (int i = 0; i < k; ++i)
    acc += std::log(static_cast<double>(N + 1 + i) + s) - std::log(s + static_cast<double>(i));
  for (int j = 0; j < N; ++j)
    acc += log_gamma(0.5 * (s + static_cast<double>(j)) + 1.0) -
           log_gamma(0.5 * (s + static_cast<double>(N + 1 + j)) + 1.0);
  return acc;
}

// Minimiser of the real log-integrand on (pole_bound, pole_bound + 400): the
// abscissa where the line integral cancels least. Golden section; log f is
// convex there and blows up at the pole. The given abscissa is kept if better.
template <typename LogF>
double saddle_abscissa(const LogF& log_f, double pole_bound, double given) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = pole_bound + 1e-6, b = pole_bound + 400.0;
  auto val = [&](double c) { return log_f(cplx(c, 0.0)).real(); };
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = val(x1), f2 = val(x2);
  while (b - a > 1e-3 * (1.0 + std::abs(a))) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = val(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = val(x2);
    }
  }
  const double c = 0.5 * (a + b);
  return val(c) < val(given) ? c : given;
}

// Contour through the saddle; the half-height grows with the abscissa.
template <typename LogF>
ContourSpec saddle_contour(const ContourSpec& spec, const LogF& log_f, double pole_bound) {
  ContourSpec out = spec;
  out.abscissa = saddle_abscissa(log_f, pole_bound, spec.abscissa);
  out.half_height = std::max(spec.half_height, spec.half_height * out.abscissa / spec.abscissa);
  return out;
}

}  // namespace detail

/// Coefficients c_0..c_N of p_N(x) = <prod (x - s_l^2)>, each from its own
/// inverse Mellin integral divided by J~_N(R). c_N = 1 is checked, not imposed.
inline AveragedCharPoly charpoly_coefficients(int N, double R, const ContourSpec& spec, bool parallel = false) {
  require(N >= 2, "charpoly_coefficients: N must be >= 2");
  require(N <= charpoly_max_n, "charpoly_coefficients: N = " + std::to_string(N) +
                                   " exceeds the supported maximum of 15 (contour cancellation)");
  require(R > 1.0, "charpoly_coefficients: R must exceed 1");
  spec.validate(0.0);
  const double log_R = std::log(R);
  const double decay = 0.5 * N * (N + 1);

  // Each integral runs through its own saddle abscissa; for R near 1 or
  // large N a fixed line cancels badly. c_0 has no pole at 0 (bound -2).
  auto normalization = [&] {
    auto log_f = [&](cplx s) { return log_j_mellin_kernel(N, log_R, s); };
    return inverse_mellin([&](cplx s) { return std::exp(log_f(s)); }, detail::saddle_contour(spec, log_f, 0.0), decay);
  };
  auto coefficient_integral = [&](int k) {
    auto log_f = [&, k](cplx s) { return detail::log_charpoly_integrand(N, k, log_R, s); };
    return inverse_mellin([&](cplx s) { return std::exp(log_f(s)); },
                          detail::saddle_contour(spec, log_f, k == 0 ? -2.0 : 0.0), decay);
  };

  MellinResult jt;
  std::vector<MellinResult> raw(N + 1);
  if (parallel) {
    auto jt_future = std::async(std::launch::async, normalization);
    std::vector<std::future<MellinResult>> futures;
    for (int k = 0; k <= N; ++k) futures.push_back(std::async(std::launch::async, coefficient_integral, k));
    jt = jt_future.get();
    for (int k = 0; k <= N; ++k) raw[k] = futures[k].get();
  } else {
    jt = normalization();
    for (int k = 0; k <= N; ++k) raw[k] = coefficient_integral(k);
  }
  require(jt.value > 0.0, "charpoly_coefficients: normalisation integral is not positive");

  AveragedCharPoly out;
  out.N = N;
  out.R = R;
  out.normalization = jt.value;
  for (int k = 0; k <= N; ++k) {
    const double sign = ((N - k) % 2 == 0) ? 1.0 : -1.0;
    const double c = sign * raw[k].value / jt.value;
    out.coefficients.push_back(c);
    out.coefficient_errors.push_back(std::abs(c) * (raw[k].abs_error / std::max(std::abs(raw[k].value), 1e-300) +
                                                    jt.abs_error / jt.value));
  }
  const double top_err = std::max(1e-8, 10.0 * out.coefficient_errors[N]);
  if (std::abs(out.coefficients[N] - 1.0) > top_err)
    throw NonConvergence("charpoly_coefficients: leading coefficient " + std::to_string(out.coefficients[N]) +
                         " is not 1; contour under-resolved");
  return out;
}

/// Real zeros of the polynomial via companion-matrix eigenvalues and two
/// Newton steps; checks reality, simplicity, support (0, R^2) and unit product.
inline AveragedCharPoly charpoly_zeros(AveragedCharPoly poly, bool check_invariants = true) {
  const int N = poly.N;
  require(N >= 1 && static_cast<int>(poly.coefficients.size()) == N + 1,
          "charpoly_zeros: coefficients not populated");
  const double lead = poly.coefficients[N];
  require(lead != 0.0, "charpoly_zeros: zero leading coefficient");
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(N, N);
  for (int i = 1; i < N; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < N; ++i) companion(i, N - 1) = -poly.coefficients[i] / lead;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) throw NonConvergence("charpoly_zeros: eigenvalue iteration failed");
  std::vector<double> zeros;
  for (int i = 0; i < N; ++i) {
    const auto lambda = solver.eigenvalues()[i];
    if (std::abs(lambda.imag()) > 1e-8 * std::max(1.0, std::abs(lambda)))
      throw ComplexRootPair("charpoly_zeros: complex root pair near " + std::to_string(lambda.real()) + " +- " +
                            std::to_string(std::abs(lambda.imag())) + "i; coefficients under-resolved or the monomial basis is too ill-conditioned for clustered zeros");
    zeros.push_back(lambda.real());
  }
  for (double& x : zeros)
    for (int pass = 0; pass < 2; ++pass) {
      const double d = poly.derivative(x);
      if (d != 0.0) x -= poly.evaluate(x) / d;
    }
  std::sort(zeros.begin(), zeros.end());
  poly.zeros = zeros;
  if (!check_invariants) return poly;

  for (int i = 1; i < N; ++i)
    if (zeros[i] - zeros[i - 1] < 1e-10 * std::max(1.0, zeros[i]))
      throw NonConvergence("charpoly_zeros: repeated zero near " + std::to_string(zeros[i]));
  for (double x : zeros)
    if (!(x > 0.0 && x < poly.R * poly.R))
      throw NonConvergence("charpoly_zeros: zero " + std::to_string(x) + " outside (0, R^2)");
  double prod = 1.0;
  for (double x : zeros) prod *= x;
  if (std::abs(prod - 1.0) > 1e-6)
    throw NonConvergence("charpoly_zeros: zeros multiply to " + std::to_string(prod) + ", not 1");
  return poly;
}

/// Monte Carlo estimate of the coefficients with batch-means standard errors.
struct McCharPoly {
  std::vector<double> coefficients;
  std::vector<double> standard_errors;
  std::int64_t samples = 0;
};

/// Coefficients of prod (x - s_l^2) averaged over the truncated ensemble:
/// exact sampling for N = 2, Metropolis chain otherwise.
inline McCharPoly mc_charpoly_oracle(int N, double R, std::int64_t samples, std::uint64_t seed, int batches = 50) {
  require(N >= 2, "mc_charpoly_oracle: N must be >= 2");
  require(R > 1.0, "mc_charpoly_oracle: R must exceed 1");
  require(samples >= 2 * batches && batches >= 2, "mc_charpoly_oracle: need at least two samples per batch");
  const std::int64_t per_batch = samples / batches;
  std::vector<std::vector<double>> batch_sums(batches, std::vector<double>(N + 1, 0.0));
  std::int64_t index = 0;
  auto accumulate = [&](const SingularValues& sv) {
    const std::int64_t b = index / per_batch;
    ++index;
    if (b >= batches) return;
    // Expand prod (x - s^2) into monomial coefficients.
    std::vector<double> e(N + 1, 0.0);
    e[0] = 1.0;
    int degree = 0;
    for (double s : sv.sigma) {
      const double root = s * s;
      for (int k = degree + 1; k >= 1; --k) e[k] = e[k - 1] - root * e[k];
      e[0] = -root * e[0];
      ++degree;
    }
    for (int k = 0; k <= N; ++k) batch_sums[b][k] += e[k];
  };

  SplitMix64 rng(seed);
  if (N == 2) {
    for (std::int64_t i = 0; i < per_batch * batches; ++i) accumulate(sample_sv_n2(R, rng));
  } else {
    ChainConfig cfg;
    cfg.thin = 10;
    cfg.burn_in = 20000;
    cfg.steps = cfg.burn_in + per_batch * batches * cfg.thin;
    cfg.seed = derive_seed(seed, 1);
    const auto init = dirichlet_initial(N, R, rng);
    mcmc_sv(N, R, cfg, init, [&](std::int64_t, const SingularValues& sv) { accumulate(sv); });
  }

  McCharPoly out;
  out.samples = per_batch * batches;
  for (int k = 0; k <= N; ++k) {
    double mean = 0.0;
    for (const auto& b : batch_sums) mean += b[k] / per_batch;
    mean /= batches;
    double var = 0.0;
    for (const auto& b : batch_sums) {
      const double d = b[k] / per_batch - mean;
      var += d * d;
    }
    var /= (batches - 1);
    out.coefficients.push_back(mean);
    out.standard_errors.push_back(std::sqrt(var / batches));
  }
  return out;
}

}  // namespace unimodular
