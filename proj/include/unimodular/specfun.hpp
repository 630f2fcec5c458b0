#pragma once

// Complex log-gamma, integer zeta values, and numerical inverse Mellin
// transforms along a vertical contour.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "unimodular/errors.hpp"
#include "unimodular/quadrature.hpp"

namespace unimodular {

using cplx = std::complex<double>;

namespace detail {

// log sin(pi z), correct modulo 2 pi i, safe for large |Im z|.
inline cplx log_sin_pi(cplx z) {
  const cplx w = std::numbers::pi * z;
  if (std::abs(w.imag()) < 30.0) return std::log(std::sin(w));
  if (w.imag() < 0.0) return std::conj(log_sin_pi(std::conj(z)));
  // sin w = (i/2) e^{-iw} (1 - e^{2iw}), |e^{2iw}| < e^{-60}
  const cplx i{0.0, 1.0};
  return -i * w + std::log(0.5 * i) - std::exp(2.0 * i * w);
}

// Lanczos approximation, g = 7, nine terms; valid for Re z >= 0.5.
inline cplx log_gamma_lanczos(cplx z) {
  static constexpr std::array<double, 9> coeff = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double g = 7.0;
  const cplx zm = z - 1.0;
  cplx series = coeff[0];
  for (int k = 1; k < 9; ++k) series += coeff[k] / (zm + static_cast<double>(k));
  const cplx t = zm + (g + 0.5);
  return 0.5 * std::log(2.0 * std::numbers::pi) + (zm + 0.5) * std::log(t) - t + std::log(series);
}

}  // namespace detail

/// Principal-branch log Gamma(z).
///
/// For Re z < 0.5 the value is obtained by upward recurrence when at most 256
/// shifts are needed (exact principal branch), otherwise by reflection, which
/// fixes the value only modulo 2 pi i. Either way exp(log_gamma(z)) = Gamma(z).
inline cplx log_gamma(cplx z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
    throw InputError("log_gamma: pole at non-positive integer " + std::to_string(z.real()));
  if (z.real() >= 0.5) return detail::log_gamma_lanczos(z);
  const double shifts = std::ceil(0.5 - z.real());
  if (shifts <= 256.0) {
    const int m = static_cast<int>(shifts);
    cplx acc = detail::log_gamma_lanczos(z + static_cast<double>(m));
    for (int k = 0; k < m; ++k) acc -= std::log(z + static_cast<double>(k));
    return acc;
  }
  return std::log(std::numbers::pi) - detail::log_sin_pi(z) - detail::log_gamma_lanczos(1.0 - z);
}

/// zeta(n) for integer n >= 2 by Euler-Maclaurin summation.
inline double riemann_zeta_int(int n) {
  require(n >= 2, "riemann_zeta_int: n must be >= 2, got " + std::to_string(n));
  // B_{2j} / (2j)!
  static constexpr std::array<double, 8> bernoulli_over_factorial = {
      1.0 / 6.0 / 2.0,
      -1.0 / 30.0 / 24.0,
      1.0 / 42.0 / 720.0,
      -1.0 / 30.0 / 40320.0,
      5.0 / 66.0 / 3628800.0,
      -691.0 / 2730.0 / 479001600.0,
      7.0 / 6.0 / 87178291200.0,
      -3617.0 / 510.0 / 20922789888000.0};
  constexpr int cutoff = 16;
  const double s = n;
  double sum = 0.0;
  for (int k = cutoff - 1; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
  const double K = cutoff;
  sum += std::pow(K, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(K, -s);
  double rising = s;  // s (s+1) ... (s + 2j - 2)
  double power = std::pow(K, -s - 1.0);
  for (std::size_t j = 0; j < bernoulli_over_factorial.size(); ++j) {
    sum += bernoulli_over_factorial[j] * rising * power;
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    power /= K * K;
  }
  return sum;
}

enum class QuadRule { trapezoid, adaptive_bisection };

/// How the contour beyond |Im s| = T is treated.
///  - bent: the contour turns left at c +- iT and runs to Re s = -inf, where the
///    integrand must decay; exact up to quadrature error.
///  - truncated: the line is cut at +-T and a tail bound from the declared
///    polynomial decay exponent is added to the error (T is doubled until the
///    bound is below tail_tol).
enum class TailMode { bent, truncated };

/// Parameters of a vertical-line inverse Mellin quadrature.
struct ContourSpec {
  double abscissa = 1.0;
  double half_height = 4.0;
  int nodes = 33;
  QuadRule rule = QuadRule::trapezoid;
  TailMode tail = TailMode::bent;
  double rel_tol = 1e-11;
  double tail_tol = 1e-10;
  double max_half_height = 1.0e4;
  double max_ray_length = 1.0e6;

  /// Validated contour strictly right of `pole_bound`.
  static ContourSpec right_of(double pole_bound, double abscissa = 1.0, double half_height = 4.0,
                              int nodes = 33, QuadRule rule = QuadRule::trapezoid,
                              TailMode tail = TailMode::bent) {
    ContourSpec spec;
    spec.abscissa = abscissa;
    spec.half_height = half_height;
    spec.nodes = nodes;
    spec.rule = rule;
    spec.tail = tail;
    spec.validate(pole_bound);
    return spec;
  }

  void validate(double pole_bound) const {
    require(abscissa > pole_bound, "ContourSpec: abscissa " + std::to_string(abscissa) +
                                       " must lie right of the pole bound " +
                                       std::to_string(pole_bound));
    require(half_height > 0.0, "ContourSpec: half_height must be positive");
    require(nodes >= 3 && nodes % 2 == 1, "ContourSpec: nodes must be odd and >= 3");
    require(rel_tol > 0.0 && tail_tol > 0.0, "ContourSpec: tolerances must be positive");
  }

  ContourSpec shifted(double dc) const {
    ContourSpec s = *this;
    s.abscissa += dc;
    return s;
  }
};

struct MellinResult {
  double value = 0.0;
  double abs_error = 0.0;
  double imag_residual = 0.0;
  double half_height = 0.0;
  int evaluations = 0;
};

namespace detail {

// Romberg-extrapolated trapezoid over [-T, T]; nodes doubled until two
// successive diagonal entries agree to `tol`.
template <typename F>
quad::Result<cplx> romberg_line(F& g, double T, int nodes, double rel_tol, double abs_floor) {
  quad::Result<cplx> out;
  const int base_intervals = nodes - 1;
  double h = 2.0 * T / base_intervals;
  cplx sum = 0.5 * (g(-T) + g(T));
  for (int k = 1; k < base_intervals; ++k) sum += g(-T + k * h);
  out.evaluations = nodes;
  std::vector<cplx> previous{sum * h};
  int intervals = base_intervals;
  for (int level = 1; level <= 22; ++level) {
    for (int k = 0; k < intervals; ++k) sum += g(-T + (k + 0.5) * h);
    out.evaluations += intervals;
    intervals *= 2;
    h *= 0.5;
    std::vector<cplx> row{sum * h};
    double factor = 4.0;
    for (std::size_t j = 1; j <= previous.size(); ++j) {
      row.push_back(row[j - 1] + (row[j - 1] - previous[j - 1]) / (factor - 1.0));
      factor *= 4.0;
    }
    const double change = std::abs(row.back() - previous.back());
    previous = std::move(row);
    if (level >= 2 && change <= std::max(rel_tol * std::abs(previous.back()), abs_floor)) {
      out.value = previous.back();
      out.abs_error = change;
      out.converged = true;
      return out;
    }
  }
  out.value = previous.back();
  out.abs_error = std::abs(previous.back());
  return out;
}

}  // namespace detail

/// (1 / 2 pi i) * integral of `integrand` over Re s = c.
///
/// `decay_exponent` p declares |integrand(c + it)| = O(|t|^{-p}); p <= 1 is
/// rejected, and a crude probe rejects integrands that do not decay. In bent
/// mode the integrand must also decay as Re s -> -inf on |Im s| >= T, which holds
/// for gamma-ratio integrands whose poles lie on the real axis. Only the real
/// part is returned; the imaginary part of the raw quadrature is checked.
template <typename F>
MellinResult inverse_mellin(F&& integrand, const ContourSpec& spec, double decay_exponent) {
  spec.validate(-std::numeric_limits<double>::infinity());
  require(decay_exponent > 1.0,
          "inverse_mellin: declared decay exponent must exceed 1 (integrand is not integrable)");
  const double c = spec.abscissa;
  const cplx i{0.0, 1.0};
  {
    const double t_probe = std::max(spec.half_height, 8.0);
    const double near = std::abs(integrand(cplx{c, t_probe}));
    const double far = std::abs(integrand(cplx{c, 16.0 * t_probe}));
    if (!(far < near) && near > 0.0)
      throw InputError("inverse_mellin: integrand does not decay along the contour");
  }

  MellinResult out;
  const double scale = std::max(std::abs(integrand(cplx{c, 0.0})), 1e-300);
  double T = spec.half_height;
  double tail_bound = 0.0;
  if (spec.tail == TailMode::truncated) {
    auto bound_at = [&](double height) {
      const double mag = std::max(std::abs(integrand(cplx{c, height})),
                                  std::abs(integrand(cplx{c, -height})));
      return 2.0 * mag * height / (decay_exponent - 1.0) / (2.0 * std::numbers::pi);
    };
    tail_bound = bound_at(T);
    while (tail_bound > spec.tail_tol && 2.0 * T <= spec.max_half_height) {
      T *= 2.0;
      tail_bound = bound_at(T);
    }
    if (tail_bound > spec.tail_tol)
      throw TailBoundExceeded("inverse_mellin: tail bound " + std::to_string(tail_bound) +
                              " exceeds tolerance at T = " + std::to_string(T) +
                              "; raise max_half_height or use the bent contour");
  }
  out.half_height = T;

  // Cancellation floor: nothing below ~1e-15 of the integrand size is resolvable.
  const double abs_floor = 1e-15 * scale * 2.0 * T;
  auto on_line = [&](double t) { return integrand(cplx{c, t}); };
  quad::Result<cplx> line;
  if (spec.rule == QuadRule::trapezoid) {
    line = detail::romberg_line(on_line, T, spec.nodes, spec.rel_tol, abs_floor);
  } else {
    quad::Options opts;
    opts.rel_tol = spec.rel_tol;
    opts.abs_tol = abs_floor;
    opts.max_subdivisions = 20000;
    line = quad::integrate<cplx>(on_line, -T, T, opts);
  }
  if (!line.converged)
    throw NonConvergence("inverse_mellin: vertical segment did not converge (rule " +
                         std::string(spec.rule == QuadRule::trapezoid ? "trapezoid" : "adaptive") +
                         ")");
  out.evaluations += line.evaluations;
  cplx total = i * line.value;
  double error = line.abs_error + tail_bound * 2.0 * std::numbers::pi;

  if (spec.tail == TailMode::bent) {
    const double target = std::max(spec.rel_tol * std::abs(line.value), abs_floor);
    // Integral over u in [0, inf) of integrand(c - u + i*height).
    auto ray = [&](double height) {
      auto along = [&](double u) { return integrand(cplx{c - u, height}); };
      quad::Options opts;
      opts.rel_tol = spec.rel_tol;
      opts.abs_tol = 0.1 * target;
      opts.max_subdivisions = 4000;
      cplx acc = 0.0;
      double err = 0.0;
      double start = 0.0;
      double length = std::max(spec.half_height, 2.0);
      double previous_mag = std::numeric_limits<double>::infinity();
      int growing = 0;
      while (true) {
        auto piece = quad::integrate<cplx>(along, start, start + length, opts);
        out.evaluations += piece.evaluations;
        if (!piece.converged)
          throw NonConvergence("inverse_mellin: leftward tail panel did not converge");
        acc += piece.value;
        err += piece.abs_error;
        start += length;
        const double mag = std::abs(piece.value);
        const double edge = std::abs(along(start)) * length;
        if (mag <= 0.01 * target && edge <= 0.01 * target) break;
        growing = (mag > previous_mag) ? growing + 1 : 0;
        if (growing >= 4)
          throw NonConvergence(
              "inverse_mellin: integrand grows along the leftward tail; the contour cannot be "
              "closed to the left");
        previous_mag = mag;
        if (start > spec.max_ray_length)
          throw NonConvergence("inverse_mellin: leftward tail longer than max_ray_length");
        length *= 2.0;
      }
      return std::pair{acc, err};
    };
    const auto [lower, lower_err] = ray(-T);
    const auto [upper, upper_err] = ray(T);
    total += lower - upper;
    error += lower_err + upper_err;
  }

  const cplx result = total / (2.0 * std::numbers::pi * i);
  out.value = result.real();
  out.imag_residual = result.imag();
  out.abs_error = error / (2.0 * std::numbers::pi) + abs_floor;
  if (std::abs(result.imag()) > 1e-8 * std::abs(result.real()) + 10.0 * out.abs_error)
    throw NonConvergence("inverse_mellin: imaginary part " + std::to_string(result.imag()) +
                         " violates conjugate symmetry (real part " +
                         std::to_string(result.real()) + ")");
  return out;
}

}  // namespace unimodular
