#pragma once

// Exact N = 2 fundamental-domain statistics, floor-sum identities, and the
// brute-force SL_2(Z) count.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "unimodular/errors.hpp"
#include "unimodular/quadrature.hpp"
#include "unimodular/volumes.hpp"

namespace unimodular {

inline const double shortest_length_max = std::pow(4.0 / 3.0, 0.25);

namespace detail {
// x (x^{-(k+1)} - (x+1)^{-(k+1)}) / (k+1), finite as x -> infinity.
inline double floor_moment_term(int k, double x) {
  return -std::pow(x, -k) * std::expm1(-(k + 1.0) * std::log1p(1.0 / x)) / (k + 1.0);
}
inline double arcsec(double x) { return std::acos(1.0 / x); }
// x^2 - sqrt(x^4 - 1) without cancellation
inline double gap_below_square(double x) { return 1.0 / (x * x + std::sqrt(x * x * x * x - 1.0)); }
}  // namespace detail

/// Density of the shortest vector length, N = 2.
inline double pdf_shortest_n2(double s) {
  if (!(s > 0.0 && s < shortest_length_max)) return 0.0;
  double v = 0.5 * s;
  if (s > 1.0) v -= std::sqrt(s * s - 1.0 / (s * s));
  return 12.0 / std::numbers::pi * std::max(v, 0.0);
}

inline double cdf_shortest_n2(double s) {
  const double pi = std::numbers::pi;
  if (s <= 0.0) return 0.0;
  if (s >= shortest_length_max) return 1.0;
  double F = 3.0 * s * s / pi;
  if (s > 1.0) F -= 6.0 / pi * (std::sqrt(s * s * s * s - 1.0) - detail::arcsec(s * s));
  return F;
}

/// Density of the second basis vector length, N = 2 (two branches joined at (4/3)^{1/4}).
inline double pdf_second_n2(double s) {
  if (!(s > 1.0)) return 0.0;
  const double pre = 12.0 / (std::numbers::pi * s);
  if (s < shortest_length_max) return pre * std::sqrt(s * s * s * s - 1.0);
  return pre * detail::gap_below_square(s);
}

inline double cdf_second_n2(double s) {
  const double pi = std::numbers::pi;
  if (s <= 1.0) return 0.0;
  auto lower = [&](double x) { return 6.0 / pi * (std::sqrt(x * x * x * x - 1.0) - detail::arcsec(x * x)); };
  if (s <= shortest_length_max) return lower(s);
  auto upper = [&](double x) { return 6.0 / pi * (detail::gap_below_square(x) + detail::arcsec(x * x)); };
  return lower(shortest_length_max) + upper(s) - upper(shortest_length_max);
}

/// Density of cos(theta) between the reduced vectors, N = 2:
/// -(3/2pi) log(4 s^2) / (1 - s^2)^{3/2} on 0 < |s| < 1/2.
inline double pdf_cosine_n2(double s) {
  const double a = std::abs(s);
  if (!(a < 0.5)) return 0.0;
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  return -1.5 / std::numbers::pi * std::log(4.0 * a * a) / std::pow(1.0 - a * a, 1.5);
}

/// The same expression with exponent 1/2; not a density (mass about 0.969).
inline double pdf_cosine_n2_half_exponent(double s) {
  const double a = std::abs(s);
  if (!(a < 0.5) || a == 0.0) return a == 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return -1.5 / std::numbers::pi * std::log(4.0 * a * a) / std::sqrt(1.0 - a * a);
}

inline double cdf_cosine_n2(double s) {
  if (s <= -0.5) return 0.0;
  if (s >= 0.5) return 1.0;
  const double G = (s == 0.0 ? 0.0 : s * std::log(4.0 * s * s) / std::sqrt(1.0 - s * s)) - 2.0 * std::asin(s);
  return -1.5 / std::numbers::pi * (G - std::numbers::pi / 3.0);
}

enum class DensityKind { shortest, second, cosine };

inline const char* to_string(DensityKind k) {
  switch (k) {
    case DensityKind::shortest: return "shortest";
    case DensityKind::second: return "second";
    case DensityKind::cosine: return "cosine";
  }
  return "?";
}

struct DensityCurve {
  DensityKind kind;
  double lo = 0.0;
  double hi = 0.0;  // for `second` the finite truncation point of the tail
  std::function<double(double)> pdf;
  std::function<double(double)> cdf;
  double normalization_check = 0.0;
};

namespace detail {

inline double normalization(DensityKind kind, double& tail_cut) {
  quad::Options opts;
  opts.rel_tol = 1e-13;
  opts.abs_tol = 1e-15;
  opts.max_subdivisions = 10000;
  switch (kind) {
    case DensityKind::shortest:
      return quad::integrate(pdf_shortest_n2, 0.0, 1.0, opts).value +
             quad::integrate(pdf_shortest_n2, 1.0, shortest_length_max, opts).value;
    case DensityKind::second: {
      // Cut where the density drops below 1e-12 (bisection).
      double a = 2.0, b = 1e6;
      for (int i = 0; i < 200; ++i) {
        const double m = std::sqrt(a * b);
        (pdf_second_n2(m) > 1e-12 ? a : b) = m;
      }
      tail_cut = b;
      double total = quad::integrate(pdf_second_n2, 1.0, shortest_length_max, opts).value;
      for (double x = shortest_length_max; x < tail_cut; x *= 4.0)
        total += quad::integrate(pdf_second_n2, x, std::min(4.0 * x, tail_cut), opts).value;
      return total;
    }
    case DensityKind::cosine: {
      // |s| < eps analytically: 2 * int_0^eps -(3/2pi) log(4 s^2) ds (the
      // (1-s^2)^{-3/2} factor contributes O(eps^3 log eps)).
      const double eps = 1e-4;
      const double inner = -3.0 / std::numbers::pi * (eps * std::log(4.0 * eps * eps) - 2.0 * eps);
      return inner + 2.0 * quad::integrate(pdf_cosine_n2, eps, 0.5, opts).value;
    }
  }
  return 0.0;
}

}  // namespace detail

inline DensityCurve density_curve(DensityKind kind) {
  DensityCurve c{kind, 0.0, 0.0, nullptr, nullptr, 0.0};
  double cut = 0.0;
  c.normalization_check = detail::normalization(kind, cut);
  switch (kind) {
    case DensityKind::shortest:
      c.lo = 0.0;
      c.hi = shortest_length_max;
      c.pdf = pdf_shortest_n2;
      c.cdf = cdf_shortest_n2;
      break;
    case DensityKind::second:
      c.lo = 1.0;
      c.hi = cut;
      c.pdf = pdf_second_n2;
      c.cdf = cdf_second_n2;
      break;
    case DensityKind::cosine:
      c.lo = -0.5;
      c.hi = 0.5;
      c.pdf = pdf_cosine_n2;
      c.cdf = cdf_cosine_n2;
      break;
  }
  return c;
}

/// Volume of SL_2(R)/SL_2^{+-}(Z) in the QR parametrisation: pi^2/3.
inline double vol_tilde_gamma() { return std::numbers::pi * std::numbers::pi / 3.0; }

/// Partial sum  sum_{p=1}^{P} p int_{1/(p+1)}^{1/p} r^k dr  of the floor integral.
inline double floor_moment_partial_sum(int k, std::int64_t p_max) {
  require(k >= 1, "floor_moment_partial_sum: k must be >= 1");
  require(p_max >= 1, "floor_moment_partial_sum: p_max must be >= 1");
  double sum = 0.0;
  for (std::int64_t p = p_max; p >= 1; --p) sum += detail::floor_moment_term(k, static_cast<double>(p));
  return sum;
}

/// int_0^1 floor(1/s) s^k ds by the partial sum plus an Euler-Maclaurin tail.
inline double floor_moment_integral(int k, std::int64_t p_max = 100000) {
  const double head = floor_moment_partial_sum(k, p_max);
  auto term = [k](double x) { return detail::floor_moment_term(k, x); };
  const double M = static_cast<double>(p_max + 1);
  quad::Options opts;
  opts.rel_tol = 1e-13;
  opts.abs_tol = 1e-18;
  const double tail = quad::integrate_to_infinity(term, M, opts).value + 0.5 * term(M);
  return head + tail;
}

/// Ratio of int_0^1 floor(1/s) s ds to pi^2/12.
inline double siegel_integral_identity(std::int64_t p_max = 100000) {
  return floor_moment_integral(1, p_max) / (std::numbers::pi * std::numbers::pi / 12.0);
}

/// #{gamma in SL_2(Z) : ||gamma|| <= R}. Both norms reduce to a Frobenius
/// bound: ||gamma||_Op <= R iff ||gamma||_2^2 <= R^2 + R^{-2} (R >= 1).
inline std::int64_t enumerate_sl2z(double R, Norm norm, double cap = 200.0) {
  require(R > 0.0, "enumerate_sl2z: R must be positive");
  require(R <= cap, "enumerate_sl2z: R = " + std::to_string(R) + " exceeds the cap " + std::to_string(cap));
  require(norm != Norm::condition, "enumerate_sl2z: only operator and two-norm are supported");
  double bound;
  if (norm == Norm::two_norm) {
    bound = R * R;
  } else {
    if (R < 1.0) return 0;
    bound = R * R + 1.0 / (R * R);
  }
  const std::int64_t B = static_cast<std::int64_t>(std::floor(bound * (1.0 + 1e-12)));
  auto isqrt = [](std::int64_t v) {
    if (v < 0) return std::int64_t{-1};
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
    while (r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
  };
  std::int64_t count = 0;
  const std::int64_t ma = isqrt(B);
  for (std::int64_t a = -ma; a <= ma; ++a) {
    const std::int64_t ra = B - a * a;
    const std::int64_t mb = isqrt(ra);
    for (std::int64_t b = -mb; b <= mb; ++b) {
      const std::int64_t rb = ra - b * b;
      const std::int64_t mc = isqrt(rb);
      for (std::int64_t c = -mc; c <= mc; ++c) {
        const std::int64_t rc = rb - c * c;
        if (a != 0) {
          const std::int64_t num = 1 + b * c;
          if (num % a == 0) {
            const std::int64_t d = num / a;
            if (d * d <= rc) ++count;
          }
        } else if (b * c == -1) {
          count += 2 * isqrt(rc) + 1;
        }
      }
    }
  }
  return count;
}

}  // namespace unimodular
