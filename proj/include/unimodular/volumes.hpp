#pragma once

// Volumes of norm-truncated regions of GL_N(R) and SL_N(R): closed forms,
// contour integrals, direct quadrature, and the large-R constants.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "unimodular/errors.hpp"
#include "unimodular/quadrature.hpp"
#include "unimodular/specfun.hpp"

namespace unimodular {

enum class Norm { operator_norm, two_norm, condition };

inline const char* to_string(Norm n) {
  switch (n) {
    case Norm::operator_norm: return "op";
    case Norm::two_norm: return "l2";
    case Norm::condition: return "cond";
  }
  return "?";
}

enum class VolumeMethod { closed_form, contour, quadrature };

inline const char* to_string(VolumeMethod m) {
  switch (m) {
    case VolumeMethod::closed_form: return "closed-form";
    case VolumeMethod::contour: return "contour";
    case VolumeMethod::quadrature: return "quadrature";
  }
  return "?";
}

struct VolumeResult {
  double value = 0.0;
  double abs_error = 0.0;
  VolumeMethod method = VolumeMethod::closed_form;
  bool empty_domain = false;
};

/// vol O(N) = 2^N prod_{k=1}^N pi^{k/2} / Gamma(k/2).
inline double vol_orthogonal(int N) {
  require(N >= 1, "vol_orthogonal: N must be >= 1");
  double log_v = N * std::log(2.0);
  for (int k = 1; k <= N; ++k) log_v += 0.5 * k * std::log(std::numbers::pi) - std::lgamma(0.5 * k);
  return std::exp(log_v);
}

/// vol(SL_N(R)/SL_N(Z)) = zeta(2) zeta(3) ... zeta(N).
inline double vol_fundamental(int N) {
  require(N >= 2, "vol_fundamental: N must be >= 2");
  double v = 1.0;
  for (int k = 2; k <= N; ++k) v *= riemann_zeta_int(k);
  return v;
}

namespace detail {

// log of prod_{j=j0}^{j1} Gamma(1 + j/2) Gamma(3/2 + j/2) / Gamma(3/2)
inline double log_selberg_product(int N) {
  double acc = 0.0;
  const double lg32 = std::lgamma(1.5);
  for (int j = 0; j < N; ++j) acc += std::lgamma(1.0 + 0.5 * j) + std::lgamma(1.5 + 0.5 * j) - lg32;
  return acc;
}

inline double log_factorial(int n) { return std::lgamma(n + 1.0); }

// Integral over hi > y_1 > y_2 > ... > y_N > lo of f(y), nested adaptive
// Gauss-Kronrod with the tolerance tightened by 10x per inner level.
template <typename F>
quad::Result<double> nested_ordered(int N, double lo, double hi, F&& f, double rel_tol) {
  std::vector<double> y(N);
  bool all_converged = true;
  int evaluations = 0;
  std::function<double(int, double)> level = [&](int depth, double upper) -> double {
    if (depth == N) {
      ++evaluations;
      return f(y);
    }
    quad::Options opts;
    opts.rel_tol = rel_tol * std::pow(0.1, depth);
    opts.abs_tol = 1e-300;
    opts.max_subdivisions = 200;
    auto r = quad::integrate<double>(
        [&](double v) {
          y[depth] = v;
          return level(depth + 1, v);
        },
        lo, upper, opts);
    if (!r.converged && std::abs(r.value) > 0.0 && r.abs_error > 10.0 * opts.rel_tol * std::abs(r.value))
      all_converged = false;
    return r.value;
  };
  quad::Result<double> out;
  quad::Options top;
  top.rel_tol = rel_tol;
  top.abs_tol = 1e-300;
  top.max_subdivisions = 200;
  auto r = quad::integrate<double>(
      [&](double v) {
        y[0] = v;
        return level(1, v);
      },
      lo, hi, top);
  out.value = r.value;
  out.abs_error = r.abs_error;
  out.converged = r.converged && all_converged;
  out.evaluations = evaluations;
  return out;
}

}  // namespace detail

/// A_N(R) = 2^{-N} R^{N^2 - N} / N! * prod Gamma(1+j/2)Gamma(3/2+j/2)/Gamma(3/2).
inline double log_a_prefactor(int N, double R) {
  return -N * std::log(2.0) + (N * N - N) * std::log(R) - detail::log_factorial(N) +
         detail::log_selberg_product(N);
}

/// B_N = 2^{N(N-1)/2} / N! * (same gamma product).
inline double log_b_prefactor(int N) {
  return 0.5 * N * (N - 1) * std::log(2.0) - detail::log_factorial(N) + detail::log_selberg_product(N);
}

/// J_N(R) for N = 2, 3 from the residue evaluation.
inline VolumeResult j_closed(int N, double R) {
  require(N == 2 || N == 3, "j_closed: closed form only for N = 2, 3 (got N = " + std::to_string(N) + ")");
  require(R >= 1.0, "j_closed: R must be >= 1");
  VolumeResult out;
  out.method = VolumeMethod::closed_form;
  out.empty_domain = (R == 1.0);
  if (N == 2) {
    const double d = R - 1.0 / R;
    out.value = 0.5 * d * d;
  } else {
    // Written in sinh form to keep precision as R -> 1.
    const double L = std::log(R);
    out.value = std::sinh(6.0 * L) / 12.0 - 2.0 * std::sinh(3.0 * L) / 3.0 + 1.5 * L;
  }
  return out;
}

/// Which contour representation of J_N to evaluate.
///  mellin:    (A_N(R)/2 pi i) int R^{Ns} prod Gamma((s+j)/2)/Gamma((s+N+1+j)/2) ds
///  shifted_w: (B_N/2 pi i) int w^{-[(N+1)/2]} R^{Nw} / prod (w^2-(N-r)^2)^{[(r+1)/2]} dw
enum class JForm { mellin, shifted_w };

/// Log of the (J12a) integrand without the A_N prefactor (this is also the
/// integrand of the normalisation J~_N used by the characteristic polynomial).
inline cplx log_j_mellin_kernel(int N, double log_R, cplx s) {
  cplx acc = static_cast<double>(N) * s * log_R;
  for (int j = 0; j < N; ++j)
    acc += log_gamma(0.5 * (s + static_cast<double>(j))) -
           log_gamma(0.5 * (s + static_cast<double>(N + 1 + j)));
  return acc;
}

/// Numerical J_N(R). The abscissa in `spec` always refers to the variable s
/// (so c > 0 is required); the shifted form integrates over w = s + N - 1.
inline VolumeResult j_contour(int N, double R, const ContourSpec& spec, JForm form = JForm::mellin) {
  require(N >= 2, "j_contour: N must be >= 2");
  require(R >= 1.0, "j_contour: R must be >= 1");
  spec.validate(0.0);
  VolumeResult out;
  out.method = VolumeMethod::contour;
  if (R == 1.0) {
    out.empty_domain = true;
    return out;
  }
  const double log_R = std::log(R);
  MellinResult m;
  if (form == JForm::mellin) {
    const double log_a = log_a_prefactor(N, R);
    auto f = [&](cplx s) { return std::exp(log_a + log_j_mellin_kernel(N, log_R, s)); };
    m = inverse_mellin(f, spec, 0.5 * N * (N + 1));
  } else {
    const double log_b = log_b_prefactor(N);
    const int lead = (N + 1) / 2;
    double decay = lead;
    for (int r = 1; r < N; ++r) decay += 2.0 * ((r + 1) / 2);
    auto f = [&](cplx w) {
      cplx log_den = static_cast<double>(lead) * std::log(w);
      for (int r = 1; r < N; ++r) {
        const double shift = N - r;
        log_den += static_cast<double>((r + 1) / 2) * std::log(w * w - shift * shift);
      }
      return std::exp(log_b + static_cast<double>(N) * w * log_R - log_den);
    };
    m = inverse_mellin(f, spec.shifted(N - 1.0), decay);
  }
  out.value = m.value;
  out.abs_error = m.abs_error;
  return out;
}

/// Numerical hat-I_N(R), the 2-norm truncated SL_N volume integral (with 1/N!).
/// Empty for R^2 <= N (AM-GM). Just above the boundary the leftward decay rate
/// (N/2) log(R^2/N) is too small for the bent contour; zero is returned with
/// J_N(R) (which dominates hat-I_N) as the error bound.
inline VolumeResult i_hat_contour(int N, double R, const ContourSpec& spec) {
  require(N >= 2, "i_hat_contour: N must be >= 2");
  require(R > 0.0, "i_hat_contour: R must be positive");
  spec.validate(0.0);
  VolumeResult out;
  out.method = VolumeMethod::contour;
  // A few ulps of slack so that R = sqrt(N) computed in floating point counts as the boundary.
  if (R * R <= N * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) {
    out.empty_domain = true;
    return out;
  }
  const double decay_rate = 0.5 * N * std::log(R * R / N);
  if (decay_rate < 1e-4) {
    out.abs_error = j_contour(N, R, spec).value;
    return out;
  }
  const double log_R = std::log(R);
  double log_pref = N * (N - 1) * log_R - N * std::log(2.0) - detail::log_factorial(N);
  for (int j = 1; j <= N; ++j) log_pref += std::lgamma(1.0 + 0.5 * j) - std::lgamma(1.5);
  auto f = [&](cplx s) {
    cplx acc = log_pref + static_cast<double>(N) * s * log_R;
    for (int j = 1; j <= N; ++j) acc += log_gamma(0.5 * s + 0.5 * (N - j));
    acc -= log_gamma(0.5 * N * s + 0.5 * N * (N - 1) + 1.0);
    return std::exp(acc);
  };
  ContourSpec s = spec;
  s.max_ray_length = std::max(spec.max_ray_length, 60.0 / decay_rate);
  const auto m = inverse_mellin(f, s, 0.25 * (N * N + N + 2));
  out.value = std::max(m.value, 0.0);
  out.abs_error = m.abs_error + (m.value < 0.0 ? -m.value : 0.0);
  return out;
}

/// Leading large-R constants of the SL_N volumes.
struct AsymptoticConstant {
  int N = 0;
  Norm norm = Norm::operator_norm;
  double coefficient = 0.0;     // C_N or hat-C_N
  int exponent = 0;             // N(N-1)
  double full_prefactor = 0.0;  // 2^{-N-1} (vol O(N))^2 * coefficient
  double corollary_form = 0.0;  // the simplified gamma expression
};

inline double log_counting_numerator(int N, Norm norm) {
  const double lead = 0.5 * N * N * std::log(std::numbers::pi) - std::lgamma(0.5 * N);
  if (norm == Norm::two_norm) return lead - std::lgamma(0.5 * N * (N - 1) + 1.0);
  double acc = lead;
  for (int j = 0; j < N; ++j) acc += std::lgamma(1.0 + 0.5 * j) - std::lgamma(0.5 * (N + 1 + j));
  return acc;
}

inline AsymptoticConstant asymptotic_constants(int N, Norm norm) {
  require(N >= 2, "asymptotic_constants: N must be >= 2");
  require(norm != Norm::condition, "asymptotic_constants: only operator and two-norm are supported");
  AsymptoticConstant out;
  out.N = N;
  out.norm = norm;
  out.exponent = N * (N - 1);
  const double lg32 = std::lgamma(1.5);
  double log_c = std::log(2.0) - 2.0 * N * std::log(2.0) - std::lgamma(0.5 * N);
  if (norm == Norm::operator_norm) {
    for (int j = 0; j < N; ++j)
      log_c += std::lgamma(1.0 + 0.5 * j) - lg32 + 2.0 * std::lgamma(0.5 * (1 + j)) -
               std::lgamma(0.5 * (N + 1 + j));
  } else {
    log_c -= std::lgamma(0.5 * N * (N - 1) + 1.0);
    for (int j = 1; j <= N; ++j) log_c += 2.0 * std::lgamma(0.5 * j) - lg32;
  }
  out.coefficient = std::exp(log_c);
  const double vol_o = vol_orthogonal(N);
  out.full_prefactor = std::pow(2.0, -N - 1.0) * vol_o * vol_o * out.coefficient;
  out.corollary_form = std::exp(log_counting_numerator(N, norm));
  if (std::abs(out.full_prefactor / out.corollary_form - 1.0) > 1e-12)
    throw NonConvergence("asymptotic_constants: prefactor and corollary form disagree at N = " +
                         std::to_string(N));
  return out;
}

/// k_N / vol Gamma: the coefficient of R^{N(N-1)} in #{gamma in SL_N(Z) : ||gamma|| <= R}.
inline double counting_constant(int N, Norm norm) {
  require(N >= 2, "counting_constant: N must be >= 2");
  require(norm != Norm::condition, "counting_constant: only operator and two-norm are supported");
  return std::exp(log_counting_numerator(N, norm)) / vol_fundamental(N);
}

/// I_N(R1, R2) = int_{R1 > s_1 > ... > s_N > 1/R2} prod s^{-N} prod (s_j^2 - s_k^2), N = 2, 3.
inline VolumeResult gl_volume_quadrature(int N, double R1, double R2, double rel_tol = 1e-8) {
  require(N == 2 || N == 3, "gl_volume_quadrature: N must be 2 or 3");
  require(R1 > 0.0 && R2 > 0.0, "gl_volume_quadrature: R1, R2 must be positive");
  require(R1 * R2 >= 1.0, "gl_volume_quadrature: R1*R2 must be >= 1");
  VolumeResult out;
  out.method = VolumeMethod::quadrature;
  if (R1 * R2 == 1.0) {
    out.empty_domain = true;
    return out;
  }
  // Log variables: s = e^x, ds = s dx, so each factor s^{-N} ds -> s^{1-N} dx.
  auto f = [N](const std::vector<double>& x) {
    double v = 1.0;
    for (int j = 0; j < N; ++j) {
      const double sj = std::exp(x[j]);
      v *= std::pow(sj, 1.0 - N);
      for (int k = j + 1; k < N; ++k) {
        const double sk = std::exp(x[k]);
        v *= (sj - sk) * (sj + sk);
      }
    }
    return v;
  };
  const auto r = detail::nested_ordered(N, -std::log(R2), std::log(R1), f, rel_tol);
  if (!r.converged) throw NonConvergence("gl_volume_quadrature: nested quadrature did not converge");
  out.value = r.value;
  out.abs_error = r.abs_error;
  return out;
}

/// Condition-number truncation at N = 3: the delta-constrained integral over
/// R > s_1 > s_2 > s_3 > 1/R, with s_3 = 1/(s_1 s_2) resolved analytically.
inline VolumeResult condition_truncated_quadrature(int N, double R, double rel_tol = 1e-9) {
  require(N == 3, "condition_truncated_quadrature: only N = 3 is supported");
  require(R >= 1.0, "condition_truncated_quadrature: R must be >= 1");
  VolumeResult out;
  out.method = VolumeMethod::quadrature;
  if (R == 1.0) {
    out.empty_domain = true;
    return out;
  }
  const double L = std::log(R);
  bool ok = true;
  // x1 = log s1 in (0, L); x2 in (-x1/2, min(x1, L - x1)). The delta Jacobian
  // 1/(s1 s2) cancels against ds1 ds2 = s1 s2 dx1 dx2.
  auto inner = [&](double x1) {
    const double hi = std::min(x1, L - x1);
    const double lo = -0.5 * x1;
    if (hi <= lo) return 0.0;
    const double s1 = std::exp(x1);
    quad::Options opts;
    opts.rel_tol = 0.1 * rel_tol;
    opts.abs_tol = 1e-300;
    auto g = [&](double x2) {
      const double s2 = std::exp(x2);
      const double s3 = 1.0 / (s1 * s2);
      return (s1 * s1 - s2 * s2) * (s1 * s1 - s3 * s3) * (s2 * s2 - s3 * s3);
    };
    auto r = quad::integrate<double>(g, lo, hi, opts);
    if (!r.converged) ok = false;
    return r.value;
  };
  quad::Options opts;
  opts.rel_tol = rel_tol;
  opts.abs_tol = 1e-300;
  // The inner upper limit has a kink at x1 = L/2.
  auto a = quad::integrate<double>(inner, 0.0, 0.5 * L, opts);
  auto b = quad::integrate<double>(inner, 0.5 * L, L, opts);
  if (!ok || !a.converged || !b.converged)
    throw NonConvergence("condition_truncated_quadrature: quadrature did not converge");
  out.value = a.value + b.value;
  out.abs_error = a.abs_error + b.abs_error;
  return out;
}

/// Ratio of the quadrature of prod s^{-1/2} e^{-s} prod |s_j - s_k| over R_+^N
/// to pi^{-N/2} N! prod Gamma(j/2)^2. With s = u^2 the integrand becomes
/// prod 2 e^{-u^2} prod |u_j^2 - u_k^2|, which is smooth at the origin.
inline double selberg_laguerre_check(int N, double rel_tol = 1e-9) {
  require(N == 2 || N == 3, "selberg_laguerre_check: N must be 2 or 3");
  auto f = [N](const std::vector<double>& u) {
    double v = 1.0;
    for (int j = 0; j < N; ++j) {
      v *= 2.0 * std::exp(-u[j] * u[j]);
      for (int k = j + 1; k < N; ++k) v *= u[j] * u[j] - u[k] * u[k];
    }
    return v;
  };
  // e^{-u^2} < 1e-40 beyond u = 9.6
  const auto r = detail::nested_ordered(N, 0.0, 9.6, f, rel_tol);
  if (!r.converged) throw NonConvergence("selberg_laguerre_check: quadrature did not converge");
  const double ordered_to_full = std::exp(detail::log_factorial(N));
  double log_closed = -0.5 * N * std::log(std::numbers::pi) + detail::log_factorial(N);
  for (int j = 1; j <= N; ++j) log_closed += 2.0 * std::lgamma(0.5 * j);
  return ordered_to_full * r.value / std::exp(log_closed);
}

}  // namespace unimodular
