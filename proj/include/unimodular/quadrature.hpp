#pragma once

// Globally adaptive Gauss-Kronrod (G7/K15) quadrature for real- or
// complex-valued integrands on finite and semi-infinite intervals.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <type_traits>
#include <vector>

namespace unimodular::quad {

struct Options {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_subdivisions = 4000;
};

template <typename V>
struct Result {
  V value{};
  double abs_error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename V>
struct Panel {
  double a, b;
  V value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename V, typename F>
Panel<V> gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  V kronrod = kronrod_weights[7] * static_cast<V>(f(center));
  V gauss = gauss_weights[3] * static_cast<V>(f(center));
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kronrod_nodes[i];
    const V sum = static_cast<V>(f(center - dx)) + static_cast<V>(f(center + dx));
    kronrod += kronrod_weights[i] * sum;
    if (i % 2 == 1) gauss += gauss_weights[i / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Integral of f over [a, b]. `V` is the accumulation type (double or complex).
template <typename V = double, typename F>
Result<V> integrate(F&& f, double a, double b, const Options& opts = {}) {
  Result<V> out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<detail::Panel<V>> panels;
  auto first = detail::gauss_kronrod_15<V>(f, a, b);
  out.evaluations = 15;
  V total = first.value;
  double error = first.error;
  panels.push(first);
  int subdivisions = 0;
  while (error > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) &&
         subdivisions < opts.max_subdivisions) {
    auto worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      panels.push(worst);
      break;
    }
    auto left = detail::gauss_kronrod_15<V>(f, worst.a, mid);
    auto right = detail::gauss_kronrod_15<V>(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++subdivisions;
  }
  // Re-sum to shed the drift accumulated by incremental updates.
  total = V{};
  error = 0.0;
  while (!panels.empty()) {
    total += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  out.value = total;
  out.abs_error = error;
  out.converged = error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
  return out;
}

/// Integral of f over [a, inf) via x = a + t / (1 - t).
template <typename V = double, typename F>
Result<V> integrate_to_infinity(F&& f, double a, const Options& opts = {}) {
  auto mapped = [&](double t) -> V {
    const double one_minus = 1.0 - t;
    const double x = a + t / one_minus;
    const V fx = static_cast<V>(f(x));
    if (fx == V{}) return V{};
    return fx / (one_minus * one_minus);
  };
  return integrate<V>(mapped, 0.0, 1.0, opts);
}

}  // namespace unimodular::quad
