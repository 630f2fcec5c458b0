#pragma once

// The ten acceptance checks. Tolerances are fixed here; each check records
// the measured quantities it compared so a failure explains itself.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "unimodular/analytics.hpp"
#include "unimodular/charpoly.hpp"
#include "unimodular/pipelines.hpp"
#include "unimodular/volumes.hpp"

namespace unimodular::acceptance {

struct Measurement {
  std::string name;
  double value = 0.0;
  std::string requirement;
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Measurement> measurements;
  double seconds = 0.0;
  double time_limit = 0.0;
  std::string error;  // exception text, if any

  bool pass() const {
    if (!error.empty() || seconds > time_limit) return false;
    for (const auto& m : measurements)
      if (!m.pass) return false;
    return true;
  }
};

namespace detail {

inline std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

inline std::string fmt(const char* f, double a, double b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

inline void below(CriterionResult& r, const std::string& name, double value, double limit) {
  r.measurements.push_back({name, value, fmt("< %.3g", limit), value < limit});
}

inline void within(CriterionResult& r, const std::string& name, double value, double lo, double hi) {
  r.measurements.push_back({name, value, fmt("in (%.6g, %.6g)", lo, hi), value > lo && value < hi});
}

inline void at_most(CriterionResult& r, const std::string& name, double value, double limit) {
  r.measurements.push_back({name, value, fmt("<= %.6g", limit), value <= limit});
}

inline void at_least(CriterionResult& r, const std::string& name, double value, double limit) {
  r.measurements.push_back({name, value, fmt(">= %.6g", limit), value >= limit});
}

inline double rel(double a, double b) { return std::abs(a / b - 1.0); }

inline std::string tag(const char* prefix, double x) { return prefix + fmt("%g", x); }

}  // namespace detail

inline constexpr int criterion_count = 10;

inline CriterionResult criterion_1() {
  CriterionResult r{1, "closed form vs contour for J_2, J_3 and hat-I_2", {}, 0.0, 10.0, {}};
  const ContourSpec spec;
  for (int N : {2, 3})
    for (double R : {1.5, 2.0, 5.0, 20.0}) {
      const double c = j_contour(N, R, spec).value;
      const double e = j_closed(N, R).value;
      detail::below(r, "J_" + std::to_string(N) + detail::tag(" rel err R=", R), detail::rel(c, e), 1e-6);
    }
  for (double R : {1.5, 2.0, 5.0, 20.0}) {
    const double c = i_hat_contour(2, R, spec).value;
    detail::below(r, detail::tag("hat-I_2 rel err R=", R), detail::rel(c, 0.5 * R * R - 1.0), 1e-6);
  }
  return r;
}

inline CriterionResult criterion_2() {
  CriterionResult r{2, "asymptotic constants", {}, 0.0, 10.0, {}};
  const double pi = std::numbers::pi, pi4 = pi * pi * pi * pi;
  struct Row {
    int N;
    Norm norm;
    double coefficient;
    double prefactor;
    const char* label;
  };
  for (const Row& row : {Row{2, Norm::operator_norm, 0.5, pi * pi, "C_2"},
                         Row{3, Norm::operator_norm, 1.0 / 24.0, 2.0 / 3.0 * pi4, "C_3"},
                         Row{2, Norm::two_norm, 0.5, pi * pi, "hat-C_2"},
                         Row{3, Norm::two_norm, 1.0 / 48.0, pi4 / 3.0, "hat-C_3"}}) {
    const auto c = asymptotic_constants(row.N, row.norm);
    detail::below(r, std::string(row.label) + " rel err", detail::rel(c.coefficient, row.coefficient), 1e-12);
    detail::below(r, std::string(row.label) + " prefactor rel err", detail::rel(c.full_prefactor, row.prefactor),
                  1e-12);
  }
  return r;
}

inline CriterionResult criterion_3() {
  CriterionResult r{3, "characteristic polynomial zeros, N = 6, R = 2", {}, 0.0, 60.0, {}};
  const auto p = charpoly_zeros(charpoly_coefficients(6, 2.0, ContourSpec{}));
  const double expected[6] = {0.04436, 0.57774, 1.41726, 2.33579, 3.15342, 3.73701};
  double prod = 1.0;
  for (int i = 0; i < 6; ++i) {
    detail::at_most(r, "|zero " + std::to_string(i + 1) + " - " + detail::fmt("%.5f", expected[i]) + "|",
                    std::abs(p.zeros[i] - expected[i]), 5e-5);
    prod *= p.zeros[i];
  }
  detail::at_most(r, "|product - 1|", std::abs(prod - 1.0), 1e-6);
  return r;
}

inline CriterionResult criterion_4() {
  CriterionResult r{4, "sigma_1 histogram of the N = 3 chain, R = 4, 5e5 steps", {}, 0.0, 120.0, {}};
  const auto f = reproduce_fig1();
  r.measurements.push_back({"chi2 p-value", f.gof.chi2_pvalue, "> 0.01", f.gof.chi2_pvalue > 0.01});
  r.measurements.push_back({"chi2 dof", static_cast<double>(f.gof.chi2_dof), "", true});
  r.measurements.push_back({"KS statistic", f.gof.ks_statistic, detail::fmt("(1%% level %.4g)", f.gof.ks_threshold_1pct), true});
  return r;
}

inline CriterionResult criterion_5() {
  CriterionResult r{5, "reduced N = 2 lattices vs exact densities, 1e5 samples", {}, 0.0, 120.0, {}};
  const auto f = reproduce_fig2();
  const std::pair<const char*, const GofReport*> reports[3] = {
      {"shortest", &f.gof_shortest}, {"second", &f.gof_second}, {"cosine", &f.gof_cosine}};
  for (const auto& [name, g] : reports) {
    detail::below(r, std::string(name) + " KS", g->ks_statistic, g->ks_threshold_1pct);
    r.measurements.push_back({std::string(name) + " chi2 p-value", g->chi2_pvalue, "> 0.01", g->chi2_pvalue > 0.01});
  }
  detail::at_most(r, "max |v1|", f.max_shortest, shortest_length_max);
  detail::at_most(r, "max |cos|", f.max_abs_cosine, 0.5);
  return r;
}

inline CriterionResult criterion_6() {
  CriterionResult r{6, "Siegel mean value, N = 2, R = 0.8, 1e5 lattices", {}, 0.0, 120.0, {}};
  SiegelConfig cfg;
  cfg.N = 2;
  cfg.R = 0.8;
  cfg.lattices = 100000;
  const auto s = siegel_check(cfg);
  r.measurements.push_back({"mean count", s.mean, detail::fmt("target %.6f", s.target), true});
  detail::below(r, "|z|", std::abs(s.z), 3.0);
  return r;
}

inline CriterionResult criterion_7() {
  CriterionResult r{7, "SL_2(Z) count / (6 R^2), two-norm", {}, 0.0, 60.0, {}};
  double prev_gap = 1e300;
  for (double R : {50.0, 100.0, 150.0}) {
    const double ratio = static_cast<double>(enumerate_sl2z(R, Norm::two_norm)) / (6.0 * R * R);
    const double gap = std::abs(ratio - 1.0);
    r.measurements.push_back({detail::tag("ratio R=", R), ratio, "", true});
    if (prev_gap < 1e300)
      r.measurements.push_back(
          {detail::tag("|ratio - 1| decreases at R=", R), gap, detail::fmt("< %.6g", prev_gap), gap < prev_gap});
    prev_gap = gap;
  }
  detail::below(r, "|ratio - 1| at R=150", prev_gap, 0.07);
  return r;
}

inline CriterionResult criterion_8() {
  CriterionResult r{8, "reduced N = 3 lattice properties, 1e5 samples", {}, 0.0, 900.0, {}};
  const auto f = reproduce_fig3();
  detail::at_most(r, "max |v1|", f.max_length1, shortest_length_max + 0.01);
  detail::within(r, "min |v2|", f.min_length2, 0.30, 0.35);
  detail::at_least(r, "min |v3|", f.min_length3, 1.0 - 0.01);
  detail::at_most(r, "max |cos12|", f.max_abs_cosine[0], 0.5 + 0.01);
  detail::at_most(r, "max |cos13|", f.max_abs_cosine[1], 1.0 / std::sqrt(3.0) + 0.01);
  detail::at_most(r, "max |cos23|", f.max_abs_cosine[2], 1.0 / std::sqrt(3.0) + 0.01);
  r.measurements.push_back(
      {"small-s chi2 p-value", f.small_s_chi2.pvalue, "> 0.01", f.small_s_chi2.pvalue > 0.01});
  return r;
}

inline CriterionResult criterion_9() {
  CriterionResult r{9, "GL and condition-number volume asymptotics", {}, 0.0, 60.0, {}};
  detail::below(r, "|I_2(10,10)/100 - 1|", std::abs(gl_volume_quadrature(2, 10.0, 10.0).value / 100.0 - 1.0), 0.10);
  double prev_gap = 1e300;
  for (double R : {5.0, 10.0, 20.0}) {
    const double P = R * R;
    const double ratio = gl_volume_quadrature(3, R, R).value / (P * P * std::log(P) / 4.0);
    const double gap = std::abs(ratio - 1.0);
    r.measurements.push_back({detail::tag("I_3 ratio R=", R), ratio,
                              prev_gap < 1e300 ? detail::fmt("|r-1| < %.6g", prev_gap) : "", gap < prev_gap});
    prev_gap = gap;
  }
  const double cond = condition_truncated_quadrature(3, 10.0).value / (1e4 / 4.0);
  detail::below(r, "|cond(10)/(R^4/4) - 1|", std::abs(cond - 1.0), 0.15);
  return r;
}

inline CriterionResult criterion_10() {
  CriterionResult r{10, "identity suite", {}, 0.0, 60.0, {}};
  detail::below(r, "|selberg_laguerre_check(2) - 1|", std::abs(selberg_laguerre_check(2) - 1.0), 1e-4);
  detail::below(r, "|selberg_laguerre_check(3) - 1|", std::abs(selberg_laguerre_check(3) - 1.0), 1e-4);
  detail::below(r, "|siegel_integral_identity - 1|", std::abs(siegel_integral_identity() - 1.0), 1e-8);
  detail::below(r, "|vol_tilde_gamma - 2 vol_fundamental(2)|", std::abs(vol_tilde_gamma() - 2.0 * vol_fundamental(2)),
                1e-12);
  return r;
}

/// Runs one criterion, timing it and capturing exceptions.
inline CriterionResult run(int id) {
  static const std::function<CriterionResult()> table[criterion_count] = {
      criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
      criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
  require(id >= 1 && id <= criterion_count, "acceptance: criterion id must be 1..10");
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = table[id - 1]();
  } catch (const std::exception& e) {
    r.id = id;
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.time_limit == 0.0) r.time_limit = 900.0;
  return r;
}

}  // namespace unimodular::acceptance
