// unimodular-lab: command-line front end over the header library.
//
// Reports are JSON (ordered keys, schema_version first) or CSV. Exit codes:
// 0 pass, 1 goodness-of-fit failure, 2 input error, 3 non-convergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "unimodular/acceptance.hpp"
#include "unimodular/analytics.hpp"
#include "unimodular/charpoly.hpp"
#include "unimodular/errors.hpp"
#include "unimodular/io.hpp"
#include "unimodular/lattice.hpp"
#include "unimodular/pipelines.hpp"
#include "unimodular/sampler.hpp"
#include "unimodular/stats.hpp"
#include "unimodular/version.hpp"
#include "unimodular/volumes.hpp"

using json = nlohmann::ordered_json;
using namespace unimodular;

namespace {

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c, const std::string& default_format) {
  c.format = default_format;
  cmd->add_option("--seed", c.seed, "RNG seed");
  cmd->add_option("--out", c.out, "output file (default: stdout)");
  cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void emit_text(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw InputError("cannot open output file " + c.out);
  f << text;
  if (!f) throw InputError("failed writing " + c.out);
}

json header(const std::string& command, const Common& c) {
  json j;
  j["schema_version"] = json_schema_version;
  j["command"] = command;
  j["version"] = library_version;
  j["seed"] = c.seed;
  return j;
}

// Scalars become key,value rows; arrays and objects are flattened with
// dotted / indexed keys.
void flatten(const json& j, const std::string& prefix, io::CsvTable& t) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), t);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", t);
  } else if (j.is_number_float()) {
    t.row() << prefix << j.get<double>();
  } else if (j.is_number_unsigned()) {
    t.row() << prefix << j.get<std::uint64_t>();
  } else if (j.is_number_integer()) {
    t.row() << prefix << j.get<std::int64_t>();
  } else if (j.is_boolean()) {
    t.row() << prefix << (j.get<bool>() ? "true" : "false");
  } else if (j.is_null()) {
    t.row() << prefix << "";
  } else {
    t.row() << prefix << j.get<std::string>();
  }
}

void emit_report(const Common& c, const json& j) {
  if (c.format == "json") {
    emit_text(c, j.dump(2) + "\n");
  } else {
    io::CsvTable t({"key", "value"});
    flatten(j, "", t);
    emit_text(c, t.str());
  }
}

json gof_json(const GofReport& g) {
  json j;
  j["samples"] = g.samples;
  j["ks_statistic"] = g.ks_statistic;
  j["ks_threshold_1pct"] = g.ks_threshold_1pct;
  j["chi2_statistic"] = g.chi2_statistic;
  j["chi2_dof"] = g.chi2_dof;
  j["chi2_pvalue"] = g.chi2_pvalue;
  j["pass"] = g.pass;
  return j;
}

Norm parse_norm(const std::string& s) {
  if (s == "op") return Norm::operator_norm;
  if (s == "l2") return Norm::two_norm;
  if (s == "cond") return Norm::condition;
  throw InputError("unknown norm " + s);
}

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cell);
      cell.clear();
    } else {
      cell += ch;
    }
  }
  out.push_back(cell);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("cannot parse " + what + " value '" + s + "' as a number");
  }
}

// --------------------------------------------------------------- volume

int cmd_volume(const Common& c, const std::string& group, const std::string& norm_name, int N, double R, double R1,
               double R2, const std::string& method) {
  const Norm norm = parse_norm(norm_name);
  const ContourSpec spec;
  VolumeResult v;
  if (group == "gl") {
    require(norm == Norm::operator_norm, "volume: the GL integral is defined for --norm op");
    require(method == "quadrature", "volume: GL volumes are available by --method quadrature only");
    if (R1 <= 0.0) R1 = R;
    if (R2 <= 0.0) R2 = R;
    v = gl_volume_quadrature(N, R1, R2);
  } else if (norm == Norm::operator_norm) {
    if (method == "closed")
      v = j_closed(N, R);
    else if (method == "contour")
      v = j_contour(N, R, spec);
    else
      throw InputError("volume: --norm op supports --method closed or contour");
  } else if (norm == Norm::two_norm) {
    if (method == "closed") {
      require(N == 2, "volume: closed-form two-norm volume only for N = 2");
      require(R * R >= 2.0, "volume: R^2 must be >= 2");
      v.value = 0.5 * R * R - 1.0;
      v.method = VolumeMethod::closed_form;
    } else if (method == "contour") {
      v = i_hat_contour(N, R, spec);
    } else {
      throw InputError("volume: --norm l2 supports --method closed or contour");
    }
  } else {
    require(method == "quadrature", "volume: --norm cond supports --method quadrature only");
    v = condition_truncated_quadrature(N, R);
  }
  json j = header("volume", c);
  j["group"] = group;
  j["norm"] = norm_name;
  j["n"] = N;
  if (group == "gl") {
    j["r1"] = R1;
    j["r2"] = R2;
  } else {
    j["r"] = R;
  }
  j["value"] = v.value;
  j["abs_error"] = v.abs_error;
  j["method"] = to_string(v.method);
  j["empty_domain"] = v.empty_domain;
  emit_report(c, j);
  return 0;
}

// --------------------------------------------------------------- sample

int cmd_sample(const Common& c, int N, double R, const std::string& norm_name, std::int64_t steps,
               std::int64_t burn_in, std::int64_t thin, bool matrices) {
  require(N >= 2, "sample: N must be >= 2");
  require(R > 1.0, "sample: R must exceed 1");
  ChainConfig cfg;
  cfg.steps = steps;
  cfg.burn_in = burn_in;
  cfg.thin = thin;
  cfg.seed = derive_seed(c.seed, 0);
  cfg.norm = parse_norm(norm_name);
  cfg.validate();
  SplitMix64 init_rng(derive_seed(c.seed, 1));
  SplitMix64 matrix_rng(derive_seed(c.seed, 2));

  std::vector<std::string> cols = {"seed", "step"};
  for (int i = 1; i <= N; ++i) cols.push_back("sigma" + std::to_string(i));
  if (matrices)
    for (int r = 1; r <= N; ++r)
      for (int k = 1; k <= N; ++k) cols.push_back("m" + std::to_string(r) + std::to_string(k));
  io::CsvTable t(cols);
  json rows = json::array();

  auto sink = [&](std::int64_t step, const SingularValues& sv) {
    Eigen::MatrixXd M;
    if (matrices) M = assemble_matrix(sv, matrix_rng).M;
    if (c.format == "csv") {
      auto row = t.row();
      row << c.seed << step;
      for (double s : sv.sigma) row << s;
      if (matrices)
        for (int r = 0; r < N; ++r)
          for (int k = 0; k < N; ++k) row << M(r, k);
    } else {
      json j;
      j["step"] = step;
      j["sigma"] = sv.sigma;
      if (matrices) {
        json m = json::array();
        for (int r = 0; r < N; ++r) {
          std::vector<double> line(N);
          for (int k = 0; k < N; ++k) line[k] = M(r, k);
          m.push_back(line);
        }
        j["matrix"] = m;
      }
      rows.push_back(j);
    }
  };
  const auto stats = mcmc_sv(N, R, cfg, dirichlet_initial(N, R, init_rng, cfg.norm), sink);

  if (c.format == "csv") {
    emit_text(c, t.str());
  } else {
    json j = header("sample", c);
    j["n"] = N;
    j["r"] = R;
    j["norm"] = norm_name;
    j["steps"] = steps;
    j["burn_in"] = cfg.effective_burn_in();
    j["thin"] = thin;
    j["acceptance_rate"] = stats.acceptance_rate();
    j["final_step_sigma"] = stats.final_step_sigma;
    j["samples"] = rows;
    emit_report(c, j);
  }
  return 0;
}

// --------------------------------------------------------------- reduce

int cmd_reduce(const Common& c, const std::string& in_path) {
  std::ifstream in(in_path, std::ios::binary);
  if (!in) throw InputError("reduce: cannot open " + in_path);
  std::string line;
  if (!std::getline(in, line)) throw InputError("reduce: empty input");
  const auto head = split_csv_line(line);
  // Matrix entries are the columns named m<row><col>, row-major.
  std::vector<int> cols;
  for (std::size_t i = 0; i < head.size(); ++i) {
    const auto& h = head[i];
    if (h.size() == 3 && h[0] == 'm' && std::isdigit(static_cast<unsigned char>(h[1])) &&
        std::isdigit(static_cast<unsigned char>(h[2])))
      cols.push_back(static_cast<int>(i));
  }
  int N = 0;
  if (cols.size() == 4) N = 2;
  if (cols.size() == 9) N = 3;
  require(N != 0, "reduce: input needs columns m11..m22 (N = 2) or m11..m33 (N = 3)");
  for (int r = 0; r < N; ++r)
    for (int k = 0; k < N; ++k)
      require(head[cols[r * N + k]] == "m" + std::to_string(r + 1) + std::to_string(k + 1),
              "reduce: matrix columns must appear in row-major order");

  std::vector<std::string> out_cols = {"row"};
  for (int i = 1; i <= N; ++i) out_cols.push_back("length" + std::to_string(i));
  if (N == 2) {
    out_cols.push_back("cos12");
  } else {
    out_cols.insert(out_cols.end(), {"cos12", "cos13", "cos23"});
  }
  out_cols.push_back("iterations");
  io::CsvTable t(out_cols);
  json rows = json::array();

  std::int64_t index = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    require(cells.size() == head.size(), "reduce: row " + std::to_string(index + 1) + " has the wrong width");
    Eigen::MatrixXd B(N, N);
    for (int r = 0; r < N; ++r)
      for (int k = 0; k < N; ++k) B(r, k) = parse_double(cells[cols[r * N + k]], head[cols[r * N + k]]);
    const auto basis = make_basis(B);
    const auto red = N == 2 ? lagrange_gauss(basis) : semaev_reduce(basis);
    if (c.format == "csv") {
      auto row = t.row();
      row << index;
      for (double l : red.lengths) row << l;
      for (double x : red.cosines) row << x;
      row << red.iterations;
    } else {
      json j;
      j["row"] = index;
      j["lengths"] = red.lengths;
      j["cosines"] = red.cosines;
      j["iterations"] = red.iterations;
      rows.push_back(j);
    }
    ++index;
  }
  if (c.format == "csv") {
    emit_text(c, t.str());
  } else {
    json j = header("reduce", c);
    j["n"] = N;
    j["input"] = in_path;
    j["rows"] = rows;
    emit_report(c, j);
  }
  return 0;
}

// --------------------------------------------------------------- charpoly

int cmd_charpoly(const Common& c, int N, double R, std::int64_t mc_samples) {
  auto poly = charpoly_zeros(charpoly_coefficients(N, R, ContourSpec{}));
  json j = header("charpoly", c);
  j["n"] = N;
  j["r"] = R;
  j["normalization"] = poly.normalization;
  j["coefficients"] = poly.coefficients;
  j["coefficient_errors"] = poly.coefficient_errors;
  j["zeros"] = poly.zeros;
  int code = 0;
  if (mc_samples > 0) {
    const auto mc = mc_charpoly_oracle(N, R, mc_samples, c.seed);
    double max_z = 0.0;
    std::vector<double> z(mc.coefficients.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
      z[k] = mc.standard_errors[k] > 0.0 ? (mc.coefficients[k] - poly.coefficients[k]) / mc.standard_errors[k] : 0.0;
      max_z = std::max(max_z, std::abs(z[k]));
    }
    json m;
    m["samples"] = mc.samples;
    m["seed"] = c.seed;
    m["coefficients"] = mc.coefficients;
    m["standard_errors"] = mc.standard_errors;
    m["z"] = z;
    m["max_abs_z"] = max_z;
    m["threshold"] = 4.0;
    m["pass"] = max_z < 4.0;
    j["mc_check"] = m;
    if (max_z >= 4.0) code = 1;
  }
  emit_report(c, j);
  return code;
}

// --------------------------------------------------------------- density / count

int cmd_density(const Common& c, const std::string& which, int grid, double hi_override) {
  require(grid >= 2, "density: --grid must be >= 2");
  DensityKind kind = DensityKind::shortest;
  if (which == "second") kind = DensityKind::second;
  if (which == "cosine") kind = DensityKind::cosine;
  const auto curve = density_curve(kind);
  const double lo = curve.lo;
  const double hi = hi_override > lo ? hi_override : (kind == DensityKind::second ? 4.0 : curve.hi);
  io::CsvTable t({"s", "pdf", "cdf"});
  json pts = json::array();
  for (int i = 0; i < grid; ++i) {
    const double s = lo + (hi - lo) * i / (grid - 1);
    const double p = curve.pdf(s), F = curve.cdf(s);
    if (c.format == "csv") {
      t.row() << s << p << F;
    } else {
      pts.push_back(json::array({s, p, F}));
    }
  }
  if (c.format == "csv") {
    emit_text(c, t.str());
  } else {
    json j = header("density", c);
    j["which"] = which;
    j["normalization_check"] = curve.normalization_check;
    j["columns"] = json::array({"s", "pdf", "cdf"});
    j["points"] = pts;
    emit_report(c, j);
  }
  return 0;
}

int cmd_count(const Common& c, double R, const std::string& norm_name) {
  const Norm norm = parse_norm(norm_name);
  const std::int64_t count = enumerate_sl2z(R, norm);
  const double asym = counting_constant(2, norm) * R * R;
  json j = header("count", c);
  j["r"] = R;
  j["norm"] = norm_name;
  j["count"] = count;
  j["asymptotic"] = asym;
  j["ratio"] = static_cast<double>(count) / asym;
  emit_report(c, j);
  return 0;
}

// --------------------------------------------------------------- figures

int cmd_fig1(const Common& c, const Fig1Config& base) {
  Fig1Config cfg = base;
  cfg.seed = c.seed;
  const auto r = reproduce_fig1(cfg);
  if (c.format == "csv") {
    emit_text(c, fig1_table(r).str());
  } else {
    json j = header("fig1", c);
    j["r"] = cfg.R;
    j["steps"] = cfg.steps;
    j["thin"] = cfg.thin;
    j["acceptance_rate"] = r.chain.acceptance_rate();
    j["gof"] = gof_json(r.gof);
    j["pass"] = r.gof.pass;
    emit_report(c, j);
  }
  return r.gof.pass ? 0 : 1;
}

int cmd_fig2(const Common& c, const Fig2Config& base) {
  Fig2Config cfg = base;
  cfg.seed = c.seed;
  const auto r = reproduce_fig2(cfg);
  if (c.format == "csv") {
    emit_text(c, fig2_table(r).str());
  } else {
    json j = header("fig2", c);
    j["samples"] = cfg.samples;
    j["r_cap"] = cfg.R_cap;
    j["shortest"] = gof_json(r.gof_shortest);
    j["second"] = gof_json(r.gof_second);
    j["cosine"] = gof_json(r.gof_cosine);
    j["max_shortest"] = r.max_shortest;
    j["shortest_bound"] = shortest_length_max;
    j["max_abs_cosine"] = r.max_abs_cosine;
    j["cosine_symmetry_ks"] = r.cosine_symmetry_ks;
    j["cosine_symmetry_threshold"] = r.cosine_symmetry_threshold;
    j["pass"] = r.pass();
    emit_report(c, j);
  }
  return r.pass() ? 0 : 1;
}

int cmd_fig3(const Common& c, const Fig3Config& base) {
  Fig3Config cfg = base;
  cfg.seed = c.seed;
  const auto r = reproduce_fig3(cfg);
  // Hermite bound for N = 3 is 2^{1/6}; lambda_3 >= 1 since lambda_1 lambda_2 lambda_3 >= 1.
  const double hermite = std::pow(2.0, 1.0 / 6.0);
  const bool pass = r.small_s_chi2.pvalue > 0.01 && r.max_length1 <= hermite + 1e-9 &&
                    r.min_length3 >= 1.0 - 1e-9 && r.max_abs_cosine[0] <= 0.5 + 1e-9;
  if (c.format == "csv") {
    emit_text(c, fig3_table(r).str());
  } else {
    json j = header("fig3", c);
    j["samples"] = cfg.samples;
    j["r_cap"] = cfg.R_cap;
    j["max_length1"] = r.max_length1;
    j["hermite_bound"] = hermite;
    j["min_length2"] = r.min_length2;
    j["min_length3"] = r.min_length3;
    j["max_abs_cos12"] = r.max_abs_cosine[0];
    j["max_abs_cos13"] = r.max_abs_cosine[1];
    j["max_abs_cos23"] = r.max_abs_cosine[2];
    json s;
    s["cut"] = cfg.small_s_cut;
    s["coefficient"] = small_s_coefficient();
    s["count"] = r.small_s_count;
    s["expected"] = r.small_s_expected;
    s["chi2_statistic"] = r.small_s_chi2.statistic;
    s["chi2_dof"] = r.small_s_chi2.dof;
    s["chi2_pvalue"] = r.small_s_chi2.pvalue;
    j["small_s"] = s;
    j["mean_acceptance"] = r.mean_acceptance;
    j["pass"] = pass;
    emit_report(c, j);
  }
  return pass ? 0 : 1;
}

int cmd_siegel(const Common& c, const SiegelConfig& base, const std::string& convention) {
  SiegelConfig cfg = base;
  cfg.seed = c.seed;
  cfg.convention = convention == "pairs-once" ? PairConvention::pairs_once : PairConvention::both_signs;
  const auto r = siegel_check(cfg);
  json j = header("siegel", c);
  j["n"] = cfg.N;
  j["r"] = cfg.R;
  j["lattices"] = cfg.lattices;
  j["r_cap"] = cfg.R_cap;
  j["convention"] = convention;
  j["mean"] = r.mean;
  j["standard_error"] = r.standard_error;
  j["target"] = r.target;
  j["z"] = r.z;
  j["pass"] = r.pass;
  emit_report(c, j);
  return r.pass ? 0 : 1;
}

int cmd_verify(const Common& c, std::vector<int> ids) {
  namespace acc = acceptance;
  if (ids.empty())
    for (int i = 1; i <= acc::criterion_count; ++i) ids.push_back(i);
  json j = header("verify", c);
  json list = json::array();
  bool all = true;
  for (int id : ids) {
    const auto r = acc::run(id);
    all = all && r.pass();
    json e;
    e["id"] = r.id;
    e["title"] = r.title;
    e["pass"] = r.pass();
    e["seconds"] = r.seconds;
    e["time_limit"] = r.time_limit;
    if (!r.error.empty()) e["error"] = r.error;
    json ms = json::array();
    for (const auto& m : r.measurements) {
      json mj;
      mj["name"] = m.name;
      mj["value"] = m.value;
      mj["requirement"] = m.requirement;
      mj["pass"] = m.pass;
      ms.push_back(mj);
    }
    e["measurements"] = ms;
    list.push_back(e);
  }
  j["criteria"] = list;
  j["pass"] = all;
  emit_report(c, j);
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unimodular-lab: truncated SL_N(R) volumes, sampling and lattice statistics"};
  app.set_version_flag("--version", std::string(library_version));
  app.require_subcommand(1);

  // volume
  Common c_volume;
  std::string v_group = "sl", v_norm = "op", v_method = "closed";
  int v_n = 2;
  double v_r = 2.0, v_r1 = 0.0, v_r2 = 0.0;
  auto* volume = app.add_subcommand("volume", "truncated group volume");
  add_common(volume, c_volume, "json");
  volume->add_option("--group", v_group)->check(CLI::IsMember({"gl", "sl"}));
  volume->add_option("--norm", v_norm)->check(CLI::IsMember({"op", "l2", "cond"}));
  volume->add_option("--n", v_n)->required();
  volume->add_option("--r", v_r);
  volume->add_option("--r1", v_r1);
  volume->add_option("--r2", v_r2);
  volume->add_option("--method", v_method)->check(CLI::IsMember({"closed", "contour", "quadrature"}));

  // sample
  Common c_sample;
  int s_n = 3;
  double s_r = 4.0;
  std::string s_norm = "op";
  std::int64_t s_steps = 100000, s_burn = -1, s_thin = 50;
  bool s_matrices = false;
  auto* sample = app.add_subcommand("sample", "Metropolis chain over singular values");
  add_common(sample, c_sample, "csv");
  sample->add_option("--n", s_n);
  sample->add_option("--r", s_r);
  sample->add_option("--norm", s_norm)->check(CLI::IsMember({"op", "l2"}));
  sample->add_option("--steps", s_steps);
  sample->add_option("--burn-in", s_burn, "default: 10% of steps");
  sample->add_option("--thin", s_thin);
  sample->add_flag("--matrices", s_matrices, "also emit M = O1 diag(sigma) O2^T as m11..mNN");

  // reduce
  Common c_reduce;
  std::string r_in;
  auto* reduce = app.add_subcommand("reduce", "reduce CSV bases (columns m11..mNN)");
  add_common(reduce, c_reduce, "csv");
  reduce->add_option("--in", r_in)->required();

  // charpoly
  Common c_charpoly;
  int cp_n = 6;
  double cp_r = 2.0;
  std::int64_t cp_mc = 0;
  auto* charpoly = app.add_subcommand("charpoly", "averaged characteristic polynomial");
  add_common(charpoly, c_charpoly, "json");
  charpoly->add_option("--n", cp_n);
  charpoly->add_option("--r", cp_r);
  charpoly->add_option("--verify-mc", cp_mc, "Monte Carlo samples for a cross-check");

  // density
  Common c_density;
  std::string d_which = "shortest";
  int d_grid = 101;
  double d_max = 0.0;
  auto* density = app.add_subcommand("density", "exact N = 2 reduced-basis densities");
  add_common(density, c_density, "csv");
  density->add_option("--which", d_which)->check(CLI::IsMember({"shortest", "second", "cosine"}));
  density->add_option("--grid", d_grid);
  density->add_option("--max", d_max, "right end of the grid (second: default 4)");

  // count
  Common c_count;
  double n_r = 50.0;
  std::string n_norm = "l2";
  auto* count = app.add_subcommand("count", "count SL_2(Z) elements of norm <= R");
  add_common(count, c_count, "json");
  count->add_option("--r", n_r);
  count->add_option("--norm", n_norm)->check(CLI::IsMember({"op", "l2"}));

  // fig1
  Common c_fig1;
  Fig1Config f1;
  auto* fig1 = app.add_subcommand("fig1", "sigma_1 histogram of the N = 3 chain vs the exact marginal");
  add_common(fig1, c_fig1, "json");
  fig1->add_option("--steps", f1.steps);
  fig1->add_option("--thin", f1.thin);
  fig1->add_option("--r", f1.R);
  fig1->add_option("--bins", f1.bins);

  // fig2
  Common c_fig2;
  Fig2Config f2;
  auto* fig2 = app.add_subcommand("fig2", "reduced N = 2 lattices vs exact densities");
  add_common(fig2, c_fig2, "json");
  fig2->add_option("--samples", f2.samples);
  fig2->add_option("--r-cap", f2.R_cap);
  fig2->add_option("--workers", f2.workers);
  fig2->add_option("--bins", f2.bins);

  // fig3
  Common c_fig3;
  Fig3Config f3;
  auto* fig3 = app.add_subcommand("fig3", "reduced N = 3 lattices");
  add_common(fig3, c_fig3, "json");
  fig3->add_option("--samples", f3.samples);
  fig3->add_option("--r-cap", f3.R_cap);
  fig3->add_option("--thin", f3.thin);
  fig3->add_option("--workers", f3.workers);
  fig3->add_option("--bins", f3.bins);

  // siegel
  Common c_siegel;
  SiegelConfig sg;
  std::string sg_conv = "both-signs";
  auto* siegel = app.add_subcommand("siegel", "mean lattice-point count in a ball");
  add_common(siegel, c_siegel, "json");
  siegel->add_option("--n", sg.N);
  siegel->add_option("--r", sg.R);
  siegel->add_option("--lattices", sg.lattices);
  siegel->add_option("--r-cap", sg.R_cap);
  siegel->add_option("--workers", sg.workers);
  siegel->add_option("--convention", sg_conv)->check(CLI::IsMember({"both-signs", "pairs-once"}));

  // verify
  Common c_verify;
  std::vector<int> vf_ids;
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  add_common(verify, c_verify, "json");
  verify->add_option("--criteria", vf_ids, "criterion ids (default: all)")->check(CLI::Range(1, 10));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::input_error);
  }

  try {
    if (*volume) return cmd_volume(c_volume, v_group, v_norm, v_n, v_r, v_r1, v_r2, v_method);
    if (*sample) return cmd_sample(c_sample, s_n, s_r, s_norm, s_steps, s_burn, s_thin, s_matrices);
    if (*reduce) return cmd_reduce(c_reduce, r_in);
    if (*charpoly) return cmd_charpoly(c_charpoly, cp_n, cp_r, cp_mc);
    if (*density) return cmd_density(c_density, d_which, d_grid, d_max);
    if (*count) return cmd_count(c_count, n_r, n_norm);
    if (*fig1) return cmd_fig1(c_fig1, f1);
    if (*fig2) return cmd_fig2(c_fig2, f2);
    if (*fig3) return cmd_fig3(c_fig3, f3);
    if (*siegel) return cmd_siegel(c_siegel, sg, sg_conv);
    if (*verify) return cmd_verify(c_verify, vf_ids);
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return static_cast<int>(ExitCode::input_error);
  } catch (const NonConvergence& e) {
    std::fprintf(stderr, "non-convergence: %s\n", e.what());
    return static_cast<int>(ExitCode::non_convergence);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(ExitCode::non_convergence);
  }
  return static_cast<int>(ExitCode::input_error);
}
