#pragma once

// End-to-end experiments: sample, reduce, histogram, compare. Work is split
// into chunks keyed by derive_seed(seed, chunk); results are concatenated in
// chunk order, so output does not depend on the number of workers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <numbers>
#include <string>
#include <vector>

#include "unimodular/analytics.hpp"
#include "unimodular/errors.hpp"
#include "unimodular/io.hpp"
#include "unimodular/lattice.hpp"
#include "unimodular/rng.hpp"
#include "unimodular/sampler.hpp"
#include "unimodular/specfun.hpp"
#include "unimodular/stats.hpp"
#include "unimodular/version.hpp"

namespace unimodular {

namespace detail {

// Runs job(chunk) for chunk = 0..chunks-1 on up to `workers` threads and
// returns the results in chunk order.
template <typename Job>
auto run_chunks(int chunks, int workers, Job job) -> std::vector<decltype(job(0))> {
  require(chunks >= 1, "run_chunks: need at least one chunk");
  require(workers >= 1, "run_chunks: workers must be >= 1");
  std::vector<decltype(job(0))> out(chunks);
  if (workers == 1) {
    for (int c = 0; c < chunks; ++c) out[c] = job(c);
    return out;
  }
  for (int start = 0; start < chunks; start += workers) {
    std::vector<std::future<decltype(job(0))>> futures;
    const int stop = std::min(chunks, start + workers);
    for (int c = start; c < stop; ++c) futures.push_back(std::async(std::launch::async, job, c));
    for (int c = start; c < stop; ++c) out[c] = futures[c - start].get();
  }
  return out;
}

inline void append(std::vector<double>& dst, const std::vector<double>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

// Chain configuration emitting `samples` states after burn-in.
inline ChainConfig chain_for(std::int64_t samples, std::int64_t thin, std::uint64_t seed, double burn_fraction = 0.1) {
  ChainConfig cfg;
  cfg.thin = thin;
  const std::int64_t body = samples * thin;
  cfg.burn_in = std::max<std::int64_t>(20000, static_cast<std::int64_t>(burn_fraction * body));
  cfg.steps = cfg.burn_in + body;
  cfg.seed = seed;
  return cfg;
}

}  // namespace detail

// ---------------------------------------------------------------- sigma_1 marginal (fig1)

struct Fig1Config {
  std::uint64_t seed = 1;
  std::int64_t steps = 500000;
  std::int64_t thin = 50;  // about 2.5 integrated autocorrelation times of sigma_1
  double R = 4.0;
  int bins = 50;
};

struct Fig1Result {
  Fig1Config config;
  GofReport gof;
  EmpiricalDistribution histogram;
  ChainStats chain;
  std::vector<double> sigma1;
};

/// sigma_1 of the N = 3 chain against the exact marginal.
inline Fig1Result reproduce_fig1(const Fig1Config& cfg = {}) {
  require(cfg.R > 1.0, "reproduce_fig1: R must exceed 1");
  require(cfg.steps >= 20, "reproduce_fig1: too few steps");
  Fig1Result out;
  out.config = cfg;
  ChainConfig chain;
  chain.steps = cfg.steps;
  chain.thin = cfg.thin;
  chain.seed = derive_seed(cfg.seed, 0);
  SplitMix64 init_rng(derive_seed(cfg.seed, 1));
  out.chain = mcmc_sv(3, cfg.R, chain, dirichlet_initial(3, cfg.R, init_rng),
                      [&](std::int64_t, const SingularValues& sv) { out.sigma1.push_back(sv.sigma[0]); });
  require(!out.sigma1.empty(), "reproduce_fig1: chain emitted no samples");
  out.histogram = make_histogram(out.sigma1, 1.0, cfg.R, cfg.bins);
  const double R = cfg.R;
  out.gof = goodness_of_fit(out.sigma1, out.histogram, [R](double s) { return p3_cdf(s, R); });
  return out;
}

// ---------------------------------------------------------------- reduced N = 2 lattices (fig2)

struct Fig2Config {
  std::uint64_t seed = 1;
  std::int64_t samples = 100000;
  double R_cap = 100.0;
  std::int64_t chunk_size = 10000;
  int workers = 1;
  int bins = 50;
  double second_hist_max = 4.0;  // tail beyond this is one overflow cell
};

struct Fig2Result {
  Fig2Config config;
  std::vector<double> shortest, second, cosine;
  EmpiricalDistribution hist_shortest, hist_second, hist_cosine;
  GofReport gof_shortest, gof_second, gof_cosine;
  double max_shortest = 0.0;
  double max_abs_cosine = 0.0;
  double cosine_symmetry_ks = 0.0;
  double cosine_symmetry_threshold = 0.0;

  bool pass() const {
    return gof_shortest.pass && gof_second.pass && gof_cosine.pass && max_shortest <= shortest_length_max &&
           max_abs_cosine <= 0.5;
  }
};

inline Fig2Result reproduce_fig2(const Fig2Config& cfg = {}) {
  require(cfg.samples >= 10, "reproduce_fig2: too few samples");
  require(cfg.R_cap > 1.0, "reproduce_fig2: R_cap must exceed 1");
  require(cfg.chunk_size >= 1, "reproduce_fig2: chunk_size must be positive");
  struct Chunk {
    std::vector<double> a, b, c;
  };
  const int chunks = static_cast<int>((cfg.samples + cfg.chunk_size - 1) / cfg.chunk_size);
  auto job = [&](int chunk) {
    SplitMix64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(chunk)));
    const std::int64_t n = std::min(cfg.chunk_size, cfg.samples - chunk * cfg.chunk_size);
    Chunk out;
    for (std::int64_t i = 0; i < n; ++i) {
      const auto sm = assemble_matrix(sample_sv_n2(cfg.R_cap, rng), rng);
      const auto red = lagrange_gauss(make_basis(sm.M));
      out.a.push_back(red.lengths[0]);
      out.b.push_back(red.lengths[1]);
      out.c.push_back(red.cosines[0]);
    }
    return out;
  };
  Fig2Result r;
  r.config = cfg;
  for (const auto& c : detail::run_chunks(chunks, cfg.workers, job)) {
    detail::append(r.shortest, c.a);
    detail::append(r.second, c.b);
    detail::append(r.cosine, c.c);
  }
  r.hist_shortest = make_histogram(r.shortest, 0.0, shortest_length_max, cfg.bins);
  r.hist_second = make_histogram(r.second, 1.0, cfg.second_hist_max, cfg.bins);
  r.hist_cosine = make_histogram(r.cosine, -0.5, 0.5, cfg.bins);
  r.gof_shortest = goodness_of_fit(r.shortest, r.hist_shortest, cdf_shortest_n2);
  r.gof_second = goodness_of_fit(r.second, r.hist_second, cdf_second_n2);
  r.gof_cosine = goodness_of_fit(r.cosine, r.hist_cosine, cdf_cosine_n2);
  r.max_shortest = *std::max_element(r.shortest.begin(), r.shortest.end());
  std::vector<double> pos, neg;
  for (double c : r.cosine) {
    r.max_abs_cosine = std::max(r.max_abs_cosine, std::abs(c));
    (c > 0.0 ? pos : neg).push_back(std::abs(c));
  }
  if (!pos.empty() && !neg.empty()) {
    r.cosine_symmetry_ks = ks_two_sample(pos, neg);
    r.cosine_symmetry_threshold =
        ks_threshold_1pct(static_cast<std::int64_t>(pos.size()), static_cast<std::int64_t>(neg.size()));
  }
  return r;
}

// ---------------------------------------------------------------- reduced N = 3 lattices (fig3)

struct Fig3Config {
  std::uint64_t seed = 1;
  std::int64_t samples = 100000;
  double R_cap = 100.0;
  std::int64_t chunk_size = 25000;  // one chain per chunk
  std::int64_t thin = 50;
  int workers = 1;
  int bins = 50;
  double small_s_cut = 1.0 / 3.0;
  int small_s_bins = 10;
};

struct Fig3Result {
  Fig3Config config;
  std::vector<double> lengths[3];
  std::vector<double> cosines[3];  // (1,2), (1,3), (2,3)
  EmpiricalDistribution hist_lengths[3];
  EmpiricalDistribution hist_cosines[3];
  double max_length1 = 0.0;
  double min_length2 = 0.0;
  double min_length3 = 0.0;
  double max_abs_cosine[3] = {0.0, 0.0, 0.0};
  std::int64_t small_s_count = 0;
  double small_s_expected = 0.0;
  ChiSquare small_s_chi2;
  double mean_acceptance = 0.0;
};

/// Density of the shortest length near zero: (2 pi / zeta(3)) s^2.
inline double small_s_coefficient() { return 2.0 * std::numbers::pi / riemann_zeta_int(3); }

inline Fig3Result reproduce_fig3(const Fig3Config& cfg = {}) {
  require(cfg.samples >= 10, "reproduce_fig3: too few samples");
  require(cfg.R_cap > 1.0, "reproduce_fig3: R_cap must exceed 1");
  require(cfg.chunk_size >= 10, "reproduce_fig3: chunk_size must be >= 10");
  struct Chunk {
    std::vector<double> l[3], c[3];
    double acceptance = 0.0;
  };
  const int chunks = static_cast<int>((cfg.samples + cfg.chunk_size - 1) / cfg.chunk_size);
  auto job = [&](int chunk) {
    const std::uint64_t base = derive_seed(cfg.seed, static_cast<std::uint64_t>(chunk));
    const std::int64_t n = std::min(cfg.chunk_size, cfg.samples - chunk * cfg.chunk_size);
    SplitMix64 rng(derive_seed(base, 1));
    const auto chain = detail::chain_for(n, cfg.thin, derive_seed(base, 0));
    Chunk out;
    const auto init = dirichlet_initial(3, cfg.R_cap, rng);
    const auto stats = mcmc_sv(3, cfg.R_cap, chain, init, [&](std::int64_t, const SingularValues& sv) {
      if (static_cast<std::int64_t>(out.l[0].size()) >= n) return;
      const auto sm = assemble_matrix(sv, rng);
      const auto red = semaev_reduce(make_basis(sm.M));
      for (int i = 0; i < 3; ++i) {
        out.l[i].push_back(red.lengths[i]);
        out.c[i].push_back(red.cosines[i]);
      }
    });
    out.acceptance = stats.acceptance_rate();
    return out;
  };
  Fig3Result r;
  r.config = cfg;
  const auto parts = detail::run_chunks(chunks, cfg.workers, job);
  for (const auto& c : parts) {
    for (int i = 0; i < 3; ++i) {
      detail::append(r.lengths[i], c.l[i]);
      detail::append(r.cosines[i], c.c[i]);
    }
    r.mean_acceptance += c.acceptance / chunks;
  }
  for (int i = 0; i < 3; ++i) {
    r.hist_lengths[i] = make_histogram(r.lengths[i], cfg.bins);
    r.hist_cosines[i] = make_histogram(r.cosines[i], cfg.bins);
    for (double c : r.cosines[i]) r.max_abs_cosine[i] = std::max(r.max_abs_cosine[i], std::abs(c));
  }
  r.max_length1 = *std::max_element(r.lengths[0].begin(), r.lengths[0].end());
  r.min_length2 = *std::min_element(r.lengths[1].begin(), r.lengths[1].end());
  r.min_length3 = *std::min_element(r.lengths[2].begin(), r.lengths[2].end());

  // Small-s law: cells on (0, cut) plus one cell for the rest.
  const double C = small_s_coefficient();
  const double cut = cfg.small_s_cut;
  auto cdf = [C, cut](double s) {
    const double x = std::clamp(s, 0.0, cut);
    return C * x * x * x / 3.0;
  };
  const auto h = make_histogram(r.lengths[0], 0.0, cut, cfg.small_s_bins);
  r.small_s_count = h.total - h.overflow - h.underflow;
  r.small_s_expected = static_cast<double>(h.total) * cdf(cut);
  r.small_s_chi2 = chi_square(h, cdf);
  return r;
}

// ---------------------------------------------------------------- Siegel

struct SiegelConfig {
  int N = 2;
  double R = 0.8;
  std::int64_t lattices = 100000;
  std::uint64_t seed = 1;
  double R_cap = 100.0;
  PairConvention convention = PairConvention::both_signs;
  std::int64_t chunk_size = 10000;
  std::int64_t thin = 50;
  int workers = 1;
};

struct SiegelReport {
  SiegelConfig config;
  double mean = 0.0;
  double standard_error = 0.0;
  double target = 0.0;  // volume of the ball of radius R
  double z = 0.0;
  bool pass = false;  // |z| < 3
};

inline double ball_volume(int N, double R) {
  return std::pow(std::numbers::pi, 0.5 * N) * std::pow(R, N) / std::tgamma(0.5 * N + 1.0);
}

/// Mean number of nonzero lattice points in the ball against its volume.
inline SiegelReport siegel_check(const SiegelConfig& cfg) {
  require(cfg.N == 2 || cfg.N == 3, "siegel_check: N must be 2 or 3");
  require(cfg.R > 0.0, "siegel_check: R must be positive");
  require(cfg.lattices >= 100, "siegel_check: need at least 100 lattices");
  require(cfg.chunk_size >= 10, "siegel_check: chunk_size must be >= 10");
  const int chunks = static_cast<int>((cfg.lattices + cfg.chunk_size - 1) / cfg.chunk_size);
  auto job = [&](int chunk) {
    const std::uint64_t base = derive_seed(cfg.seed, static_cast<std::uint64_t>(chunk));
    const std::int64_t n = std::min(cfg.chunk_size, cfg.lattices - chunk * cfg.chunk_size);
    SplitMix64 rng(derive_seed(base, 1));
    std::vector<double> counts;
    auto record = [&](const SingularValues& sv) {
      const auto sm = assemble_matrix(sv, rng);
      const auto basis = make_basis(sm.M);
      const auto red = cfg.N == 2 ? lagrange_gauss(basis) : semaev_reduce(basis);
      counts.push_back(static_cast<double>(count_points_in_ball(red, cfg.R, cfg.convention)));
    };
    if (cfg.N == 2) {
      for (std::int64_t i = 0; i < n; ++i) record(sample_sv_n2(cfg.R_cap, rng));
    } else {
      const auto chain = detail::chain_for(n, cfg.thin, derive_seed(base, 0));
      mcmc_sv(3, cfg.R_cap, chain, dirichlet_initial(3, cfg.R_cap, rng), [&](std::int64_t, const SingularValues& sv) {
        if (static_cast<std::int64_t>(counts.size()) < n) record(sv);
      });
    }
    return counts;
  };
  std::vector<double> counts;
  for (const auto& c : detail::run_chunks(chunks, cfg.workers, job)) detail::append(counts, c);
  SiegelReport r;
  r.config = cfg;
  const auto est = batch_means(counts, 50);
  r.mean = est.mean;
  r.standard_error = est.standard_error;
  r.target = ball_volume(cfg.N, cfg.R);
  if (cfg.convention == PairConvention::pairs_once) r.target *= 0.5;
  r.z = r.standard_error > 0.0 ? (r.mean - r.target) / r.standard_error : (r.mean == r.target ? 0.0 : 1e300);
  r.pass = std::abs(r.z) < 3.0;
  return r;
}

// ---------------------------------------------------------------- CSV

inline void histogram_rows(io::CsvTable& table, const std::string& quantity, const EmpiricalDistribution& h,
                           const std::function<double(double)>& model_pdf, std::uint64_t seed) {
  const auto heights = h.normalized_heights();
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    const double lo = h.bin_edges[i], hi = h.bin_edges[i + 1];
    const double model = model_pdf ? model_pdf(0.5 * (lo + hi)) : std::nan("");
    table.row() << quantity << lo << hi << h.counts[i] << heights[i] << model << seed << library_version;
  }
}

inline io::CsvTable histogram_table() {
  return io::CsvTable({"quantity", "bin_lo", "bin_hi", "count", "density", "model_density", "seed", "version"});
}

inline io::CsvTable fig1_table(const Fig1Result& r) {
  auto t = histogram_table();
  const double R = r.config.R;
  histogram_rows(t, "sigma1", r.histogram, [R](double s) { return p3_density(s, R); }, r.config.seed);
  return t;
}

inline io::CsvTable fig2_table(const Fig2Result& r) {
  auto t = histogram_table();
  histogram_rows(t, "shortest", r.hist_shortest, pdf_shortest_n2, r.config.seed);
  histogram_rows(t, "second", r.hist_second, pdf_second_n2, r.config.seed);
  histogram_rows(t, "cosine", r.hist_cosine, pdf_cosine_n2, r.config.seed);
  return t;
}

inline io::CsvTable fig3_table(const Fig3Result& r) {
  auto t = histogram_table();
  const char* lengths[3] = {"length1", "length2", "length3"};
  const char* cosines[3] = {"cos12", "cos13", "cos23"};
  const double C = small_s_coefficient();
  for (int i = 0; i < 3; ++i) {
    std::function<double(double)> model;
    if (i == 0) model = [C](double s) { return s < 1.0 / 3.0 ? C * s * s : std::nan(""); };
    histogram_rows(t, lengths[i], r.hist_lengths[i], model, r.config.seed);
  }
  for (int i = 0; i < 3; ++i) histogram_rows(t, cosines[i], r.hist_cosines[i], nullptr, r.config.seed);
  return t;
}

}  // namespace unimodular
