#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "unimodular/io.hpp"
#include "unimodular/pipelines.hpp"
#include "unimodular/stats.hpp"

using namespace unimodular;

TEST(Histogram, MassConservation) {
  SplitMix64 rng(1);
  std::vector<double> x;
  for (int i = 0; i < 1000; ++i) x.push_back(3.0 * rng.uniform() - 1.0);
  const auto h = make_histogram(x, 0.0, 1.0, 7);
  const auto inside = std::accumulate(h.counts.begin(), h.counts.end(), std::int64_t{0});
  EXPECT_EQ(inside + h.underflow + h.overflow, h.total);
  EXPECT_EQ(h.total, 1000);
  EXPECT_GT(h.underflow, 0);
  EXPECT_GT(h.overflow, 0);
  // Heights integrate to one over the in-range mass.
  const auto ht = h.normalized_heights();
  double area = 0.0;
  for (std::size_t i = 0; i < ht.size(); ++i) area += ht[i] * (h.bin_edges[i + 1] - h.bin_edges[i]);
  EXPECT_NEAR(area, 1.0, 1e-12);
}

TEST(Histogram, RightEdgeIsInside) {
  const auto h = make_histogram({0.0, 1.0, 1.0}, 0.0, 1.0, 4);
  EXPECT_EQ(h.counts[0], 1);
  EXPECT_EQ(h.counts[3], 2);
  EXPECT_EQ(h.overflow, 0);
  EXPECT_THROW(make_histogram({1.0}, 1.0, 1.0, 4), InputError);
}

TEST(Ks, KnownStatistic) {
  // Sample {0.5} against U(0,1): sup is 0.5.
  EXPECT_DOUBLE_EQ(ks_statistic({0.5}, [](double x) { return x; }), 0.5);
  // Perfectly spaced sample: D = 1/(2n).
  std::vector<double> x;
  for (int i = 0; i < 100; ++i) x.push_back((i + 0.5) / 100.0);
  EXPECT_NEAR(ks_statistic(x, [](double t) { return t; }), 0.005, 1e-15);
  EXPECT_NEAR(ks_threshold_1pct(10000), 0.01628, 1e-12);
}

TEST(Ks, TwoSample) {
  EXPECT_DOUBLE_EQ(ks_two_sample({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(ks_two_sample({1, 2}, {3, 4}), 1.0);
  EXPECT_DOUBLE_EQ(ks_two_sample({1, 3}, {2, 4}), 0.5);
}

TEST(Ks, UniformSampleRejectionRate) {
  // At the 1% level roughly 1 in 100 honest samples is rejected.
  int rejected = 0;
  for (int rep = 0; rep < 300; ++rep) {
    SplitMix64 rng(1000 + rep);
    std::vector<double> x(2000);
    for (auto& v : x) v = rng.uniform();
    rejected += ks_statistic(x, [](double t) { return t; }) >= ks_threshold_1pct(2000);
  }
  EXPECT_LE(rejected, 10);
}

TEST(ChiSquare, MergesSmallCells) {
  // 10 samples in 10 bins: expected 1 per cell, merged into cells of >= 5.
  std::vector<double> x;
  for (int i = 0; i < 10; ++i) x.push_back((i + 0.5) / 10.0);
  const auto h = make_histogram(x, 0.0, 1.0, 10);
  const auto c = chi_square(h, [](double t) { return std::clamp(t, 0.0, 1.0); });
  EXPECT_EQ(c.merged_bins, 2);
  EXPECT_NEAR(c.statistic, 0.0, 1e-12);
  EXPECT_EQ(c.dof, 1);
}

TEST(ChiSquare, PValueMatchesClosedForm) {
  // Two cells, dof 1: p = erfc(sqrt(chi2/2)).
  const auto h = make_histogram(std::vector<double>(60, 0.25), 0.0, 1.0, 2);
  const auto c = chi_square(h, [](double t) { return std::clamp(t, 0.0, 1.0); });
  EXPECT_NEAR(c.statistic, 60.0, 1e-12);
  EXPECT_NEAR(c.pvalue, std::erfc(std::sqrt(30.0)), 1e-20);
}

TEST(ChiSquare, UniformPValuesAreUniform) {
  int low = 0;
  for (int rep = 0; rep < 300; ++rep) {
    SplitMix64 rng(5000 + rep);
    std::vector<double> x(5000);
    for (auto& v : x) v = rng.uniform();
    const auto h = make_histogram(x, 0.0, 1.0, 50);
    low += chi_square(h, [](double t) { return std::clamp(t, 0.0, 1.0); }).pvalue < 0.01;
  }
  EXPECT_LE(low, 10);
}

TEST(GofReport, PassMeansBothTests) {
  SplitMix64 rng(3);
  std::vector<double> x(5000);
  for (auto& v : x) v = rng.uniform();
  auto h = make_histogram(x, 0.0, 1.0, 50);
  const auto good = goodness_of_fit(x, h, [](double t) { return std::clamp(t, 0.0, 1.0); });
  EXPECT_EQ(good.pass, good.ks_statistic < good.ks_threshold_1pct && good.chi2_pvalue > 0.01);
  EXPECT_TRUE(good.pass);
  for (auto& v : x) v = v * v;
  h = make_histogram(x, 0.0, 1.0, 50);
  EXPECT_FALSE(goodness_of_fit(x, h, [](double t) { return std::clamp(t, 0.0, 1.0); }).pass);
}

TEST(BatchMeans, IidStandardError) {
  SplitMix64 rng(4);
  std::vector<double> x(100000);
  for (auto& v : x) v = rng.normal();
  const auto e = batch_means(x);
  EXPECT_NEAR(e.standard_error, 1.0 / std::sqrt(1e5), 0.3 / std::sqrt(1e5));
  EXPECT_THROW(batch_means(std::vector<double>(10, 1.0)), InputError);
}

TEST(Csv, SeventeenDigitsRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -2.5e17}) {
    EXPECT_EQ(std::stod(io::format_double(x)), x);
  }
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
}

TEST(Csv, Rfc4180Quoting) {
  io::CsvTable t({"a", "b"});
  t.row() << "x,y" << "say \"hi\"";
  t.row() << 1.5 << std::int64_t{7};
  EXPECT_EQ(t.str(), "a,b\r\n\"x,y\",\"say \"\"hi\"\"\"\r\n1.5,7\r\n");
  io::CsvTable bad({"a", "b"});
  bad.row() << 1.0;
  EXPECT_THROW(bad.str(), InputError);
}

TEST(Pipelines, Fig1WellFormedWhenUnderSampled) {
  Fig1Config cfg;
  cfg.steps = 1000;
  cfg.thin = 1;
  const auto r = reproduce_fig1(cfg);
  EXPECT_EQ(r.histogram.total, static_cast<std::int64_t>(r.sigma1.size()));
  EXPECT_EQ(r.gof.samples, r.histogram.total);
  EXPECT_GE(r.gof.chi2_dof, 1);
  EXPECT_TRUE(std::isfinite(r.gof.ks_statistic));
}

TEST(Pipelines, Fig1TwoSeedsPass) {
  for (std::uint64_t seed : {11u, 12u}) {
    Fig1Config cfg;
    cfg.seed = seed;
    const auto r = reproduce_fig1(cfg);
    EXPECT_TRUE(r.gof.pass) << "seed " << seed << " p=" << r.gof.chi2_pvalue;
    EXPECT_GT(r.chain.acceptance_rate(), 0.35);
    EXPECT_LT(r.chain.acceptance_rate(), 0.65);
  }
}

TEST(Pipelines, Fig2CosineSymmetric) {
  Fig2Config cfg;
  cfg.samples = 40000;
  cfg.seed = 8;
  const auto r = reproduce_fig2(cfg);
  EXPECT_LT(r.cosine_symmetry_ks, r.cosine_symmetry_threshold);
  EXPECT_LE(r.max_shortest, shortest_length_max);
  EXPECT_LE(r.max_abs_cosine, 0.5);
  EXPECT_EQ(r.hist_cosine.total, 40000);
}

TEST(Pipelines, DeterministicAcrossWorkers) {
  Fig2Config cfg;
  cfg.samples = 3000;
  cfg.chunk_size = 700;
  cfg.seed = 99;
  const auto a = fig2_table(reproduce_fig2(cfg)).str();
  cfg.workers = 3;
  const auto b = fig2_table(reproduce_fig2(cfg)).str();
  EXPECT_EQ(a, b);
  cfg.seed = 100;
  EXPECT_NE(a, fig2_table(reproduce_fig2(cfg)).str());
}

TEST(Pipelines, CsvRowsCarrySeedAndVersion) {
  Fig1Config cfg;
  cfg.steps = 5000;
  cfg.seed = 4242;
  const auto t = fig1_table(reproduce_fig1(cfg));
  EXPECT_EQ(t.size(), 50u);
  std::istringstream in(t.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "quantity,bin_lo,bin_hi,count,density,model_density,seed,version\r");
  while (std::getline(in, line)) {
    EXPECT_NE(line.find(",4242," + std::string(library_version)), std::string::npos) << line;
  }
}

TEST(Pipelines, Fig3SmallRun) {
  Fig3Config cfg;
  cfg.samples = 4000;
  cfg.chunk_size = 2000;
  const auto r = reproduce_fig3(cfg);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(r.lengths[i].size(), 4000u);
    EXPECT_EQ(r.hist_lengths[i].total, 4000);
  }
  for (std::size_t k = 0; k < r.lengths[0].size(); ++k) {
    ASSERT_LE(r.lengths[0][k], r.lengths[1][k]);
    ASSERT_LE(r.lengths[1][k], r.lengths[2][k]);
  }
  // 3D Hermite bound.
  EXPECT_LE(r.max_length1, std::pow(2.0, 1.0 / 6.0) + 1e-9);
  EXPECT_GE(r.min_length3, 1.0 - 1e-9);
  EXPECT_NEAR(small_s_coefficient(), 2.0 * std::numbers::pi / 1.2020569031595942, 1e-12);
}

TEST(Siegel, ConventionCalibration) {
  SiegelConfig cfg;
  cfg.N = 2;
  cfg.R = 0.8;
  cfg.lattices = 20000;
  cfg.seed = 3;
  const auto both = siegel_check(cfg);
  cfg.convention = PairConvention::pairs_once;
  const auto once = siegel_check(cfg);
  EXPECT_NEAR(once.mean, 0.5 * both.mean, 1e-12);
  EXPECT_NEAR(once.target, 0.5 * both.target, 1e-12);
  EXPECT_TRUE(both.pass) << both.z;
}

TEST(Siegel, SmallRadius) {
  // A vector shorter than 0.1 needs a lattice deep in the cusp, which the
  // ball sigma_1 < 100 under-covers; a larger cap removes the bias.
  SiegelConfig cfg;
  cfg.N = 2;
  cfg.R = 0.1;
  cfg.lattices = 200000;
  cfg.R_cap = 1e4;
  cfg.seed = 5;
  const auto r = siegel_check(cfg);
  EXPECT_TRUE(r.pass) << r.mean << " vs " << r.target;
}

TEST(Siegel, TruncationBiasAtSmallRadius) {
  SiegelConfig cfg;
  cfg.N = 2;
  cfg.R = 0.2;
  cfg.lattices = 200000;
  cfg.seed = 7;
  const auto capped = siegel_check(cfg);
  EXPECT_LT(capped.z, -3.0) << capped.mean << " vs " << capped.target;
  cfg.R_cap = 1e4;
  const auto wide = siegel_check(cfg);
  EXPECT_TRUE(wide.pass) << wide.mean << " vs " << wide.target;
}

TEST(Siegel, ThreeDimensions) {
  SiegelConfig cfg;
  cfg.N = 3;
  cfg.R = 0.8;
  cfg.lattices = 10000;
  cfg.seed = 6;
  const auto r = siegel_check(cfg);
  EXPECT_NEAR(r.target, 4.0 / 3.0 * std::numbers::pi * 0.512, 1e-12);
  EXPECT_TRUE(r.pass) << r.mean << " vs " << r.target << " z=" << r.z;
}

TEST(Siegel, RejectsBadInput) {
  SiegelConfig cfg;
  cfg.N = 4;
  EXPECT_THROW(siegel_check(cfg), InputError);
}
