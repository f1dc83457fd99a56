#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "calaudit/calibration.hpp"
#include "calaudit/rng.hpp"
#include "calaudit/synthetic.hpp"
#include "oracles.hpp"

using namespace calaudit;

namespace {

struct Sample {
  std::vector<double> s;
  std::vector<std::uint8_t> y;
};

// Calibrated by construction: y ~ Bernoulli(s), s ~ Uniform(0, 1).
Sample calibrated(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Sample out;
  out.s.reserve(n);
  out.y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.s.push_back(rng.uniform());
    out.y.push_back(rng.uniform() < out.s.back() ? 1 : 0);
  }
  return out;
}

struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

TEST(BinScores, EqualWidthBoundaries) {
  const std::vector<double> s = {0.0, 0.05, 0.1, 0.11, 1.0};
  const Binning b = bin_scores(s, BinningScheme::kEqualWidth, 10);
  ASSERT_EQ(b.boundaries.size(), 11u);
  for (int k = 0; k <= 10; ++k) EXPECT_NEAR(b.boundaries[k], k / 10.0, 1e-15);
  EXPECT_EQ(b.membership, (std::vector<int>{0, 0, 0, 1, 9}));
}

TEST(BinScores, EqualWidthMatchesScan) {
  Rng rng(1);
  for (int n_bins : {1, 3, 7, 10, 15, 33}) {
    std::vector<double> s;
    for (int i = 0; i < 2000; ++i) s.push_back(rng.uniform());
    // Exact edges too, where floating-point bin arithmetic is most fragile.
    for (int k = 0; k <= n_bins; ++k) s.push_back(static_cast<double>(k) / n_bins);
    const Binning b = bin_scores(s, BinningScheme::kEqualWidth, n_bins);
    for (std::size_t i = 0; i < s.size(); ++i) {
      ASSERT_EQ(b.membership[i], oracle::scan_equal_width_bin(s[i], n_bins)) << s[i] << " " << n_bins;
    }
  }
}

TEST(BinScores, EqualCountSizes) {
  std::vector<double> s(100);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<double>((i * 37) % 100) / 100.0;
  auto counts = bin_scores(s, BinningScheme::kEqualCount, 10).bin_counts();
  for (auto c : counts) EXPECT_EQ(c, 10u);

  s.push_back(0.555);
  counts = bin_scores(s, BinningScheme::kEqualCount, 10).bin_counts();
  EXPECT_EQ(std::count(counts.begin(), counts.end(), 11u), 1);
  EXPECT_EQ(std::count(counts.begin(), counts.end(), 10u), 9);
}

TEST(BinScores, EqualCountMatchesRankOracle) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 15 + rng.below(400);
    const int n_bins = 1 + static_cast<int>(rng.below(15));
    std::vector<double> s(n);
    for (auto& v : s) v = trial % 2 ? rng.uniform() : static_cast<double>(rng.below(6)) / 5.0;
    const Binning b = bin_scores(s, BinningScheme::kEqualCount, n_bins);
    EXPECT_EQ(b.membership, oracle::rank_equal_count_bins(s, n_bins));
    EXPECT_EQ(b.boundaries.front(), 0.0);
    EXPECT_EQ(b.boundaries.back(), 1.0);
    EXPECT_TRUE(std::is_sorted(b.boundaries.begin(), b.boundaries.end()));
  }
}

TEST(BinScores, Errors) {
  const std::vector<double> s = {0.1, 0.2};
  EXPECT_THROW(bin_scores(s, BinningScheme::kEqualWidth, 0), std::invalid_argument);
  EXPECT_THROW(bin_scores(s, BinningScheme::kEqualCount, 3), std::invalid_argument);
}

TEST(Ece, Examples) {
  const std::vector<double> s = {0, 1, 1, 0};
  const std::vector<std::uint8_t> y = {0, 1, 1, 0};
  const Binning b = bin_scores(s, BinningScheme::kEqualWidth, kDefaultBins);
  EXPECT_DOUBLE_EQ(ece(s, y, b), 0.0);
  EXPECT_DOUBLE_EQ(mce(s, y, b), 0.0);

  const std::vector<double> flat(10, 0.7);
  const std::vector<std::uint8_t> half = {1, 0, 1, 0, 1, 0, 1, 0, 1, 0};
  EXPECT_NEAR(ece(flat, half, bin_scores(flat, BinningScheme::kEqualWidth, kDefaultBins)), 0.2,
              1e-12);
}

TEST(Mce, OneBadBin) {
  // The 0.75 and 0.5 bins are calibrated; the 0.35 bin has rate 0.75.
  const std::vector<double> s = {0.35, 0.35, 0.35, 0.35, 0.75, 0.75, 0.75, 0.75, 0.5, 0.5};
  const std::vector<std::uint8_t> y = {1, 1, 1, 0, 1, 1, 1, 0, 1, 0};
  const Binning b = bin_scores(s, BinningScheme::kEqualWidth, 10);
  EXPECT_NEAR(mce(s, y, b), 0.4, 1e-12);
  EXPECT_NEAR(ece(s, y, b), 0.4 * 4.0 / 10.0, 1e-12);
}

TEST(AdaEce, Examples) {
  const std::vector<double> s = {0, 0, 1, 1};
  const std::vector<std::uint8_t> y = {0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(ada_ece(s, y, 2), 0.0);

  const Sample d = calibrated(500, 4);
  const double mean_score = std::accumulate(d.s.begin(), d.s.end(), 0.0) / 500.0;
  const double prevalence = std::accumulate(d.y.begin(), d.y.end(), 0.0) / 500.0;
  EXPECT_NEAR(ada_ece(d.s, d.y, 1), std::abs(prevalence - mean_score), 1e-12);
}

TEST(BinMetrics, MatchRebinningOracle) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 20 + rng.below(1000);
    const int n_bins = 1 + static_cast<int>(rng.below(20));
    const Sample d = calibrated(n, 100 + trial);
    std::vector<int> width_bins(n);
    for (std::size_t i = 0; i < n; ++i) width_bins[i] = oracle::scan_equal_width_bin(d.s[i], n_bins);
    const auto width = oracle::rebin_errors(d.s, d.y, width_bins, n_bins);
    const Binning b = bin_scores(d.s, BinningScheme::kEqualWidth, n_bins);
    EXPECT_NEAR(ece(d.s, d.y, b), width.ece, 1e-12);
    EXPECT_NEAR(mce(d.s, d.y, b), width.mce, 1e-12);

    const auto count = oracle::rebin_errors(d.s, d.y, oracle::rank_equal_count_bins(d.s, n_bins), n_bins);
    EXPECT_NEAR(ada_ece(d.s, d.y, n_bins), count.ece, 1e-12);
  }
}

TEST(BinMetrics, BoundsAndPermutationInvariance) {
  Sample d = calibrated(700, 6);
  const Binning b = bin_scores(d.s, BinningScheme::kEqualWidth, kDefaultBins);
  const double e = ece(d.s, d.y, b), m = mce(d.s, d.y, b), a = ada_ece(d.s, d.y, kDefaultBins);
  EXPECT_LE(0.0, e);
  EXPECT_LE(e, m);
  EXPECT_LE(m, 1.0);

  std::vector<std::size_t> order(d.s.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(7);
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  Sample p;
  for (auto i : order) {
    p.s.push_back(d.s[i]);
    p.y.push_back(d.y[i]);
  }
  const Binning pb = bin_scores(p.s, BinningScheme::kEqualWidth, kDefaultBins);
  EXPECT_NEAR(ece(p.s, p.y, pb), e, 1e-12);
  EXPECT_NEAR(mce(p.s, p.y, pb), m, 1e-12);
  // Ties excepted, equal-count bins depend only on the sorted scores.
  EXPECT_NEAR(ada_ece(p.s, p.y, kDefaultBins), a, 1e-12);
}

TEST(CrossEntropy, Examples) {
  const std::vector<double> s = {0, 1, 1, 0};
  const std::vector<std::uint8_t> y = {0, 1, 1, 0};
  EXPECT_LE(cross_entropy(s, y), 1e-6);

  const std::vector<double> half(4, 0.5);
  EXPECT_NEAR(cross_entropy(half, y), std::log(2.0), 1e-15);

  const std::vector<double> wrong = {1, 0, 0, 1};
  EXPECT_NEAR(cross_entropy(wrong, y), -std::log(1e-7), 1e-8);
  EXPECT_NEAR(cross_entropy(wrong, y), 16.118, 1e-3);
}

TEST(CrossEntropy, EpsilonValidated) {
  const std::vector<double> s = {0.3};
  const std::vector<std::uint8_t> y = {1};
  EXPECT_THROW(cross_entropy(s, y, 0.0), std::invalid_argument);
  EXPECT_THROW(cross_entropy(s, y, 0.5), std::invalid_argument);
}

TEST(Brier, Examples) {
  const std::vector<std::uint8_t> y = {0, 1, 1, 0};
  const std::vector<double> exact = {0, 1, 1, 0};
  const std::vector<double> half(4, 0.5);
  const std::vector<double> wrong = {1, 0, 0, 1};
  EXPECT_DOUBLE_EQ(brier(exact, y), 0.0);
  EXPECT_DOUBLE_EQ(brier(half, y), 0.25);
  EXPECT_DOUBLE_EQ(brier(wrong, y), 1.0);
}

TEST(ReliabilityCurve, SkipsEmptyBinsAndSingleBin) {
  const std::vector<double> s = {0.05, 0.07, 0.95};
  const std::vector<std::uint8_t> y = {0, 1, 1};
  const auto points = reliability_curve(s, y, bin_scores(s, BinningScheme::kEqualWidth, 10));
  ASSERT_EQ(points.size(), 2u);
  EXPECT_EQ(points[0].bin_index, 0);
  EXPECT_EQ(points[0].count, 2u);
  EXPECT_NEAR(points[0].mean_score, 0.06, 1e-15);
  EXPECT_DOUBLE_EQ(points[0].positive_rate, 0.5);
  EXPECT_EQ(points[1].bin_index, 9);

  const auto one = reliability_curve(s, y, bin_scores(s, BinningScheme::kEqualWidth, 1));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_NEAR(one[0].mean_score, (0.05 + 0.07 + 0.95) / 3.0, 1e-15);
  EXPECT_NEAR(one[0].positive_rate, 2.0 / 3.0, 1e-15);
}

TEST(ReliabilityCurve, CalibratedPointsNearDiagonal) {
  const Sample d = calibrated(200000, 8);
  for (const auto& p : reliability_curve(d.s, d.y, bin_scores(d.s, BinningScheme::kEqualWidth, 10))) {
    EXPECT_NEAR(p.positive_rate, p.mean_score, 0.01);
  }
}

TEST(ReliabilityCurve, DistortedFollowsInverseTransform) {
  // Scores s = I_p(5, 5). In a narrow bin the empirical positive rate tracks
  // the true posterior I^-1(s) averaged over the bin's members.
  const SyntheticPopulation pop = generate_population(1000000, 9);
  const SyntheticScenario scenario(5.0, 5.0);
  const std::vector<double> s = scenario.distort(pop.true_posterior);
  const Binning b = bin_scores(s, BinningScheme::kEqualWidth, 20);
  std::vector<double> expected(20, 0.0), count(20, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    expected[b.membership[i]] += inverse_regularized_incomplete_beta(s[i], 5.0, 5.0);
    count[b.membership[i]] += 1.0;
  }
  double max_gap = 0.0;
  for (const auto& p : reliability_curve(s, pop.labels, b)) {
    const double truth = expected[p.bin_index] / count[p.bin_index];
    const double se = std::sqrt(truth * (1.0 - truth) / static_cast<double>(p.count));
    EXPECT_NEAR(p.positive_rate, truth, 4.0 * se + 1e-3) << "bin " << p.bin_index;
    max_gap = std::max(max_gap, std::abs(p.positive_rate - p.mean_score));
  }
  EXPECT_GT(max_gap, 0.1);  // visibly off the diagonal
}

TEST(SampleSizeBias, CalibratedEceShrinksWithN) {
  std::vector<double> means;
  for (std::size_t n : {500u, 5000u, 50000u}) {
    std::vector<double> values;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Sample d = calibrated(n, 1000 + seed * 7 + n);
      values.push_back(ece(d.s, d.y, bin_scores(d.s, BinningScheme::kEqualWidth, kDefaultBins)));
    }
    means.push_back(mean_se(values).mean);
  }
  EXPECT_GT(means[0], means[1]);
  EXPECT_GT(means[1], means[2]);
}

TEST(SampleSizeBias, ProperScoringRulesUnbiased) {
  std::vector<double> ce_small, ce_large, br_small, br_large;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Sample a = calibrated(500, 5000 + seed);
    const Sample b = calibrated(50000, 9000 + seed);
    ce_small.push_back(cross_entropy(a.s, a.y));
    ce_large.push_back(cross_entropy(b.s, b.y));
    br_small.push_back(brier(a.s, a.y));
    br_large.push_back(brier(b.s, b.y));
  }
  auto close = [](const std::vector<double>& x, const std::vector<double>& y) {
    const MeanSe a = mean_se(x), b = mean_se(y);
    return std::abs(a.mean - b.mean) < 3.0 * std::hypot(a.se, b.se);
  };
  EXPECT_TRUE(close(ce_small, ce_large));
  EXPECT_TRUE(close(br_small, br_large));
}
