#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "calaudit/score_set.hpp"

namespace calaudit {

inline constexpr int kDefaultBins = 15;
inline constexpr double kDefaultClipEpsilon = 1e-7;

enum class BinningScheme { kEqualWidth, kEqualCount };

std::string_view to_string(BinningScheme scheme);

/// Partition of [0, 1] into score bins plus the bin of every sample.
///
/// Equal-width bins are right-closed, (b_k, b_k+1], except bin 0 which also
/// holds 0. Equal-count bins are cut on the stable ascending order of the
/// scores, so populations differ by at most one and tied scores may straddle
/// a cut; the interior boundaries reported for them are midpoints between
/// neighbouring order statistics and are only non-decreasing under ties.
struct Binning {
  BinningScheme scheme = BinningScheme::kEqualWidth;
  int n_bins = 0;
  std::vector<double> boundaries;  // n_bins + 1 values, first 0, last 1
  std::vector<int> membership;     // bin index per sample

  std::vector<std::size_t> bin_counts() const;
};

/// Bins the given scores. Throws std::invalid_argument for n_bins < 1, and for
/// equal-count binning with fewer samples than bins.
Binning bin_scores(Scores scores, BinningScheme scheme, int n_bins);
Binning bin_scores(const ScoreSet& set, BinningScheme scheme, int n_bins);

struct ReliabilityPoint {
  int bin_index = 0;
  double mean_score = 0.0;
  double positive_rate = 0.0;
  std::size_t count = 0;
};

/// Sum over bins of (n_b / N) |positive_rate_b - mean_score_b|.
double ece(Scores scores, Labels labels, const Binning& binning);
double ece(const ScoreSet& set, const Binning& binning);

/// Largest |positive_rate_b - mean_score_b| over non-empty bins.
double mce(Scores scores, Labels labels, const Binning& binning);
double mce(const ScoreSet& set, const Binning& binning);

/// ECE over equal-count bins.
double ada_ece(Scores scores, Labels labels, int n_bins);
double ada_ece(const ScoreSet& set, int n_bins);

/// Mean negative log-likelihood (natural log) with scores clamped to
/// [eps, 1 - eps]; eps must lie in (0, 0.5).
double cross_entropy(Scores scores, Labels labels, double clip_epsilon = kDefaultClipEpsilon);
double cross_entropy(const ScoreSet& set, double clip_epsilon = kDefaultClipEpsilon);

/// Mean squared difference between score and label.
double brier(Scores scores, Labels labels);
double brier(const ScoreSet& set);

/// One point per non-empty bin, ordered by bin index.
std::vector<ReliabilityPoint> reliability_curve(Scores scores, Labels labels,
                                                const Binning& binning);
std::vector<ReliabilityPoint> reliability_curve(const ScoreSet& set, const Binning& binning);

}  // namespace calaudit
