#include "calaudit/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace calaudit {

namespace {

struct BinTotals {
  std::vector<double> score_sum;
  std::vector<double> label_sum;
  std::vector<std::size_t> count;
};

BinTotals accumulate(Scores scores, Labels labels, const Binning& binning, const char* what) {
  require_aligned(scores, labels, what);
  if (binning.membership.size() != scores.size()) {
    throw std::invalid_argument(std::string(what) + ": binning was built over a different set");
  }
  const auto nb = static_cast<std::size_t>(binning.n_bins);
  BinTotals t{std::vector<double>(nb, 0.0), std::vector<double>(nb, 0.0),
              std::vector<std::size_t>(nb, 0)};
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto b = static_cast<std::size_t>(binning.membership[i]);
    t.score_sum[b] += scores[i];
    t.label_sum[b] += labels[i];
    ++t.count[b];
  }
  return t;
}

void check_epsilon(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) {
    throw std::invalid_argument("clip epsilon must lie in (0, 0.5)");
  }
}

int equal_width_bin(double s, const std::vector<double>& edges, int n_bins) {
  int b = static_cast<int>(std::ceil(s * n_bins)) - 1;
  b = std::clamp(b, 0, n_bins - 1);
  // s * n_bins can land one ulp across an edge; settle against the stored edges.
  while (b > 0 && s <= edges[b]) --b;
  while (b < n_bins - 1 && s > edges[b + 1]) ++b;
  return b;
}

}  // namespace

std::string_view to_string(BinningScheme scheme) {
  return scheme == BinningScheme::kEqualWidth ? "equal_width" : "equal_count";
}

std::vector<std::size_t> Binning::bin_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_bins), 0);
  for (int b : membership) ++counts[static_cast<std::size_t>(b)];
  return counts;
}

Binning bin_scores(Scores scores, BinningScheme scheme, int n_bins) {
  if (n_bins < 1) throw std::invalid_argument("bin_scores: n_bins must be >= 1");
  Binning out;
  out.scheme = scheme;
  out.n_bins = n_bins;
  out.membership.resize(scores.size());
  out.boundaries.resize(static_cast<std::size_t>(n_bins) + 1);

  if (scheme == BinningScheme::kEqualWidth) {
    for (int k = 0; k <= n_bins; ++k) {
      out.boundaries[k] = static_cast<double>(k) / static_cast<double>(n_bins);
    }
    for (std::size_t i = 0; i < scores.size(); ++i) {
      out.membership[i] = equal_width_bin(scores[i], out.boundaries, n_bins);
    }
    return out;
  }

  const std::size_t n = scores.size();
  if (n < static_cast<std::size_t>(n_bins)) {
    throw std::invalid_argument("bin_scores: equal_count needs at least n_bins samples (have " +
                                std::to_string(n) + ", n_bins " + std::to_string(n_bins) + ")");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  const auto nb = static_cast<std::size_t>(n_bins);
  std::vector<std::size_t> first_rank(nb + 1, n);
  for (std::size_t r = n; r-- > 0;) {
    const std::size_t b = r * nb / n;
    out.membership[order[r]] = static_cast<int>(b);
    first_rank[b] = r;
  }
  out.boundaries.front() = 0.0;
  out.boundaries.back() = 1.0;
  for (std::size_t k = 1; k < nb; ++k) {
    const std::size_t r = first_rank[k];
    out.boundaries[k] = 0.5 * (scores[order[r - 1]] + scores[order[r]]);
  }
  return out;
}

Binning bin_scores(const ScoreSet& set, BinningScheme scheme, int n_bins) {
  return bin_scores(set.scores(), scheme, n_bins);
}

double ece(Scores scores, Labels labels, const Binning& binning) {
  const BinTotals t = accumulate(scores, labels, binning, "ece");
  double total = 0.0;
  for (std::size_t b = 0; b < t.count.size(); ++b) {
    total += std::abs(t.label_sum[b] - t.score_sum[b]);
  }
  return total / static_cast<double>(scores.size());
}

double ece(const ScoreSet& set, const Binning& binning) {
  return ece(set.scores(), set.labels(), binning);
}

double mce(Scores scores, Labels labels, const Binning& binning) {
  const BinTotals t = accumulate(scores, labels, binning, "mce");
  double worst = 0.0;
  for (std::size_t b = 0; b < t.count.size(); ++b) {
    if (t.count[b] == 0) continue;
    const double n = static_cast<double>(t.count[b]);
    worst = std::max(worst, std::abs(t.label_sum[b] / n - t.score_sum[b] / n));
  }
  return worst;
}

double mce(const ScoreSet& set, const Binning& binning) {
  return mce(set.scores(), set.labels(), binning);
}

double ada_ece(Scores scores, Labels labels, int n_bins) {
  return ece(scores, labels, bin_scores(scores, BinningScheme::kEqualCount, n_bins));
}

double ada_ece(const ScoreSet& set, int n_bins) {
  return ada_ece(set.scores(), set.labels(), n_bins);
}

double cross_entropy(Scores scores, Labels labels, double clip_epsilon) {
  require_aligned(scores, labels, "cross_entropy");
  check_epsilon(clip_epsilon);
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = std::clamp(scores[i], clip_epsilon, 1.0 - clip_epsilon);
    total -= labels[i] ? std::log(s) : std::log1p(-s);
  }
  return total / static_cast<double>(scores.size());
}

double cross_entropy(const ScoreSet& set, double clip_epsilon) {
  return cross_entropy(set.scores(), set.labels(), clip_epsilon);
}

double brier(Scores scores, Labels labels) {
  require_aligned(scores, labels, "brier");
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double d = scores[i] - static_cast<double>(labels[i]);
    total += d * d;
  }
  return total / static_cast<double>(scores.size());
}

double brier(const ScoreSet& set) { return brier(set.scores(), set.labels()); }

std::vector<ReliabilityPoint> reliability_curve(Scores scores, Labels labels,
                                                const Binning& binning) {
  const BinTotals t = accumulate(scores, labels, binning, "reliability_curve");
  std::vector<ReliabilityPoint> points;
  for (std::size_t b = 0; b < t.count.size(); ++b) {
    if (t.count[b] == 0) continue;
    const double n = static_cast<double>(t.count[b]);
    points.push_back({static_cast<int>(b), t.score_sum[b] / n, t.label_sum[b] / n, t.count[b]});
  }
  return points;
}

std::vector<ReliabilityPoint> reliability_curve(const ScoreSet& set, const Binning& binning) {
  return reliability_curve(set.scores(), set.labels(), binning);
}

}  // namespace calaudit
