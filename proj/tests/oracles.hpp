#pragma once

// Brute-force reference computations for the unit and acceptance tests.
// Each one follows the textbook definition directly and shares no code with
// the library path it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

// P(s+ > s-) + 0.5 P(s+ == s-) by visiting every positive/negative pair.
inline double pairwise_auc(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      pairs += 1.0;
      if (s[i] > s[j]) wins += 1.0;
      if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Average precision by sweeping every distinct score as a threshold and
// recounting TP/FP over the whole set each time.
inline double threshold_sweep_ap(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
  std::vector<double> thresholds = s;
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  double total_pos = 0.0;
  for (auto v : y) total_pos += v;
  double ap = 0.0, prev_recall = 0.0;
  for (double t : thresholds) {
    double tp = 0.0, fp = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= t) (y[i] ? tp : fp) += 1.0;
    }
    const double recall = tp / total_pos;
    ap += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
  }
  return ap;
}

// Equal-width bin by scanning every bin's interval: bin 0 is [0, 1/n], bin k
// is (k/n, (k+1)/n].
inline int scan_equal_width_bin(double s, int n_bins) {
  for (int k = 0; k < n_bins; ++k) {
    const double lo = static_cast<double>(k) / n_bins;
    const double hi = static_cast<double>(k + 1) / n_bins;
    if ((k == 0 ? s >= lo : s > lo) && s <= hi) return k;
  }
  return -1;
}

// Equal-count bin from the stable rank of each sample, found by counting.
inline std::vector<int> rank_equal_count_bins(const std::vector<double>& s, int n_bins) {
  const std::size_t n = s.size();
  std::vector<int> bins(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rank = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (s[j] < s[i] || (s[j] == s[i] && j < i)) ++rank;
    }
    bins[i] = static_cast<int>(rank * static_cast<std::size_t>(n_bins) / n);
  }
  return bins;
}

struct BinErrors {
  double ece = 0.0;
  double mce = 0.0;
};

// For each bin, re-scan all samples to find its members.
inline BinErrors rebin_errors(const std::vector<double>& s, const std::vector<std::uint8_t>& y,
                              const std::vector<int>& bins, int n_bins) {
  BinErrors out;
  const double n = static_cast<double>(s.size());
  for (int b = 0; b < n_bins; ++b) {
    double count = 0.0, score_sum = 0.0, pos = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (bins[i] != b) continue;
      count += 1.0;
      score_sum += s[i];
      pos += y[i];
    }
    if (count == 0.0) continue;
    const double gap = std::abs(pos / count - score_sum / count);
    out.ece += (count / n) * gap;
    out.mce = std::max(out.mce, gap);
  }
  return out;
}

// Two-sided signed-rank p-value: mid-ranks by counting, then all 2^n sign
// assignments enumerated explicitly.
inline double enumerate_wilcoxon_p(const std::vector<double>& d) {
  const std::size_t n = d.size();
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    double below = 0.0, equal = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(d[j]) < std::abs(d[i])) below += 1.0;
      if (std::abs(d[j]) == std::abs(d[i])) equal += 1.0;
    }
    rank[i] = below + (equal + 1.0) / 2.0;
  }
  double w_plus = 0.0, total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rank[i];
    if (d[i] > 0) w_plus += rank[i];
  }
  const double w = std::min(w_plus, total - w_plus);
  std::uint64_t at_most = 0;
  const std::uint64_t patterns = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1U) t += rank[i];
    }
    if (t <= w) ++at_most;
  }
  return std::min(1.0, 2.0 * static_cast<double>(at_most) / static_cast<double>(patterns));
}

// CDF of Beta(a, b) at x by tanh-sinh quadrature of the density, which copes
// with the endpoint singularities of shapes below 1.
inline double beta_cdf_quadrature(double x, double a, double b) {
  const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  auto density = [&](double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return std::exp(log_norm + (a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t));
  };
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(density, 0.0, x, 1e-14);
}

}  // namespace oracle
