#include "calaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "calaudit/errors.hpp"

namespace calaudit {

std::string_view to_string(WilcoxonMethod method) {
  switch (method) {
    case WilcoxonMethod::kAuto: return "auto";
    case WilcoxonMethod::kExact: return "exact";
    case WilcoxonMethod::kNormalApprox: return "normal_approx";
  }
  return "unknown";
}

PairedTestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                      WilcoxonMethod method) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("wilcoxon_signed_rank: samples differ in length");
  }
  std::vector<double> d;
  d.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw std::invalid_argument("wilcoxon_signed_rank: non-finite value");
    }
    const double diff = x[i] - y[i];
    if (diff != 0.0) d.push_back(diff);
  }
  const std::size_t n = d.size();
  if (n < 3) {
    throw InsufficientPairsError("insufficient pairs: " + std::to_string(n) +
                                 " non-zero differences, at least 3 required");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });

  // Ranks are kept doubled so mid-ranks of tie blocks stay integral.
  std::vector<std::uint64_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && std::abs(d[order[j]]) == std::abs(d[order[i]])) ++j;
    for (std::size_t k = i; k < j; ++k) rank2[order[k]] = i + 1 + j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  std::uint64_t w_plus2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] > 0.0) w_plus2 += rank2[i];
  }
  const std::uint64_t total2 = static_cast<std::uint64_t>(n) * (n + 1);
  const std::uint64_t w_minus2 = total2 - w_plus2;
  const std::uint64_t w2 = std::min(w_plus2, w_minus2);

  PairedTestResult r;
  r.w_plus = static_cast<double>(w_plus2) / 2.0;
  r.w_minus = static_cast<double>(w_minus2) / 2.0;
  r.statistic = static_cast<double>(w2) / 2.0;
  r.n_effective = n;
  r.zeros_dropped = x.size() - n;

  const bool exact = method == WilcoxonMethod::kExact ||
                     (method == WilcoxonMethod::kAuto && n <= kWilcoxonExactCutoff);
  if (exact) {
    if (n > 62) throw std::invalid_argument("wilcoxon_signed_rank: exact test limited to n <= 62");
    // counts[s]: number of sign assignments whose doubled positive rank sum is s.
    std::vector<std::uint64_t> counts(total2 + 1, 0);
    counts[0] = 1;
    std::uint64_t reach = 0;
    for (std::size_t i = 0; i < n; ++i) {
      reach += rank2[i];
      for (std::uint64_t s = reach; s >= rank2[i]; --s) counts[s] += counts[s - rank2[i]];
    }
    std::uint64_t tail = 0;
    for (std::uint64_t s = 0; s <= w2; ++s) tail += counts[s];
    const double patterns = std::ldexp(1.0, static_cast<int>(n));
    r.p_value = std::min(1.0, 2.0 * static_cast<double>(tail) / patterns);
    r.method = WilcoxonMethod::kExact;
  } else {
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double z = std::max(0.0, std::abs(r.w_plus - mean) - 0.5) / std::sqrt(var);
    r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    r.method = WilcoxonMethod::kNormalApprox;
  }
  return r;
}

std::string_view to_string(QuantileRule rule) {
  switch (rule) {
    case QuantileRule::kLinear: return "linear";
    case QuantileRule::kLower: return "lower";
    case QuantileRule::kHigher: return "higher";
    case QuantileRule::kMidpoint: return "midpoint";
    case QuantileRule::kNearest: return "nearest";
  }
  return "unknown";
}

std::optional<QuantileRule> parse_quantile_rule(std::string_view name) {
  for (auto rule : {QuantileRule::kLinear, QuantileRule::kLower, QuantileRule::kHigher,
                    QuantileRule::kMidpoint, QuantileRule::kNearest}) {
    if (to_string(rule) == name) return rule;
  }
  return std::nullopt;
}

double quantile_sorted(std::span<const double> sorted, double q, QuantileRule rule) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty range");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  switch (rule) {
    case QuantileRule::kLinear:
      return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    case QuantileRule::kLower: return sorted[lo];
    case QuantileRule::kHigher: return sorted[hi];
    case QuantileRule::kMidpoint: return 0.5 * (sorted[lo] + sorted[hi]);
    case QuantileRule::kNearest:
      return sorted[static_cast<std::size_t>(std::nearbyint(h))];
  }
  return sorted[lo];
}

BoxplotSummary summarize(std::span<const double> values, QuantileRule rule) {
  if (values.empty()) throw std::invalid_argument("summarize: empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  BoxplotSummary s;
  s.n = sorted.size();
  s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.n);
  s.median = quantile_sorted(sorted, 0.5, rule);
  s.q1 = quantile_sorted(sorted, 0.25, rule);
  s.q3 = quantile_sorted(sorted, 0.75, rule);
  s.iqr = s.q3 - s.q1;
  s.min = sorted.front();
  s.max = sorted.back();
  return s;
}

}  // namespace calaudit
