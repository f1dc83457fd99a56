#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace calaudit {

/// Largest number of non-zero differences for which p-values are exact.
inline constexpr std::size_t kWilcoxonExactCutoff = 25;

enum class WilcoxonMethod { kAuto, kExact, kNormalApprox };

std::string_view to_string(WilcoxonMethod method);

struct PairedTestResult {
  double statistic = 0.0;  // W = min(W+, W-)
  double w_plus = 0.0;
  double w_minus = 0.0;
  double p_value = 1.0;  // two-sided
  std::size_t n_effective = 0;
  std::size_t zeros_dropped = 0;
  WilcoxonMethod method = WilcoxonMethod::kExact;
};

/// Two-sided Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are discarded and tied |d| receive mid-ranks. With kAuto
/// the null distribution of W+ is counted exactly over all 2^n sign
/// assignments for n <= kWilcoxonExactCutoff and approximated by a normal
/// with tie-corrected variance and continuity correction above it.
///
/// Throws std::invalid_argument on unequal lengths or non-finite values and
/// InsufficientPairsError when fewer than 3 non-zero differences remain.
PairedTestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                      WilcoxonMethod method = WilcoxonMethod::kAuto);

/// How a quantile falls between order statistics. kLinear interpolates at
/// position (n - 1) q; the others select a neighbouring order statistic or
/// their midpoint, as in numpy's percentile methods of the same names.
enum class QuantileRule { kLinear, kLower, kHigher, kMidpoint, kNearest };

std::string_view to_string(QuantileRule rule);
std::optional<QuantileRule> parse_quantile_rule(std::string_view name);

/// Quantile q in [0, 1] of an ascending, non-empty range.
double quantile_sorted(std::span<const double> sorted, double q,
                       QuantileRule rule = QuantileRule::kLinear);

struct BoxplotSummary {
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;
};

/// Throws std::invalid_argument on empty input.
BoxplotSummary summarize(std::span<const double> values,
                         QuantileRule rule = QuantileRule::kLinear);

}  // namespace calaudit
