#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "calaudit/calibration.hpp"
#include "calaudit/calibrator.hpp"
#include "calaudit/score_set.hpp"
#include "calaudit/stats.hpp"
#include "calaudit/synthetic.hpp"

namespace calaudit {

inline constexpr std::uint64_t kDefaultSeed = 20230;
inline constexpr double kSignificanceLevel = 0.05;

enum class Metric {
  kAucRoc,
  kAucPr,
  kAucPrg,
  kBalancedAccuracy,
  kEce,
  kMce,
  kAdaEce,
  kCe,
  kBrier,
  kDeltaCe,
  kDeltaBrier,
};

std::string_view to_string(Metric metric);
std::optional<Metric> parse_metric(std::string_view name);
const std::vector<Metric>& all_metrics();

/// True for metrics computed from the recalibrated scores (delta terms).
bool needs_recalibration(Metric metric);

/// Ratios 0.1, 0.2, ..., 1.0.
std::vector<double> default_ratios();

struct AuditConfig {
  std::vector<Metric> metrics = all_metrics();
  int n_bins = kDefaultBins;
  double clip_epsilon = kDefaultClipEpsilon;
  double threshold = 0.5;
  std::uint64_t seed = kDefaultSeed;
  std::vector<double> ratios = default_ratios();
  std::string majority;  // empty: inferred
  std::string minority;  // empty: inferred
  QuantileRule quantile_rule = QuantileRule::kLinear;
  bool per_group_calibrator = false;
  int max_subsample_attempts = 10;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

/// Metric values for one evaluation cell. A metric that is undefined on the
/// cell (single label class, fewer samples than bins, no recalibrated
/// scores) comes back empty.
std::vector<std::optional<double>> evaluate_metrics(std::span<const Metric> metrics, Scores scores,
                                                    Labels labels, Scores platt_scores,
                                                    const AuditConfig& config);

/// A paired signed-rank comparison of two series over runs.
struct Comparison {
  std::string arm;
  std::string series_a;
  std::string series_b;
  Metric metric = Metric::kEce;
  std::vector<int> runs_paired;
  std::vector<int> runs_excluded;
  std::optional<PairedTestResult> test;
  std::string error;  // set when no test could be run

  bool significant(double level = kSignificanceLevel) const {
    return test && test->p_value < level;
  }
};

struct MetricValue {
  std::string series;
  int run = 0;
  Metric metric = Metric::kEce;
  std::optional<double> value;
};

struct SeriesSummary {
  std::string series;
  Metric metric = Metric::kEce;
  std::optional<BoxplotSummary> summary;
  std::size_t missing = 0;
};

struct RunProvenance {
  int run_index = 0;
  std::optional<PlattParams> platt;  // pooled calibrator; empty if the fit failed
  std::optional<std::uint64_t> subsample_seed;
  std::vector<std::string> notes;
};

struct AuditReport {
  std::string kind;  // "group_audit" or "size_matched_audit"
  AuditConfig config;
  std::vector<std::string> series;
  std::vector<MetricValue> values;
  std::vector<SeriesSummary> summaries;
  std::vector<Comparison> comparisons;
  std::vector<RunProvenance> runs;

  const Comparison* find(std::string_view arm, Metric metric) const;
  /// Present values of one series in run order.
  std::vector<double> series_values(std::string_view series, Metric metric) const;
};

/// One evaluation run: a validation set for the calibrator and a test set.
struct RunData {
  int run_index = 0;
  ScoreSet validation;
  ScoreSet test;
};

/// Per-group audit. For every run the calibrator is fitted on the whole
/// validation set (or per group with config.per_group_calibrator), every
/// configured metric is computed per test group, and each metric is compared
/// across every pair of groups with the signed-rank test, paired by run.
/// Groups are config.majority/config.minority when set, else all test groups.
AuditReport run_group_audit(std::span<const RunData> runs, const AuditConfig& config);

/// Three-arm audit isolating the sample-size effect. Per run the majority
/// test group is subsampled (stratified by label) to the minority size, and
/// the arms compare majority vs matched majority ("size_effect"), matched
/// majority vs minority ("matched") and majority vs minority ("naive").
AuditReport run_size_matched_audit(std::span<const RunData> runs, const AuditConfig& config);

/// Test scores of one run with their recalibrated counterparts (may be
/// empty, in which case delta metrics are missing).
struct SweepInput {
  int run_index = 0;
  std::vector<double> scores;
  std::vector<double> platt_scores;
  std::vector<std::uint8_t> labels;
};

/// Fits the pooled calibrator on each run's validation set (when it has both
/// classes) and pairs the test scores with their recalibrated versions.
std::vector<SweepInput> prepare_sweep_inputs(std::span<const RunData> runs,
                                             const AuditConfig& config);

struct SweepRow {
  int run = 0;
  double ratio = 1.0;
  Metric metric = Metric::kEce;
  std::optional<double> value;
  std::uint64_t seed = 0;
};

struct RatioSummary {
  double ratio = 1.0;
  Metric metric = Metric::kEce;
  std::optional<BoxplotSummary> summary;
  std::size_t missing = 0;
};

struct SweepTable {
  std::string label;  // group or scenario name
  std::vector<int> runs;
  std::vector<double> ratios;
  std::vector<Metric> metrics;
  std::vector<SweepRow> rows;  // ordered by run, ratio, metric
  std::vector<RatioSummary> summaries;
  std::vector<Comparison> comparisons;  // smallest vs largest ratio per metric

  /// Value for (run position, ratio position, metric position).
  const std::optional<double>& at(std::size_t run_pos, std::size_t ratio_pos,
                                  std::size_t metric_pos) const;
  /// Present values at one ratio, in run order.
  std::vector<double> column(std::size_t ratio_pos, Metric metric) const;
  double mean(std::size_t ratio_pos, Metric metric) const;
  const Comparison* find(Metric metric) const;
};

/// Subsamples each run's test scores at every ratio (without replacement,
/// retrying degenerate single-class draws with derived seeds up to
/// config.max_subsample_attempts) and evaluates the configured metrics.
SweepTable run_sampling_sweep(std::span<const SweepInput> inputs, const AuditConfig& config,
                              std::string label = "all");

struct SyntheticExperimentConfig {
  std::size_t population_size = 100000;
  double validation_fraction = 0.2;
  double test_fraction = 0.2;
  int n_runs = 100;
};

struct ScenarioResult {
  SyntheticScenario scenario{1.0, 1.0};
  std::vector<PlattParams> platt;  // one per run
  SweepTable sweep;
};

/// Seed of the population drawn by run_synthetic_experiment for a master seed.
std::uint64_t population_seed(std::uint64_t master);

/// For each scenario: distort one shared population, then per run draw
/// disjoint validation and test splits, fit the calibrator on validation and
/// sweep the test set over config.ratios.
std::vector<ScenarioResult> run_synthetic_experiment(std::span<const SyntheticScenario> scenarios,
                                                     const SyntheticExperimentConfig& experiment,
                                                     const AuditConfig& config);

}  // namespace calaudit
