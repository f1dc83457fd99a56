#include "calaudit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "calaudit/csv_io.hpp"
#include "calaudit/dataset.hpp"
#include "calaudit/discrimination.hpp"
#include "calaudit/errors.hpp"
#include "calaudit/rng.hpp"

namespace calaudit {

namespace {

constexpr std::uint64_t kPopulationStream = 1;
constexpr std::uint64_t kSplitStream = 2;
constexpr std::uint64_t kSweepStream = 3;
constexpr std::uint64_t kMatchStream = 4;

struct Gathered {
  std::vector<double> scores;
  std::vector<double> platt;
  std::vector<std::uint8_t> labels;
};

Gathered gather(Scores scores, Labels labels, Scores platt, std::span<const std::size_t> idx) {
  Gathered g;
  g.scores.reserve(idx.size());
  g.labels.reserve(idx.size());
  for (std::size_t i : idx) {
    g.scores.push_back(scores[i]);
    g.labels.push_back(labels[i]);
  }
  if (!platt.empty()) {
    g.platt.reserve(idx.size());
    for (std::size_t i : idx) g.platt.push_back(platt[i]);
  }
  return g;
}

std::optional<PlattParams> fit_calibrator(const ScoreSet& validation, const AuditConfig& config,
                                          std::vector<std::string>& notes,
                                          const std::string& scope) {
  if (!validation.has_both_classes()) {
    notes.push_back(scope + ": calibrator not fitted, validation set lacks a label class");
    return std::nullopt;
  }
  const auto llr = to_llr(validation.scores(), config.clip_epsilon);
  PlattParams params = fit_platt(llr, validation.labels());
  if (!params.diagnostics.converged) {
    notes.push_back(scope + ": calibrator fit did not converge after " +
                    std::to_string(params.diagnostics.iterations) + " iterations" +
                    (params.diagnostics.separable ? " (separable validation scores)" : ""));
  }
  return params;
}

Comparison compare(std::string arm, std::string a_name, std::string b_name, Metric metric,
                   std::span<const int> runs, std::span<const std::optional<double>> a,
                   std::span<const std::optional<double>> b) {
  Comparison c;
  c.arm = std::move(arm);
  c.series_a = std::move(a_name);
  c.series_b = std::move(b_name);
  c.metric = metric;
  std::vector<double> x, y;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (a[r] && b[r]) {
      x.push_back(*a[r]);
      y.push_back(*b[r]);
      c.runs_paired.push_back(runs[r]);
    } else {
      c.runs_excluded.push_back(runs[r]);
    }
  }
  try {
    c.test = wilcoxon_signed_rank(x, y);
  } catch (const InsufficientPairsError& e) {
    c.error = e.what();
  }
  return c;
}

SeriesSummary summarize_series(std::string series, Metric metric,
                               std::span<const std::optional<double>> values, QuantileRule rule) {
  SeriesSummary s;
  s.series = std::move(series);
  s.metric = metric;
  std::vector<double> present;
  for (const auto& v : values) {
    if (v) {
      present.push_back(*v);
    } else {
      ++s.missing;
    }
  }
  if (!present.empty()) s.summary = summarize(present, rule);
  return s;
}

// values[series][metric][run position]
using ValueCube = std::vector<std::vector<std::vector<std::optional<double>>>>;

void finish_report(AuditReport& rep, const ValueCube& cube, std::span<const int> run_ids) {
  const auto& metrics = rep.config.metrics;
  for (std::size_t s = 0; s < rep.series.size(); ++s) {
    for (std::size_t m = 0; m < metrics.size(); ++m) {
      for (std::size_t r = 0; r < run_ids.size(); ++r) {
        rep.values.push_back({rep.series[s], run_ids[r], metrics[m], cube[s][m][r]});
      }
      rep.summaries.push_back(
          summarize_series(rep.series[s], metrics[m], cube[s][m], rep.config.quantile_rule));
    }
  }
}

std::vector<std::string> audit_groups(std::span<const RunData> runs, const AuditConfig& config) {
  if (!config.majority.empty() && !config.minority.empty()) {
    if (config.majority == config.minority) {
      throw std::invalid_argument("majority and minority groups must differ");
    }
    return {config.majority, config.minority};
  }
  std::set<std::string> tags;
  for (const RunData& run : runs) {
    for (auto& g : run.test.groups()) tags.insert(g);
  }
  return {tags.begin(), tags.end()};
}

}  // namespace

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kAucRoc: return "auc_roc";
    case Metric::kAucPr: return "auc_pr";
    case Metric::kAucPrg: return "auc_prg";
    case Metric::kBalancedAccuracy: return "balanced_accuracy";
    case Metric::kEce: return "ece";
    case Metric::kMce: return "mce";
    case Metric::kAdaEce: return "ada_ece";
    case Metric::kCe: return "ce";
    case Metric::kBrier: return "brier";
    case Metric::kDeltaCe: return "delta_ce";
    case Metric::kDeltaBrier: return "delta_brier";
  }
  return "unknown";
}

const std::vector<Metric>& all_metrics() {
  static const std::vector<Metric> metrics = {
      Metric::kAucRoc, Metric::kAucPr, Metric::kAucPrg, Metric::kBalancedAccuracy,
      Metric::kEce,    Metric::kMce,   Metric::kAdaEce, Metric::kCe,
      Metric::kBrier,  Metric::kDeltaCe, Metric::kDeltaBrier};
  return metrics;
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (Metric m : all_metrics()) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

bool needs_recalibration(Metric metric) {
  return metric == Metric::kDeltaCe || metric == Metric::kDeltaBrier;
}

std::vector<double> default_ratios() {
  std::vector<double> r;
  for (int i = 1; i <= 10; ++i) r.push_back(static_cast<double>(i) / 10.0);
  return r;
}

void AuditConfig::validate() const {
  if (metrics.empty()) throw std::invalid_argument("no metrics configured");
  std::set<Metric> seen(metrics.begin(), metrics.end());
  if (seen.size() != metrics.size()) throw std::invalid_argument("duplicate metric in config");
  if (n_bins < 1) throw std::invalid_argument("n_bins must be >= 1");
  if (!(clip_epsilon > 0.0 && clip_epsilon < 0.5)) {
    throw std::invalid_argument("clip epsilon must lie in (0, 0.5)");
  }
  if (!std::isfinite(threshold)) throw std::invalid_argument("threshold must be finite");
  if (ratios.empty()) throw std::invalid_argument("no sampling ratios configured");
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (!(ratios[i] > 0.0 && ratios[i] <= 1.0)) {
      throw std::invalid_argument("sampling ratio " + format_double(ratios[i]) +
                                  " outside (0, 1]");
    }
    if (i > 0 && !(ratios[i] > ratios[i - 1])) {
      throw std::invalid_argument("sampling ratios must be strictly ascending");
    }
  }
  if (max_subsample_attempts < 1) {
    throw std::invalid_argument("max_subsample_attempts must be >= 1");
  }
}

std::vector<std::optional<double>> evaluate_metrics(std::span<const Metric> metrics, Scores scores,
                                                    Labels labels, Scores platt_scores,
                                                    const AuditConfig& config) {
  std::vector<std::optional<double>> out(metrics.size());
  if (scores.empty() || scores.size() != labels.size()) return out;

  std::optional<Binning> width_bins;
  std::optional<DecompositionResult> psr;
  auto equal_width = [&]() -> const Binning& {
    if (!width_bins) width_bins = bin_scores(scores, BinningScheme::kEqualWidth, config.n_bins);
    return *width_bins;
  };
  auto decomposition = [&]() -> const DecompositionResult& {
    if (!psr) psr = decompose_psr(scores, labels, platt_scores, config.clip_epsilon);
    return *psr;
  };

  for (std::size_t i = 0; i < metrics.size(); ++i) {
    const Metric m = metrics[i];
    if (needs_recalibration(m) && platt_scores.size() != scores.size()) continue;
    try {
      switch (m) {
        case Metric::kAucRoc: out[i] = roc_auc(scores, labels); break;
        case Metric::kAucPr: out[i] = pr_auc(scores, labels); break;
        case Metric::kAucPrg: out[i] = pr_auc_gain(scores, labels); break;
        case Metric::kBalancedAccuracy:
          out[i] = balanced_accuracy(scores, labels, config.threshold);
          break;
        case Metric::kEce: out[i] = ece(scores, labels, equal_width()); break;
        case Metric::kMce: out[i] = mce(scores, labels, equal_width()); break;
        case Metric::kAdaEce: out[i] = ada_ece(scores, labels, config.n_bins); break;
        case Metric::kCe: out[i] = cross_entropy(scores, labels, config.clip_epsilon); break;
        case Metric::kBrier: out[i] = brier(scores, labels); break;
        case Metric::kDeltaCe: out[i] = decomposition().delta_ce; break;
        case Metric::kDeltaBrier: out[i] = decomposition().delta_brier; break;
      }
    } catch (const DegenerateSampleError&) {
    } catch (const std::invalid_argument&) {
    }
  }
  return out;
}

const Comparison* AuditReport::find(std::string_view arm, Metric metric) const {
  for (const Comparison& c : comparisons) {
    if (c.arm == arm && c.metric == metric) return &c;
  }
  return nullptr;
}

std::vector<double> AuditReport::series_values(std::string_view s, Metric metric) const {
  std::vector<double> out;
  for (const MetricValue& v : values) {
    if (v.series == s && v.metric == metric && v.value) out.push_back(*v.value);
  }
  return out;
}

AuditReport run_group_audit(std::span<const RunData> runs, const AuditConfig& config) {
  config.validate();
  AuditReport rep;
  rep.kind = "group_audit";
  rep.config = config;
  rep.series = audit_groups(runs, config);
  if (rep.series.size() < 2) {
    throw std::invalid_argument("group audit needs at least two groups in the test sets");
  }

  const auto& metrics = config.metrics;
  const std::size_t n_runs = runs.size();
  ValueCube cube(rep.series.size(),
                 std::vector<std::vector<std::optional<double>>>(
                     metrics.size(), std::vector<std::optional<double>>(n_runs)));
  std::vector<int> run_ids;

  for (std::size_t r = 0; r < n_runs; ++r) {
    const RunData& run = runs[r];
    run_ids.push_back(run.run_index);
    RunProvenance prov;
    prov.run_index = run.run_index;
    const std::string scope = "run " + std::to_string(run.run_index);

    // Recalibrated test scores, and per series whether they exist.
    std::vector<double> platt(run.test.size(), 0.0);
    std::vector<bool> calibrated(rep.series.size(), false);
    if (!config.per_group_calibrator) {
      prov.platt = fit_calibrator(run.validation, config, prov.notes, scope);
      if (prov.platt) {
        platt = recalibrate(*prov.platt, run.test.scores(), config.clip_epsilon);
        calibrated.assign(rep.series.size(), true);
      }
    } else {
      for (std::size_t s = 0; s < rep.series.size(); ++s) {
        const std::string& g = rep.series[s];
        const auto params = fit_calibrator(run.validation.filter_group(g), config, prov.notes,
                                           scope + " group " + g);
        if (!params) continue;
        prov.notes.push_back(scope + " group " + g + ": a=" + format_double(params->a) +
                             " b=" + format_double(params->b));
        const auto idx = run.test.indices_of_group(g);
        const Gathered members = gather(run.test.scores(), run.test.labels(), {}, idx);
        const auto cal = recalibrate(*params, members.scores, config.clip_epsilon);
        for (std::size_t k = 0; k < idx.size(); ++k) platt[idx[k]] = cal[k];
        calibrated[s] = true;
      }
    }

    for (std::size_t s = 0; s < rep.series.size(); ++s) {
      const auto idx = run.test.indices_of_group(rep.series[s]);
      if (idx.empty()) {
        prov.notes.push_back(scope + ": group " + rep.series[s] +
                             " absent from test set; run excluded from its comparisons");
        continue;
      }
      const Gathered g = gather(run.test.scores(), run.test.labels(),
                                calibrated[s] ? Scores(platt) : Scores(), idx);
      const auto vals = evaluate_metrics(metrics, g.scores, g.labels, g.platt, config);
      for (std::size_t m = 0; m < metrics.size(); ++m) cube[s][m][r] = vals[m];
    }
    rep.runs.push_back(std::move(prov));
  }

  finish_report(rep, cube, run_ids);
  for (std::size_t a = 0; a < rep.series.size(); ++a) {
    for (std::size_t b = a + 1; b < rep.series.size(); ++b) {
      for (std::size_t m = 0; m < metrics.size(); ++m) {
        rep.comparisons.push_back(compare("groups", rep.series[a], rep.series[b], metrics[m],
                                          run_ids, cube[a][m], cube[b][m]));
      }
    }
  }
  return rep;
}

AuditReport run_size_matched_audit(std::span<const RunData> runs, const AuditConfig& config) {
  config.validate();
  std::string majority = config.majority, minority = config.minority;
  if (majority.empty() || minority.empty()) {
    std::map<std::string, std::size_t> totals;
    for (const RunData& run : runs) {
      for (const Record& rec : run.test.records()) ++totals[rec.group];
    }
    if (totals.size() != 2) {
      throw std::invalid_argument(
          "size-matched audit needs exactly two test groups, or explicit majority/minority");
    }
    auto it = totals.begin();
    const auto& [g0, n0] = *it++;
    const auto& [g1, n1] = *it;
    majority = n0 >= n1 ? g0 : g1;
    minority = n0 >= n1 ? g1 : g0;
  }

  AuditReport rep;
  rep.kind = "size_matched_audit";
  rep.config = config;
  rep.config.majority = majority;
  rep.config.minority = minority;
  const std::string matched = majority + "_matched";
  rep.series = {majority, matched, minority};

  const auto& metrics = config.metrics;
  const std::size_t n_runs = runs.size();
  ValueCube cube(3, std::vector<std::vector<std::optional<double>>>(
                        metrics.size(), std::vector<std::optional<double>>(n_runs)));
  std::vector<int> run_ids;

  for (std::size_t r = 0; r < n_runs; ++r) {
    const RunData& run = runs[r];
    run_ids.push_back(run.run_index);
    RunProvenance prov;
    prov.run_index = run.run_index;
    const std::string scope = "run " + std::to_string(run.run_index);

    prov.platt = fit_calibrator(run.validation, config, prov.notes, scope);
    std::vector<double> platt;
    if (prov.platt) platt = recalibrate(*prov.platt, run.test.scores(), config.clip_epsilon);

    const auto maj_idx = run.test.indices_of_group(majority);
    const auto min_idx = run.test.indices_of_group(minority);
    if (maj_idx.empty() || min_idx.empty()) {
      prov.notes.push_back(scope + ": a compared group is absent; run excluded");
      rep.runs.push_back(std::move(prov));
      continue;
    }
    if (maj_idx.size() < min_idx.size()) {
      prov.notes.push_back(scope + ": group " + minority + " outnumbers " + majority +
                           "; run excluded");
      rep.runs.push_back(std::move(prov));
      continue;
    }

    std::vector<std::uint8_t> maj_labels;
    for (std::size_t i : maj_idx) maj_labels.push_back(run.test.labels()[i]);
    const std::uint64_t seed =
        derive_seed(config.seed, {kMatchStream, static_cast<std::uint64_t>(run.run_index)});
    prov.subsample_seed = seed;
    std::vector<std::size_t> matched_idx;
    for (std::size_t j : stratified_subsample_indices(maj_labels, min_idx.size(), seed)) {
      matched_idx.push_back(maj_idx[j]);
    }

    const std::vector<std::size_t>* members[3] = {&maj_idx, &matched_idx, &min_idx};
    for (std::size_t s = 0; s < 3; ++s) {
      const Gathered g = gather(run.test.scores(), run.test.labels(), platt, *members[s]);
      const auto vals = evaluate_metrics(metrics, g.scores, g.labels, g.platt, config);
      for (std::size_t m = 0; m < metrics.size(); ++m) cube[s][m][r] = vals[m];
    }
    rep.runs.push_back(std::move(prov));
  }

  finish_report(rep, cube, run_ids);
  for (std::size_t m = 0; m < metrics.size(); ++m) {
    rep.comparisons.push_back(
        compare("size_effect", majority, matched, metrics[m], run_ids, cube[0][m], cube[1][m]));
    rep.comparisons.push_back(
        compare("matched", matched, minority, metrics[m], run_ids, cube[1][m], cube[2][m]));
    rep.comparisons.push_back(
        compare("naive", majority, minority, metrics[m], run_ids, cube[0][m], cube[2][m]));
  }
  return rep;
}

std::vector<SweepInput> prepare_sweep_inputs(std::span<const RunData> runs,
                                             const AuditConfig& config) {
  std::vector<SweepInput> inputs;
  for (const RunData& run : runs) {
    SweepInput in;
    in.run_index = run.run_index;
    in.scores.assign(run.test.scores().begin(), run.test.scores().end());
    in.labels.assign(run.test.labels().begin(), run.test.labels().end());
    if (run.validation.has_both_classes()) {
      const auto params =
          fit_platt(to_llr(run.validation.scores(), config.clip_epsilon), run.validation.labels());
      in.platt_scores = recalibrate(params, in.scores, config.clip_epsilon);
    }
    inputs.push_back(std::move(in));
  }
  return inputs;
}

const std::optional<double>& SweepTable::at(std::size_t run_pos, std::size_t ratio_pos,
                                            std::size_t metric_pos) const {
  return rows.at((run_pos * ratios.size() + ratio_pos) * metrics.size() + metric_pos).value;
}

std::vector<double> SweepTable::column(std::size_t ratio_pos, Metric metric) const {
  const auto it = std::find(metrics.begin(), metrics.end(), metric);
  if (it == metrics.end()) throw std::invalid_argument("metric not in sweep table");
  const auto m = static_cast<std::size_t>(it - metrics.begin());
  std::vector<double> out;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (const auto& v = at(r, ratio_pos, m)) out.push_back(*v);
  }
  return out;
}

double SweepTable::mean(std::size_t ratio_pos, Metric metric) const {
  const auto col = column(ratio_pos, metric);
  if (col.empty()) return std::nan("");
  return std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
}

const Comparison* SweepTable::find(Metric metric) const {
  for (const Comparison& c : comparisons) {
    if (c.metric == metric) return &c;
  }
  return nullptr;
}

SweepTable run_sampling_sweep(std::span<const SweepInput> inputs, const AuditConfig& config,
                              std::string label) {
  config.validate();
  SweepTable table;
  table.label = std::move(label);
  table.ratios = config.ratios;
  table.metrics = config.metrics;
  const std::size_t n_ratios = table.ratios.size();
  const std::size_t n_metrics = table.metrics.size();
  table.rows.reserve(inputs.size() * n_ratios * n_metrics);

  for (const SweepInput& in : inputs) {
    if (in.scores.size() != in.labels.size() ||
        (!in.platt_scores.empty() && in.platt_scores.size() != in.scores.size())) {
      throw std::invalid_argument("sweep input for run " + std::to_string(in.run_index) +
                                  " is not aligned");
    }
    table.runs.push_back(in.run_index);
    for (std::size_t q = 0; q < n_ratios; ++q) {
      std::optional<std::vector<std::size_t>> idx;
      std::uint64_t seed = 0;
      for (int attempt = 0; attempt < config.max_subsample_attempts && !idx; ++attempt) {
        seed = derive_seed(config.seed, {kSweepStream, static_cast<std::uint64_t>(in.run_index),
                                         q, static_cast<std::uint64_t>(attempt)});
        try {
          idx = subsample_indices(in.labels, table.ratios[q], seed);
        } catch (const DegenerateSampleError&) {
        }
      }
      std::vector<std::optional<double>> vals(n_metrics);
      if (idx) {
        const Gathered g = gather(in.scores, in.labels, in.platt_scores, *idx);
        vals = evaluate_metrics(table.metrics, g.scores, g.labels, g.platt, config);
      }
      for (std::size_t m = 0; m < n_metrics; ++m) {
        table.rows.push_back({in.run_index, table.ratios[q], table.metrics[m], vals[m], seed});
      }
    }
  }

  for (std::size_t q = 0; q < n_ratios; ++q) {
    for (std::size_t m = 0; m < n_metrics; ++m) {
      std::vector<std::optional<double>> col;
      for (std::size_t r = 0; r < table.runs.size(); ++r) col.push_back(table.at(r, q, m));
      const SeriesSummary s = summarize_series("", table.metrics[m], col, config.quantile_rule);
      table.summaries.push_back({table.ratios[q], table.metrics[m], s.summary, s.missing});
    }
  }

  if (n_ratios >= 2) {
    const std::string lo = "ratio=" + format_double(table.ratios.front());
    const std::string hi = "ratio=" + format_double(table.ratios.back());
    for (std::size_t m = 0; m < n_metrics; ++m) {
      std::vector<std::optional<double>> a, b;
      for (std::size_t r = 0; r < table.runs.size(); ++r) {
        a.push_back(table.at(r, 0, m));
        b.push_back(table.at(r, n_ratios - 1, m));
      }
      table.comparisons.push_back(compare("ratio", lo, hi, table.metrics[m], table.runs, a, b));
    }
  }
  return table;
}

std::uint64_t population_seed(std::uint64_t master) {
  return derive_seed(master, {kPopulationStream});
}

std::vector<ScenarioResult> run_synthetic_experiment(std::span<const SyntheticScenario> scenarios,
                                                     const SyntheticExperimentConfig& experiment,
                                                     const AuditConfig& config) {
  config.validate();
  if (experiment.n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  const std::size_t n = experiment.population_size;
  const auto n_val = static_cast<std::size_t>(
      std::llround(experiment.validation_fraction * static_cast<double>(n)));
  const auto n_test =
      static_cast<std::size_t>(std::llround(experiment.test_fraction * static_cast<double>(n)));
  if (n_val < 2 || n_test < 2 || n_val + n_test > n) {
    throw std::invalid_argument("validation/test fractions do not fit the population");
  }

  const SyntheticPopulation pop = generate_population(n, population_seed(config.seed));

  // Splits depend only on the run, so every scenario sees the same samples.
  std::vector<std::vector<std::size_t>> val_idx(experiment.n_runs), test_idx(experiment.n_runs);
  for (int r = 0; r < experiment.n_runs; ++r) {
    auto drawn = sample_without_replacement(
        n, n_val + n_test, derive_seed(config.seed, {kSplitStream, static_cast<std::uint64_t>(r)}));
    val_idx[r].assign(drawn.begin(), drawn.begin() + static_cast<std::ptrdiff_t>(n_val));
    test_idx[r].assign(drawn.begin() + static_cast<std::ptrdiff_t>(n_val), drawn.end());
    std::sort(val_idx[r].begin(), val_idx[r].end());
    std::sort(test_idx[r].begin(), test_idx[r].end());
  }

  std::vector<ScenarioResult> results;
  for (const SyntheticScenario& scenario : scenarios) {
    const auto scores = scenario.distort(pop.true_posterior);
    const auto llr = to_llr(scores, config.clip_epsilon);

    ScenarioResult result;
    result.scenario = scenario;
    std::vector<SweepInput> inputs;
    inputs.reserve(static_cast<std::size_t>(experiment.n_runs));
    for (int r = 0; r < experiment.n_runs; ++r) {
      const Gathered val = gather(llr, pop.labels, {}, val_idx[r]);
      PlattParams params = fit_platt(val.scores, val.labels);
      const Gathered test = gather(scores, pop.labels, llr, test_idx[r]);
      SweepInput in;
      in.run_index = r;
      in.scores = test.scores;
      in.labels = test.labels;
      in.platt_scores = apply_platt(params, test.platt);
      inputs.push_back(std::move(in));
      result.platt.push_back(params);
    }
    result.sweep = run_sampling_sweep(inputs, config, scenario.name());
    results.push_back(std::move(result));
  }
  return results;
}

}  // namespace calaudit
