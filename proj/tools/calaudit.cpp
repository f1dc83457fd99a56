// calaudit: discrimination and calibration audits of binary classifier scores
// across sub-groups, sampling-ratio sweeps and synthetic de-calibration runs.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "calaudit/calibration.hpp"
#include "calaudit/calibrator.hpp"
#include "calaudit/csv_io.hpp"
#include "calaudit/harness.hpp"
#include "calaudit/manifest.hpp"
#include "calaudit/report_io.hpp"
#include "calaudit/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string input;
  std::string validation;
  std::string manifest;
  std::string output;
  std::string reliability;
  std::string population_out;
  std::string group;
  std::string majority;
  std::string minority;
  std::string quantile_rule = "linear";
  std::vector<std::string> metrics;
  std::vector<double> ratios;
  std::vector<double> alpha;
  std::vector<double> beta;
  bool by_group = false;
  bool size_matched = false;
  bool per_group_calibrator = false;
  bool drop_unknown = false;
  int bins = calaudit::kDefaultBins;
  double epsilon = calaudit::kDefaultClipEpsilon;
  double threshold = 0.5;
  int runs = 100;
  std::size_t n = 100000;
  std::uint64_t seed = calaudit::kDefaultSeed;
};

calaudit::AuditConfig make_config(const Options& o) {
  calaudit::AuditConfig c;
  c.n_bins = o.bins;
  c.clip_epsilon = o.epsilon;
  c.threshold = o.threshold;
  c.seed = o.seed;
  c.majority = o.majority;
  c.minority = o.minority;
  c.per_group_calibrator = o.per_group_calibrator;
  if (!o.ratios.empty()) c.ratios = o.ratios;
  if (!o.metrics.empty()) {
    c.metrics.clear();
    for (const auto& name : o.metrics) {
      const auto m = calaudit::parse_metric(name);
      if (!m) throw UsageError("unknown metric '" + name + "'");
      c.metrics.push_back(*m);
    }
  }
  const auto rule = calaudit::parse_quantile_rule(o.quantile_rule);
  if (!rule) throw UsageError("unknown quantile rule '" + o.quantile_rule + "'");
  c.quantile_rule = *rule;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

// "--output report.json" and "--output report" both name the prefix "report".
fs::path output_prefix(const std::string& output) {
  fs::path p(output);
  if (p.extension() == ".json") p.replace_extension();
  return p;
}

fs::path with_suffix(const fs::path& prefix, const std::string& suffix) {
  return prefix.parent_path() / (prefix.filename().string() + suffix);
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw calaudit::Error("cannot write '" + path.string() + "'");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json metric_block(const calaudit::ScoreSet& set, std::span<const double> platt,
                  const calaudit::AuditConfig& config) {
  const auto values = calaudit::evaluate_metrics(config.metrics, set.scores(), set.labels(),
                                                 platt, config);
  json metrics = json::object();
  for (std::size_t i = 0; i < config.metrics.size(); ++i) {
    const auto& v = values[i];
    metrics[std::string(calaudit::to_string(config.metrics[i]))] =
        v && std::isfinite(*v) ? json(*v) : json(nullptr);
  }
  return {{"n", set.size()},
          {"positives", set.positives()},
          {"prevalence", set.empty() ? json(nullptr) : json(set.prevalence())},
          {"metrics", metrics}};
}

json config_echo(const calaudit::AuditConfig& c) {
  return {{"n_bins", c.n_bins},
          {"binning", "equal_width (ece, mce); equal_count (ada_ece)"},
          {"clip_epsilon", c.clip_epsilon},
          {"threshold", c.threshold}};
}

int cmd_metrics(const Options& o) {
  auto config = make_config(o);
  const calaudit::ScoreSet set = calaudit::load_scoreset_file(o.input);
  if (set.empty()) throw calaudit::Error("'" + o.input + "' holds no records");

  std::vector<double> platt;
  json platt_json = nullptr;
  if (!o.validation.empty()) {
    const auto val = calaudit::load_scoreset_file(o.validation);
    if (!val.has_both_classes()) {
      throw calaudit::Error("validation set needs both label classes to fit the calibrator");
    }
    const auto params =
        calaudit::fit_platt(calaudit::to_llr(val.scores(), config.clip_epsilon), val.labels());
    platt = calaudit::recalibrate(params, set.scores(), config.clip_epsilon);
    platt_json = calaudit::to_json(params);
  } else {
    std::erase_if(config.metrics, calaudit::needs_recalibration);
  }

  json out = {{"command", "metrics"},
              {"input", o.input},
              {"config", config_echo(config)},
              {"platt", platt_json},
              {"overall", metric_block(set, platt, config)}};
  if (o.by_group) {
    json groups = json::object();
    for (const std::string& g : set.groups()) {
      const auto idx = set.indices_of_group(g);
      std::vector<double> group_platt;
      for (std::size_t i : idx) {
        if (!platt.empty()) group_platt.push_back(platt[i]);
      }
      groups[g] = metric_block(set.select(idx), group_platt, config);
    }
    out["groups"] = groups;
  }

  if (!o.reliability.empty()) {
    const auto bins = calaudit::bin_scores(set, calaudit::BinningScheme::kEqualWidth, config.n_bins);
    std::ostringstream csv;
    calaudit::write_reliability_csv(csv, calaudit::reliability_curve(set, bins));
    write_file(o.reliability, csv.str());
  }

  if (o.output.empty()) {
    std::cout << dump(out);
  } else {
    write_file(o.output, dump(out));
  }
  return 0;
}

int cmd_audit(const Options& o) {
  const auto config = make_config(o);
  auto runs = calaudit::load_runs(o.manifest);
  if (o.drop_unknown) {
    for (auto& run : runs) run.test = run.test.without_group(calaudit::kUnknownGroup);
  }
  const auto report = o.size_matched ? calaudit::run_size_matched_audit(runs, config)
                                     : calaudit::run_group_audit(runs, config);
  json out = calaudit::to_json(report);
  out["command"] = "audit";
  out["manifest"] = o.manifest;

  const fs::path prefix = output_prefix(o.output);
  write_file(with_suffix(prefix, ".json"), dump(out));
  for (calaudit::Metric m : config.metrics) {
    std::ostringstream csv;
    calaudit::write_values_csv(csv, report, m);
    write_file(with_suffix(prefix, "_" + std::string(calaudit::to_string(m)) + ".csv"), csv.str());
  }
  return 0;
}

int cmd_sweep(const Options& o) {
  const auto config = make_config(o);
  std::vector<calaudit::RunData> runs;
  if (!o.manifest.empty()) {
    runs = calaudit::load_runs(o.manifest);
  } else {
    calaudit::RunData run;
    run.test = calaudit::load_scoreset_file(o.input);
    if (!o.validation.empty()) run.validation = calaudit::load_scoreset_file(o.validation);
    runs.push_back(std::move(run));
  }
  if (o.drop_unknown) {
    for (auto& run : runs) run.test = run.test.without_group(calaudit::kUnknownGroup);
  }

  // The calibrator sees the whole validation set even when the sweep is
  // restricted to one group.
  auto inputs = calaudit::prepare_sweep_inputs(runs, config);
  if (!o.group.empty()) {
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const auto idx = runs[r].test.indices_of_group(o.group);
      calaudit::SweepInput& in = inputs[r];
      calaudit::SweepInput kept;
      kept.run_index = in.run_index;
      for (std::size_t i : idx) {
        kept.scores.push_back(in.scores[i]);
        kept.labels.push_back(in.labels[i]);
        if (!in.platt_scores.empty()) kept.platt_scores.push_back(in.platt_scores[i]);
      }
      in = std::move(kept);
    }
  }
  const auto table =
      calaudit::run_sampling_sweep(inputs, config, o.group.empty() ? std::string("all") : o.group);

  json out = {{"command", "sweep"},
              {"input", o.manifest.empty() ? o.input : o.manifest},
              {"sweep", calaudit::to_json(table)},
              {"provenance",
               {{"tool", "calaudit"},
                {"version", calaudit::kVersion},
                {"config", calaudit::to_json(config)}}}};
  const fs::path prefix = output_prefix(o.output);
  std::ostringstream csv;
  calaudit::write_sweep_csv(csv, table);
  write_file(with_suffix(prefix, ".csv"), csv.str());
  write_file(with_suffix(prefix, ".json"), dump(out));
  return 0;
}

std::vector<calaudit::SyntheticScenario> scenarios_from(const Options& o) {
  if (o.alpha.empty() && o.beta.empty()) return calaudit::default_scenarios();
  std::vector<double> alpha = o.alpha.empty() ? o.beta : o.alpha;
  std::vector<double> beta = o.beta.empty() ? o.alpha : o.beta;
  if (alpha.size() != beta.size()) {
    if (alpha.size() == 1) {
      alpha.assign(beta.size(), alpha[0]);
    } else if (beta.size() == 1) {
      beta.assign(alpha.size(), beta[0]);
    } else {
      throw UsageError("--alpha and --beta lists must have equal length");
    }
  }
  std::vector<calaudit::SyntheticScenario> out;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    try {
      out.emplace_back(alpha[i], beta[i]);
    } catch (const std::invalid_argument&) {
      throw UsageError("invalid scenario alpha=" + calaudit::format_double(alpha[i]) +
                       " beta=" + calaudit::format_double(beta[i]) +
                       ": both must be finite and positive");
    }
  }
  return out;
}

int cmd_synthetic(const Options& o) {
  const auto config = make_config(o);
  const auto scenarios = scenarios_from(o);
  calaudit::SyntheticExperimentConfig experiment;
  experiment.population_size = o.n;
  experiment.n_runs = o.runs;
  if (o.n < 10) throw UsageError("--n must be at least 10");
  if (o.runs < 1) throw UsageError("--runs must be at least 1");

  const auto results = calaudit::run_synthetic_experiment(scenarios, experiment, config);
  const fs::path prefix = output_prefix(o.output);

  json scen = json::array();
  for (const auto& r : results) {
    std::ostringstream csv;
    calaudit::write_sweep_csv(csv, r.sweep);
    write_file(with_suffix(prefix, "_" + r.scenario.name() + ".csv"), csv.str());
    json platt = json::array();
    for (const auto& p : r.platt) platt.push_back(calaudit::to_json(p));
    scen.push_back({{"name", r.scenario.name()},
                    {"alpha", r.scenario.alpha()},
                    {"beta", r.scenario.beta()},
                    {"sweep", calaudit::to_json(r.sweep)},
                    {"platt", platt}});
  }

  if (!o.population_out.empty()) {
    const auto pop = calaudit::generate_population(o.n, calaudit::population_seed(o.seed));
    const fs::path pprefix = output_prefix(o.population_out);
    for (const auto& s : scenarios) {
      std::ostringstream csv;
      calaudit::write_population(csv, pop, s);
      write_file(with_suffix(pprefix, "_" + s.name() + ".csv"), csv.str());
    }
  }

  json out = {{"command", "synthetic"},
              {"experiment",
               {{"population_size", experiment.population_size},
                {"n_runs", experiment.n_runs},
                {"validation_fraction", experiment.validation_fraction},
                {"test_fraction", experiment.test_fraction}}},
              {"scenarios", scen},
              {"provenance",
               {{"tool", "calaudit"},
                {"version", calaudit::kVersion},
                {"config", calaudit::to_json(config)}}}};
  write_file(with_suffix(prefix, ".json"), dump(out));
  return 0;
}

void add_estimator_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--bins", o.bins, "Number of bins for ECE, MCE and AdaECE")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--epsilon", o.epsilon, "Score clipping epsilon for CE and LLRs");
  cmd->add_option("--threshold", o.threshold, "Decision threshold for balanced accuracy");
  cmd->add_option("--seed", o.seed, "Master seed for every random draw");
}

void add_aggregate_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--metrics", o.metrics, "Comma-separated metric subset")->delimiter(',');
  cmd->add_option("--quantile-rule", o.quantile_rule,
                  "Quartile rule for summaries: linear, lower, higher, midpoint, nearest");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"calaudit: sub-group calibration and discrimination audits"};
  app.require_subcommand(1);
  Options o;

  auto* metrics = app.add_subcommand("metrics", "Metrics for one ScoreSet CSV");
  metrics->add_option("--input", o.input, "ScoreSet CSV")->required()->check(CLI::ExistingFile);
  metrics->add_option("--validation", o.validation,
                      "Validation CSV; enables recalibration deltas")
      ->check(CLI::ExistingFile);
  metrics->add_option("--output", o.output, "Output JSON (default: stdout)");
  metrics->add_option("--reliability", o.reliability, "Write the reliability curve CSV here");
  metrics->add_flag("--by-group", o.by_group, "Also report one block per group");
  metrics->add_option("--metrics", o.metrics, "Comma-separated metric subset")->delimiter(',');
  add_estimator_flags(metrics, o);

  auto* audit = app.add_subcommand("audit", "Per-group audit over a run manifest");
  audit->add_option("--manifest", o.manifest, "Run manifest CSV")
      ->required()
      ->check(CLI::ExistingFile);
  audit->add_option("--output", o.output, "Output prefix (PREFIX.json, PREFIX_<metric>.csv)")
      ->required();
  audit->add_flag("--size-matched", o.size_matched,
                  "Compare majority, size-matched majority and minority");
  audit->add_option("--majority", o.majority, "Majority group tag");
  audit->add_option("--minority", o.minority, "Minority group tag");
  audit->add_flag("--per-group-calibrator", o.per_group_calibrator,
                  "Fit one calibrator per group instead of one pooled calibrator");
  audit->add_flag("--drop-unknown", o.drop_unknown, "Remove Unknown-group records from test sets");
  add_estimator_flags(audit, o);
  add_aggregate_flags(audit, o);

  auto* sweep = app.add_subcommand("sweep", "Sampling-ratio sweep over test sets");
  auto* sweep_manifest =
      sweep->add_option("--manifest", o.manifest, "Run manifest CSV")->check(CLI::ExistingFile);
  auto* sweep_input =
      sweep->add_option("--input", o.input, "Single test ScoreSet CSV")->check(CLI::ExistingFile);
  sweep_manifest->excludes(sweep_input);
  sweep->add_option("--validation", o.validation, "Validation CSV for --input")
      ->check(CLI::ExistingFile)
      ->needs(sweep_input);
  sweep->add_option("--output", o.output, "Output prefix (PREFIX.csv, PREFIX.json)")->required();
  sweep->add_option("--ratios", o.ratios, "Comma-separated sampling ratios")->delimiter(',');
  sweep->add_option("--group", o.group, "Restrict test sets to one group");
  sweep->add_flag("--drop-unknown", o.drop_unknown, "Remove Unknown-group records from test sets");
  add_estimator_flags(sweep, o);
  add_aggregate_flags(sweep, o);

  auto* synthetic = app.add_subcommand("synthetic", "Synthetic de-calibration experiment");
  synthetic->add_option("--alpha", o.alpha, "Beta-CDF alpha per scenario")->delimiter(',');
  synthetic->add_option("--beta", o.beta, "Beta-CDF beta per scenario")->delimiter(',');
  synthetic->add_option("--runs", o.runs, "Number of random splits");
  synthetic->add_option("--n", o.n, "Population size");
  synthetic->add_option("--ratios", o.ratios, "Comma-separated sampling ratios")->delimiter(',');
  synthetic->add_option("--output", o.output, "Output prefix (PREFIX.json, PREFIX_<scenario>.csv)")
      ->required();
  synthetic->add_option("--population-out", o.population_out,
                        "Also export each scenario's population CSV under this prefix");
  add_estimator_flags(synthetic, o);
  add_aggregate_flags(synthetic, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version land here too, with exit code 0.
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*metrics) return cmd_metrics(o);
    if (*audit) return cmd_audit(o);
    if (*sweep) {
      if (o.manifest.empty() && o.input.empty()) {
        throw UsageError("sweep needs --manifest or --input");
      }
      return cmd_sweep(o);
    }
    if (*synthetic) return cmd_synthetic(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const calaudit::ManifestError& e) {
    std::cerr << "error: invalid run manifest\n";
    for (const auto& d : e.diagnostics()) std::cerr << "  " << d << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
