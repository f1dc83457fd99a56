#include "calaudit/report_io.hpp"

#include <cmath>
#include <ostream>

#include "calaudit/csv_io.hpp"

namespace calaudit {

namespace {

nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

nlohmann::json number(const std::optional<double>& v) {
  return v ? number(*v) : nlohmann::json(nullptr);
}

std::string csv_value(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? format_double(*v) : std::string();
}

}  // namespace

nlohmann::json to_json(const PlattParams& p) {
  return {{"a", number(p.a)},
          {"b", number(p.b)},
          {"diagnostics",
           {{"iterations", p.diagnostics.iterations},
            {"final_gradient_norm", number(p.diagnostics.final_gradient_norm)},
            {"converged", p.diagnostics.converged},
            {"separable", p.diagnostics.separable},
            {"singular_hessian", p.diagnostics.singular_hessian}}}};
}

nlohmann::json to_json(const DecompositionResult& r) {
  return {{"ce", number(r.ce)},       {"ce_platt", number(r.ce_platt)},
          {"delta_ce", number(r.delta_ce)}, {"brier", number(r.brier)},
          {"brier_platt", number(r.brier_platt)}, {"delta_brier", number(r.delta_brier)}};
}

nlohmann::json to_json(const DiscriminationResult& r) {
  return {{"auc_roc", number(r.auc_roc)},
          {"auc_pr", number(r.auc_pr)},
          {"auc_prg", number(r.auc_prg)},
          {"balanced_accuracy", number(r.balanced_accuracy)},
          {"threshold", number(r.threshold)}};
}

nlohmann::json to_json(const PairedTestResult& r) {
  return {{"statistic", number(r.statistic)}, {"w_plus", number(r.w_plus)},
          {"w_minus", number(r.w_minus)},     {"p_value", number(r.p_value)},
          {"n_effective", r.n_effective},     {"zeros_dropped", r.zeros_dropped},
          {"method", std::string(to_string(r.method))}};
}

nlohmann::json to_json(const BoxplotSummary& s) {
  return {{"mean", number(s.mean)}, {"median", number(s.median)}, {"q1", number(s.q1)},
          {"q3", number(s.q3)},     {"iqr", number(s.iqr)},       {"min", number(s.min)},
          {"max", number(s.max)},   {"n", s.n}};
}

nlohmann::json to_json(const AuditConfig& c) {
  nlohmann::json metrics = nlohmann::json::array();
  for (Metric m : c.metrics) metrics.push_back(std::string(to_string(m)));
  nlohmann::json ratios = nlohmann::json::array();
  for (double r : c.ratios) ratios.push_back(r);
  return {{"metrics", metrics},
          {"n_bins", c.n_bins},
          {"binning", "equal_width (ece, mce); equal_count (ada_ece)"},
          {"clip_epsilon", c.clip_epsilon},
          {"threshold", c.threshold},
          {"seed", c.seed},
          {"ratios", ratios},
          {"majority", c.majority},
          {"minority", c.minority},
          {"quantile_rule", std::string(to_string(c.quantile_rule))},
          {"per_group_calibrator", c.per_group_calibrator},
          {"max_subsample_attempts", c.max_subsample_attempts}};
}

nlohmann::json to_json(const Comparison& c) {
  nlohmann::json j = {{"arm", c.arm},
                      {"metric", std::string(to_string(c.metric))},
                      {"series_a", c.series_a},
                      {"series_b", c.series_b},
                      {"runs_paired", c.runs_paired},
                      {"runs_excluded", c.runs_excluded},
                      {"test", c.test ? to_json(*c.test) : nlohmann::json(nullptr)},
                      {"significant", c.significant()}};
  if (!c.error.empty()) j["error"] = c.error;
  return j;
}

nlohmann::json to_json(const AuditReport& report) {
  nlohmann::json values = nlohmann::json::object();
  nlohmann::json run_ids = nlohmann::json::array();
  for (const RunProvenance& p : report.runs) run_ids.push_back(p.run_index);
  for (const MetricValue& v : report.values) {
    values[v.series][std::string(to_string(v.metric))].push_back(number(v.value));
  }

  nlohmann::json summaries = nlohmann::json::array();
  for (const SeriesSummary& s : report.summaries) {
    summaries.push_back({{"series", s.series},
                         {"metric", std::string(to_string(s.metric))},
                         {"summary", s.summary ? to_json(*s.summary) : nlohmann::json(nullptr)},
                         {"missing", s.missing}});
  }
  nlohmann::json comparisons = nlohmann::json::array();
  for (const Comparison& c : report.comparisons) comparisons.push_back(to_json(c));

  nlohmann::json runs = nlohmann::json::array();
  for (const RunProvenance& p : report.runs) {
    nlohmann::json r = {{"run", p.run_index},
                        {"platt", p.platt ? to_json(*p.platt) : nlohmann::json(nullptr)},
                        {"notes", p.notes}};
    if (p.subsample_seed) r["subsample_seed"] = *p.subsample_seed;
    runs.push_back(std::move(r));
  }

  return {{"kind", report.kind},
          {"series", report.series},
          {"runs", run_ids},
          {"values", values},
          {"summaries", summaries},
          {"comparisons", comparisons},
          {"test", {{"name", "wilcoxon_signed_rank"},
                    {"sided", "two-sided"},
                    {"level", kSignificanceLevel},
                    {"multiple_comparison_correction", "none"}}},
          {"provenance", {{"tool", "calaudit"},
                          {"version", kVersion},
                          {"config", to_json(report.config)},
                          {"runs", runs}}}};
}

nlohmann::json to_json(const SweepTable& t) {
  nlohmann::json summaries = nlohmann::json::array();
  for (const RatioSummary& s : t.summaries) {
    summaries.push_back({{"ratio", s.ratio},
                         {"metric", std::string(to_string(s.metric))},
                         {"summary", s.summary ? to_json(*s.summary) : nlohmann::json(nullptr)},
                         {"missing", s.missing}});
  }
  nlohmann::json comparisons = nlohmann::json::array();
  for (const Comparison& c : t.comparisons) comparisons.push_back(to_json(c));
  return {{"label", t.label}, {"runs", t.runs}, {"ratios", t.ratios},
          {"summaries", summaries}, {"comparisons", comparisons}};
}

void write_values_csv(std::ostream& out, const AuditReport& report, std::optional<Metric> only) {
  out << "metric,group,run,ratio,value\n";
  for (const MetricValue& v : report.values) {
    if (only && v.metric != *only) continue;
    out << to_string(v.metric) << ',' << v.series << ',' << v.run << ",," << csv_value(v.value)
        << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  out << "metric,group,run,ratio,value\n";
  for (const SweepRow& row : table.rows) {
    out << to_string(row.metric) << ',' << table.label << ',' << row.run << ','
        << format_double(row.ratio) << ',' << csv_value(row.value) << '\n';
  }
}

void write_reliability_csv(std::ostream& out, std::span<const ReliabilityPoint> points) {
  out << "bin_index,mean_score,positive_rate,count\n";
  for (const ReliabilityPoint& p : points) {
    out << p.bin_index << ',' << format_double(p.mean_score) << ','
        << format_double(p.positive_rate) << ',' << p.count << '\n';
  }
}

}  // namespace calaudit
