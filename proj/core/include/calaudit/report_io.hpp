#pragma once

#include <iosfwd>
#include <optional>
#include <span>

#include <nlohmann/json.hpp>

#include "calaudit/calibration.hpp"
#include "calaudit/calibrator.hpp"
#include "calaudit/discrimination.hpp"
#include "calaudit/harness.hpp"
#include "calaudit/stats.hpp"

namespace calaudit {

inline constexpr const char* kVersion = "0.1.0";

// JSON views of the result types. Missing or non-finite numbers map to null.
nlohmann::json to_json(const PlattParams& params);
nlohmann::json to_json(const DecompositionResult& result);
nlohmann::json to_json(const DiscriminationResult& result);
nlohmann::json to_json(const PairedTestResult& result);
nlohmann::json to_json(const BoxplotSummary& summary);
nlohmann::json to_json(const AuditConfig& config);
nlohmann::json to_json(const Comparison& comparison);
nlohmann::json to_json(const AuditReport& report);

/// Summaries and ratio comparisons of a sweep; the per-cell rows go to CSV.
nlohmann::json to_json(const SweepTable& table);

/// Long-form rows `metric,group,run,ratio,value` (ratio empty, value empty
/// when missing). With `only`, rows of a single metric.
void write_values_csv(std::ostream& out, const AuditReport& report,
                      std::optional<Metric> only = std::nullopt);
void write_sweep_csv(std::ostream& out, const SweepTable& table);

/// `bin_index,mean_score,positive_rate,count`
void write_reliability_csv(std::ostream& out, std::span<const ReliabilityPoint> points);

}  // namespace calaudit
