#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "calaudit/score_set.hpp"

namespace calaudit {

/// Reads a ScoreSet from CSV text.
///
/// The header row must name `score` and `label`; `sample_id`, `patient_id`
/// and `group` are optional and unknown columns are ignored. Blank lines are
/// skipped. Any malformed row, score outside [0,1] or label outside {0,1}
/// raises ParseError with the 1-based line number.
ScoreSet load_scoreset(std::istream& in);
ScoreSet load_scoreset_file(const std::filesystem::path& path);

/// Writes `sample_id,patient_id,score,label,group`. When `true_posterior` is
/// non-empty it must be aligned with the set and is appended as a sixth column.
void write_scoreset(std::ostream& out, const ScoreSet& set,
                    std::span<const double> true_posterior = {});

/// Splits one CSV line on commas, trimming whitespace and surrounding quotes.
std::vector<std::string> split_csv_line(std::string_view line);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

}  // namespace calaudit
