#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace calaudit {

using Scores = std::span<const double>;
using Labels = std::span<const std::uint8_t>;

/// Group tag used when a record carries no protected-attribute value.
inline constexpr std::string_view kUnknownGroup = "Unknown";

struct Record {
  std::string sample_id;
  std::string patient_id;  // empty means "same as sample_id"
  double score = 0.0;
  std::uint8_t label = 0;
  std::string group;  // empty means Unknown
};

/// Immutable, validated collection of scored evaluation records.
///
/// Every score lies in [0, 1] and every label in {0, 1}; construction throws
/// std::invalid_argument otherwise. Missing sample ids are
/// filled with the record index, missing patient ids with the sample id and
/// missing groups with kUnknownGroup. Scores and labels are also held as
/// contiguous arrays so metrics can work on spans without copying.
class ScoreSet {
 public:
  ScoreSet() = default;
  explicit ScoreSet(std::vector<Record> records);

  /// Builds a set from parallel arrays, all in group Unknown.
  static ScoreSet from_arrays(Scores scores, Labels labels);

  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  const Record& operator[](std::size_t i) const { return records_[i]; }
  const std::vector<Record>& records() const noexcept { return records_; }

  Scores scores() const noexcept { return scores_; }
  Labels labels() const noexcept { return labels_; }

  std::size_t positives() const noexcept { return positives_; }
  std::size_t negatives() const noexcept { return size() - positives_; }
  bool has_both_classes() const noexcept { return positives_ > 0 && positives_ < size(); }

  /// Fraction of positive labels. Throws on an empty set.
  double prevalence() const;

  /// Distinct group tags, sorted.
  std::vector<std::string> groups() const;
  std::size_t count_group(std::string_view group) const;
  std::vector<std::size_t> indices_of_group(std::string_view group) const;

  /// New set holding the records at `indices`, in the given order.
  ScoreSet select(std::span<const std::size_t> indices) const;
  ScoreSet filter_group(std::string_view group) const;
  ScoreSet without_group(std::string_view group) const;

 private:
  std::vector<Record> records_;
  std::vector<double> scores_;
  std::vector<std::uint8_t> labels_;
  std::size_t positives_ = 0;
};

/// Throws std::invalid_argument unless scores and labels have equal, non-zero
/// length. `what` names the calling operation.
void require_aligned(Scores scores, Labels labels, const char* what);

/// Counts label == 1 entries.
std::size_t count_positives(Labels labels);

}  // namespace calaudit
