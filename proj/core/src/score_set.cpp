#include "calaudit/score_set.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace calaudit {

ScoreSet::ScoreSet(std::vector<Record> records) : records_(std::move(records)) {
  scores_.reserve(records_.size());
  labels_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    Record& r = records_[i];
    if (!(r.score >= 0.0 && r.score <= 1.0)) {
      throw std::invalid_argument("record " + std::to_string(i) + ": score outside [0,1]");
    }
    if (r.label > 1) {
      throw std::invalid_argument("record " + std::to_string(i) + ": label not in {0,1}");
    }
    if (r.sample_id.empty()) r.sample_id = std::to_string(i);
    if (r.patient_id.empty()) r.patient_id = r.sample_id;
    if (r.group.empty()) r.group = kUnknownGroup;
    scores_.push_back(r.score);
    labels_.push_back(r.label);
    positives_ += r.label;
  }
}

ScoreSet ScoreSet::from_arrays(Scores scores, Labels labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("ScoreSet::from_arrays: length mismatch");
  }
  std::vector<Record> records(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    records[i].score = scores[i];
    records[i].label = labels[i];
  }
  return ScoreSet(std::move(records));
}

double ScoreSet::prevalence() const {
  if (empty()) throw std::invalid_argument("prevalence of an empty ScoreSet");
  return static_cast<double>(positives_) / static_cast<double>(size());
}

std::vector<std::string> ScoreSet::groups() const {
  std::set<std::string> tags;
  for (const Record& r : records_) tags.insert(r.group);
  return {tags.begin(), tags.end()};
}

std::size_t ScoreSet::count_group(std::string_view group) const {
  return static_cast<std::size_t>(std::count_if(
      records_.begin(), records_.end(), [&](const Record& r) { return r.group == group; }));
}

std::vector<std::size_t> ScoreSet::indices_of_group(std::string_view group) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].group == group) out.push_back(i);
  }
  return out;
}

ScoreSet ScoreSet::select(std::span<const std::size_t> indices) const {
  std::vector<Record> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) picked.push_back(records_.at(i));
  return ScoreSet(std::move(picked));
}

ScoreSet ScoreSet::filter_group(std::string_view group) const {
  return select(indices_of_group(group));
}

ScoreSet ScoreSet::without_group(std::string_view group) const {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].group != group) keep.push_back(i);
  }
  return select(keep);
}

void require_aligned(Scores scores, Labels labels, const char* what) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument(std::string(what) + ": scores and labels differ in length");
  }
  if (scores.empty()) throw std::invalid_argument(std::string(what) + ": empty input");
}

std::size_t count_positives(Labels labels) {
  std::size_t n = 0;
  for (auto y : labels) n += (y != 0);
  return n;
}

}  // namespace calaudit
