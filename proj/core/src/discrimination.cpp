#include "calaudit/discrimination.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "calaudit/errors.hpp"

namespace calaudit {

namespace {

std::vector<std::size_t> order_by_score(Scores scores, bool descending) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (descending) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  } else {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  }
  return order;
}

void require_both_classes(Labels labels, const char* what) {
  const std::size_t pos = count_positives(labels);
  if (pos == 0 || pos == labels.size()) {
    throw DegenerateSampleError(std::string(what) + " needs both label classes");
  }
}

}  // namespace

double roc_auc(Scores scores, Labels labels) {
  require_aligned(scores, labels, "roc_auc");
  require_both_classes(labels, "roc_auc");

  // Walk tie blocks in ascending order. Each positive beats every negative
  // already passed and ties with the negatives in its own block.
  const auto order = order_by_score(scores, false);
  double wins = 0.0;
  double negatives_below = 0.0;
  double positives = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    double block_pos = 0.0, block_neg = 0.0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? block_pos : block_neg) += 1.0;
      ++j;
    }
    wins += block_pos * negatives_below + 0.5 * block_pos * block_neg;
    negatives_below += block_neg;
    positives += block_pos;
    i = j;
  }
  return wins / (positives * negatives_below);
}

double roc_auc(const ScoreSet& set) { return roc_auc(set.scores(), set.labels()); }

double pr_auc(Scores scores, Labels labels) {
  require_aligned(scores, labels, "pr_auc");
  const double total_pos = static_cast<double>(count_positives(labels));
  if (total_pos == 0.0) throw DegenerateSampleError("pr_auc needs at least one positive");

  const auto order = order_by_score(scores, true);
  double tp = 0.0, fp = 0.0, ap = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    double block_pos = 0.0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]]) {
        block_pos += 1.0;
      } else {
        fp += 1.0;
      }
      ++j;
    }
    tp += block_pos;
    if (block_pos > 0.0) ap += (block_pos / total_pos) * (tp / (tp + fp));
    i = j;
  }
  return ap;
}

double pr_auc(const ScoreSet& set) { return pr_auc(set.scores(), set.labels()); }

double pr_gain(double average_precision, double prevalence) {
  if (!(prevalence < 1.0)) {
    throw DegenerateSampleError("AUC-PR gain undefined when every label is positive");
  }
  return (average_precision - prevalence) / (1.0 - prevalence);
}

double pr_auc_gain(Scores scores, Labels labels) {
  const double ap = pr_auc(scores, labels);
  const double prevalence =
      static_cast<double>(count_positives(labels)) / static_cast<double>(labels.size());
  return pr_gain(ap, prevalence);
}

double pr_auc_gain(const ScoreSet& set) { return pr_auc_gain(set.scores(), set.labels()); }

double balanced_accuracy(Scores scores, Labels labels, double threshold) {
  require_aligned(scores, labels, "balanced_accuracy");
  require_both_classes(labels, "balanced_accuracy");
  double tp = 0.0, tn = 0.0, pos = 0.0, neg = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i]) {
      pos += 1.0;
      tp += predicted;
    } else {
      neg += 1.0;
      tn += !predicted;
    }
  }
  return 0.5 * (tp / pos + tn / neg);
}

double balanced_accuracy(const ScoreSet& set, double threshold) {
  return balanced_accuracy(set.scores(), set.labels(), threshold);
}

DiscriminationResult evaluate_discrimination(const ScoreSet& set, double threshold) {
  DiscriminationResult r;
  r.threshold = threshold;
  r.auc_roc = roc_auc(set);
  r.auc_pr = pr_auc(set);
  r.auc_prg = pr_gain(r.auc_pr, set.prevalence());
  r.balanced_accuracy = balanced_accuracy(set, threshold);
  return r;
}

}  // namespace calaudit
