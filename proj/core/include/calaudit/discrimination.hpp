#pragma once

#include "calaudit/score_set.hpp"

namespace calaudit {

struct DiscriminationResult {
  double auc_roc = 0.0;
  double auc_pr = 0.0;
  double auc_prg = 0.0;
  double balanced_accuracy = 0.0;
  double threshold = 0.5;
};

/// Area under the ROC curve as the Mann-Whitney probability
/// P(s+ > s-) + 0.5 P(s+ == s-). Needs both classes (DegenerateSampleError).
double roc_auc(Scores scores, Labels labels);
double roc_auc(const ScoreSet& set);

/// Average precision: sum over descending score thresholds of
/// (recall increment) x precision, tied scores sharing one threshold.
/// Needs at least one positive.
double pr_auc(Scores scores, Labels labels);
double pr_auc(const ScoreSet& set);

/// Gain of average precision over the random-guess baseline:
/// (ap - prevalence) / (1 - prevalence). Undefined for prevalence 1.
double pr_gain(double average_precision, double prevalence);
double pr_auc_gain(Scores scores, Labels labels);
double pr_auc_gain(const ScoreSet& set);

/// 0.5 (TPR + TNR) with positive prediction when score >= threshold.
double balanced_accuracy(Scores scores, Labels labels, double threshold);
double balanced_accuracy(const ScoreSet& set, double threshold);

DiscriminationResult evaluate_discrimination(const ScoreSet& set, double threshold = 0.5);

}  // namespace calaudit
