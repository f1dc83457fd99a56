#pragma once

#include <vector>

#include "calaudit/calibration.hpp"
#include "calaudit/score_set.hpp"

namespace calaudit {

struct FitDiagnostics {
  int iterations = 0;
  double final_gradient_norm = 0.0;  // max-norm of the mean log-likelihood gradient
  bool converged = false;
  bool separable = false;        // classes perfectly split by llr: the MLE does not exist
  bool singular_hessian = false;  // slope unidentifiable (e.g. all llrs equal)
};

/// Logistic recalibration map p = sigmoid(a * llr + b).
struct PlattParams {
  double a = 1.0;
  double b = 0.0;
  FitDiagnostics diagnostics;
};

struct PlattFitOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 100;
};

/// ln(s / (1 - s)) with s clamped to [eps, 1 - eps].
std::vector<double> to_llr(Scores scores, double clip_epsilon = kDefaultClipEpsilon);

/// Unweighted maximum-likelihood logistic fit of labels on llrs.
///
/// Newton-Raphson from the identity map (a = 1, b = 0) with step halving
/// whenever the likelihood would decrease. A rank-deficient Hessian is
/// inverted on its range, so a constant design still fits the base rate.
/// Perfectly separable inputs run to the iteration cap and come back with
/// converged == false; the caller decides what to do with them.
PlattParams fit_platt(Scores llrs, Labels labels, const PlattFitOptions& options = {});

double apply_platt(const PlattParams& params, double llr);
std::vector<double> apply_platt(const PlattParams& params, Scores llrs);

/// apply_platt over the clipped llrs of `target`.
std::vector<double> recalibrate(const PlattParams& params, Scores target,
                                double clip_epsilon = kDefaultClipEpsilon);

/// Proper scoring rules on raw and recalibrated scores. The delta terms are
/// the calibration loss, raw minus recalibrated.
struct DecompositionResult {
  double ce = 0.0;
  double ce_platt = 0.0;
  double delta_ce = 0.0;
  double brier = 0.0;
  double brier_platt = 0.0;
  double delta_brier = 0.0;
};

DecompositionResult decompose_psr(Scores raw, Labels labels, Scores platt_scores,
                                  double clip_epsilon = kDefaultClipEpsilon);
DecompositionResult decompose_psr(const ScoreSet& raw, Scores platt_scores,
                                  double clip_epsilon = kDefaultClipEpsilon);

}  // namespace calaudit
