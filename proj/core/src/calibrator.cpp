#include "calaudit/calibrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "calaudit/errors.hpp"

namespace calaudit {

namespace {

constexpr double kLossRoundoff = 64.0 * std::numeric_limits<double>::epsilon();

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double mean_nll(Scores x, Labels y, double a, double b) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = a * x[i] + b;
    total += softplus(z) - (y[i] ? z : 0.0);
  }
  return total / static_cast<double>(x.size());
}

struct Derivatives {
  double ga = 0.0, gb = 0.0;              // gradient of the mean NLL
  double haa = 0.0, hab = 0.0, hbb = 0.0;  // Hessian
};

Derivatives derivatives(Scores x, Labels y, double a, double b) {
  Derivatives d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = sigmoid(a * x[i] + b);
    const double r = p - static_cast<double>(y[i]);
    const double w = p * (1.0 - p);
    d.ga += r * x[i];
    d.gb += r;
    d.haa += w * x[i] * x[i];
    d.hab += w * x[i];
    d.hbb += w;
  }
  const double n = static_cast<double>(x.size());
  d.ga /= n;
  d.gb /= n;
  d.haa /= n;
  d.hab /= n;
  d.hbb /= n;
  return d;
}

// Newton direction -H^+ g using the eigen-decomposition of the 2x2 Hessian,
// dropping eigenvalues below a relative cutoff.
struct Step {
  double da = 0.0, db = 0.0;
  bool rank_deficient = false;
};

Step newton_step(const Derivatives& d) {
  const double half_tr = 0.5 * (d.haa + d.hbb);
  const double half_diff = 0.5 * (d.haa - d.hbb);
  const double disc = std::hypot(half_diff, d.hab);
  const double l1 = half_tr + disc;
  Step s;
  if (!(l1 > 0.0)) {
    s.rank_deficient = true;
    return s;
  }
  const double det = d.haa * d.hbb - d.hab * d.hab;
  const double l2 = det / l1;

  double v1a, v1b;
  if (d.hab != 0.0) {
    v1a = l1 - d.hbb;
    v1b = d.hab;
  } else if (d.haa >= d.hbb) {
    v1a = 1.0;
    v1b = 0.0;
  } else {
    v1a = 0.0;
    v1b = 1.0;
  }
  const double norm = std::hypot(v1a, v1b);
  v1a /= norm;
  v1b /= norm;
  const double v2a = -v1b, v2b = v1a;

  const double c1 = (v1a * d.ga + v1b * d.gb) / l1;
  s.da = -c1 * v1a;
  s.db = -c1 * v1b;
  if (l2 > 1e-12 * l1) {
    const double c2 = (v2a * d.ga + v2b * d.gb) / l2;
    s.da -= c2 * v2a;
    s.db -= c2 * v2b;
  } else {
    s.rank_deficient = true;
  }
  return s;
}

bool is_separable(Scores x, Labels y) {
  double min_pos = std::numeric_limits<double>::infinity(), max_pos = -min_pos;
  double min_neg = min_pos, max_neg = -min_pos;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i]) {
      min_pos = std::min(min_pos, x[i]);
      max_pos = std::max(max_pos, x[i]);
    } else {
      min_neg = std::min(min_neg, x[i]);
      max_neg = std::max(max_neg, x[i]);
    }
  }
  const bool spread = std::min(min_pos, min_neg) < std::max(max_pos, max_neg);
  if (max_neg < min_pos || max_pos < min_neg) return true;
  // Quasi-complete separation: the classes touch at a single llr value.
  return spread && (max_neg == min_pos || max_pos == min_neg);
}

}  // namespace

std::vector<double> to_llr(Scores scores, double clip_epsilon) {
  if (!(clip_epsilon > 0.0 && clip_epsilon < 0.5)) {
    throw std::invalid_argument("to_llr: clip epsilon must lie in (0, 0.5)");
  }
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = std::clamp(scores[i], clip_epsilon, 1.0 - clip_epsilon);
    out[i] = std::log(s) - std::log1p(-s);
  }
  return out;
}

PlattParams fit_platt(Scores llrs, Labels labels, const PlattFitOptions& options) {
  require_aligned(llrs, labels, "fit_platt");
  const std::size_t pos = count_positives(labels);
  if (pos == 0 || pos == labels.size()) {
    throw DegenerateSampleError("fit_platt needs both label classes");
  }
  for (double v : llrs) {
    if (!std::isfinite(v)) throw std::invalid_argument("fit_platt: non-finite llr");
  }

  PlattParams params;
  FitDiagnostics& diag = params.diagnostics;
  diag.separable = is_separable(llrs, labels);

  double loss = mean_nll(llrs, labels, params.a, params.b);
  for (;;) {
    const Derivatives d = derivatives(llrs, labels, params.a, params.b);
    diag.final_gradient_norm = std::max(std::abs(d.ga), std::abs(d.gb));
    if (diag.final_gradient_norm <= options.gradient_tolerance && !diag.separable) {
      diag.converged = true;
      break;
    }
    if (diag.iterations >= options.max_iterations) break;

    const Step step = newton_step(d);
    diag.singular_hessian = diag.singular_hessian || step.rank_deficient;
    if (step.da == 0.0 && step.db == 0.0) break;

    double scale = 1.0;
    double next_loss = loss;
    bool moved = false;
    for (int halving = 0; halving < 60; ++halving, scale *= 0.5) {
      const double a = params.a + scale * step.da;
      const double b = params.b + scale * step.db;
      next_loss = mean_nll(llrs, labels, a, b);
      // Near the optimum the true decrease is below the rounding error of the
      // summed loss; treat changes inside that band as non-increasing.
      if (next_loss <= loss + kLossRoundoff * std::abs(loss)) {
        params.a = a;
        params.b = b;
        moved = true;
        break;
      }
    }
    ++diag.iterations;
    if (!moved) break;
    loss = next_loss;
  }
  return params;
}

double apply_platt(const PlattParams& params, double llr) {
  return sigmoid(params.a * llr + params.b);
}

std::vector<double> apply_platt(const PlattParams& params, Scores llrs) {
  std::vector<double> out(llrs.size());
  for (std::size_t i = 0; i < llrs.size(); ++i) out[i] = apply_platt(params, llrs[i]);
  return out;
}

std::vector<double> recalibrate(const PlattParams& params, Scores target, double clip_epsilon) {
  return apply_platt(params, to_llr(target, clip_epsilon));
}

DecompositionResult decompose_psr(Scores raw, Labels labels, Scores platt_scores,
                                  double clip_epsilon) {
  if (platt_scores.size() != raw.size()) {
    throw std::invalid_argument("decompose_psr: recalibrated scores not aligned with raw set");
  }
  DecompositionResult r;
  r.ce = cross_entropy(raw, labels, clip_epsilon);
  r.ce_platt = cross_entropy(platt_scores, labels, clip_epsilon);
  r.delta_ce = r.ce - r.ce_platt;
  r.brier = brier(raw, labels);
  r.brier_platt = brier(platt_scores, labels);
  r.delta_brier = r.brier - r.brier_platt;
  return r;
}

DecompositionResult decompose_psr(const ScoreSet& raw, Scores platt_scores, double clip_epsilon) {
  return decompose_psr(raw.scores(), raw.labels(), platt_scores, clip_epsilon);
}

}  // namespace calaudit
