#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "calaudit/score_set.hpp"

namespace calaudit {

/// Regularized incomplete beta function I_x(alpha, beta), i.e. the CDF of the
/// Beta(alpha, beta) distribution at x.
///
/// Evaluated by Lentz's continued fraction on whichever of I_x(a, b) and
/// 1 - I_{1-x}(b, a) converges faster; closed forms are used when either
/// shape parameter is 1. Absolute accuracy is better than 1e-10 over the
/// parameter ranges exercised here.
///
/// Throws std::invalid_argument unless x is in [0, 1] and alpha, beta are
/// finite and positive.
double regularized_incomplete_beta(double x, double alpha, double beta);

/// Inverse of regularized_incomplete_beta in x, by bisection to 1e-12.
double inverse_regularized_incomplete_beta(double q, double alpha, double beta);

/// De-calibration regime: raw scores are pushed through the Beta(alpha, beta)
/// CDF. alpha == beta == 1 leaves scores calibrated; larger equal shapes give
/// increasingly over-confident S-shaped distortions that fix 0.5.
class SyntheticScenario {
 public:
  SyntheticScenario(double alpha, double beta);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

  /// e.g. "alpha1.5_beta1.5"
  std::string name() const;

  double distort(double true_posterior) const;
  std::vector<double> distort(Scores true_posteriors) const;

 private:
  double alpha_;
  double beta_;
};

/// The three regimes used throughout: calibrated, slightly and highly
/// de-calibrated.
std::vector<SyntheticScenario> default_scenarios();

struct SyntheticPopulation {
  std::vector<double> true_posterior;
  std::vector<std::uint8_t> labels;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return labels.size(); }
};

/// n samples with true posterior p ~ Uniform(0, 1) and label ~ Bernoulli(p).
/// Deterministic given the seed. Requires n >= 2.
SyntheticPopulation generate_population(std::size_t n, std::uint64_t seed);

/// ScoreSet whose scores are I_p(alpha, beta) of the true posteriors.
ScoreSet apply_miscalibration(const SyntheticPopulation& population,
                              const SyntheticScenario& scenario);

/// Writes the miscalibrated population as ScoreSet CSV with an extra
/// `true_posterior` column.
void write_population(std::ostream& out, const SyntheticPopulation& population,
                      const SyntheticScenario& scenario);

}  // namespace calaudit
