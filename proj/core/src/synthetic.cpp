#include "calaudit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "calaudit/csv_io.hpp"
#include "calaudit/rng.hpp"

namespace calaudit {

namespace {

void check_shape(double alpha, double beta) {
  if (!(std::isfinite(alpha) && alpha > 0.0 && std::isfinite(beta) && beta > 0.0)) {
    throw std::invalid_argument("beta shape parameters must be finite and positive");
  }
}

// Continued fraction for I_x(a, b) by the modified Lentz method.
double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 4.0 * std::numeric_limits<double>::epsilon();
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;

    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw std::runtime_error("regularized_incomplete_beta: continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double x, double alpha, double beta) {
  check_shape(alpha, beta);
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument("regularized_incomplete_beta: x must lie in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (alpha == 1.0 && beta == 1.0) return x;
  if (alpha == 1.0) return -std::expm1(beta * std::log1p(-x));
  if (beta == 1.0) return std::pow(x, alpha);

  // Symmetric shapes fix 0.5 exactly and keep each half on its own side, so
  // a 0.5 threshold sees the same decisions before and after distortion.
  if (alpha == beta) {
    if (x == 0.5) return 0.5;
    if (x > 0.5) {
      return std::max(1.0 - regularized_incomplete_beta(1.0 - x, alpha, beta),
                      std::nextafter(0.5, 1.0));
    }
  }

  const double log_front = alpha * std::log(x) + beta * std::log1p(-x) -
                           (std::lgamma(alpha) + std::lgamma(beta) - std::lgamma(alpha + beta));
  const double front = std::exp(log_front);
  double value;
  if (x < (alpha + 1.0) / (alpha + beta + 2.0)) {
    value = front * beta_continued_fraction(x, alpha, beta) / alpha;
  } else {
    value = 1.0 - front * beta_continued_fraction(1.0 - x, beta, alpha) / beta;
  }
  if (alpha == beta) value = std::min(value, std::nextafter(0.5, 0.0));
  return value;
}

double inverse_regularized_incomplete_beta(double q, double alpha, double beta) {
  check_shape(alpha, beta);
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("inverse_regularized_incomplete_beta: q must lie in [0, 1]");
  }
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (regularized_incomplete_beta(mid, alpha, beta) < q) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

SyntheticScenario::SyntheticScenario(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  check_shape(alpha, beta);
}

std::string SyntheticScenario::name() const {
  return "alpha" + format_double(alpha_) + "_beta" + format_double(beta_);
}

double SyntheticScenario::distort(double true_posterior) const {
  return regularized_incomplete_beta(true_posterior, alpha_, beta_);
}

std::vector<double> SyntheticScenario::distort(Scores true_posteriors) const {
  std::vector<double> out(true_posteriors.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = distort(true_posteriors[i]);
  return out;
}

std::vector<SyntheticScenario> default_scenarios() {
  return {SyntheticScenario(1.0, 1.0), SyntheticScenario(1.5, 1.5), SyntheticScenario(5.0, 5.0)};
}

SyntheticPopulation generate_population(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("generate_population: n must be >= 2");
  SyntheticPopulation pop;
  pop.seed = seed;
  pop.true_posterior.resize(n);
  pop.labels.resize(n);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = rng.uniform();
    pop.true_posterior[i] = p;
    pop.labels[i] = rng.uniform() < p ? 1 : 0;
  }
  return pop;
}

ScoreSet apply_miscalibration(const SyntheticPopulation& population,
                              const SyntheticScenario& scenario) {
  const auto scores = scenario.distort(population.true_posterior);
  return ScoreSet::from_arrays(scores, population.labels);
}

void write_population(std::ostream& out, const SyntheticPopulation& population,
                      const SyntheticScenario& scenario) {
  write_scoreset(out, apply_miscalibration(population, scenario), population.true_posterior);
}

}  // namespace calaudit
