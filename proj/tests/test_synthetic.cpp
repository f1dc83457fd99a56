#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "calaudit/calibration.hpp"
#include "calaudit/csv_io.hpp"
#include "calaudit/discrimination.hpp"
#include "calaudit/synthetic.hpp"
#include "oracles.hpp"

using namespace calaudit;

TEST(IncompleteBeta, UniformIsIdentity) {
  for (int i = 0; i <= 100; ++i) {
    const double x = i / 100.0;
    EXPECT_NEAR(regularized_incomplete_beta(x, 1.0, 1.0), x, 1e-15);
  }
}

TEST(IncompleteBeta, SymmetricShapesFixHalf) {
  for (double a : {0.5, 1.0, 1.5, 2.0, 5.0, 10.0, 37.0}) {
    EXPECT_NEAR(regularized_incomplete_beta(0.5, a, a), 0.5, 1e-12) << a;
  }
}

TEST(IncompleteBeta, EndpointsAndMonotonicity) {
  for (double a : {0.5, 1.5, 5.0}) {
    for (double b : {0.5, 1.0, 10.0}) {
      EXPECT_EQ(regularized_incomplete_beta(0.0, a, b), 0.0);
      EXPECT_EQ(regularized_incomplete_beta(1.0, a, b), 1.0);
      double prev = 0.0;
      for (int i = 1; i <= 1000; ++i) {
        const double v = regularized_incomplete_beta(i / 1000.0, a, b);
        EXPECT_GE(v, prev) << a << " " << b << " " << i;
        prev = v;
      }
    }
  }
}

TEST(IncompleteBeta, QuarterFiveFiveAgainstQuadrature) {
  // Closed form check as well: I_{1/4}(5,5) = sum_{j=5}^{9} C(9,j) (1/4)^j (3/4)^(9-j).
  double closed = 0.0;
  for (int j = 5; j <= 9; ++j) {
    double c = 1.0;
    for (int k = 0; k < j; ++k) c = c * (9 - k) / (k + 1);
    closed += c * std::pow(0.25, j) * std::pow(0.75, 9 - j);
  }
  EXPECT_NEAR(regularized_incomplete_beta(0.25, 5.0, 5.0), closed, 1e-14);
  EXPECT_NEAR(regularized_incomplete_beta(0.25, 5.0, 5.0), oracle::beta_cdf_quadrature(0.25, 5.0, 5.0),
              1e-8);
}

TEST(IncompleteBeta, GridAgainstQuadrature) {
  const double shapes[] = {0.5, 1.0, 1.5, 5.0, 10.0};
  for (double a : shapes) {
    for (double b : shapes) {
      for (int i = 1; i <= 99; i += 7) {
        const double x = i / 100.0;
        EXPECT_NEAR(regularized_incomplete_beta(x, a, b), oracle::beta_cdf_quadrature(x, a, b), 1e-8)
            << "x=" << x << " a=" << a << " b=" << b;
      }
    }
  }
}

TEST(IncompleteBeta, InvalidArguments) {
  EXPECT_THROW(regularized_incomplete_beta(-0.1, 1, 1), std::invalid_argument);
  EXPECT_THROW(regularized_incomplete_beta(1.1, 1, 1), std::invalid_argument);
  EXPECT_THROW(regularized_incomplete_beta(0.5, 0, 1), std::invalid_argument);
  EXPECT_THROW(regularized_incomplete_beta(0.5, 1, -2), std::invalid_argument);
  EXPECT_THROW(regularized_incomplete_beta(0.5, INFINITY, 1), std::invalid_argument);
}

TEST(IncompleteBeta, InverseRoundTrip) {
  for (double a : {1.0, 1.5, 5.0}) {
    for (int i = 1; i < 20; ++i) {
      const double p = i / 20.0;
      const double s = regularized_incomplete_beta(p, a, a);
      EXPECT_NEAR(inverse_regularized_incomplete_beta(s, a, a), p, 1e-10);
    }
  }
}

TEST(Scenario, NameAndValidation) {
  EXPECT_EQ(SyntheticScenario(1.5, 1.5).name(), "alpha1.5_beta1.5");
  EXPECT_EQ(SyntheticScenario(5, 5).name(), "alpha5_beta5");
  EXPECT_THROW(SyntheticScenario(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(SyntheticScenario(1.0, NAN), std::invalid_argument);
  const auto defaults = default_scenarios();
  ASSERT_EQ(defaults.size(), 3u);
  EXPECT_EQ(defaults[0].alpha(), 1.0);
  EXPECT_EQ(defaults[2].beta(), 5.0);
}

TEST(Population, DeterministicWithHalfPrevalence) {
  const SyntheticPopulation a = generate_population(200000, 77);
  const SyntheticPopulation b = generate_population(200000, 77);
  EXPECT_EQ(a.true_posterior, b.true_posterior);
  EXPECT_EQ(a.labels, b.labels);
  double pos = 0.0;
  for (auto v : a.labels) pos += v;
  EXPECT_NEAR(pos / 200000.0, 0.5, 0.005);
  EXPECT_NE(generate_population(1000, 78).true_posterior, generate_population(1000, 77).true_posterior);
  EXPECT_THROW(generate_population(1, 1), std::invalid_argument);
}

TEST(Population, MillionSamples) {
  const SyntheticPopulation pop = generate_population(1000000, 3);
  EXPECT_EQ(pop.size(), 1000000u);
}

TEST(Miscalibration, UniformScenarioKeepsPosteriors) {
  const SyntheticPopulation pop = generate_population(5000, 4);
  const ScoreSet set = apply_miscalibration(pop, SyntheticScenario(1, 1));
  for (std::size_t i = 0; i < pop.size(); ++i) EXPECT_EQ(set[i].score, pop.true_posterior[i]);
}

TEST(Miscalibration, SymmetricScenariosKeepDecisionsAndRanking) {
  const SyntheticPopulation pop = generate_population(20000, 5);
  const ScoreSet base = apply_miscalibration(pop, SyntheticScenario(1, 1));
  const DiscriminationResult ref = evaluate_discrimination(base);
  for (const auto& scenario : default_scenarios()) {
    EXPECT_EQ(scenario.distort(0.5), 0.5);
    const ScoreSet set = apply_miscalibration(pop, scenario);
    const DiscriminationResult r = evaluate_discrimination(set);
    EXPECT_NEAR(r.auc_roc, ref.auc_roc, 1e-12) << scenario.name();
    EXPECT_NEAR(r.auc_pr, ref.auc_pr, 1e-12) << scenario.name();
    EXPECT_NEAR(r.auc_prg, ref.auc_prg, 1e-12) << scenario.name();
    EXPECT_NEAR(r.balanced_accuracy, ref.balanced_accuracy, 1e-12) << scenario.name();
    for (std::size_t i = 0; i < set.size(); ++i) {
      ASSERT_EQ(set[i].score >= 0.5, base[i].score >= 0.5) << i;
    }
  }
}

TEST(Miscalibration, StrongDistortionRaisesEce) {
  const SyntheticPopulation pop = generate_population(100000, 6);
  const ScoreSet calibrated = apply_miscalibration(pop, SyntheticScenario(1, 1));
  const ScoreSet distorted = apply_miscalibration(pop, SyntheticScenario(5, 5));
  const double e1 = ece(calibrated, bin_scores(calibrated, BinningScheme::kEqualWidth, kDefaultBins));
  const double e5 = ece(distorted, bin_scores(distorted, BinningScheme::kEqualWidth, kDefaultBins));
  EXPECT_GT(e5, 10.0 * e1);
  EXPECT_GT(e5, 0.05);
}

TEST(Miscalibration, WritePopulationCsv) {
  const SyntheticPopulation pop = generate_population(10, 7);
  std::ostringstream out;
  write_population(out, pop, SyntheticScenario(5, 5));
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "sample_id,patient_id,score,label,group,true_posterior");
  std::istringstream again(out.str());
  const ScoreSet back = load_scoreset(again);
  ASSERT_EQ(back.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(back[i].score, SyntheticScenario(5, 5).distort(pop.true_posterior[i]));
    EXPECT_EQ(back[i].label, pop.labels[i]);
  }
}
