#pragma once

// Synthetic audit inputs shared by the harness tests and the acceptance suite.

#include <string>
#include <utility>
#include <vector>

#include "calaudit/harness.hpp"
#include "calaudit/rng.hpp"

namespace fixture {

// Records with score ~ Uniform(0, 1) and label ~ Bernoulli(score), so every
// group is perfectly calibrated and drawn from the same population.
inline calaudit::ScoreSet calibrated_groups(const std::vector<std::pair<std::string, int>>& sizes,
                                            std::uint64_t seed) {
  calaudit::Rng rng(seed);
  std::vector<calaudit::Record> records;
  for (const auto& [group, n] : sizes) {
    for (int i = 0; i < n; ++i) {
      calaudit::Record r;
      r.sample_id = group + "_" + std::to_string(i);
      r.score = rng.uniform();
      r.label = rng.uniform() < r.score ? 1 : 0;
      r.group = group;
      records.push_back(std::move(r));
    }
  }
  return calaudit::ScoreSet(std::move(records));
}

// n_runs runs whose validation and test sets are fresh calibrated draws.
inline std::vector<calaudit::RunData> calibrated_runs(
    int n_runs, const std::vector<std::pair<std::string, int>>& test_sizes, int validation_size,
    std::uint64_t seed) {
  std::vector<calaudit::RunData> runs;
  for (int r = 0; r < n_runs; ++r) {
    const auto run_seed = calaudit::derive_seed(seed, {static_cast<std::uint64_t>(r)});
    calaudit::RunData run;
    run.run_index = r;
    run.validation = calibrated_groups({{"pool", validation_size}}, run_seed ^ 0x9e3779b97f4a7c15ULL);
    run.test = calibrated_groups(test_sizes, run_seed);
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace fixture
