#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "calaudit/score_set.hpp"

namespace calaudit {

enum class Role : std::uint8_t { kTrain, kValidation, kTest };

/// One run of a nested patient-level split. `roles` is aligned with the
/// records of the ScoreSet it was computed from.
struct SplitAssignment {
  int run_index = 0;
  int outer_fold = 0;
  int inner_fold = 0;
  std::vector<Role> roles;

  std::size_t count(Role role) const;

  /// Records playing `role`. With `drop_unknown`, records in kUnknownGroup are
  /// removed afterwards (the usual treatment of the test role).
  ScoreSet extract(const ScoreSet& set, Role role, bool drop_unknown = false) const;
};

/// Nested stratified K-fold over patients.
///
/// The outer K-fold picks the test patients; an inner K-fold over the
/// remaining patients picks validation, and everything else is train. The
/// result holds k_outer * k_inner assignments ordered by (outer, inner).
///
/// Patients are stratified jointly on (label, group). A patient counts as
/// positive if any of its records is positive; all records of a patient must
/// share one group. Within each stratum patients are shuffled and dealt
/// round-robin, so per-fold stratum counts differ by at most one.
///
/// Throws calaudit::Error if a stratum holds fewer than k_outer patients or a
/// patient spans several groups.
std::vector<SplitAssignment> stratified_double_kfold(const ScoreSet& set, int k_outer, int k_inner,
                                                     std::uint64_t seed);

/// k distinct positions out of [0, n), uniformly at random, in draw order.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    std::uint64_t seed);

/// Indices of a uniform sample without replacement of round(fraction * n)
/// positions out of `labels.size()`, returned in ascending order. Throws
/// DegenerateSampleError when the sample has fewer than two records or only
/// one label class.
std::vector<std::size_t> subsample_indices(Labels labels, double fraction, std::uint64_t seed);

ScoreSet subsample(const ScoreSet& set, double fraction, std::uint64_t seed);

/// Indices (ascending) of a label-stratified sample of exactly `target`
/// positions. The positive count is round(target * prevalence), clamped to
/// what is available.
std::vector<std::size_t> stratified_subsample_indices(Labels labels, std::size_t target,
                                                      std::uint64_t seed);

/// Majority-group records subsampled, stratified by label, down to the size of
/// the minority group. Throws std::invalid_argument if a group is absent or
/// the minority is the larger group.
ScoreSet match_group_size(const ScoreSet& set, std::string_view majority,
                          std::string_view minority, std::uint64_t seed);

}  // namespace calaudit
