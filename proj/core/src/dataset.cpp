#include "calaudit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

#include "calaudit/errors.hpp"
#include "calaudit/rng.hpp"

namespace calaudit {

namespace {

struct Patient {
  std::vector<std::size_t> records;
  std::uint8_t label = 0;
  std::string group;
};

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.below(i)]);
  }
}

// Partial Fisher-Yates: k distinct positions out of n, in draw order.
std::vector<std::size_t> draw(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + rng.below(n - i)]);
  }
  pool.resize(k);
  return pool;
}

std::vector<std::size_t> choose(std::size_t n, std::size_t k, Rng& rng) {
  auto picked = draw(n, k, rng);
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace

std::size_t SplitAssignment::count(Role role) const {
  return static_cast<std::size_t>(std::count(roles.begin(), roles.end(), role));
}

ScoreSet SplitAssignment::extract(const ScoreSet& set, Role role, bool drop_unknown) const {
  if (roles.size() != set.size()) {
    throw std::invalid_argument("SplitAssignment::extract: assignment does not match set");
  }
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < roles.size(); ++i) {
    if (roles[i] != role) continue;
    if (drop_unknown && set[i].group == kUnknownGroup) continue;
    picked.push_back(i);
  }
  return set.select(picked);
}

std::vector<SplitAssignment> stratified_double_kfold(const ScoreSet& set, int k_outer, int k_inner,
                                                     std::uint64_t seed) {
  if (k_outer < 2 || k_inner < 2) {
    throw std::invalid_argument("stratified_double_kfold: k_outer and k_inner must be >= 2");
  }

  std::vector<Patient> patients;
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Record& r = set[i];
    auto [it, inserted] = by_id.try_emplace(r.patient_id, patients.size());
    if (inserted) {
      patients.push_back({{}, 0, r.group});
    } else if (patients[it->second].group != r.group) {
      throw Error("patient '" + r.patient_id + "' appears in groups '" +
                  patients[it->second].group + "' and '" + r.group + "'");
    }
    Patient& p = patients[it->second];
    p.records.push_back(i);
    p.label = std::max(p.label, r.label);
  }

  // std::map keeps strata in a fixed order so the shuffle sequence is stable.
  std::map<std::pair<int, std::string>, std::vector<std::size_t>> strata;
  for (std::size_t p = 0; p < patients.size(); ++p) {
    strata[{patients[p].label, patients[p].group}].push_back(p);
  }
  for (const auto& [key, members] : strata) {
    if (members.size() < static_cast<std::size_t>(k_outer)) {
      throw Error("stratum (label=" + std::to_string(key.first) + ", group=" + key.second +
                  ") has " + std::to_string(members.size()) + " patients; at least " +
                  std::to_string(k_outer) + " required");
    }
  }

  std::vector<int> outer_of(patients.size());
  {
    Rng rng(derive_seed(seed, {0}));
    std::size_t offset = 0;
    for (auto& [key, members] : strata) {
      shuffle(members, rng);
      for (std::size_t i = 0; i < members.size(); ++i) {
        outer_of[members[i]] = static_cast<int>((offset + i) % k_outer);
      }
      offset += members.size();
    }
  }

  std::vector<SplitAssignment> runs;
  runs.reserve(static_cast<std::size_t>(k_outer * k_inner));
  for (int o = 0; o < k_outer; ++o) {
    std::vector<int> inner_of(patients.size(), -1);
    Rng rng(derive_seed(seed, {1, static_cast<std::uint64_t>(o)}));
    std::size_t offset = 0;
    for (const auto& [key, members] : strata) {
      std::vector<std::size_t> rest;
      for (std::size_t p : members) {
        if (outer_of[p] != o) rest.push_back(p);
      }
      shuffle(rest, rng);
      for (std::size_t i = 0; i < rest.size(); ++i) {
        inner_of[rest[i]] = static_cast<int>((offset + i) % k_inner);
      }
      offset += rest.size();
    }

    for (int in = 0; in < k_inner; ++in) {
      SplitAssignment a;
      a.run_index = o * k_inner + in;
      a.outer_fold = o;
      a.inner_fold = in;
      a.roles.assign(set.size(), Role::kTrain);
      for (std::size_t p = 0; p < patients.size(); ++p) {
        const Role role = outer_of[p] == o    ? Role::kTest
                          : inner_of[p] == in ? Role::kValidation
                                              : Role::kTrain;
        for (std::size_t r : patients[p].records) a.roles[r] = role;
      }
      runs.push_back(std::move(a));
    }
  }
  return runs;
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    std::uint64_t seed) {
  if (k > n) throw std::invalid_argument("sample_without_replacement: k exceeds n");
  Rng rng(seed);
  return draw(n, k, rng);
}

std::vector<std::size_t> subsample_indices(Labels labels, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("subsample: fraction must lie in (0, 1]");
  }
  const std::size_t n = labels.size();
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (k < 2) {
    throw DegenerateSampleError("subsample of " + std::to_string(n) + " records at fraction " +
                                std::to_string(fraction) + " keeps fewer than 2 records");
  }
  Rng rng(seed);
  auto picked = choose(n, k, rng);
  std::size_t pos = 0;
  for (std::size_t i : picked) pos += labels[i] != 0;
  if (pos == 0 || pos == k) {
    throw DegenerateSampleError("subsample holds a single label class; reseed and retry");
  }
  return picked;
}

ScoreSet subsample(const ScoreSet& set, double fraction, std::uint64_t seed) {
  return set.select(subsample_indices(set.labels(), fraction, seed));
}

std::vector<std::size_t> stratified_subsample_indices(Labels labels, std::size_t target,
                                                      std::uint64_t seed) {
  const std::size_t n = labels.size();
  if (target > n) {
    throw std::invalid_argument("stratified_subsample: target exceeds population");
  }
  std::vector<std::size_t> pos_idx, neg_idx;
  for (std::size_t i = 0; i < n; ++i) (labels[i] ? pos_idx : neg_idx).push_back(i);

  std::size_t want_pos = 0;
  if (n > 0) {
    want_pos = static_cast<std::size_t>(std::llround(static_cast<double>(target) *
                                                     static_cast<double>(pos_idx.size()) /
                                                     static_cast<double>(n)));
  }
  want_pos = std::min(want_pos, pos_idx.size());
  want_pos = std::max(want_pos, target - std::min(target, neg_idx.size()));
  const std::size_t want_neg = target - want_pos;

  Rng rng(seed);
  std::vector<std::size_t> out;
  out.reserve(target);
  for (std::size_t j : choose(pos_idx.size(), want_pos, rng)) out.push_back(pos_idx[j]);
  for (std::size_t j : choose(neg_idx.size(), want_neg, rng)) out.push_back(neg_idx[j]);
  std::sort(out.begin(), out.end());
  return out;
}

ScoreSet match_group_size(const ScoreSet& set, std::string_view majority,
                          std::string_view minority, std::uint64_t seed) {
  const ScoreSet major = set.filter_group(majority);
  const std::size_t m = set.count_group(minority);
  if (major.empty() || m == 0) {
    throw std::invalid_argument("match_group_size: both groups must be present");
  }
  if (m > major.size()) {
    throw std::invalid_argument("match_group_size: group '" + std::string(minority) +
                                "' is larger than '" + std::string(majority) +
                                "'; swap the majority and minority arguments");
  }
  return major.select(stratified_subsample_indices(major.labels(), m, seed));
}

}  // namespace calaudit
