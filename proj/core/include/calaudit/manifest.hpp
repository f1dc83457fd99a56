#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "calaudit/errors.hpp"
#include "calaudit/harness.hpp"

namespace calaudit {

/// Every problem found in a run manifest, one diagnostic per entry.
class ManifestError : public Error {
 public:
  explicit ManifestError(std::vector<std::string> diagnostics);

  const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

struct ManifestEntry {
  int run_index = 0;
  std::filesystem::path validation;
  std::filesystem::path test;
};

/// Parses a manifest CSV with columns run_index,validation_csv_path,
/// test_csv_path. Relative paths are resolved against the manifest's own
/// directory. Entries come back sorted by run index.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// Reads the manifest and every ScoreSet it names. Problems are collected
/// across all rows and files and raised together as one ManifestError.
std::vector<RunData> load_runs(const std::filesystem::path& manifest);

}  // namespace calaudit
