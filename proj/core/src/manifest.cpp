#include "calaudit/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

#include "calaudit/csv_io.hpp"

namespace calaudit {

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out = "invalid run manifest";
  for (const auto& l : lines) out += "\n  " + l;
  return out;
}

}  // namespace

ManifestError::ManifestError(std::vector<std::string> diagnostics)
    : Error(join_lines(diagnostics)), diagnostics_(std::move(diagnostics)) {}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError({"cannot open manifest '" + path.string() + "'"});
  const std::filesystem::path base = path.parent_path();

  std::vector<std::string> problems;
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  int col_run = -1, col_val = -1, col_test = -1;
  std::size_t n_cols = 0;
  bool header = false;
  std::set<int> seen;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (!header) {
      header = true;
      n_cols = fields.size();
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == "run_index") col_run = static_cast<int>(i);
        if (fields[i] == "validation_csv_path") col_val = static_cast<int>(i);
        if (fields[i] == "test_csv_path") col_test = static_cast<int>(i);
      }
      if (col_run < 0 || col_val < 0 || col_test < 0) {
        throw ManifestError({"line " + std::to_string(line_no) +
                             ": header must contain run_index,validation_csv_path,test_csv_path"});
      }
      continue;
    }
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (fields.size() != n_cols) {
      problems.push_back(where + "expected " + std::to_string(n_cols) + " fields");
      continue;
    }
    ManifestEntry e;
    const std::string& run = fields[col_run];
    auto [ptr, ec] = std::from_chars(run.data(), run.data() + run.size(), e.run_index);
    if (ec != std::errc() || ptr != run.data() + run.size() || e.run_index < 0) {
      problems.push_back(where + "run_index '" + run + "' is not a non-negative integer");
      continue;
    }
    if (!seen.insert(e.run_index).second) {
      problems.push_back(where + "duplicate run_index " + run);
      continue;
    }
    if (fields[col_val].empty() || fields[col_test].empty()) {
      problems.push_back(where + "validation and test paths are both required");
      continue;
    }
    e.validation = base / fields[col_val];
    e.test = base / fields[col_test];
    entries.push_back(std::move(e));
  }
  if (!header) problems.push_back("manifest is empty");
  if (header && entries.empty() && problems.empty()) problems.push_back("manifest lists no runs");
  if (!problems.empty()) throw ManifestError(std::move(problems));

  std::sort(entries.begin(), entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.run_index < b.run_index; });
  return entries;
}

std::vector<RunData> load_runs(const std::filesystem::path& manifest) {
  const auto entries = read_manifest(manifest);
  std::vector<std::string> problems;
  std::vector<RunData> runs;
  for (const ManifestEntry& e : entries) {
    RunData run;
    run.run_index = e.run_index;
    bool ok = true;
    for (auto [path, slot] : {std::pair{&e.validation, &run.validation}, {&e.test, &run.test}}) {
      try {
        *slot = load_scoreset_file(*path);
        if (slot->empty()) {
          problems.push_back("run " + std::to_string(e.run_index) + ": '" + path->string() +
                             "' holds no records");
          ok = false;
        }
      } catch (const Error& err) {
        problems.push_back("run " + std::to_string(e.run_index) + ": " + err.what());
        ok = false;
      }
    }
    if (ok) runs.push_back(std::move(run));
  }
  if (!problems.empty()) throw ManifestError(std::move(problems));
  return runs;
}

}  // namespace calaudit
