#include "calaudit/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "calaudit/errors.hpp"

namespace calaudit {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

bool is_blank(std::string_view line) {
  for (char c : line) {
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    const std::size_t stop = comma == std::string_view::npos ? line.size() : comma;
    fields.emplace_back(trim(line.substr(start, stop - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

ScoreSet load_scoreset(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;

  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!is_blank(line)) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw ParseError(line_no == 0 ? 1 : line_no, "missing header row");

  std::string_view header_view = line;
  if (header_view.substr(0, 3) == "\xEF\xBB\xBF") header_view.remove_prefix(3);
  const auto header = split_csv_line(header_view);

  int col_sample = -1, col_patient = -1, col_score = -1, col_label = -1, col_group = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const int idx = static_cast<int>(i);
    const std::string& name = header[i];
    int* slot = name == "sample_id"    ? &col_sample
                : name == "patient_id" ? &col_patient
                : name == "score"      ? &col_score
                : name == "label"      ? &col_label
                : name == "group"      ? &col_group
                                       : nullptr;
    if (slot == nullptr) continue;
    if (*slot >= 0) throw ParseError(line_no, "duplicate column '" + name + "'");
    *slot = idx;
  }
  if (col_score < 0) throw ParseError(line_no, "header lacks required column 'score'");
  if (col_label < 0) throw ParseError(line_no, "header lacks required column 'label'");

  std::vector<Record> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                                    std::to_string(fields.size()));
    }
    Record r;
    const auto score = parse_double(fields[col_score]);
    if (!score) throw ParseError(line_no, "score '" + fields[col_score] + "' is not a number");
    if (!(*score >= 0.0 && *score <= 1.0)) {
      throw ParseError(line_no, "score " + fields[col_score] + " outside [0,1]");
    }
    r.score = *score;
    const std::string& label = fields[col_label];
    if (label == "0") {
      r.label = 0;
    } else if (label == "1") {
      r.label = 1;
    } else {
      throw ParseError(line_no, "label '" + label + "' not in {0,1}");
    }
    if (col_sample >= 0) r.sample_id = fields[col_sample];
    if (col_patient >= 0) r.patient_id = fields[col_patient];
    if (col_group >= 0) r.group = fields[col_group];
    if (r.sample_id.empty()) r.sample_id = std::to_string(records.size());
    records.push_back(std::move(r));
  }
  return ScoreSet(std::move(records));
}

ScoreSet load_scoreset_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  try {
    return load_scoreset(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail() + " (" + path.string() + ")");
  }
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

void write_scoreset(std::ostream& out, const ScoreSet& set, std::span<const double> true_posterior) {
  const bool with_posterior = !true_posterior.empty();
  if (with_posterior && true_posterior.size() != set.size()) {
    throw std::invalid_argument("write_scoreset: true_posterior not aligned with set");
  }
  out << "sample_id,patient_id,score,label,group" << (with_posterior ? ",true_posterior" : "")
      << '\n';
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Record& r = set[i];
    out << r.sample_id << ',' << r.patient_id << ',' << format_double(r.score) << ','
        << static_cast<int>(r.label) << ',' << r.group;
    if (with_posterior) out << ',' << format_double(true_posterior[i]);
    out << '\n';
  }
}

}  // namespace calaudit
