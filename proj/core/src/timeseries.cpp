#include "rpbof/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace rpbof {

namespace {

// Splits on the detected delimiter; for whitespace mode, runs of spaces
// count as one separator.
std::vector<std::string_view> split_fields(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  if (delim == ' ') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      if (j > i) out.push_back(line.substr(i, j - i));
      i = j;
    }
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_field(std::string_view field, const std::filesystem::path& path,
                   std::size_t line_no) {
  // trim surrounding blanks
  while (!field.empty() && (field.front() == ' ' || field.front() == '\r'))
    field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\r'))
    field.remove_suffix(1);
  double value = 0.0;
  const auto* begin = field.data();
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw DataError(path.string() + ":" + std::to_string(line_no) +
                    ": non-numeric field '" + std::string(field) + "'");
  }
  return value;
}

char detect_delimiter(std::string_view line) {
  if (line.find(',') != std::string_view::npos) return ',';
  if (line.find('\t') != std::string_view::npos) return '\t';
  return ' ';
}

std::filesystem::path find_split_file(const std::filesystem::path& root,
                                      const std::string& name,
                                      const std::string& suffix) {
  const std::string stem = name + suffix;
  const std::filesystem::path dirs[] = {root, root / name};
  for (const auto& dir : dirs) {
    if (!std::filesystem::is_directory(dir)) continue;
    if (std::filesystem::exists(dir / stem)) return dir / stem;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const auto fname = entry.path().filename().string();
      if (fname == stem || fname.rfind(stem + ".", 0) == 0) return entry.path();
    }
  }
  throw DataError("dataset file " + stem + " not found under " + root.string());
}

}  // namespace

LabelMap::LabelMap(std::vector<long long> sorted_raw_labels)
    : raw_(std::move(sorted_raw_labels)) {}

LabelMap LabelMap::from_raw(const std::vector<long long>& raw_labels) {
  std::vector<long long> uniq(raw_labels);
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  return LabelMap(std::move(uniq));
}

int LabelMap::class_of(long long raw) const {
  const auto it = std::lower_bound(raw_.begin(), raw_.end(), raw);
  if (it == raw_.end() || *it != raw)
    throw DataError("label " + std::to_string(raw) + " not in label map");
  return static_cast<int>(it - raw_.begin()) + 1;
}

long long LabelMap::raw_of(int class_id) const {
  if (class_id < 1 || class_id > class_count())
    throw DataError("class id " + std::to_string(class_id) + " out of range");
  return raw_[static_cast<std::size_t>(class_id) - 1];
}

std::vector<RawRecord> read_ucr_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 0;
  char delim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (delim == 0) delim = detect_delimiter(line);

    const auto fields = split_fields(line, delim);
    if (fields.size() < 3) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": record has fewer than 3 fields");
    }
    RawRecord rec;
    rec.raw_label = parse_field(fields[0], path, line_no);
    rec.values.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i)
      rec.values.push_back(parse_field(fields[i], path, line_no));
    records.push_back(std::move(rec));
  }
  return records;
}

namespace {

long long raw_label_as_int(double raw, const std::string& context) {
  const double rounded = std::nearbyint(raw);
  if (!std::isfinite(raw) || std::abs(raw - rounded) > 1e-9)
    throw DataError(context + ": non-integer class label " + std::to_string(raw));
  return static_cast<long long>(rounded);
}

}  // namespace

std::vector<TimeSeries> remap_records(const std::vector<RawRecord>& records,
                                      const LabelMap& labels) {
  std::vector<TimeSeries> out;
  out.reserve(records.size());
  int id = 0;
  for (const auto& rec : records) {
    TimeSeries ts;
    ts.values = rec.values;
    ts.label = labels.class_of(raw_label_as_int(rec.raw_label, "record"));
    ts.id = id++;
    out.push_back(std::move(ts));
  }
  return out;
}

std::pair<std::vector<TimeSeries>, LabelMap> load_ucr_file(
    const std::filesystem::path& path) {
  const auto records = read_ucr_records(path);
  std::vector<long long> raws;
  raws.reserve(records.size());
  for (const auto& rec : records)
    raws.push_back(raw_label_as_int(rec.raw_label, path.string()));
  LabelMap labels = LabelMap::from_raw(raws);
  return {remap_records(records, labels), labels};
}

Dataset load_ucr_dataset(const std::filesystem::path& root,
                         const std::string& name) {
  const auto train_path = find_split_file(root, name, "_TRAIN");
  const auto test_path = find_split_file(root, name, "_TEST");
  const auto train_records = read_ucr_records(train_path);
  const auto test_records = read_ucr_records(test_path);
  if (train_records.empty())
    throw DataError(train_path.string() + ": no records");

  std::vector<long long> raws;
  raws.reserve(train_records.size() + test_records.size());
  for (const auto& rec : train_records)
    raws.push_back(raw_label_as_int(rec.raw_label, train_path.string()));
  for (const auto& rec : test_records)
    raws.push_back(raw_label_as_int(rec.raw_label, test_path.string()));

  Dataset d;
  d.name = name;
  d.labels = LabelMap::from_raw(raws);
  d.class_count = d.labels.class_count();
  d.train = remap_records(train_records, d.labels);
  d.test = remap_records(test_records, d.labels);

  bool uniform = true;
  const int l0 = d.train.front().length();
  for (const auto& ts : d.train) uniform = uniform && ts.length() == l0;
  for (const auto& ts : d.test) uniform = uniform && ts.length() == l0;
  if (uniform) d.declared_length = l0;
  return d;
}

void save_ucr_file(const std::filesystem::path& path,
                   const std::vector<TimeSeries>& series,
                   const LabelMap& labels) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  char buf[64];
  for (const auto& ts : series) {
    out << labels.raw_of(ts.label);
    for (const double v : ts.values) {
      const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ',';
      out.write(buf, n);
    }
    out << '\n';
  }
  if (!out) throw DataError("write failure on " + path.string());
}

std::vector<Finding> validate_dataset(const Dataset& d) {
  std::vector<Finding> findings;
  auto check_split = [&](const std::vector<TimeSeries>& split,
                         const char* split_name) {
    for (const auto& ts : split) {
      for (const double v : ts.values) {
        if (!std::isfinite(v)) {
          findings.push_back({ts.id, std::string(split_name) + " series " +
                                         std::to_string(ts.id) +
                                         ": non-finite value"});
          break;
        }
      }
      if (ts.label < 1 || ts.label > d.class_count) {
        findings.push_back({ts.id, std::string(split_name) + " series " +
                                       std::to_string(ts.id) + ": label " +
                                       std::to_string(ts.label) +
                                       " outside 1.." +
                                       std::to_string(d.class_count)});
      }
      if (ts.length() < 2) {
        findings.push_back({ts.id, std::string(split_name) + " series " +
                                       std::to_string(ts.id) +
                                       ": length < 2"});
      }
      if (d.declared_length && ts.length() != *d.declared_length) {
        findings.push_back({ts.id, std::string(split_name) + " series " +
                                       std::to_string(ts.id) + ": length " +
                                       std::to_string(ts.length()) +
                                       " != declared " +
                                       std::to_string(*d.declared_length)});
      }
    }
  };
  check_split(d.train, "train");
  check_split(d.test, "test");
  if (d.class_count < 1)
    findings.push_back({-1, "dataset declares no classes"});
  return findings;
}

void z_normalize(TimeSeries& ts) {
  const std::size_t n = ts.values.size();
  if (n == 0) return;
  double mean = 0.0;
  for (const double v : ts.values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const double v : ts.values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double sd = std::sqrt(var);
  if (sd == 0.0) return;
  for (double& v : ts.values) v = (v - mean) / sd;
}

void z_normalize(Dataset& d) {
  for (auto& ts : d.train) z_normalize(ts);
  for (auto& ts : d.test) z_normalize(ts);
}

}  // namespace rpbof
