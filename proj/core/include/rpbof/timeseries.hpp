#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rpbof/common.hpp"

namespace rpbof {

// One labeled univariate series. Labels are contiguous class ids in
// {1..class_count}; the original file labels live in the dataset's LabelMap.
struct TimeSeries {
  std::vector<double> values;
  int label = 0;
  int id = 0;

  int length() const { return static_cast<int>(values.size()); }
};

// Bijection between raw file labels and contiguous class ids 1..N_c.
// Raw labels are sorted ascending and mapped in that order.
class LabelMap {
 public:
  LabelMap() = default;
  explicit LabelMap(std::vector<long long> sorted_raw_labels);

  static LabelMap from_raw(const std::vector<long long>& raw_labels);

  int class_count() const { return static_cast<int>(raw_.size()); }
  int class_of(long long raw) const;           // throws DataError if unknown
  long long raw_of(int class_id) const;        // class_id in 1..class_count
  const std::vector<long long>& raw_labels() const { return raw_; }

  bool operator==(const LabelMap&) const = default;

 private:
  std::vector<long long> raw_;  // index k -> raw label of class k+1
};

struct Dataset {
  std::string name;
  std::vector<TimeSeries> train;
  std::vector<TimeSeries> test;
  int class_count = 0;
  LabelMap labels;
  // Set when every loaded series has the same length; manually built
  // datasets may declare a length their series are checked against.
  std::optional<int> declared_length;

  std::size_t train_size() const { return train.size(); }
  std::size_t test_size() const { return test.size(); }
};

struct Finding {
  int series_id = -1;  // -1: dataset-level finding
  std::string message;
};

// One parsed line of a UCR text file: label field + value fields.
struct RawRecord {
  double raw_label = 0.0;
  std::vector<double> values;
};

// Parse a UCR text file (first field label, rest values; comma, tab or
// whitespace delimited, auto-detected). Throws DataError on unreadable
// files, non-numeric fields or lines with fewer than 3 fields.
std::vector<RawRecord> read_ucr_records(const std::filesystem::path& path);

// Load one file standalone: labels remapped via a map built from this
// file alone. Returns the series plus the mapping used.
std::pair<std::vector<TimeSeries>, LabelMap> load_ucr_file(
    const std::filesystem::path& path);

// Remap pre-parsed records through a shared label map.
std::vector<TimeSeries> remap_records(const std::vector<RawRecord>& records,
                                      const LabelMap& labels);

// Load <name>_TRAIN / <name>_TEST from root (extension-agnostic; also
// looks inside root/<name>/). The label map is built over the union of
// both files so train and test share one contiguous remapping.
Dataset load_ucr_dataset(const std::filesystem::path& root,
                         const std::string& name);

// Write series in the UCR text format, comma-delimited, values rendered
// with 17 significant digits so a reload is bit-exact.
void save_ucr_file(const std::filesystem::path& path,
                   const std::vector<TimeSeries>& series,
                   const LabelMap& labels);

// Returns one finding per invariant violation; empty iff the dataset is
// well formed (finite values, labels in range, declared length honored).
std::vector<Finding> validate_dataset(const Dataset& d);

// In-place z-normalization (mean 0, stddev 1; constant series untouched).
// Off by default; exposed for non-UCR data via the CLI.
void z_normalize(TimeSeries& ts);
void z_normalize(Dataset& d);

}  // namespace rpbof
