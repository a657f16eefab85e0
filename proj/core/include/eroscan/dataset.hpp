#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eroscan/labelset.hpp"

namespace eroscan {

enum class Split { kTrain = 0, kVal = 1, kTest = 2 };

inline constexpr std::array<Split, 3> kAllSplits = {Split::kTrain, Split::kVal,
                                                    Split::kTest};

std::string_view split_name(Split s);
std::optional<Split> parse_split(std::string_view name);

struct SplitFractions {
  double train = 0.88;
  double val = 0.06;
  double test = 0.06;
};

struct SplitCounts {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;

  friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

/// Image ids per split. Each list is sorted.
struct SplitAssignment {
  std::array<std::vector<std::string>, 3> splits;

  const std::vector<std::string>& operator[](Split s) const {
    return splits[static_cast<std::size_t>(s)];
  }
  std::vector<std::string>& operator[](Split s) {
    return splits[static_cast<std::size_t>(s)];
  }
  SplitCounts counts() const {
    return {splits[0].size(), splits[1].size(), splits[2].size()};
  }

  friend bool operator==(const SplitAssignment&,
                         const SplitAssignment&) = default;
};

/// val and test get round-half-up of n * fraction; train takes the rest.
/// Throws InvalidFractions unless the fractions are non-negative and sum to 1
/// within 1e-9.
SplitCounts split_counts(std::size_t n, const SplitFractions& fractions);

/// Seeded shuffle, then val, test and train are cut in that order.
/// Throws InvalidArgument on an empty or duplicated item list.
SplitAssignment split_dataset(std::span<const std::string> items,
                              const SplitFractions& fractions,
                              std::uint64_t seed);
SplitAssignment split_dataset(std::span<const std::string> items,
                              const SplitCounts& counts, std::uint64_t seed);

/// `split,image_id` per line, splits in train/val/test order.
std::string write_split_manifest(const SplitAssignment& a);
SplitAssignment parse_split_manifest(std::string_view text);

struct DatasetEntry {
  std::string image_id;
  std::filesystem::path image;
  std::filesystem::path label;
};

/// A dataset rooted at `root` with `images/<split>` and `labels/<split>`.
struct DatasetIndex {
  std::filesystem::path root;
  std::array<std::vector<DatasetEntry>, 3> splits;
  ClassMap class_map = ClassMap::defaults();

  const std::vector<DatasetEntry>& operator[](Split s) const {
    return splits[static_cast<std::size_t>(s)];
  }
  std::vector<DatasetEntry>& operator[](Split s) {
    return splits[static_cast<std::size_t>(s)];
  }
};

/// Image extensions recognized when scanning directories.
bool is_image_file(const std::filesystem::path& p);

/// Scans `root/images/<split>`. Label paths follow the layout whether or not
/// the file exists; a missing label file means an image with no objects.
DatasetIndex scan_dataset(const std::filesystem::path& root,
                          const ClassMap& classes = ClassMap::defaults());

/// Throws InvalidDataset when an image id appears in more than one split.
void validate_dataset(const DatasetIndex& index);

/// Dataset configuration document (YAML) with keys path, train, val, test and
/// the id-ordered names list. Splits without images get an empty path.
std::string write_dataset_yaml(const DatasetIndex& index);

struct DatasetConfig {
  std::string path;
  std::string train;
  std::string val;
  std::string test;
  ClassMap class_map = ClassMap::defaults();
};

DatasetConfig parse_dataset_yaml(std::string_view text);

}  // namespace eroscan
