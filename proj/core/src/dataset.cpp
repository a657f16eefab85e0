#include "eroscan/dataset.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include "eroscan/error.hpp"
#include "label_parse.hpp"

namespace fs = std::filesystem;

namespace eroscan {

namespace {

// Absorbs representation error such as 25 * 0.06 = 1.4999999999999998.
constexpr double kRoundingSlack = 1e-9;

std::size_t round_half_up(double v) {
  return static_cast<std::size_t>(std::floor(v + 0.5 + kRoundingSlack));
}

}  // namespace

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

std::optional<Split> parse_split(std::string_view name) {
  for (Split s : kAllSplits) {
    if (split_name(s) == name) return s;
  }
  return std::nullopt;
}

SplitCounts split_counts(std::size_t n, const SplitFractions& f) {
  if (f.train < 0 || f.val < 0 || f.test < 0 ||
      std::abs(f.train + f.val + f.test - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidFractions,
                "split fractions must be non-negative and sum to 1");
  }
  SplitCounts c;
  c.val = std::min(n, round_half_up(static_cast<double>(n) * f.val));
  c.test = std::min(n - c.val, round_half_up(static_cast<double>(n) * f.test));
  c.train = n - c.val - c.test;
  return c;
}

SplitAssignment split_dataset(std::span<const std::string> items,
                              const SplitFractions& fractions,
                              std::uint64_t seed) {
  return split_dataset(items, split_counts(items.size(), fractions), seed);
}

SplitAssignment split_dataset(std::span<const std::string> items,
                              const SplitCounts& counts, std::uint64_t seed) {
  if (items.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "nothing to split");
  }
  if (counts.train + counts.val + counts.test != items.size()) {
    throw Error(ErrorCode::kInvalidFractions,
                "split counts do not add up to the number of items");
  }
  std::vector<std::string> order(items.begin(), items.end());
  std::sort(order.begin(), order.end());
  if (std::adjacent_find(order.begin(), order.end()) != order.end()) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate image id in split input");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  SplitAssignment out;
  auto first = order.begin();
  auto take = [&](Split s, std::size_t k) {
    out[s].assign(std::make_move_iterator(first),
                  std::make_move_iterator(first + static_cast<long>(k)));
    first += static_cast<long>(k);
    std::sort(out[s].begin(), out[s].end());
  };
  take(Split::kVal, counts.val);
  take(Split::kTest, counts.test);
  take(Split::kTrain, counts.train);
  return out;
}

std::string write_split_manifest(const SplitAssignment& a) {
  std::string out = "split,id\n";
  for (Split s : kAllSplits) {
    for (const auto& id : a[s]) {
      out += split_name(s);
      out += ',';
      out += id;
      out += '\n';
    }
  }
  return out;
}

SplitAssignment parse_split_manifest(std::string_view text) {
  SplitAssignment a;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (detail::is_blank(line)) return;
    if (line_no == 1 && line == "split,id") return;
    const auto comma = line.find(',');
    const auto split =
        comma == std::string_view::npos ? std::nullopt
                                        : parse_split(line.substr(0, comma));
    if (!split || comma + 1 >= line.size()) {
      throw Error(ErrorCode::kMalformedLine,
                  "split manifest line " + std::to_string(line_no) +
                      " is not 'split,image_id'");
    }
    a[*split].emplace_back(line.substr(comma + 1));
  });
  return a;
}

bool is_image_file(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

DatasetIndex scan_dataset(const fs::path& root, const ClassMap& classes) {
  DatasetIndex index;
  index.root = root;
  index.class_map = classes;
  for (Split s : kAllSplits) {
    const auto images = root / "images" / split_name(s);
    if (!fs::is_directory(images)) continue;
    auto& entries = index[s];
    for (const auto& de : fs::directory_iterator(images)) {
      if (!de.is_regular_file() || !is_image_file(de.path())) continue;
      const auto stem = de.path().stem().string();
      entries.push_back({stem, de.path(),
                         root / "labels" / split_name(s) / (stem + ".txt")});
    }
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
  }
  return index;
}

void validate_dataset(const DatasetIndex& index) {
  std::map<std::string, Split> owner;
  for (Split s : kAllSplits) {
    std::set<std::string> local;
    for (const auto& e : index[s]) {
      if (!local.insert(e.image_id).second) {
        throw Error(ErrorCode::kInvalidDataset,
                    "image id " + e.image_id + " appears twice in split " +
                        std::string(split_name(s)));
      }
      auto [it, inserted] = owner.emplace(e.image_id, s);
      if (!inserted) {
        throw Error(ErrorCode::kInvalidDataset,
                    "image id " + e.image_id + " is in both " +
                        std::string(split_name(it->second)) + " and " +
                        std::string(split_name(s)));
      }
    }
  }
}

std::string write_dataset_yaml(const DatasetIndex& index) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "path" << YAML::Value << index.root.string();
  for (Split s : kAllSplits) {
    const std::string rel =
        index[s].empty() ? std::string()
                         : (fs::path("images") / split_name(s)).string();
    out << YAML::Key << std::string(split_name(s)) << YAML::Value << rel;
  }
  out << YAML::Key << "names" << YAML::Value << YAML::BeginSeq;
  for (const auto& n : index.class_map.names()) out << n;
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

DatasetConfig parse_dataset_yaml(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kInvalidDataset,
                std::string("dataset config is not valid YAML: ") + e.what());
  }
  if (!root.IsMap()) {
    throw Error(ErrorCode::kInvalidDataset, "dataset config is not a mapping");
  }
  auto scalar = [&](const char* key) {
    const auto node = root[key];
    return node && node.IsScalar() ? node.as<std::string>() : std::string();
  };
  DatasetConfig cfg;
  cfg.path = scalar("path");
  cfg.train = scalar("train");
  cfg.val = scalar("val");
  cfg.test = scalar("test");

  const auto names = root["names"];
  std::vector<std::string> list;
  if (names && names.IsSequence()) {
    for (const auto& n : names) list.push_back(n.as<std::string>());
  } else if (names && names.IsMap()) {
    std::map<int, std::string> by_id;
    for (const auto& kv : names) {
      by_id[kv.first.as<int>()] = kv.second.as<std::string>();
    }
    int expected = 0;
    for (const auto& [id, name] : by_id) {
      if (id != expected++) {
        throw Error(ErrorCode::kInvalidClassMap,
                    "class ids in names are not contiguous from 0");
      }
      list.push_back(name);
    }
  } else {
    throw Error(ErrorCode::kInvalidDataset, "dataset config has no names");
  }
  cfg.class_map = ClassMap(std::move(list));
  return cfg;
}

}  // namespace eroscan
