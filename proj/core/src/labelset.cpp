#include "eroscan/labelset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "eroscan/error.hpp"
#include "label_parse.hpp"

namespace eroscan {

namespace detail {

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

std::string format_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", kCoordinatePrecision, v);
  return buf;
}

namespace {

[[noreturn]] void malformed(std::string_view line, std::string_view why) {
  throw Error(ErrorCode::kMalformedLine,
              std::string(why) + ": \"" + std::string(line) + "\"");
}

double parse_number(std::string_view token, std::string_view line) {
  double v = 0.0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    malformed(line, "non-numeric token '" + std::string(token) + "'");
  }
  return v;
}

int parse_class(std::string_view token, std::string_view line) {
  int v = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    malformed(line, "class id is not an integer");
  }
  return v;
}

void check_unit(double v, std::string_view line) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "coordinate " + format_fixed(v) +
                                            " outside [0,1]: \"" +
                                            std::string(line) + "\"");
  }
}

}  // namespace

Annotation parse_tokens(std::span<const std::string_view> tokens,
                        LabelMode mode, const ClassMap& classes,
                        bool with_confidence, std::string_view line) {
  const std::size_t extra = with_confidence ? 1 : 0;
  if (tokens.size() < 1 + extra) malformed(line, "empty record");
  const std::size_t coords = tokens.size() - 1 - extra;

  if (mode == LabelMode::kAuto) {
    if (coords == 4) {
      mode = LabelMode::kBbox;
    } else if (coords >= 6 && coords % 2 == 0) {
      mode = LabelMode::kPolygon;
    } else {
      malformed(line, "token count " + std::to_string(tokens.size()) +
                          " matches neither bbox nor polygon layout");
    }
  }
  if (mode == LabelMode::kBbox && coords != 4) {
    malformed(line, "bbox record needs 5 tokens");
  }
  if (mode == LabelMode::kPolygon && (coords < 6 || coords % 2 != 0)) {
    malformed(line, "polygon record needs an id and at least 3 x,y pairs");
  }

  Annotation a;
  a.class_id = parse_class(tokens[0], line);
  std::vector<double> values;
  values.reserve(coords);
  for (std::size_t i = 1; i <= coords; ++i) {
    values.push_back(parse_number(tokens[i], line));
  }
  if (with_confidence) {
    a.confidence = parse_number(tokens.back(), line);
  }
  if (!classes.contains(a.class_id)) {
    throw Error(ErrorCode::kUnknownClass,
                "class id " + std::to_string(a.class_id) +
                    " not in class map: \"" + std::string(line) + "\"");
  }
  for (double v : values) check_unit(v, line);

  if (mode == LabelMode::kBbox) {
    a.bbox = {values[0], values[1], values[2], values[3]};
    if (a.bbox.w <= 0.0 || a.bbox.h <= 0.0) {
      throw Error(ErrorCode::kOutOfRange,
                  "bbox width and height must be positive: \"" +
                      std::string(line) + "\"");
    }
  } else {
    a.polygon.reserve(values.size() / 2);
    for (std::size_t i = 0; i < values.size(); i += 2) {
      a.polygon.push_back({values[i], values[i + 1]});
    }
    a.bbox = bounding_box(a.polygon);
  }
  validate_annotation(a, classes);
  return a;
}

}  // namespace detail

ClassMap::ClassMap(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) {
    throw Error(ErrorCode::kInvalidClassMap, "class map is empty");
  }
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) {
      throw Error(ErrorCode::kInvalidClassMap, "class name is empty");
    }
    if (!seen.insert(n).second) {
      throw Error(ErrorCode::kInvalidClassMap, "duplicate class name " + n);
    }
  }
}

const ClassMap& ClassMap::defaults() {
  static const ClassMap kDefault(std::vector<std::string>{
      "suelo", "vegetación", "aluvial", "erosión fluvial", "río"});
  return kDefault;
}

const std::string& ClassMap::name(int class_id) const {
  if (!contains(class_id)) {
    throw Error(ErrorCode::kUnknownClass,
                "class id " + std::to_string(class_id) + " not in class map");
  }
  return names_[static_cast<std::size_t>(class_id)];
}

std::optional<int> ClassMap::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::vector<NormPoint> Annotation::outline() const {
  return has_polygon() ? polygon : box_ring(bbox);
}

void validate_annotation(const Annotation& a, const ClassMap& classes) {
  if (!classes.contains(a.class_id)) {
    throw Error(ErrorCode::kUnknownClass,
                "class id " + std::to_string(a.class_id) + " not in class map");
  }
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (a.confidence && !unit(*a.confidence)) {
    throw Error(ErrorCode::kConfidenceOutOfRange,
                "confidence " + detail::format_fixed(*a.confidence) +
                    " outside [0,1]");
  }
  if (a.has_polygon()) {
    for (const auto& p : a.polygon) {
      if (!unit(p.x) || !unit(p.y)) {
        throw Error(ErrorCode::kOutOfRange, "polygon vertex outside [0,1]");
      }
    }
    if (a.polygon.size() < 3) {
      throw Error(ErrorCode::kInvalidPolygon, "polygon needs 3 vertices");
    }
    if (signed_area(a.polygon) == 0.0) {
      throw Error(ErrorCode::kInvalidPolygon, "polygon has zero area");
    }
    if (!is_simple(a.polygon)) {
      throw Error(ErrorCode::kInvalidPolygon, "polygon self-intersects");
    }
  } else {
    const auto& b = a.bbox;
    if (!unit(b.xc) || !unit(b.yc) || !(b.w > 0.0 && b.w <= 1.0) ||
        !(b.h > 0.0 && b.h <= 1.0)) {
      throw Error(ErrorCode::kOutOfRange, "bbox outside normalized range");
    }
  }
}

Annotation make_polygon_annotation(int class_id, std::vector<NormPoint> ring,
                                   std::optional<double> confidence) {
  Annotation a;
  a.class_id = class_id;
  a.bbox = bounding_box(ring);
  a.polygon = std::move(ring);
  a.confidence = confidence;
  return a;
}

Annotation parse_label_line(std::string_view line, LabelMode mode,
                            const ClassMap& classes) {
  const auto tokens = detail::split_tokens(line);
  return detail::parse_tokens(tokens, mode, classes, false, line);
}

LabelFile parse_label_file(std::string_view text, std::string image_id,
                           LabelMode mode, const ClassMap& classes) {
  LabelFile file{std::move(image_id), {}};
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (detail::is_blank(line)) return;
    try {
      file.annotations.push_back(parse_label_line(line, mode, classes));
    } catch (const Error& e) {
      throw Error(e.code(), file.image_id + ":" + std::to_string(line_no) +
                                ": " + e.what());
    }
  });
  return file;
}

std::string serialize_annotation(const Annotation& a, LabelMode mode) {
  if (mode == LabelMode::kAuto) {
    mode = a.has_polygon() ? LabelMode::kPolygon : LabelMode::kBbox;
  }
  std::string out = std::to_string(a.class_id);
  auto put = [&out](double v) {
    out += ' ';
    out += detail::format_fixed(v);
  };
  if (mode == LabelMode::kPolygon) {
    if (!a.has_polygon()) {
      throw Error(ErrorCode::kModeMismatch,
                  "polygon output requested for a bbox-only annotation");
    }
    for (const auto& p : a.polygon) {
      put(p.x);
      put(p.y);
    }
  } else {
    put(a.bbox.xc);
    put(a.bbox.yc);
    put(a.bbox.w);
    put(a.bbox.h);
  }
  if (a.confidence) put(*a.confidence);
  return out;
}

std::string serialize_label_file(const LabelFile& file, LabelMode mode) {
  std::string out;
  for (const auto& a : file.annotations) {
    out += serialize_annotation(a, mode);
    out += '\n';
  }
  return out;
}

}  // namespace eroscan
