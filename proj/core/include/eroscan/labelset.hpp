#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eroscan/geometry.hpp"

namespace eroscan {

/// Contiguous id -> name table. Ids run 0..size()-1 in list order.
class ClassMap {
 public:
  /// Throws InvalidClassMap on empty or duplicate names.
  explicit ClassMap(std::vector<std::string> names);

  /// suelo, vegetación, aluvial, erosión fluvial, río.
  static const ClassMap& defaults();

  static constexpr int kErosion = 3;

  int size() const noexcept { return static_cast<int>(names_.size()); }
  bool contains(int class_id) const noexcept {
    return class_id >= 0 && class_id < size();
  }
  const std::string& name(int class_id) const;
  std::optional<int> find(std::string_view name) const;
  const std::vector<std::string>& names() const noexcept { return names_; }

  friend bool operator==(const ClassMap&, const ClassMap&) = default;

 private:
  std::vector<std::string> names_;
};

/// One labeled object. A bbox-only record has an empty polygon; for polygon
/// records the bbox is the polygon's tight bounding box. Predictions carry a
/// confidence, ground truth does not.
struct Annotation {
  int class_id = 0;
  std::vector<NormPoint> polygon;
  BBox bbox;
  std::optional<double> confidence;

  bool has_polygon() const noexcept { return !polygon.empty(); }

  /// The polygon, or the bbox corners for bbox-only records.
  std::vector<NormPoint> outline() const;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct LabelFile {
  std::string image_id;
  std::vector<Annotation> annotations;

  friend bool operator==(const LabelFile&, const LabelFile&) = default;
};

/// kBbox: `id xc yc w h`. kPolygon: `id x1 y1 x2 y2 ...`. kAuto picks by
/// token count on input and by annotation kind on output.
enum class LabelMode { kAuto, kBbox, kPolygon };

/// Fractional digits written for every coordinate and confidence.
inline constexpr int kCoordinatePrecision = 6;

Annotation parse_label_line(std::string_view line, LabelMode mode,
                            const ClassMap& classes = ClassMap::defaults());

/// Parses a whole label file. Blank lines are skipped; an empty text is a
/// valid file with no objects.
LabelFile parse_label_file(std::string_view text, std::string image_id,
                           LabelMode mode,
                           const ClassMap& classes = ClassMap::defaults());

std::string serialize_annotation(const Annotation& a, LabelMode mode);

/// One LF-terminated line per annotation; the empty file serializes to "".
/// Throws ModeMismatch when kPolygon is requested for a bbox-only record.
std::string serialize_label_file(const LabelFile& file, LabelMode mode);

/// Checks every Annotation invariant, throwing the matching error.
void validate_annotation(const Annotation& a, const ClassMap& classes);

/// Builds a polygon annotation with its derived bbox.
Annotation make_polygon_annotation(int class_id, std::vector<NormPoint> ring,
                                   std::optional<double> confidence = {});

}  // namespace eroscan
