#include "eroscan/augment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include "eroscan/error.hpp"
#include "eroscan/geometry.hpp"
#include "label_parse.hpp"

namespace eroscan {

namespace {

constexpr double kGridScale = 1e6;

// Label coordinates live on the 6-decimal grid used by label files, so chains
// of transforms (e.g. four quarter turns) return exactly to their input.
double snap(double v) {
  return std::clamp(std::round(v * kGridScale) / kGridScale, 0.0, 1.0);
}

NormPoint snap(NormPoint p) { return {snap(p.x), snap(p.y)}; }

BBox snap(const BBox& b) {
  return {snap(b.xc), snap(b.yc), snap(b.w), snap(b.h)};
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

double parse_double(std::string_view s, std::string_view spec) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "bad number in augmentation '" + std::string(spec) + "'");
  }
  return v;
}

std::uint8_t clamp_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

AugmentSpec parse_augment_spec(std::string_view text, std::uint64_t seed) {
  AugmentSpec spec;
  spec.seed = seed;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto plus = text.find('+', start);
    const auto op = text.substr(
        start, plus == std::string_view::npos ? text.npos : plus - start);
    const auto colon = op.find(':');
    const auto name = op.substr(0, colon);
    const auto arg = colon == std::string_view::npos ? std::string_view{}
                                                     : op.substr(colon + 1);
    if (name == "gray" || name == "grayscale") {
      spec.ops.emplace_back(GrayscaleOp{});
    } else if (name == "zoom") {
      spec.ops.emplace_back(ZoomOp{arg.empty() ? 2.0 : parse_double(arg, text)});
    } else if (name == "rot90") {
      Rotate90Op r;
      if (!arg.empty()) r.k = static_cast<int>(parse_double(arg, text));
      spec.ops.emplace_back(r);
    } else {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown augmentation '" + std::string(op) + "'");
    }
    if (plus == std::string_view::npos) break;
    start = plus + 1;
  }
  validate_augment_spec(spec);
  return spec;
}

std::vector<AugmentSpec> parse_augment_specs(std::string_view text,
                                             std::uint64_t seed) {
  std::vector<AugmentSpec> specs;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto comma = text.find(',', start);
    const auto part = text.substr(
        start, comma == std::string_view::npos ? text.npos : comma - start);
    if (!part.empty()) specs.push_back(parse_augment_spec(part, seed));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return specs;
}

std::string format_augment_spec(const AugmentSpec& spec) {
  std::string out;
  for (const auto& op : spec.ops) {
    if (!out.empty()) out += '+';
    if (std::holds_alternative<GrayscaleOp>(op)) {
      out += "gray";
    } else if (const auto* z = std::get_if<ZoomOp>(&op)) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "zoom:%g", z->factor);
      out += buf;
    } else if (const auto* r = std::get_if<Rotate90Op>(&op)) {
      out += "rot90";
      if (r->k) out += ":" + std::to_string(*r->k);
    }
  }
  return out;
}

void validate_augment_spec(const AugmentSpec& spec) {
  if (spec.ops.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "augmentation has no ops");
  }
  for (const auto& op : spec.ops) {
    if (const auto* z = std::get_if<ZoomOp>(&op)) {
      if (!(z->factor > 1.0 && z->factor <= 4.0)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "zoom factor must be in (1, 4]");
      }
    } else if (const auto* r = std::get_if<Rotate90Op>(&op)) {
      if (r->k && (*r->k < 1 || *r->k > 3)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "rot90 quarter turns must be 1, 2 or 3");
      }
    }
  }
}

NormPoint rotate_point(NormPoint p, int k) {
  switch (((k % 4) + 4) % 4) {
    case 1: return snap(NormPoint{1.0 - p.y, p.x});
    case 2: return snap(NormPoint{1.0 - p.x, 1.0 - p.y});
    case 3: return snap(NormPoint{p.y, 1.0 - p.x});
    default: return p;
  }
}

Raster rotate90(const Raster& r, int k) {
  k = ((k % 4) + 4) % 4;
  if (k == 0) return r;
  const int w = r.width();
  const int h = r.height();
  const bool swap = k % 2 == 1;
  Raster out(swap ? h : w, swap ? w : h, r.channels());
  out.set_gsd(r.gsd());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int nx = x, ny = y;
      switch (k) {
        case 1: nx = h - 1 - y; ny = x; break;
        case 2: nx = w - 1 - x; ny = h - 1 - y; break;
        case 3: nx = y; ny = w - 1 - x; break;
      }
      for (int c = 0; c < r.channels(); ++c) out.at(nx, ny, c) = r.at(x, y, c);
    }
  }
  return out;
}

LabelFile rotate90(const LabelFile& labels, int k) {
  LabelFile out = labels;
  for (auto& a : out.annotations) {
    if (a.has_polygon()) {
      for (auto& p : a.polygon) p = rotate_point(p, k);
      a.bbox = bounding_box(a.polygon);
    } else {
      const auto c = rotate_point({a.bbox.xc, a.bbox.yc}, k);
      if (k % 2 != 0) std::swap(a.bbox.w, a.bbox.h);
      a.bbox.xc = c.x;
      a.bbox.yc = c.y;
    }
  }
  return out;
}

Raster grayscale(const Raster& r) {
  if (r.channels() != 3) {
    throw Error(ErrorCode::kInvalidArgument, "grayscale expects RGB input");
  }
  Raster out(r.width(), r.height(), 3);
  out.set_gsd(r.gsd());
  for (int y = 0; y < r.height(); ++y) {
    for (int x = 0; x < r.width(); ++x) {
      const double luma = 0.299 * r.at(x, y, 0) + 0.587 * r.at(x, y, 1) +
                          0.114 * r.at(x, y, 2);
      const auto v = clamp_byte(luma);
      out.at(x, y, 0) = v;
      out.at(x, y, 1) = v;
      out.at(x, y, 2) = v;
    }
  }
  return out;
}

Raster zoom(const Raster& r, double factor) {
  if (!(factor > 1.0 && factor <= 4.0)) {
    throw Error(ErrorCode::kInvalidArgument, "zoom factor must be in (1, 4]");
  }
  const int w = r.width();
  const int h = r.height();
  const double ox = w * (1.0 - 1.0 / factor) / 2.0;
  const double oy = h * (1.0 - 1.0 / factor) / 2.0;
  Raster out(w, h, r.channels());
  out.set_gsd(r.gsd() ? std::optional<double>(*r.gsd() / factor)
                      : std::nullopt);
  for (int v = 0; v < h; ++v) {
    const double sy = std::clamp(oy + (v + 0.5) / factor - 0.5, 0.0, h - 1.0);
    const int y0 = static_cast<int>(std::floor(sy));
    const int y1 = std::min(y0 + 1, h - 1);
    const double fy = sy - y0;
    for (int u = 0; u < w; ++u) {
      const double sx =
          std::clamp(ox + (u + 0.5) / factor - 0.5, 0.0, w - 1.0);
      const int x0 = static_cast<int>(std::floor(sx));
      const int x1 = std::min(x0 + 1, w - 1);
      const double fx = sx - x0;
      for (int c = 0; c < r.channels(); ++c) {
        const double top = r.at(x0, y0, c) * (1 - fx) + r.at(x1, y0, c) * fx;
        const double bottom =
            r.at(x0, y1, c) * (1 - fx) + r.at(x1, y1, c) * fx;
        out.at(u, v, c) = clamp_byte(top * (1 - fy) + bottom * fy);
      }
    }
  }
  return out;
}

LabelFile zoom(const LabelFile& labels, double factor, int width, int height) {
  if (!(factor > 1.0 && factor <= 4.0)) {
    throw Error(ErrorCode::kInvalidArgument, "zoom factor must be in (1, 4]");
  }
  const double lo = (1.0 - 1.0 / factor) / 2.0;
  const double hi = 1.0 - lo;
  auto map = [&](double v) { return snap((v - lo) * factor); };

  LabelFile out{labels.image_id, {}};
  for (const auto& a : labels.annotations) {
    const auto& b = a.bbox;
    if (b.x1() <= lo || b.x0() >= hi || b.y1() <= lo || b.y0() >= hi) continue;
    Annotation z = a;
    if (a.has_polygon()) {
      const auto clipped = clip_to_rect(a.polygon, lo, lo, hi, hi);
      z.polygon.clear();
      for (const auto& p : clipped) {
        const NormPoint q{map(p.x), map(p.y)};
        if (z.polygon.empty() || !(z.polygon.back() == q)) z.polygon.push_back(q);
      }
      while (z.polygon.size() > 1 && z.polygon.front() == z.polygon.back()) {
        z.polygon.pop_back();
      }
      const double area_px =
          std::abs(signed_area(z.polygon)) * static_cast<double>(width) * height;
      if (z.polygon.size() < 3 || area_px < kMinSliverPx2 ||
          !is_simple(z.polygon)) {
        continue;
      }
      z.bbox = bounding_box(z.polygon);
    } else {
      const double x0 = map(std::max(b.x0(), lo));
      const double x1 = map(std::min(b.x1(), hi));
      const double y0 = map(std::max(b.y0(), lo));
      const double y1 = map(std::min(b.y1(), hi));
      z.bbox = snap(BBox::from_corners(x0, y0, x1, y1));
      if (z.bbox.w <= 0.0 || z.bbox.h <= 0.0) continue;
    }
    out.annotations.push_back(std::move(z));
  }
  return out;
}

LabeledImage apply_augment(const LabeledImage& item, const AugmentSpec& spec,
                           std::string derived_id) {
  validate_augment_spec(spec);
  LabeledImage out;
  out.id = std::move(derived_id);
  out.raster = item.raster;
  out.labels = item.labels;
  out.labels.image_id = out.id;
  out.split = item.split;

  std::mt19937_64 rng(spec.seed ^ fnv1a(out.id));
  AugmentSpec resolved = spec;
  for (auto& op : resolved.ops) {
    if (std::holds_alternative<GrayscaleOp>(op)) {
      out.raster = grayscale(to_rgb(out.raster));
    } else if (const auto* z = std::get_if<ZoomOp>(&op)) {
      out.labels =
          zoom(out.labels, z->factor, out.raster.width(), out.raster.height());
      out.raster = zoom(out.raster, z->factor);
    } else if (auto* r = std::get_if<Rotate90Op>(&op)) {
      if (!r->k) r->k = 1 + static_cast<int>(rng() % 3);
      out.raster = rotate90(out.raster, *r->k);
      out.labels = rotate90(out.labels, *r->k);
    }
  }
  out.provenance = Provenance{item.id, std::move(resolved)};
  return out;
}

std::vector<LabeledImage> expand_dataset(
    std::span<const LabeledImage> items,
    std::span<const std::vector<AugmentSpec>> specs, bool allow_nested) {
  if (!specs.empty() && specs.size() != items.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "one spec list per input item is required");
  }
  std::vector<LabeledImage> out(items.begin(), items.end());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& item = items[i];
    if (item.provenance && !allow_nested && !specs[i].empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "item " + item.id + " is already derived from " +
                      item.provenance->source_id);
    }
    for (std::size_t j = 0; j < specs[i].size(); ++j) {
      out.push_back(apply_augment(item, specs[i][j],
                                  item.id + "_aug" + std::to_string(j + 1)));
    }
  }
  return out;
}

std::string write_provenance_manifest(std::span<const LabeledImage> items) {
  std::string out = "derived,source,spec\n";
  for (const auto& item : items) {
    if (!item.provenance) continue;
    out += item.id + ',' + item.provenance->source_id + ',' +
           format_augment_spec(item.provenance->spec) + '\n';
  }
  return out;
}

}  // namespace eroscan
