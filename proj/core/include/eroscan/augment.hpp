#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "eroscan/dataset.hpp"
#include "eroscan/labelset.hpp"
#include "eroscan/raster.hpp"

namespace eroscan {

struct GrayscaleOp {
  friend bool operator==(const GrayscaleOp&, const GrayscaleOp&) = default;
};

/// Center crop of 1/factor of each side, rescaled back to full size.
struct ZoomOp {
  double factor = 2.0;
  friend bool operator==(const ZoomOp&, const ZoomOp&) = default;
};

/// Clockwise quarter turns. An empty k is drawn from the spec seed.
struct Rotate90Op {
  std::optional<int> k;
  friend bool operator==(const Rotate90Op&, const Rotate90Op&) = default;
};

using AugmentOp = std::variant<GrayscaleOp, ZoomOp, Rotate90Op>;

/// Ops are applied in order to produce one derived item.
struct AugmentSpec {
  std::vector<AugmentOp> ops;
  std::uint64_t seed = 0;

  friend bool operator==(const AugmentSpec&, const AugmentSpec&) = default;
};

/// Parses `gray`, `zoom:<f>`, `rot90[:k]` joined by '+', e.g. "gray+rot90:1".
AugmentSpec parse_augment_spec(std::string_view text, std::uint64_t seed = 0);

/// Comma-separated list of specs, one derived item each.
std::vector<AugmentSpec> parse_augment_specs(std::string_view text,
                                             std::uint64_t seed = 0);

/// Canonical text form; unresolved rot90 stays `rot90`.
std::string format_augment_spec(const AugmentSpec& spec);

/// Throws InvalidArgument on an empty op list, zoom outside (1, 4] or k
/// outside {1, 2, 3}.
void validate_augment_spec(const AugmentSpec& spec);

struct Provenance {
  std::string source_id;
  AugmentSpec spec;
};

struct LabeledImage {
  std::string id;
  Raster raster;
  LabelFile labels;
  Split split = Split::kTrain;
  std::optional<Provenance> provenance;
};

/// Maps a normalized point by k clockwise quarter turns; k=1 is
/// (x, y) -> (1 - y, x).
NormPoint rotate_point(NormPoint p, int k);

Raster rotate90(const Raster& r, int k);
LabelFile rotate90(const LabelFile& labels, int k);

/// Luma 0.299 R + 0.587 G + 0.114 B, rounded and replicated to three
/// channels. Throws InvalidArgument on single-channel input.
Raster grayscale(const Raster& r);

/// Bilinear center zoom. Throws InvalidArgument unless factor is in (1, 4].
Raster zoom(const Raster& r, double factor);

/// Remaps labels into the zoomed frame. Annotations wholly outside the crop
/// are dropped; polygons straddling it are clipped to the crop and dropped
/// when the remainder is under `kMinSliverPx2` output pixels or invalid.
LabelFile zoom(const LabelFile& labels, double factor, int width, int height);

inline constexpr double kMinSliverPx2 = 10.0;

/// Applies every op of `spec` to the item. The result carries provenance
/// pointing at `item.id` and inherits its split; stochastic choices are
/// resolved from `spec.seed` and recorded in the provenance spec.
LabeledImage apply_augment(const LabeledImage& item, const AugmentSpec& spec,
                           std::string derived_id);

/// Derived items for `items[i]` come from `specs[i]` and are named
/// `<source>_aug<j>`. Output keeps every input followed by all derived items.
/// Augmenting an item that is itself derived throws InvalidArgument unless
/// `allow_nested` is set.
std::vector<LabeledImage> expand_dataset(
    std::span<const LabeledImage> items,
    std::span<const std::vector<AugmentSpec>> specs, bool allow_nested = false);

/// `derived_id,source_id,spec` per derived item.
std::string write_provenance_manifest(std::span<const LabeledImage> items);

}  // namespace eroscan
