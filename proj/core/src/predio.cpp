#include "eroscan/predio.hpp"

#include "eroscan/error.hpp"
#include "label_parse.hpp"

namespace eroscan {

namespace {

// A plain label line has 4 (bbox) or an even number >= 6 (polygon) of
// coordinates; with a confidence the coordinate count turns odd or 5.
bool looks_like_label(std::size_t tokens, LabelMode mode) {
  const std::size_t coords = tokens - 1;
  switch (mode) {
    case LabelMode::kBbox: return coords == 4;
    case LabelMode::kPolygon: return coords >= 6 && coords % 2 == 0;
    case LabelMode::kAuto: return coords == 4 || (coords >= 6 && coords % 2 == 0);
  }
  return false;
}

}  // namespace

Prediction parse_prediction_line(std::string_view line, LabelMode mode,
                                 const ClassMap& classes) {
  const auto tokens = detail::split_tokens(line);
  if (!tokens.empty() && looks_like_label(tokens.size(), mode)) {
    throw Error(ErrorCode::kMissingConfidence,
                "prediction has no confidence: \"" + std::string(line) + "\"");
  }
  return detail::parse_tokens(tokens, mode, classes, true, line);
}

std::vector<Prediction> parse_prediction_file(std::string_view text,
                                              LabelMode mode,
                                              const ClassMap& classes) {
  std::vector<Prediction> out;
  detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (detail::is_blank(line)) return;
    try {
      out.push_back(parse_prediction_line(line, mode, classes));
    } catch (const Error& e) {
      throw Error(e.code(),
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  return out;
}

std::string serialize_predictions(std::span<const Prediction> preds,
                                  LabelMode mode) {
  std::string out;
  for (const auto& p : preds) {
    if (!p.confidence) {
      throw Error(ErrorCode::kMissingConfidence,
                  "prediction has no confidence");
    }
    out += serialize_annotation(p, mode);
    out += '\n';
  }
  return out;
}

std::vector<Prediction> confidence_filter(std::span<const Prediction> preds,
                                          double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "confidence threshold must be in [0,1]");
  }
  std::vector<Prediction> out;
  for (const auto& p : preds) {
    if (p.confidence.value_or(0.0) >= threshold) out.push_back(p);
  }
  return out;
}

}  // namespace eroscan
