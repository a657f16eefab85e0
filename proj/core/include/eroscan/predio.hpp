#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eroscan/labelset.hpp"

namespace eroscan {

/// A prediction is an Annotation whose confidence is always set.
using Prediction = Annotation;

/// Label line plus a trailing confidence in [0, 1]. Throws the label errors
/// plus MissingConfidence and ConfidenceOutOfRange.
Prediction parse_prediction_line(std::string_view line, LabelMode mode,
                                 const ClassMap& classes = ClassMap::defaults());

/// Blank lines are skipped; order is preserved.
std::vector<Prediction> parse_prediction_file(
    std::string_view text, LabelMode mode,
    const ClassMap& classes = ClassMap::defaults());

/// Throws MissingConfidence when a prediction lacks its confidence.
std::string serialize_predictions(std::span<const Prediction> preds,
                                  LabelMode mode);

/// Keeps predictions with confidence >= threshold, in order.
std::vector<Prediction> confidence_filter(std::span<const Prediction> preds,
                                          double threshold);

}  // namespace eroscan
