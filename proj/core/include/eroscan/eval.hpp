#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eroscan/labelset.hpp"
#include "eroscan/mask.hpp"

namespace eroscan {

enum class Geometry { kBox, kMask };

/// Box in pixel coordinates, [x0, x1) x [y0, y1).
struct PixelBox {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double area() const { return (x1 - x0) * (y1 - y0); }
};

PixelBox to_pixel_box(const BBox& b, int width, int height);

/// Intersection over union; 0 when the union is empty.
double iou(const PixelBox& a, const PixelBox& b);
/// Throws DimensionMismatch.
double iou(const BinaryMask& a, const BinaryMask& b);

struct MatchConfig {
  std::vector<double> iou_thresholds = coco_thresholds();
  Geometry geometry = Geometry::kBox;

  /// 0.50, 0.55, ..., 0.95
  static std::vector<double> coco_thresholds();
  /// Throws InvalidArgument unless thresholds are non-empty, in (0, 1] and
  /// strictly increasing.
  void validate() const;
};

/// ious[g][p] between ground truth g and prediction p.
using IouMatrix = std::vector<std::vector<double>>;

IouMatrix iou_matrix(std::span<const Annotation> gts,
                     std::span<const Annotation> preds, Geometry geometry,
                     int width, int height);

struct Match {
  std::size_t pred = 0;
  std::optional<std::size_t> gt;
  double iou = 0.0;
};

/// Greedy matching: predictions in descending confidence (ties by index)
/// each take the unmatched ground truth of highest IoU, ties to the lowest
/// gt index, when that IoU >= threshold. Returns one entry per prediction in
/// processing order.
std::vector<Match> match(const IouMatrix& ious,
                         std::span<const double> confidences, double threshold);

std::vector<Match> match(std::span<const Annotation> gts,
                         std::span<const Annotation> preds, double threshold,
                         Geometry geometry, int width, int height);

struct ScoredDetection {
  double confidence = 0.0;
  bool true_positive = false;
};

/// 101-point interpolated AP: detections are ranked by descending confidence
/// (stable), the precision envelope is sampled at recall 0.00, 0.01, ..., 1.00
/// and averaged. Zero when num_gt is 0.
double average_precision(std::span<const ScoredDetection> detections,
                         std::size_t num_gt);

/// Mean of the per-threshold APs.
double map_range(std::span<const double> aps);

struct EvalImage {
  std::string image_id;
  int width = 0;
  int height = 0;
  std::vector<Annotation> gts;
  std::vector<Annotation> preds;
};

struct ClassMetrics {
  int class_id = -1;
  std::string name;
  std::size_t images = 0;
  std::size_t instances = 0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double ap50 = 0.0;
  double ap50_95 = 0.0;
  std::vector<double> ap_per_threshold;
};

/// Rows are predicted class, columns true class; index num_classes is
/// background.
struct ConfusionMatrix {
  int num_classes = 0;
  std::vector<std::vector<double>> counts;
  std::vector<std::vector<double>> normalized;

  int background() const { return num_classes; }
};

struct EvalOptions {
  MatchConfig match;
  /// Predictions below this confidence are ignored by the P/R/AP metrics.
  double min_confidence = 0.0;
  double confusion_iou = 0.45;
  double confusion_confidence = 0.25;
};

struct EvalReport {
  Geometry geometry = Geometry::kBox;
  std::vector<double> iou_thresholds;
  /// Classes with at least one ground-truth instance, in id order.
  std::vector<ClassMetrics> classes;
  /// Unweighted mean over `classes`; counts are totals.
  ClassMetrics all;
  ConfusionMatrix confusion;
};

/// Class-agnostic greedy matching at `iou_threshold` over predictions with
/// confidence >= `conf_threshold`, then each non-empty column is normalized
/// to sum 1.
ConfusionMatrix confusion_matrix(std::span<const EvalImage> images,
                                 int num_classes, Geometry geometry,
                                 double iou_threshold, double conf_threshold);

EvalReport evaluate(std::span<const EvalImage> images, const ClassMap& classes,
                    const EvalOptions& options = {});

/// Metrics table: Clase, Imágenes, Instancias, Box(P) or Mask(P), R, mAP50,
/// mAP50-95; the "all" row first, six decimals.
std::string write_report_table(const EvalReport& report);

/// Normalized confusion matrix with a header row of true classes and one row
/// per predicted class, background last.
std::string write_confusion_table(const EvalReport& report,
                                  const ClassMap& classes);

}  // namespace eroscan
