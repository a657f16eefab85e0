#include "eroscan/eval.hpp"

#include <algorithm>
#include <numeric>

#include "eroscan/error.hpp"

namespace eroscan {

namespace {

constexpr int kRecallSamples = 101;

std::vector<std::size_t> by_descending_confidence(
    std::span<const double> confidences) {
  std::vector<std::size_t> order(confidences.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return confidences[a] > confidences[b];
  });
  return order;
}

std::vector<double> confidences_of(std::span<const Annotation> preds) {
  std::vector<double> out;
  out.reserve(preds.size());
  for (const auto& p : preds) out.push_back(p.confidence.value_or(0.0));
  return out;
}

std::vector<Annotation> of_class(std::span<const Annotation> anns, int class_id,
                                 double min_confidence = -1.0) {
  std::vector<Annotation> out;
  for (const auto& a : anns) {
    if (a.class_id != class_id) continue;
    if (a.confidence && *a.confidence < min_confidence) continue;
    out.push_back(a);
  }
  return out;
}

BinaryMask instance_mask(const Annotation& a, int width, int height) {
  BinaryMask m(width, height);
  fill_polygon(m, a.outline());
  return m;
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

}  // namespace

PixelBox to_pixel_box(const BBox& b, int width, int height) {
  return {b.x0() * width, b.y0() * height, b.x1() * width, b.y1() * height};
}

double iou(const PixelBox& a, const PixelBox& b) {
  const double iw = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double ih = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  const double inter = iw > 0 && ih > 0 ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

double iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "mask dimensions differ");
  }
  std::size_t inter = 0, uni = 0;
  const auto& da = a.data();
  const auto& db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    const bool pa = da[i] != 0, pb = db[i] != 0;
    inter += pa && pb;
    uni += pa || pb;
  }
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

std::vector<double> MatchConfig::coco_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
  return t;
}

void MatchConfig::validate() const {
  if (iou_thresholds.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no IoU thresholds");
  }
  for (std::size_t i = 0; i < iou_thresholds.size(); ++i) {
    const double t = iou_thresholds[i];
    if (!(t > 0.0 && t <= 1.0) ||
        (i > 0 && !(t > iou_thresholds[i - 1]))) {
      throw Error(ErrorCode::kInvalidArgument,
                  "IoU thresholds must be in (0,1] and strictly increasing");
    }
  }
}

IouMatrix iou_matrix(std::span<const Annotation> gts,
                     std::span<const Annotation> preds, Geometry geometry,
                     int width, int height) {
  IouMatrix m(gts.size(), std::vector<double>(preds.size(), 0.0));
  if (gts.empty() || preds.empty()) return m;
  if (geometry == Geometry::kBox) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const auto gb = to_pixel_box(gts[g].bbox, width, height);
      for (std::size_t p = 0; p < preds.size(); ++p) {
        m[g][p] = iou(gb, to_pixel_box(preds[p].bbox, width, height));
      }
    }
    return m;
  }
  std::vector<BinaryMask> pred_masks;
  pred_masks.reserve(preds.size());
  for (const auto& p : preds) pred_masks.push_back(instance_mask(p, width, height));
  for (std::size_t g = 0; g < gts.size(); ++g) {
    const auto gm = instance_mask(gts[g], width, height);
    for (std::size_t p = 0; p < preds.size(); ++p) {
      m[g][p] = iou(gm, pred_masks[p]);
    }
  }
  return m;
}

std::vector<Match> match(const IouMatrix& ious,
                         std::span<const double> confidences, double threshold) {
  const std::size_t num_gt = ious.size();
  std::vector<bool> taken(num_gt, false);
  std::vector<Match> out;
  out.reserve(confidences.size());
  for (std::size_t p : by_descending_confidence(confidences)) {
    Match m{p, std::nullopt, 0.0};
    double best = -1.0;
    for (std::size_t g = 0; g < num_gt; ++g) {
      if (taken[g]) continue;
      if (ious[g][p] > best) {
        best = ious[g][p];
        m.gt = g;
      }
    }
    if (m.gt && best >= threshold) {
      taken[*m.gt] = true;
      m.iou = best;
    } else {
      m.gt.reset();
      m.iou = std::max(best, 0.0);
    }
    out.push_back(m);
  }
  return out;
}

std::vector<Match> match(std::span<const Annotation> gts,
                         std::span<const Annotation> preds, double threshold,
                         Geometry geometry, int width, int height) {
  const auto conf = confidences_of(preds);
  return match(iou_matrix(gts, preds, geometry, width, height), conf,
               threshold);
}

double average_precision(std::span<const ScoredDetection> detections,
                         std::size_t num_gt) {
  if (num_gt == 0 || detections.empty()) return 0.0;
  std::vector<double> conf;
  conf.reserve(detections.size());
  for (const auto& d : detections) conf.push_back(d.confidence);
  const auto order = by_descending_confidence(conf);

  const std::size_t n = order.size();
  std::vector<double> recall(n), precision(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tp += detections[order[i]].true_positive ? 1 : 0;
    recall[i] = static_cast<double>(tp) / static_cast<double>(num_gt);
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  for (std::size_t i = n - 1; i > 0; --i) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double sum = 0.0;
  for (int k = 0; k < kRecallSamples; ++k) {
    const double r = k / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it == recall.end()) break;
    sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / kRecallSamples;
}

double map_range(std::span<const double> aps) { return mean(aps); }

ConfusionMatrix confusion_matrix(std::span<const EvalImage> images,
                                 int num_classes, Geometry geometry,
                                 double iou_threshold, double conf_threshold) {
  ConfusionMatrix cm;
  cm.num_classes = num_classes;
  const auto dim = static_cast<std::size_t>(num_classes + 1);
  cm.counts.assign(dim, std::vector<double>(dim, 0.0));
  const auto bg = static_cast<std::size_t>(num_classes);

  for (const auto& img : images) {
    std::vector<Annotation> preds;
    for (const auto& p : img.preds) {
      if (p.confidence.value_or(0.0) >= conf_threshold) preds.push_back(p);
    }
    const auto matches = match(img.gts, preds, iou_threshold, geometry,
                               img.width, img.height);
    std::vector<bool> gt_hit(img.gts.size(), false);
    for (const auto& m : matches) {
      const auto pc = static_cast<std::size_t>(preds[m.pred].class_id);
      if (m.gt) {
        gt_hit[*m.gt] = true;
        cm.counts[pc][static_cast<std::size_t>(img.gts[*m.gt].class_id)] += 1;
      } else {
        cm.counts[pc][bg] += 1;
      }
    }
    for (std::size_t g = 0; g < img.gts.size(); ++g) {
      if (!gt_hit[g]) {
        cm.counts[bg][static_cast<std::size_t>(img.gts[g].class_id)] += 1;
      }
    }
  }

  cm.normalized = cm.counts;
  for (std::size_t col = 0; col < dim; ++col) {
    double sum = 0.0;
    for (std::size_t row = 0; row < dim; ++row) sum += cm.counts[row][col];
    if (sum == 0.0) continue;
    for (std::size_t row = 0; row < dim; ++row) {
      cm.normalized[row][col] = cm.counts[row][col] / sum;
    }
  }
  return cm;
}

EvalReport evaluate(std::span<const EvalImage> images, const ClassMap& classes,
                    const EvalOptions& options) {
  options.match.validate();
  const auto& thresholds = options.match.iou_thresholds;
  const auto geometry = options.match.geometry;

  EvalReport report;
  report.geometry = geometry;
  report.iou_thresholds = thresholds;

  for (const auto& img : images) {
    for (const auto* list : {&img.gts, &img.preds}) {
      for (const auto& a : *list) {
        if (!classes.contains(a.class_id)) {
          throw Error(ErrorCode::kUnknownClass,
                      img.image_id + ": class id " +
                          std::to_string(a.class_id) + " not in class map");
        }
      }
    }
  }

  for (int c = 0; c < classes.size(); ++c) {
    ClassMetrics m;
    m.class_id = c;
    m.name = classes.name(c);
    std::vector<std::vector<ScoredDetection>> dets(thresholds.size());
    for (const auto& img : images) {
      const auto gts = of_class(img.gts, c);
      const auto preds = of_class(img.preds, c, options.min_confidence);
      if (!gts.empty()) ++m.images;
      m.instances += gts.size();
      if (preds.empty()) continue;
      const auto ious = iou_matrix(gts, preds, geometry, img.width, img.height);
      const auto conf = confidences_of(preds);
      for (std::size_t t = 0; t < thresholds.size(); ++t) {
        for (const auto& mt : match(ious, conf, thresholds[t])) {
          dets[t].push_back({conf[mt.pred], mt.gt.has_value()});
        }
      }
    }
    if (m.instances == 0) continue;

    for (const auto& d : dets.front()) (d.true_positive ? m.tp : m.fp) += 1;
    m.fn = m.instances - m.tp;
    m.precision = m.tp + m.fp > 0 ? static_cast<double>(m.tp) /
                                        static_cast<double>(m.tp + m.fp)
                                  : 0.0;
    m.recall = static_cast<double>(m.tp) / static_cast<double>(m.instances);
    for (const auto& d : dets) {
      m.ap_per_threshold.push_back(average_precision(d, m.instances));
    }
    m.ap50 = m.ap_per_threshold.front();
    m.ap50_95 = map_range(m.ap_per_threshold);
    report.classes.push_back(std::move(m));
  }

  auto& all = report.all;
  all.name = "all";
  all.images = images.size();
  std::vector<double> p, r, a50, a5095;
  std::vector<std::vector<double>> per_t(thresholds.size());
  for (const auto& m : report.classes) {
    all.instances += m.instances;
    all.tp += m.tp;
    all.fp += m.fp;
    all.fn += m.fn;
    p.push_back(m.precision);
    r.push_back(m.recall);
    a50.push_back(m.ap50);
    a5095.push_back(m.ap50_95);
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      per_t[t].push_back(m.ap_per_threshold[t]);
    }
  }
  all.precision = mean(p);
  all.recall = mean(r);
  all.ap50 = mean(a50);
  all.ap50_95 = mean(a5095);
  for (const auto& v : per_t) all.ap_per_threshold.push_back(mean(v));

  report.confusion =
      confusion_matrix(images, classes.size(), geometry, options.confusion_iou,
                       options.confusion_confidence);
  return report;
}

}  // namespace eroscan
