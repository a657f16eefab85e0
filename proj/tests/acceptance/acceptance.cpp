// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails or overruns its time budget.

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "cli.hpp"
#include "eroscan/augment.hpp"
#include "eroscan/dataset.hpp"
#include "eroscan/error.hpp"
#include "eroscan/eval.hpp"
#include "eroscan/imageio.hpp"
#include "eroscan/mask.hpp"
#include "eroscan/predio.hpp"
#include "eroscan/service.hpp"
#include "eroscan/tiling.hpp"
#include "eroscan/version.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "scenarios.hpp"

using namespace eroscan;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Collects failed checks for one criterion.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  bool ok() const { return failed_ == 0; }
  std::size_t checks() const { return checks_; }
  std::string summary() const {
    std::string s = std::to_string(failed_) + " of " + std::to_string(checks_) +
                    " checks failed";
    for (const auto& f : failures_) s += "; " + f;
    return s;
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
};

struct Criterion {
  std::string name;
  double budget_s;
  std::function<void(Checker&)> body;
};

Raster random_raster(std::mt19937_64& rng, int w, int h, int c) {
  Raster r(w, h, c);
  for (auto& v : r.data()) v = static_cast<std::uint8_t>(rng());
  return r;
}

// ---------------------------------------------------------------- criteria

void area_law(Checker& c) {
  BinaryMask m(64, 64);
  for (int y = 10; y < 30; ++y)
    for (int x = 10; x < 35; ++x) m.set(x, y);
  const auto r = area(m, PixelScale::area(1.0));
  c.expect(r.pixel_count == 500, "pixel_count == 500");
  c.expect(r.area_m2 && *r.area_m2 == 500.0, "area_m2 == 500 exactly");

  testing::TempDir dir;
  save_png(dir / "m.png", m.to_raster());
  std::ostringstream out, err;
  const std::vector<std::string> args{"area", "--mask", (dir / "m.png").string(),
                                      "--px-area", "1"};
  const int code = cli::run(args, out, err);
  c.expect(code == 0 && out.str() == "pixels=500 area_m2=500\n",
           "cli prints pixels=500 area_m2=500, got '" + out.str() + "'");
}

void tiling_law(Checker& c) {
  Raster big(1500, 1500, 3, std::uint8_t{80});
  set_gsd_from_extent(big, 1500.0);
  const auto tiles = tile_by_ground_size(big, 250.0);
  std::size_t full = 0;
  for (const auto& t : tiles) full += !t.partial && t.rect.w == 250 && t.rect.h == 250;
  c.expect(tiles.size() == 36 && full == 36, "36 full 250 m tiles");

  std::mt19937_64 rng(2024);
  for (int i = 0; i < 100; ++i) {
    const int w = 1 + static_cast<int>(rng() % 200);
    const int h = 1 + static_cast<int>(rng() % 200);
    const auto r = random_raster(rng, w, h, rng() % 2 ? 3 : 1);
    const int rows = 1 + static_cast<int>(rng() % std::min(h, 12));
    const int cols = 1 + static_cast<int>(rng() % std::min(w, 12));
    c.expect(stitch(tile_grid(r, rows, cols)) == r,
             "grid reassembly " + std::to_string(i));
  }
}

void rasterization_oracle(Checker& c) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> dim(1, 64);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  std::size_t mismatched_pixels = 0;
  for (int i = 0; i < 200; ++i) {
    const int w = dim(rng), h = dim(rng);
    const auto ring =
        i % 3 == 0
            ? testing::random_convex_polygon(rng, 3 + i % 12, u(rng), u(rng), 0.2, 0.3)
            : testing::random_star_polygon(rng, 3 + i % 24, u(rng), u(rng), 0.02, 0.2);
    BinaryMask m(w, h);
    fill_polygon(m, ring);
    const auto want = testing::brute_force_mask({ring}, w, h);
    std::size_t bad = 0;
    for (std::size_t k = 0; k < want.size(); ++k) bad += want[k] != m.data()[k];
    mismatched_pixels += bad;
    c.expect(bad == 0, "polygon " + std::to_string(i) + " mismatches " + std::to_string(bad));
  }
  c.expect(mismatched_pixels == 0, "zero mismatched pixels");
}

void compare_with_oracle(Checker& c, const testing::Scenario& s) {
  const auto report = evaluate(testing::to_eval_images(s.images), ClassMap::defaults());
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-9; };
  for (int cls = 0; cls < 5; ++cls) {
    const auto o = testing::oracle_class_metrics(s.images, cls);
    const ClassMetrics* m = nullptr;
    for (const auto& x : report.classes)
      if (x.class_id == cls) m = &x;
    if (o.num_gt == 0) {
      c.expect(m == nullptr, s.name + ": class without gts reported");
      continue;
    }
    if (!m) {
      c.expect(false, s.name + ": missing class " + std::to_string(cls));
      continue;
    }
    const auto tag = s.name + " class " + std::to_string(cls);
    c.expect(near(m->precision, o.precision), tag + " precision");
    c.expect(near(m->recall, o.recall), tag + " recall");
    c.expect(near(m->ap50, o.ap50), tag + " AP50");
    c.expect(near(m->ap50_95, o.ap50_95), tag + " mAP50-95");
  }
  const auto oc = testing::oracle_confusion(s.images, 5, 0.45, 0.25);
  for (int r = 0; r <= 5; ++r)
    for (int col = 0; col <= 5; ++col)
      c.expect(near(report.confusion.normalized[r][col], oc[r][col]),
               s.name + " confusion(" + std::to_string(r) + "," + std::to_string(col) + ")");
}

double erosion_value(const std::string& scenario, double ClassMetrics::*field) {
  for (const auto& s : testing::detection_scenarios()) {
    if (s.name != scenario) continue;
    const auto r = evaluate(testing::to_eval_images(s.images), ClassMap::defaults());
    for (const auto& m : r.classes)
      if (m.class_id == 3) return m.*field;
  }
  return std::nan("");
}

void metric_oracle(Checker& c) {
  const auto scenarios = testing::detection_scenarios();
  c.expect(scenarios.size() >= 20, "at least 20 scenarios");
  for (const auto& s : scenarios) {
    for (const auto& img : s.images)
      c.expect(img.gts.size() <= 4 && img.preds.size() <= 4, s.name + " size");
    compare_with_oracle(c, s);
  }
  c.expect(iou(PixelBox{0, 0, 1, 1}, PixelBox{0.5, 0, 1.5, 1}) == 1.0 / 3.0,
           "unit squares IoU 1/3");
  c.expect(erosion_value("unit squares iou 1/3", &ClassMetrics::ap50) == 0.0,
           "IoU 1/3 pair is not a match at 0.50");
  c.expect(std::abs(erosion_value("iou 0.72 threshold counting",
                                  &ClassMetrics::ap50_95) - 0.5) <= 1e-9,
           "IoU 0.72 gives mAP50-95 0.5");
  c.expect(std::abs(erosion_value("tp then fp one gt missed", &ClassMetrics::ap50) -
                    51.0 / 101.0) <= 1e-9,
           "101-point AP 51/101");
}

void metric_inequalities(Checker& c) {
  std::size_t violations = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto s = testing::random_scenario(seed * 7919, 1 + seed % 5, 5);
    const auto r = evaluate(testing::to_eval_images(s.images), ClassMap::defaults());
    for (const auto& m : r.classes) {
      if (m.ap50 + 1e-12 < m.ap50_95) ++violations;
      for (std::size_t t = 1; t < m.ap_per_threshold.size(); ++t)
        if (m.ap_per_threshold[t] > m.ap_per_threshold[t - 1] + 1e-12) ++violations;
    }
    if (r.all.ap50 + 1e-12 < r.all.ap50_95) ++violations;
  }
  c.expect(violations == 0, std::to_string(violations) + " violations");
}

std::string random_file(std::mt19937_64& rng, bool predictions) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::ostringstream os;
  os.precision(12);
  const int lines = static_cast<int>(rng() % 12);
  for (int i = 0; i < lines; ++i) {
    const int cls = static_cast<int>(rng() % 5);
    os << cls;
    if (rng() % 2) {
      const double w = 0.01 + 0.4 * u(rng), h = 0.01 + 0.4 * u(rng);
      os << ' ' << w / 2 + (1 - w) * u(rng) << ' ' << h / 2 + (1 - h) * u(rng)
         << ' ' << w << ' ' << h;
    } else {
      const auto ring = testing::random_star_polygon(
          rng, 3 + static_cast<int>(rng() % 10), 0.5, 0.5, 0.1, 0.45, false);
      for (const auto& p : ring) os << ' ' << p.x << ' ' << p.y;
    }
    if (predictions) os << ' ' << u(rng);
    os << (rng() % 10 == 0 ? "\n\n" : "\n");
  }
  return os.str();
}

void format_round_trip(Checker& c) {
  std::mt19937_64 rng(1000);
  for (int i = 0; i < 1000; ++i) {
    const bool preds = i % 2 == 1;
    const auto text = random_file(rng, preds);
    const auto tag = "file " + std::to_string(i);
    try {
      if (preds) {
        const auto a = parse_prediction_file(text, LabelMode::kAuto);
        const auto s1 = serialize_predictions(a, LabelMode::kAuto);
        const auto b = parse_prediction_file(s1, LabelMode::kAuto);
        const auto s2 = serialize_predictions(b, LabelMode::kAuto);
        c.expect(s1 == s2, tag + " text stable");
        c.expect(parse_prediction_file(s2, LabelMode::kAuto) == b, tag + " parse stable");
        c.expect(a.size() == b.size(), tag + " count");
      } else {
        const auto a = parse_label_file(text, "f", LabelMode::kAuto);
        const auto s1 = serialize_label_file(a, LabelMode::kAuto);
        const auto b = parse_label_file(s1, "f", LabelMode::kAuto);
        const auto s2 = serialize_label_file(b, LabelMode::kAuto);
        c.expect(s1 == s2, tag + " text stable");
        c.expect(parse_label_file(s2, "f", LabelMode::kAuto) == b, tag + " parse stable");
        c.expect(a.annotations.size() == b.annotations.size(), tag + " count");
        for (std::size_t k = 0; k < a.annotations.size(); ++k) {
          const auto& x = a.annotations[k];
          const auto& y = b.annotations[k];
          bool close = x.class_id == y.class_id && x.polygon.size() == y.polygon.size();
          for (std::size_t v = 0; close && v < x.polygon.size(); ++v)
            close = std::abs(x.polygon[v].x - y.polygon[v].x) <= 5e-7 &&
                    std::abs(x.polygon[v].y - y.polygon[v].y) <= 5e-7;
          c.expect(close, tag + " values within 6 decimals");
        }
      }
    } catch (const Error& e) {
      c.expect(false, tag + " threw " + std::string(e.name()));
    }
  }
}

void split_determinism(Checker& c) {
  std::vector<std::string> ids;
  for (int i = 0; i < 100; ++i) ids.push_back("img" + std::to_string(i));
  const auto a = split_dataset(ids, SplitFractions{0.88, 0.06, 0.06}, 7);
  c.expect(a.counts() == SplitCounts{88, 6, 6}, "N=100 gives 88/6/6");
  c.expect(split_dataset(ids, SplitFractions{0.88, 0.06, 0.06}, 7) == a,
           "same seed reproduces");
  c.expect(write_split_manifest(split_dataset(ids, SplitFractions{}, 7)) ==
               write_split_manifest(a),
           "manifest bytes reproduce");

  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng() % 2000;
    const std::uint64_t seed = rng();
    std::vector<std::string> items;
    for (std::size_t i = 0; i < n; ++i) items.push_back("x" + std::to_string(i));
    const auto s = split_dataset(items, SplitFractions{}, seed);
    std::set<std::string> seen;
    std::size_t total = 0;
    for (const auto& part : s.splits) {
      total += part.size();
      seen.insert(part.begin(), part.end());
    }
    c.expect(total == n && seen.size() == n &&
                 seen == std::set<std::string>(items.begin(), items.end()),
             "partition n=" + std::to_string(n));
  }
}

void augmentation_invariants(Checker& c) {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0.25, 0.75);
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 8 + static_cast<int>(rng() % 57), h = 8 + static_cast<int>(rng() % 57);
    const auto r = random_raster(rng, w, h, 3);
    LabelFile labels{"a", {}};
    for (int k = 0; k < 4; ++k) {
      labels.annotations.push_back(make_polygon_annotation(
          k, testing::random_star_polygon(rng, 3 + k * 3, u(rng), u(rng), 0.05, 0.24)));
      Annotation b;
      b.class_id = 4;
      b.bbox = {std::round(u(rng) * 1e6) / 1e6, std::round(u(rng) * 1e6) / 1e6, 0.125, 0.25};
      labels.annotations.push_back(b);
    }
    auto rr = r;
    auto ll = labels;
    for (int k = 0; k < 4; ++k) {
      rr = rotate90(rr, 1);
      ll = rotate90(ll, 1);
    }
    c.expect(rr == r, "raster 4-cycle " + std::to_string(trial));
    c.expect(ll == labels, "labels 4-cycle " + std::to_string(trial));

    for (int cls = 0; cls < 4; ++cls) {
      const auto base = rasterize(labels.annotations, cls, w, h);
      for (int k = 1; k <= 3; ++k) {
        const auto rotated_mask = BinaryMask::from_raster(rotate90(base.to_raster(), k));
        const auto rl = rotate90(labels, k);
        const auto from_labels =
            rasterize(rl.annotations, cls, k % 2 ? h : w, k % 2 ? w : h);
        c.expect(rotated_mask.count() == base.count(), "mask count under rotation");
        c.expect(from_labels.count() == base.count(), "polygon pixel area under rotation");
      }
    }
  }

  for (int trial = 0; trial < 500; ++trial) {
    const double f = 1.0 + 3.0 * std::uniform_real_distribution<double>(1e-6, 1.0)(rng);
    const double lo = (1 - 1 / f) / 2, hi = 1 - lo;
    std::uniform_real_distribution<double> in(lo, hi);
    double x0 = in(rng), x1 = in(rng), y0 = in(rng), y1 = in(rng);
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    if (x1 - x0 < 1e-3 || y1 - y0 < 1e-3) continue;
    Annotation a;
    a.class_id = 3;
    a.bbox = BBox::from_corners(x0, y0, x1, y1);
    const auto z = zoom(LabelFile{"z", {a}}, f, 640, 640);
    if (z.annotations.size() != 1) {
      c.expect(false, "zoom kept bbox inside crop");
      continue;
    }
    const auto& b = z.annotations[0].bbox;
    c.expect(std::abs(b.xc - (0.5 + (a.bbox.xc - 0.5) * f)) <= 1e-6 &&
                 std::abs(b.yc - (0.5 + (a.bbox.yc - 0.5) * f)) <= 1e-6 &&
                 std::abs(b.w - a.bbox.w * f) <= 1e-6 &&
                 std::abs(b.h - a.bbox.h * f) <= 1e-6,
             "zoom closed form, f=" + std::to_string(f));
  }
  Annotation centered;
  centered.class_id = 3;
  centered.bbox = {0.5, 0.5, 0.2, 0.2};
  const auto z2 = zoom(LabelFile{"z", {centered}}, 2.0, 640, 640);
  c.expect(z2.annotations.size() == 1 &&
               std::abs(z2.annotations[0].bbox.w - 0.4) <= 1e-6 &&
               std::abs(z2.annotations[0].bbox.h - 0.4) <= 1e-6,
           "centered bbox at 2x");
}

void service_contract(Checker& c) {
  const auto fx = testing::fixture_dir() / "service";
  ServiceConfig cfg;
  cfg.host = "127.0.0.1";
  cfg.port = 0;
  cfg.max_payload_bytes = 256 * 1024;
  Service service(cfg);
  const int port = service.bind();
  std::thread thread([&] { service.listen(); });
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(10, 0);

  auto health = client.Get("/health");
  for (int i = 0; i < 200 && !health; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
    health = client.Get("/health");
  }
  c.expect(health && health->status == 200 &&
               json::parse(health->body)["status"] == "ready" &&
               json::parse(health->body)["version"] == kVersion,
           "/health ready with build version");

  const json body = {{"image", base64_encode(read_file(fx / "image.png"))},
                     {"predictions", testing::read_text(fx / "predictions.txt")},
                     {"unit", "m2"},
                     {"pixel_scale", {{"mode", "pixel_area_m2"}, {"value", 1.0}}},
                     {"min_confidence", 0.5}};
  auto res = client.Post("/analyze", body.dump(), "application/json");
  if (res && res->status == 200) {
    auto doc = json::parse(res->body);
    const auto overlay = base64_decode(doc["overlay_png"].get<std::string>());
    const auto mask = base64_decode(doc["erosion_mask_png"].get<std::string>());
    c.expect(decode_image(overlay) == load_image(fx / "overlay.png"), "overlay golden");
    c.expect(decode_image(mask) == load_image(fx / "erosion_mask.png"), "mask golden");
    doc.erase("overlay_png");
    doc.erase("erosion_mask_png");
    c.expect(doc == json::parse(testing::read_text(fx / "analyze.json")), "area document golden");
    c.expect(doc["area"]["area_m2"] == 500.0, "fixture area 500 m2");
  } else {
    c.expect(false, "/analyze fixture returned 200");
  }

  auto status_and_code = [&](const std::string& payload) {
    auto r = client.Post("/analyze", payload, "application/json");
    if (!r) return std::make_pair(0, std::string());
    std::string code;
    try {
      code = json::parse(r->body).value("error", "");
    } catch (const json::exception&) {
    }
    return std::make_pair(r->status, code);
  };
  auto bad = body;
  bad["image"] = base64_encode({'B', 'M', 0, 0, 0, 0});
  c.expect(status_and_code(bad.dump()) == std::make_pair(400, std::string("UnsupportedFormat")),
           "400 UnsupportedFormat");
  bad = body;
  bad["predictions"] = "3 0.5\n";
  c.expect(status_and_code(bad.dump()) == std::make_pair(400, std::string("MalformedPredictions")),
           "400 MalformedPredictions");
  bad = body;
  bad.erase("pixel_scale");
  c.expect(status_and_code(bad.dump()) == std::make_pair(400, std::string("MissingPixelScale")),
           "400 MissingPixelScale");
  bad = body;
  bad.erase("predictions");
  c.expect(status_and_code(bad.dump()) == std::make_pair(422, std::string("NoPredictionsAvailable")),
           "422 NoPredictionsAvailable");
  c.expect(status_and_code(std::string(512 * 1024, ' ')) ==
               std::make_pair(413, std::string("PayloadTooLarge")),
           "413 PayloadTooLarge");

  service.begin_shutdown();
  health = client.Get("/health");
  c.expect(health && health->status == 503 &&
               json::parse(health->body)["status"] == "not-ready",
           "/health not-ready during shutdown");
  service.stop();
  thread.join();
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"area law: 500 white px at 1 m2/px reports 500 m2", 1.0, area_law},
      {"tiling law: 36 full 250 m tiles, grid reassembly on 100 rasters", 10.0, tiling_law},
      {"rasterization oracle: 200 random polygons, zero mismatches", 30.0,
       rasterization_oracle},
      {"metric oracle: hand-built scenarios match brute force to 1e-9", 10.0, metric_oracle},
      {"metric inequalities: 100 random scenarios, zero violations", 60.0,
       metric_inequalities},
      {"format round-trip: 1000 label/prediction files", 60.0, format_round_trip},
      {"split determinism: 88/6/6, reproducible, partition over 100 pairs", 60.0,
       split_determinism},
      {"augmentation invariants: 4-cycle, rotation area, zoom closed form", 60.0,
       augmentation_invariants},
      {"service contract: /analyze goldens, /health, 400/413/422", 60.0,
       service_contract},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Checker checker;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(checker);
    } catch (const std::exception& e) {
      checker.expect(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < cr.budget_s;
    const bool ok = checker.ok() && in_time;
    failed += !ok;
    std::printf("%s  %s  [%zu checks, %.3f s of %.0f s]", ok ? "PASS" : "FAIL",
                cr.name.c_str(), checker.checks(), secs, cr.budget_s);
    if (!checker.ok()) std::printf("  %s", checker.summary().c_str());
    if (!in_time) std::printf("  over time budget");
    std::printf("\n");
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
