#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "eroscan/augment.hpp"
#include "eroscan/error.hpp"
#include "eroscan/mask.hpp"
#include "oracle.hpp"

namespace eroscan {
namespace {

Raster random_raster(std::mt19937_64& rng, int w, int h) {
  Raster r(w, h, 3);
  for (auto& v : r.data()) v = static_cast<std::uint8_t>(rng());
  return r;
}

LabelFile random_labels(std::mt19937_64& rng, int n) {
  LabelFile f{"src", {}};
  std::uniform_real_distribution<double> u(0.2, 0.8);
  for (int i = 0; i < n; ++i) {
    if (i % 3 == 2) {
      Annotation a;
      a.class_id = i % 5;
      a.bbox = {std::round(u(rng) * 1e6) / 1e6, std::round(u(rng) * 1e6) / 1e6,
                0.1, 0.2};
      f.annotations.push_back(a);
    } else {
      f.annotations.push_back(make_polygon_annotation(
          i % 5, testing::random_star_polygon(rng, 3 + i % 9, u(rng), u(rng),
                                              0.05, 0.19)));
    }
  }
  return f;
}

TEST(RotatePoint, QuarterTurnExample) {
  const auto p = rotate_point({0.2, 0.7}, 1);
  EXPECT_NEAR(p.x, 0.3, 1e-12);
  EXPECT_NEAR(p.y, 0.2, 1e-12);
  EXPECT_EQ(rotate_point({0.2, 0.7}, 2), (NormPoint{0.8, 0.3}));
  const auto q = rotate_point({0.2, 0.7}, 3);
  EXPECT_NEAR(q.x, 0.7, 1e-12);
  EXPECT_NEAR(q.y, 0.8, 1e-12);
}

TEST(Rotate90, RasterPixelMapping) {
  Raster r(3, 2, 1, std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6});
  const auto q = rotate90(r, 1);
  ASSERT_EQ(q.width(), 2);
  ASSERT_EQ(q.height(), 3);
  // Clockwise: the left column of the source becomes the top row.
  EXPECT_EQ(q.data(), (std::vector<std::uint8_t>{4, 1, 5, 2, 6, 3}));
}

TEST(Rotate90, FourCycleIsIdentity) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const auto r = random_raster(rng, 5 + trial, 9 + trial % 4);
    const auto labels = random_labels(rng, 6);
    auto rr = r;
    auto ll = labels;
    for (int i = 0; i < 4; ++i) {
      rr = rotate90(rr, 1);
      ll = rotate90(ll, 1);
    }
    EXPECT_EQ(rr, r);
    EXPECT_EQ(ll, labels);
    for (int k = 1; k <= 3; ++k) {
      EXPECT_EQ(rotate90(rotate90(r, k), 4 - k), r);
      EXPECT_EQ(rotate90(rotate90(labels, k), 4 - k), labels);
    }
  }
}

TEST(Rotate90, PolygonPixelAreaPreserved) {
  std::mt19937_64 rng(2);
  const int w = 64, h = 48;
  for (int trial = 0; trial < 100; ++trial) {
    const auto labels = random_labels(rng, 1);
    const auto base = rasterize(labels.annotations, labels.annotations[0].class_id, w, h);
    for (int k = 1; k <= 3; ++k) {
      const auto rotated = rotate90(labels, k);
      const int rw = k % 2 ? h : w, rh = k % 2 ? w : h;
      const auto m = rasterize(rotated.annotations,
                               rotated.annotations[0].class_id, rw, rh);
      EXPECT_EQ(m.count(), base.count());
      EXPECT_EQ(BinaryMask::from_raster(rotate90(base.to_raster(), k)), m);
    }
  }
}

TEST(Grayscale, LumaExamples) {
  Raster red(1, 1, 3, std::vector<std::uint8_t>{255, 0, 0});
  const auto g = grayscale(red);
  EXPECT_EQ(g.channels(), 3);
  EXPECT_EQ(g.at(0, 0, 0), 76);
  EXPECT_EQ(g.at(0, 0, 1), 76);
  EXPECT_EQ(g.at(0, 0, 2), 76);

  Raster gray(16, 1, 3);
  for (int x = 0; x < 16; ++x)
    for (int c = 0; c < 3; ++c) gray.at(x, 0, c) = static_cast<std::uint8_t>(x * 17);
  EXPECT_EQ(grayscale(gray), gray);
}

TEST(Grayscale, LabelsUntouched) {
  std::mt19937_64 rng(3);
  LabeledImage item{"src", random_raster(rng, 8, 8), random_labels(rng, 4),
                    Split::kTrain, {}};
  const auto out = apply_augment(item, parse_augment_spec("gray"), "src_aug1");
  auto expected = item.labels;
  expected.image_id = "src_aug1";
  EXPECT_EQ(out.labels, expected);
  EXPECT_EQ(serialize_label_file(out.labels, LabelMode::kAuto),
            serialize_label_file(item.labels, LabelMode::kAuto));
}

TEST(Zoom, CenteredBboxDoubles) {
  LabelFile f{"z", {}};
  Annotation a;
  a.class_id = 3;
  a.bbox = {0.5, 0.5, 0.2, 0.2};
  f.annotations.push_back(a);
  const auto z = zoom(f, 2.0, 640, 640);
  ASSERT_EQ(z.annotations.size(), 1u);
  EXPECT_NEAR(z.annotations[0].bbox.xc, 0.5, 1e-6);
  EXPECT_NEAR(z.annotations[0].bbox.yc, 0.5, 1e-6);
  EXPECT_NEAR(z.annotations[0].bbox.w, 0.4, 1e-6);
  EXPECT_NEAR(z.annotations[0].bbox.h, 0.4, 1e-6);
}

TEST(Zoom, BorderBboxDropped) {
  LabelFile f{"z", {}};
  Annotation a;
  a.class_id = 3;
  a.bbox = {0.1, 0.5, 0.1, 0.1};
  f.annotations.push_back(a);
  EXPECT_TRUE(zoom(f, 2.0, 640, 640).annotations.empty());
}

TEST(Zoom, PartialPolygonClipped) {
  LabelFile f{"z", {make_polygon_annotation(
                       3, {{0.1, 0.4}, {0.5, 0.4}, {0.5, 0.6}, {0.1, 0.6}})}};
  const auto z = zoom(f, 2.0, 640, 640);
  ASSERT_EQ(z.annotations.size(), 1u);
  const auto& b = z.annotations[0].bbox;
  EXPECT_NEAR(b.x0(), 0.0, 1e-6);
  EXPECT_NEAR(b.x1(), 0.5, 1e-6);
  EXPECT_NEAR(b.y0(), 0.3, 1e-6);
  EXPECT_NEAR(b.y1(), 0.7, 1e-6);
}

TEST(Zoom, TinySliverDropped) {
  // Inside the crop by 1/640 of the width: about 1.3 x 256 px before zoom.
  LabelFile f{"z", {make_polygon_annotation(
                       3, {{0.2, 0.3}, {0.251, 0.3}, {0.251, 0.301}, {0.2, 0.301}})}};
  EXPECT_TRUE(zoom(f, 2.0, 640, 640).annotations.empty());
}

TEST(Zoom, NearOneIsIdentity) {
  std::mt19937_64 rng(4);
  const auto labels = random_labels(rng, 12);
  const auto z = zoom(labels, 1.0 + 1e-9, 640, 480);
  ASSERT_EQ(z.annotations.size(), labels.annotations.size());
  for (std::size_t i = 0; i < z.annotations.size(); ++i) {
    const auto& a = labels.annotations[i];
    const auto& b = z.annotations[i];
    EXPECT_NEAR(a.bbox.xc, b.bbox.xc, 1e-6);
    EXPECT_NEAR(a.bbox.yc, b.bbox.yc, 1e-6);
    EXPECT_NEAR(a.bbox.w, b.bbox.w, 1e-6);
    EXPECT_NEAR(a.bbox.h, b.bbox.h, 1e-6);
    ASSERT_EQ(a.polygon.size(), b.polygon.size());
    for (std::size_t j = 0; j < a.polygon.size(); ++j) {
      EXPECT_NEAR(a.polygon[j].x, b.polygon[j].x, 1e-6);
      EXPECT_NEAR(a.polygon[j].y, b.polygon[j].y, 1e-6);
    }
  }
  const auto r = random_raster(rng, 32, 24);
  EXPECT_EQ(zoom(r, 1.0 + 1e-9), r);
}

TEST(Zoom, RasterCenterCropOfConstantBlock) {
  // The 2x centre crop of an 8x8 image spans pixels 2..5; bilinear taps reach
  // a quarter pixel beyond it, so a uniform block over 1..6 fills the output.
  Raster r(8, 8, 1, std::uint8_t{0});
  for (int y = 1; y < 7; ++y)
    for (int x = 1; x < 7; ++x) r.at(x, y) = 200;
  r.set_gsd(1.0);
  const auto z = zoom(r, 2.0);
  for (auto v : z.data()) EXPECT_EQ(v, 200);
  EXPECT_DOUBLE_EQ(*z.gsd(), 0.5);
}

TEST(Zoom, RasterMatchesBilinearOracle) {
  std::mt19937_64 rng(8);
  const auto r = random_raster(rng, 12, 10);
  const double f = 1.5;
  const auto z = zoom(r, f);
  const double ox = 12 * (1 - 1 / f) / 2, oy = 10 * (1 - 1 / f) / 2;
  for (int v = 0; v < 10; ++v)
    for (int u = 0; u < 12; ++u) {
      const double sx = ox + (u + 0.5) / f - 0.5, sy = oy + (v + 0.5) / f - 0.5;
      const int x0 = static_cast<int>(sx), y0 = static_cast<int>(sy);
      const double fx = sx - x0, fy = sy - y0;
      for (int c = 0; c < 3; ++c) {
        const double want = (1 - fy) * ((1 - fx) * r.at(x0, y0, c) + fx * r.at(x0 + 1, y0, c)) +
                            fy * ((1 - fx) * r.at(x0, y0 + 1, c) + fx * r.at(x0 + 1, y0 + 1, c));
        EXPECT_NEAR(z.at(u, v, c), want, 0.5 + 1e-9);
      }
    }
}

TEST(Zoom, AreaFractionBound) {
  std::mt19937_64 rng(5);
  const int w = 128, h = 128;
  for (int trial = 0; trial < 100; ++trial) {
    const auto labels = random_labels(rng, 1);
    if (!labels.annotations[0].has_polygon()) continue;
    const double f = 1.0 + 3.0 * std::uniform_real_distribution<double>(0, 1)(rng);
    const auto before = rasterize(labels.annotations, labels.annotations[0].class_id, w, h).count();
    const auto z = zoom(labels, f, w, h);
    if (z.annotations.empty()) continue;
    const auto after = rasterize(z.annotations, z.annotations[0].class_id, w, h).count();
    // Pixel-center sampling can miss up to one boundary band before zooming.
    double perimeter = 0;
    const auto& ring = labels.annotations[0].polygon;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const auto& a = ring[i];
      const auto& b = ring[(i + 1) % ring.size()];
      perimeter += std::hypot((a.x - b.x) * w, (a.y - b.y) * h);
    }
    EXPECT_LE(static_cast<double>(after), (before + perimeter) * f * f * 1.02)
        << "trial " << trial;
  }
}

TEST(Augment, OutputsSatisfyAnnotationInvariants) {
  std::mt19937_64 rng(6);
  const auto specs = parse_augment_specs("gray,rot90,zoom:2,zoom:3.5+rot90:3,gray+zoom:1.5+rot90", 9);
  for (int trial = 0; trial < 40; ++trial) {
    LabeledImage item{"img" + std::to_string(trial), random_raster(rng, 40, 30),
                      random_labels(rng, 5), Split::kVal, {}};
    for (const auto& spec : specs) {
      const auto out = apply_augment(item, spec, item.id + "_x");
      for (const auto& a : out.labels.annotations) {
        EXPECT_NO_THROW(validate_annotation(a, ClassMap::defaults()));
        if (a.has_polygon()) {
          const auto bb = bounding_box(a.polygon);
          EXPECT_NEAR(bb.xc, a.bbox.xc, 1e-9);
          EXPECT_NEAR(bb.w, a.bbox.w, 1e-9);
        }
        const auto text = serialize_annotation(a, LabelMode::kAuto);
        EXPECT_EQ(parse_label_line(text, LabelMode::kAuto), a) << text;
      }
      EXPECT_EQ(out.split, Split::kVal);
    }
  }
}

TEST(AugmentSpec, ParseFormatValidate) {
  const auto s = parse_augment_spec("gray+zoom:2.5+rot90:3", 7);
  ASSERT_EQ(s.ops.size(), 3u);
  EXPECT_EQ(std::get<ZoomOp>(s.ops[1]).factor, 2.5);
  EXPECT_EQ(std::get<Rotate90Op>(s.ops[2]).k, 3);
  EXPECT_EQ(format_augment_spec(s), "gray+zoom:2.5+rot90:3");
  EXPECT_EQ(parse_augment_specs("gray,rot90", 1).size(), 2u);
  EXPECT_THROW(parse_augment_spec("zoom:1"), Error);
  EXPECT_THROW(parse_augment_spec("zoom:4.5"), Error);
  EXPECT_THROW(parse_augment_spec("rot90:4"), Error);
  EXPECT_THROW(parse_augment_spec("blur"), Error);
  EXPECT_THROW(validate_augment_spec(AugmentSpec{}), Error);
}

TEST(Augment, SeededRotationIsRecorded) {
  std::mt19937_64 rng(7);
  LabeledImage item{"a", random_raster(rng, 6, 4), {"a", {}}, Split::kTrain, {}};
  const auto spec = parse_augment_spec("rot90", 42);
  const auto x = apply_augment(item, spec, "a_aug1");
  const auto y = apply_augment(item, spec, "a_aug1");
  EXPECT_EQ(x.raster, y.raster);
  const auto k = std::get<Rotate90Op>(x.provenance->spec.ops[0]).k;
  ASSERT_TRUE(k.has_value());
  EXPECT_EQ(x.raster, rotate90(item.raster, *k));
}

TEST(ExpandDataset, FiveHundredToTwelveHundredFour) {
  std::vector<LabeledImage> items;
  for (int i = 0; i < 500; ++i) {
    items.push_back({"s" + std::to_string(i), Raster(4, 4, 3), {"s", {}},
                     i % 10 == 0 ? Split::kTest : Split::kTrain, {}});
  }
  const auto variants = parse_augment_specs("gray,rot90:1", 3);
  // 204 items get two variants, 296 get one: 408 + 296 = 704.
  std::vector<std::vector<AugmentSpec>> specs(500);
  for (int i = 0; i < 500; ++i) {
    specs[i].push_back(variants[0]);
    if (i < 204) specs[i].push_back(variants[1]);
  }
  const auto out = expand_dataset(items, specs);
  ASSERT_EQ(out.size(), 1204u);
  std::set<std::string> sources;
  for (const auto& it : items) sources.insert(it.id);
  std::set<std::string> all_ids;
  for (const auto& it : out) {
    EXPECT_TRUE(all_ids.insert(it.id).second);
    if (!it.provenance) continue;
    ASSERT_TRUE(sources.count(it.provenance->source_id));
    const auto& src = items[std::stoi(it.provenance->source_id.substr(1))];
    EXPECT_EQ(it.split, src.split);
  }
  const auto manifest = write_provenance_manifest(out);
  EXPECT_EQ(std::count(manifest.begin(), manifest.end(), '\n'), 705);
  EXPECT_NE(manifest.find("s0_aug2,s0,rot90:1\n"), std::string::npos);
}

TEST(ExpandDataset, ZeroSpecsIsIdentity) {
  std::vector<LabeledImage> items{{"a", Raster(2, 2, 3), {"a", {}}, Split::kTrain, {}}};
  const auto out = expand_dataset(items, {});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].id, "a");
  EXPECT_FALSE(out[0].provenance.has_value());
}

TEST(ExpandDataset, NestedRejectedUnlessEnabled) {
  LabeledImage derived{"a_aug1", Raster(2, 2, 3), {"a_aug1", {}}, Split::kTrain,
                       Provenance{"a", parse_augment_spec("gray")}};
  std::vector<LabeledImage> items{derived};
  std::vector<std::vector<AugmentSpec>> specs{{parse_augment_spec("rot90:1")}};
  EXPECT_THROW(expand_dataset(items, specs), Error);
  EXPECT_EQ(expand_dataset(items, specs, true).size(), 2u);
}

}  // namespace
}  // namespace eroscan
