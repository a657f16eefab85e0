#include "cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <charconv>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "eroscan/augment.hpp"
#include "eroscan/dataset.hpp"
#include "eroscan/error.hpp"
#include "eroscan/eval.hpp"
#include "eroscan/imageio.hpp"
#include "eroscan/mask.hpp"
#include "eroscan/predio.hpp"
#include "eroscan/service.hpp"
#include "eroscan/tiling.hpp"

namespace fs = std::filesystem;

namespace eroscan::cli {

namespace {

struct Context {
  Context(std::ostream& o, std::ostream& e) : out(o), err(e) {}

  std::ostream& out;
  std::ostream& err;
  fs::path root = ".";
  std::string data_yaml;
  ClassMap classes = ClassMap::defaults();

  fs::path resolve(const std::string& p) const {
    const fs::path path(p);
    return path.is_absolute() ? path : root / path;
  }
};

std::string read_text(const fs::path& path) {
  const auto bytes = read_file(path);
  return {bytes.begin(), bytes.end()};
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()),
                    text.size()});
}

std::string number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, r.ptr};
}

std::pair<int, int> parse_pair(const std::string& text, char sep,
                               const char* what) {
  const auto pos = text.find(sep);
  int a = 0, b = 0;
  if (pos != std::string::npos) {
    const char* s = text.data();
    const auto r1 = std::from_chars(s, s + pos, a);
    const auto r2 = std::from_chars(s + pos + 1, s + text.size(), b);
    if (r1.ec == std::errc() && r1.ptr == s + pos && r2.ec == std::errc() &&
        r2.ptr == s + text.size() && a > 0 && b > 0) {
      return {a, b};
    }
  }
  throw Error(ErrorCode::kInvalidArgument,
              std::string(what) + " must look like A" + sep + "B, got '" +
                  text + "'");
}

std::vector<double> parse_list(const std::string& text, std::size_t expected,
                               const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(what) + " has a non-numeric entry '" + item + "'");
    }
  }
  if (out.size() != expected) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " needs " + std::to_string(expected) +
                    " comma-separated values");
  }
  return out;
}

std::vector<fs::path> files_with_extension(const fs::path& dir,
                                           const std::string& ext) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kIoError, dir.string() + " is not a directory");
  }
  for (const auto& de : fs::directory_iterator(dir)) {
    if (de.is_regular_file() && de.path().extension() == ext) {
      out.push_back(de.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- tile

struct TileOptions {
  std::string input;
  std::optional<double> gsd;
  std::optional<double> extent_m;
  std::optional<double> tile_m;
  std::string grid;
  std::string out = "tiles";
};

void run_tile(Context& ctx, const TileOptions& o) {
  const auto input = ctx.resolve(o.input);
  Raster raster = load_image(input);
  std::vector<Tile> tiles;
  if (!o.grid.empty()) {
    const auto [rows, cols] = parse_pair(o.grid, 'x', "--grid");
    if (o.gsd) raster.set_gsd(*o.gsd);
    tiles = tile_grid(raster, rows, cols);
  } else {
    if (o.gsd) {
      raster.set_gsd(*o.gsd);
    } else if (o.extent_m) {
      set_gsd_from_extent(raster, *o.extent_m);
    } else {
      auto sidecar = input;
      sidecar.replace_extension(".gsd");
      if (fs::exists(sidecar)) raster.set_gsd(std::stod(read_text(sidecar)));
    }
    tiles = tile_by_ground_size(raster, *o.tile_m);
  }
  const auto out_dir = ctx.resolve(o.out);
  fs::create_directories(out_dir);
  const auto stem = input.stem().string();
  std::size_t partial = 0;
  for (const auto& t : tiles) {
    save_png(out_dir / tile_file_name(stem, t), t.raster);
    partial += t.partial ? 1 : 0;
  }
  const auto manifest = out_dir / (stem + "_manifest.csv");
  write_text(manifest, write_tile_manifest(stem, tiles));
  ctx.out << "tiles=" << tiles.size() << " partial=" << partial
          << " manifest=" << manifest.string() << '\n';
}

// ---------------------------------------------------------------- convert

struct ConvertOptions {
  std::string labels;
  std::string to = "auto";
  std::string out;
  bool predictions = false;
};

LabelMode parse_mode(const std::string& s) {
  if (s == "bbox") return LabelMode::kBbox;
  if (s == "polygon") return LabelMode::kPolygon;
  return LabelMode::kAuto;
}

std::string convert_text(const Context& ctx, const std::string& text,
                         const std::string& id, LabelMode to,
                         bool predictions) {
  if (predictions) {
    const auto preds = parse_prediction_file(text, LabelMode::kAuto, ctx.classes);
    return serialize_predictions(preds, to);
  }
  const auto file = parse_label_file(text, id, LabelMode::kAuto, ctx.classes);
  return serialize_label_file(file, to);
}

void run_convert(Context& ctx, const ConvertOptions& o) {
  const auto in = ctx.resolve(o.labels);
  const auto out = ctx.resolve(o.out);
  const auto mode = parse_mode(o.to);
  std::size_t n = 0;
  if (fs::is_directory(in)) {
    fs::create_directories(out);
    for (const auto& f : files_with_extension(in, ".txt")) {
      write_text(out / f.filename(),
                 convert_text(ctx, read_text(f), f.stem().string(), mode,
                              o.predictions));
      ++n;
    }
  } else {
    write_text(out, convert_text(ctx, read_text(in), in.stem().string(), mode,
                                 o.predictions));
    n = 1;
  }
  ctx.out << "converted=" << n << '\n';
}

// ---------------------------------------------------------------- split

struct SplitOptions {
  std::string frac = "0.88,0.06,0.06";
  std::string counts;
  std::uint64_t seed = 0;
  std::string images = "images";
  std::string manifest;
  bool apply = false;
};

void run_split(Context& ctx, const SplitOptions& o) {
  const auto image_dir = ctx.resolve(o.images);
  std::vector<std::string> ids;
  std::map<std::string, fs::path> files;
  if (!fs::is_directory(image_dir)) {
    throw Error(ErrorCode::kIoError, image_dir.string() + " is not a directory");
  }
  for (const auto& de : fs::directory_iterator(image_dir)) {
    if (!de.is_regular_file() || !is_image_file(de.path())) continue;
    const auto stem = de.path().stem().string();
    if (!files.emplace(stem, de.path()).second) {
      throw Error(ErrorCode::kInvalidDataset, "two images share the stem " + stem);
    }
    ids.push_back(stem);
  }
  std::sort(ids.begin(), ids.end());

  SplitAssignment assignment;
  if (!o.counts.empty()) {
    const auto c = parse_list(o.counts, 3, "--counts");
    assignment = split_dataset(
        ids,
        SplitCounts{static_cast<std::size_t>(c[0]),
                    static_cast<std::size_t>(c[1]),
                    static_cast<std::size_t>(c[2])},
        o.seed);
  } else {
    const auto f = parse_list(o.frac, 3, "--frac");
    assignment = split_dataset(ids, SplitFractions{f[0], f[1], f[2]}, o.seed);
  }
  const auto manifest = write_split_manifest(assignment);

  if (o.apply) {
    DatasetIndex index;
    index.root = ctx.root;
    index.class_map = ctx.classes;
    for (Split s : kAllSplits) {
      const auto img_dir = ctx.root / "images" / split_name(s);
      const auto lbl_dir = ctx.root / "labels" / split_name(s);
      fs::create_directories(img_dir);
      fs::create_directories(lbl_dir);
      for (const auto& id : assignment[s]) {
        const auto& src = files.at(id);
        const auto dst = img_dir / src.filename();
        fs::rename(src, dst);
        const auto label_src = ctx.root / "labels" / (id + ".txt");
        const auto label_dst = lbl_dir / (id + ".txt");
        if (fs::exists(label_src)) {
          fs::rename(label_src, label_dst);
        } else if (!fs::exists(label_dst)) {
          write_text(label_dst, "");
        }
        index[s].push_back({id, dst, label_dst});
      }
    }
    write_text(ctx.root / "data.yaml", write_dataset_yaml(index));
  }

  if (o.manifest.empty()) {
    ctx.out << manifest;
  } else {
    write_text(ctx.resolve(o.manifest), manifest);
    const auto c = assignment.counts();
    ctx.out << "train=" << c.train << " val=" << c.val << " test=" << c.test
            << '\n';
  }
}

// ---------------------------------------------------------------- augment

struct AugmentOptions {
  std::string in;
  std::string out;
  std::string ops = "gray,rot90,zoom:2";
  std::uint64_t seed = 0;
};

void run_augment(Context& ctx, const AugmentOptions& o) {
  const auto in_root = ctx.resolve(o.in);
  const auto out_root = ctx.resolve(o.out);
  const auto specs = parse_augment_specs(o.ops, o.seed);
  const auto index = scan_dataset(in_root, ctx.classes);
  validate_dataset(index);

  std::vector<LabeledImage> items;
  std::map<std::string, fs::path> source_files;
  for (Split s : kAllSplits) {
    for (const auto& e : index[s]) {
      LabeledImage item;
      item.id = e.image_id;
      item.split = s;
      item.raster = load_image(e.image);
      const auto text = fs::exists(e.label) ? read_text(e.label) : std::string();
      item.labels =
          parse_label_file(text, e.image_id, LabelMode::kAuto, ctx.classes);
      source_files[e.image_id] = e.image;
      items.push_back(std::move(item));
    }
  }
  const std::vector<std::vector<AugmentSpec>> per_item(items.size(), specs);
  const auto expanded = expand_dataset(items, per_item);

  DatasetIndex out_index;
  out_index.root = out_root;
  out_index.class_map = ctx.classes;
  for (const auto& item : expanded) {
    const auto img_dir = out_root / "images" / split_name(item.split);
    const auto lbl_dir = out_root / "labels" / split_name(item.split);
    fs::create_directories(img_dir);
    fs::create_directories(lbl_dir);
    fs::path image_path;
    if (item.provenance) {
      image_path = img_dir / (item.id + ".png");
      save_png(image_path, item.raster);
    } else {
      const auto& src = source_files.at(item.id);
      image_path = img_dir / src.filename();
      fs::copy_file(src, image_path, fs::copy_options::overwrite_existing);
    }
    const auto label_path = lbl_dir / (item.id + ".txt");
    write_text(label_path, serialize_label_file(item.labels, LabelMode::kAuto));
    out_index[item.split].push_back({item.id, image_path, label_path});
  }
  write_text(out_root / "provenance.csv", write_provenance_manifest(expanded));
  write_text(out_root / "data.yaml", write_dataset_yaml(out_index));
  ctx.out << "inputs=" << items.size()
          << " derived=" << expanded.size() - items.size()
          << " total=" << expanded.size() << '\n';
}

// ---------------------------------------------------------------- mask

struct MaskOptions {
  std::string labels;
  std::string size;
  std::string image;
  int class_id = ClassMap::kErosion;
  std::string out = "mask.png";
  std::string overlay;
  bool predictions = false;
  double min_conf = 0.0;
};

void run_mask(Context& ctx, const MaskOptions& o) {
  const auto text = read_text(ctx.resolve(o.labels));
  std::vector<Annotation> anns;
  if (o.predictions) {
    anns = confidence_filter(
        parse_prediction_file(text, LabelMode::kAuto, ctx.classes), o.min_conf);
  } else {
    anns = parse_label_file(text, o.labels, LabelMode::kAuto, ctx.classes)
               .annotations;
  }
  std::optional<Raster> image;
  int width = 0, height = 0;
  if (!o.image.empty()) {
    image = load_image(ctx.resolve(o.image));
    width = image->width();
    height = image->height();
  } else if (!o.size.empty()) {
    std::tie(width, height) = parse_pair(o.size, 'x', "--size");
  } else {
    throw Error(ErrorCode::kInvalidArgument, "mask needs --size or --image");
  }
  const auto masks = rasterize_classes(anns, ctx.classes, width, height);
  const auto kept = filter_class(masks, o.class_id, ctx.classes);
  const auto out = ctx.resolve(o.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_png(out, kept.to_raster());
  if (!o.overlay.empty()) {
    if (!image) {
      throw Error(ErrorCode::kInvalidArgument, "--overlay needs --image");
    }
    save_png(ctx.resolve(o.overlay), overlay(*image, masks));
  }
  ctx.out << "pixels=" << kept.count() << " mask=" << out.string() << '\n';
}

// ---------------------------------------------------------------- area

struct AreaOptions {
  std::string mask;
  std::optional<double> px_side;
  std::optional<double> px_area;
};

void run_area(Context& ctx, const AreaOptions& o) {
  const auto mask = BinaryMask::from_raster(load_image(ctx.resolve(o.mask)));
  std::optional<PixelScale> scale;
  if (o.px_side) scale = PixelScale::side(*o.px_side);
  if (o.px_area) scale = PixelScale::area(*o.px_area);
  const auto r = area(mask, scale);
  ctx.out << "pixels=" << r.pixel_count;
  if (r.area_m2) ctx.out << " area_m2=" << number(*r.area_m2);
  ctx.out << '\n';
}

// ---------------------------------------------------------------- eval

struct EvalOptionsCli {
  std::string gt;
  std::string pred;
  std::string geometry = "box";
  std::string out = "report";
  std::string size = "640x640";
  std::string images;
  double confusion_iou = 0.45;
  double confusion_conf = 0.25;
  double min_conf = 0.0;
};

void run_eval(Context& ctx, const EvalOptionsCli& o) {
  const auto gt_dir = ctx.resolve(o.gt);
  const auto pred_dir = ctx.resolve(o.pred);
  const auto [width, height] = parse_pair(o.size, 'x', "--size");
  std::map<std::string, std::pair<int, int>> sizes;
  if (!o.images.empty()) {
    for (const auto& de : fs::directory_iterator(ctx.resolve(o.images))) {
      if (!de.is_regular_file() || !is_image_file(de.path())) continue;
      const auto r = load_image(de.path());
      sizes[de.path().stem().string()] = {r.width(), r.height()};
    }
  }

  std::map<std::string, EvalImage> by_id;
  auto image_for = [&](const std::string& id) -> EvalImage& {
    auto [it, inserted] = by_id.try_emplace(id);
    if (inserted) {
      it->second.image_id = id;
      const auto s = sizes.find(id);
      it->second.width = s != sizes.end() ? s->second.first : width;
      it->second.height = s != sizes.end() ? s->second.second : height;
    }
    return it->second;
  };
  for (const auto& f : files_with_extension(gt_dir, ".txt")) {
    const auto id = f.stem().string();
    image_for(id).gts =
        parse_label_file(read_text(f), id, LabelMode::kAuto, ctx.classes)
            .annotations;
  }
  for (const auto& f : files_with_extension(pred_dir, ".txt")) {
    image_for(f.stem().string()).preds =
        parse_prediction_file(read_text(f), LabelMode::kAuto, ctx.classes);
  }
  std::vector<EvalImage> images;
  for (auto& [id, img] : by_id) images.push_back(std::move(img));

  EvalOptions options;
  if (o.geometry == "mask") {
    options.match.geometry = Geometry::kMask;
  } else if (o.geometry != "box") {
    throw Error(ErrorCode::kInvalidArgument, "--geometry must be box or mask");
  }
  options.min_confidence = o.min_conf;
  options.confusion_iou = o.confusion_iou;
  options.confusion_confidence = o.confusion_conf;
  const auto report = evaluate(images, ctx.classes, options);

  const auto out = ctx.resolve(o.out);
  auto table_path = out;
  table_path += ".csv";
  auto confusion_path = out;
  confusion_path += "_confusion.csv";
  write_text(table_path, write_report_table(report));
  write_text(confusion_path, write_confusion_table(report, ctx.classes));
  ctx.out << "images=" << images.size()
          << " precision=" << number(report.all.precision)
          << " recall=" << number(report.all.recall)
          << " mAP50=" << number(report.all.ap50)
          << " mAP50-95=" << number(report.all.ap50_95)
          << " report=" << table_path.string()
          << " confusion=" << confusion_path.string() << '\n';
}

// ---------------------------------------------------------------- serve

struct ServeOptions {
  std::string listen = "0.0.0.0:8080";
  std::size_t max_payload = 25u * 1024u * 1024u;
  std::string upstream;
  long timeout_ms = 30000;
  std::string colors;
};

std::atomic<bool> g_stop_requested{false};

extern "C" void on_stop_signal(int) { g_stop_requested = true; }

void run_serve(Context& ctx, const ServeOptions& o) {
  ServiceConfig config;
  const auto colon = o.listen.rfind(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "--listen must be host:port");
  }
  config.host = o.listen.substr(0, colon);
  config.port = std::stoi(o.listen.substr(colon + 1));
  config.max_payload_bytes = o.max_payload;
  if (!o.upstream.empty()) config.upstream_url = o.upstream;
  config.upstream_timeout = std::chrono::milliseconds(o.timeout_ms);
  if (!o.colors.empty()) config.colors = parse_class_colors(o.colors);
  config.classes = ctx.classes;

  Service service(config);
  const int port = service.bind();
  ctx.out << "listening=" << config.host << ':' << port << '\n' << std::flush;

  g_stop_requested = false;
  std::signal(SIGINT, on_stop_signal);
  std::signal(SIGTERM, on_stop_signal);
  std::thread watcher([&service] {
    while (!g_stop_requested) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    service.begin_shutdown();
    service.stop();
  });
  service.listen();
  g_stop_requested = true;
  watcher.join();
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  Context ctx(out, err);
  std::string root = ".";

  CLI::App app{"Fluvial erosion mapping toolkit", "eroscan"};
  app.require_subcommand(1);
  app.add_option("--root", root, "Dataset root; relative paths resolve here");
  app.add_option("--data", ctx.data_yaml,
                 "Dataset config (YAML) supplying the class names");

  TileOptions tile;
  auto* tile_cmd = app.add_subcommand("tile", "Cut a raster into tiles");
  tile_cmd->add_option("--input", tile.input, "Source image")->required();
  tile_cmd->add_option("--gsd", tile.gsd, "Meters per pixel side");
  tile_cmd->add_option("--extent-m", tile.extent_m,
                       "Ground width of the raster in meters");
  auto* tile_m = tile_cmd->add_option("--tile-m", tile.tile_m,
                                      "Tile side in meters");
  auto* grid = tile_cmd->add_option("--grid", tile.grid, "Equal grid, RxC");
  tile_m->excludes(grid);
  tile_cmd->add_option("--out", tile.out, "Output directory");

  ConvertOptions convert;
  auto* convert_cmd =
      app.add_subcommand("convert", "Normalize label files or change layout");
  convert_cmd->add_option("--labels", convert.labels, "Label file or directory")
      ->required();
  convert_cmd->add_option("--to", convert.to, "bbox, polygon or auto")
      ->check(CLI::IsMember({"bbox", "polygon", "auto"}));
  convert_cmd->add_option("--out", convert.out, "Output file or directory")
      ->required();
  convert_cmd->add_flag("--predictions", convert.predictions,
                        "Inputs carry a trailing confidence");

  SplitOptions split;
  auto* split_cmd = app.add_subcommand("split", "Assign images to train/val/test");
  split_cmd->add_option("--frac", split.frac, "train,val,test fractions");
  split_cmd->add_option("--counts", split.counts,
                        "Explicit train,val,test counts");
  split_cmd->add_option("--seed", split.seed, "Shuffle seed");
  split_cmd->add_option("--images", split.images, "Unsplit image directory");
  split_cmd->add_option("--manifest", split.manifest,
                        "Write the manifest here instead of stdout");
  split_cmd->add_flag("--apply", split.apply,
                      "Move files into images/<split> and labels/<split>");

  AugmentOptions augment;
  auto* augment_cmd = app.add_subcommand("augment", "Expand a split dataset");
  augment_cmd->add_option("--in", augment.in, "Input dataset root")->required();
  augment_cmd->add_option("--out", augment.out, "Output dataset root")
      ->required();
  augment_cmd->add_option("--ops", augment.ops,
                          "Comma-separated variants, ops chained with '+'");
  augment_cmd->add_option("--seed", augment.seed, "Seed for random choices");

  MaskOptions mask;
  auto* mask_cmd = app.add_subcommand("mask", "Rasterize one class to a mask");
  mask_cmd->add_option("--labels", mask.labels, "Label or prediction file")
      ->required();
  mask_cmd->add_option("--size", mask.size, "Mask size WxH");
  mask_cmd->add_option("--image", mask.image, "Image giving the mask size");
  mask_cmd->add_option("--class", mask.class_id, "Class id to keep");
  mask_cmd->add_option("--out", mask.out, "Mask PNG path");
  mask_cmd->add_option("--overlay", mask.overlay,
                       "Also write a class-colored overlay (needs --image)");
  mask_cmd->add_flag("--predictions", mask.predictions,
                     "Input lines carry a trailing confidence");
  mask_cmd->add_option("--min-conf", mask.min_conf,
                       "Drop predictions below this confidence");

  AreaOptions area_opts;
  auto* area_cmd = app.add_subcommand("area", "Count mask pixels and area");
  area_cmd->add_option("--mask", area_opts.mask, "Binary mask PNG")->required();
  auto* side = area_cmd->add_option("--px-side", area_opts.px_side,
                                    "Pixel side in meters");
  auto* px_area = area_cmd->add_option("--px-area", area_opts.px_area,
                                       "Pixel area in square meters");
  side->excludes(px_area);

  EvalOptionsCli eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against labels");
  eval_cmd->add_option("--gt", eval.gt, "Ground-truth label directory")
      ->required();
  eval_cmd->add_option("--pred", eval.pred, "Prediction directory")->required();
  eval_cmd->add_option("--geometry", eval.geometry, "box or mask")
      ->check(CLI::IsMember({"box", "mask"}));
  eval_cmd->add_option("--out", eval.out,
                       "Report path prefix (<out>.csv, <out>_confusion.csv)");
  eval_cmd->add_option("--size", eval.size, "Image size WxH when unknown");
  eval_cmd->add_option("--images", eval.images,
                       "Image directory giving per-image sizes");
  eval_cmd->add_option("--confusion-iou", eval.confusion_iou,
                       "IoU threshold for the confusion matrix");
  eval_cmd->add_option("--confusion-conf", eval.confusion_conf,
                       "Confidence threshold for the confusion matrix");
  eval_cmd->add_option("--min-conf", eval.min_conf,
                       "Ignore predictions below this confidence");

  ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the analysis HTTP service");
  serve_cmd->add_option("--listen", serve.listen, "host:port")
      ->envname("EROSCAN_LISTEN");
  serve_cmd->add_option("--max-payload", serve.max_payload,
                        "Maximum request size in bytes")
      ->envname("EROSCAN_MAX_PAYLOAD");
  serve_cmd->add_option("--upstream", serve.upstream,
                        "External predictor URL")
      ->envname("EROSCAN_UPSTREAM_URL");
  serve_cmd->add_option("--timeout-ms", serve.timeout_ms,
                        "Upstream timeout in milliseconds")
      ->envname("EROSCAN_UPSTREAM_TIMEOUT_MS");
  serve_cmd->add_option("--colors", serve.colors,
                        "Class colors, e.g. 3=0,200,0;4=255,140,0")
      ->envname("EROSCAN_CLASS_COLORS");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("eroscan");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: UsageError: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    ctx.root = root;
    if (!ctx.data_yaml.empty()) {
      ctx.classes =
          parse_dataset_yaml(read_text(ctx.resolve(ctx.data_yaml))).class_map;
    }
    if (tile_cmd->parsed()) {
      if (!tile.tile_m && tile.grid.empty()) {
        err << "error: UsageError: tile needs --tile-m or --grid\n";
        return kExitUsage;
      }
      run_tile(ctx, tile);
    } else if (convert_cmd->parsed()) {
      run_convert(ctx, convert);
    } else if (split_cmd->parsed()) {
      run_split(ctx, split);
    } else if (augment_cmd->parsed()) {
      run_augment(ctx, augment);
    } else if (mask_cmd->parsed()) {
      run_mask(ctx, mask);
    } else if (area_cmd->parsed()) {
      run_area(ctx, area_opts);
    } else if (eval_cmd->parsed()) {
      run_eval(ctx, eval);
    } else if (serve_cmd->parsed()) {
      run_serve(ctx, serve);
    }
  } catch (const Error& e) {
    err << "error: " << e.name() << ": " << e.what() << '\n';
    return kExitDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: IoError: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: InternalError: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitOk;
}

}  // namespace eroscan::cli
