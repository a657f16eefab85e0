#include "eroscan/service.hpp"

#include <httplib.h>
#include <openssl/evp.h>

#include <json.hpp>

#include "eroscan/error.hpp"
#include "eroscan/imageio.hpp"
#include "eroscan/predio.hpp"
#include "eroscan/version.hpp"

namespace eroscan {

namespace {

using nlohmann::json;

constexpr const char* kJson = "application/json";
constexpr const char* kMultipartBoundary = "eroscan-part-boundary-4c1d";

[[noreturn]] void bad_request(const std::string& code, const std::string& why) {
  throw ServiceError(400, code, why);
}

std::string error_json(const std::string& code, const std::string& message) {
  return json{{"error", code}, {"message", message}}.dump();
}

std::string unit_name(AreaUnit u) { return u == AreaUnit::kM2 ? "m2" : "px"; }

AreaUnit parse_unit(std::string_view s) {
  if (s == "px") return AreaUnit::kPx;
  if (s == "m2") return AreaUnit::kM2;
  bad_request("MalformedRequest", "unit must be 'px' or 'm2'");
}

double parse_positive(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  bad_request("MalformedRequest", std::string(what) + " must be a positive number");
}

PixelScale make_scale(std::string_view mode, double value) {
  try {
    if (mode == "pixel_side_m") return PixelScale::side(value);
    if (mode == "pixel_area_m2") return PixelScale::area(value);
  } catch (const Error& e) {
    bad_request("MalformedRequest", e.what());
  }
  bad_request("MalformedRequest",
              "pixel_scale.mode must be 'pixel_side_m' or 'pixel_area_m2'");
}

AnalyzeRequest request_from_json(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    bad_request("MalformedRequest", std::string("body is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("image") || !doc["image"].is_string()) {
    bad_request("MalformedRequest", "body needs a base64 'image' string");
  }
  AnalyzeRequest req;
  req.image = base64_decode(doc["image"].get<std::string>());
  if (doc.contains("predictions") && !doc["predictions"].is_null()) {
    if (!doc["predictions"].is_string()) {
      bad_request("MalformedPredictions", "predictions must be a string");
    }
    req.predictions = doc["predictions"].get<std::string>();
  }
  if (doc.contains("unit")) {
    if (!doc["unit"].is_string()) bad_request("MalformedRequest", "bad unit");
    req.unit = parse_unit(doc["unit"].get<std::string>());
  }
  if (doc.contains("pixel_scale") && !doc["pixel_scale"].is_null()) {
    const auto& s = doc["pixel_scale"];
    if (!s.is_object() || !s.contains("mode") || !s["mode"].is_string() ||
        !s.contains("value") || !s["value"].is_number()) {
      bad_request("MalformedRequest",
                  "pixel_scale needs a string mode and a numeric value");
    }
    req.pixel_scale =
        make_scale(s["mode"].get<std::string>(), s["value"].get<double>());
  }
  if (doc.contains("min_confidence")) {
    if (!doc["min_confidence"].is_number()) {
      bad_request("MalformedRequest", "min_confidence must be a number");
    }
    req.min_confidence = doc["min_confidence"].get<double>();
  }
  return req;
}

AnalyzeRequest request_from_multipart(const httplib::Request& http) {
  if (!http.has_file("image")) {
    bad_request("MalformedRequest", "multipart body needs an 'image' part");
  }
  AnalyzeRequest req;
  const auto image = http.get_file_value("image");
  req.image.assign(image.content.begin(), image.content.end());
  if (http.has_file("predictions")) {
    req.predictions = http.get_file_value("predictions").content;
  }
  if (http.has_file("unit")) {
    req.unit = parse_unit(http.get_file_value("unit").content);
  }
  if (http.has_file("px_side")) {
    req.pixel_scale = PixelScale::side(
        parse_positive(http.get_file_value("px_side").content, "px_side"));
  } else if (http.has_file("px_area")) {
    req.pixel_scale = PixelScale::area(
        parse_positive(http.get_file_value("px_area").content, "px_area"));
  }
  if (http.has_file("min_confidence")) {
    try {
      req.min_confidence = std::stod(http.get_file_value("min_confidence").content);
    } catch (const std::exception&) {
      bad_request("MalformedRequest", "min_confidence must be a number");
    }
  }
  return req;
}

std::string multipart_part(const std::string& name, const std::string& type,
                           const std::string& filename,
                           std::string_view content) {
  std::string part = "--";
  part += kMultipartBoundary;
  part += "\r\nContent-Disposition: form-data; name=\"" + name + "\"";
  if (!filename.empty()) part += "; filename=\"" + filename + "\"";
  part += "\r\nContent-Type: " + type + "\r\n\r\n";
  part += content;
  part += "\r\n";
  return part;
}

std::string_view as_text(const std::vector<std::uint8_t>& bytes) {
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

void send_error(httplib::Response& res, const ServiceError& e) {
  res.status = e.status();
  res.set_content(error_json(e.code(), e.what()), kJson);
}

}  // namespace

ClassColors parse_class_colors(std::string_view text, ClassColors base) {
  auto fail = [&]() {
    throw Error(ErrorCode::kInvalidArgument,
                "class colors must look like '3=0,200,0;4=255,140,0', got '" +
                    std::string(text) + "'");
  };
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string entry(text.substr(start, end - start));
    start = end + 1;
    if (entry.empty()) continue;
    int id = 0, r = 0, g = 0, b = 0;
    char tail = 0;
    if (std::sscanf(entry.c_str(), "%d=%d,%d,%d%c", &id, &r, &g, &b, &tail) !=
        4) {
      fail();
    }
    for (int v : {r, g, b}) {
      if (v < 0 || v > 255) fail();
    }
    base[id] = {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                static_cast<std::uint8_t>(b)};
  }
  return base;
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::string clean;
  clean.reserve(text.size());
  for (char c : text) {
    if (c != '\n' && c != '\r' && c != ' ') clean += c;
  }
  if (clean.size() % 4 != 0) {
    bad_request("MalformedRequest", "image is not valid base64");
  }
  std::vector<std::uint8_t> out(3 * clean.size() / 4);
  const int n = EVP_DecodeBlock(
      out.data(), reinterpret_cast<const unsigned char*>(clean.data()),
      static_cast<int>(clean.size()));
  if (n < 0) bad_request("MalformedRequest", "image is not valid base64");
  std::size_t padding = 0;
  if (!clean.empty() && clean.back() == '=') ++padding;
  if (clean.size() > 1 && clean[clean.size() - 2] == '=') ++padding;
  out.resize(static_cast<std::size_t>(n) - padding);
  return out;
}

AnalyzeResponse analyze(const AnalyzeRequest& request,
                        const ServiceConfig& config,
                        const UpstreamPredictor* upstream) {
  if (request.image.size() > config.max_payload_bytes) {
    throw ServiceError(413, "PayloadTooLarge",
                       "image exceeds " +
                           std::to_string(config.max_payload_bytes) + " bytes");
  }
  if (detect_format(request.image) == ImageFormat::kUnknown) {
    bad_request("UnsupportedFormat", "only .png and .jpg images are accepted");
  }
  Raster image;
  try {
    image = decode_image(request.image);
  } catch (const Error& e) {
    bad_request("UnsupportedFormat", e.what());
  }
  if (request.unit == AreaUnit::kM2 && !request.pixel_scale) {
    bad_request("MissingPixelScale", "unit m2 needs a pixel_scale");
  }
  if (!(request.min_confidence >= 0.0 && request.min_confidence <= 1.0)) {
    bad_request("MalformedRequest", "min_confidence must be in [0,1]");
  }

  std::string lines;
  if (request.predictions) {
    lines = *request.predictions;
  } else if (upstream) {
    lines = upstream->predict(request.image);
  } else {
    throw ServiceError(422, "NoPredictionsAvailable",
                       "no predictions supplied and no upstream predictor "
                       "configured");
  }

  std::vector<Prediction> preds;
  try {
    preds = confidence_filter(
        parse_prediction_file(lines, LabelMode::kAuto, config.classes),
        request.min_confidence);
  } catch (const Error& e) {
    bad_request("MalformedPredictions",
                std::string(e.name()) + ": " + e.what());
  }

  AnalyzeResponse out;
  out.width = image.width();
  out.height = image.height();
  out.unit = request.unit;
  const auto masks =
      rasterize_classes(preds, config.classes, image.width(), image.height());
  const auto erosion = filter_class(masks, config.erosion_class, config.classes);
  out.area = area(erosion, request.unit == AreaUnit::kM2
                               ? request.pixel_scale
                               : std::optional<PixelScale>{});
  out.overlay_png = encode_png(overlay(image, masks, config.colors));
  out.erosion_mask_png = encode_png(erosion.to_raster());
  for (int c = 0; c < config.classes.size(); ++c) out.per_class_counts[c] = 0;
  for (const auto& p : preds) ++out.per_class_counts[p.class_id];
  return out;
}

std::string analyze_response_json(const AnalyzeResponse& response,
                                  const ClassMap& classes, bool embed_images) {
  json area = {{"pixel_count", response.area.pixel_count},
               {"area_px", response.area.area_px}};
  if (response.area.area_m2) area["area_m2"] = *response.area.area_m2;
  json counts = json::object();
  for (const auto& [id, n] : response.per_class_counts) {
    counts[std::to_string(id)] = {{"name", classes.name(id)}, {"instances", n}};
  }
  json doc = {{"width", response.width},
              {"height", response.height},
              {"unit", unit_name(response.unit)},
              {"area", area},
              {"per_class_counts", counts}};
  if (embed_images) {
    doc["overlay_png"] = base64_encode(response.overlay_png);
    doc["erosion_mask_png"] = base64_encode(response.erosion_mask_png);
  }
  return doc.dump(2);
}

struct Service::Impl {
  httplib::Server server;
};

Service::Service(ServiceConfig config)
    : config_(std::move(config)), impl_(std::make_unique<Impl>()) {
  if (config_.upstream_url) {
    upstream_.emplace(*config_.upstream_url, config_.upstream_timeout,
                      config_.classes);
  }
  auto& server = impl_->server;
  server.set_payload_max_length(config_.max_payload_bytes);

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    std::string code = "HttpError";
    if (res.status == 413) code = "PayloadTooLarge";
    if (res.status == 404) code = "NotFound";
    if (res.status == 400) code = "MalformedRequest";
    res.set_content(error_json(code, httplib::status_message(res.status)),
                    kJson);
    return httplib::Server::HandlerResponse::Handled;
  });

  server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
    const bool ok = ready_;
    res.status = ok ? 200 : 503;
    res.set_content(json{{"status", ok ? "ready" : "not-ready"},
                         {"version", kVersion}}
                        .dump(),
                    kJson);
  });

  server.Post("/analyze", [this](const httplib::Request& req,
                                 httplib::Response& res) {
    try {
      const AnalyzeRequest request = req.is_multipart_form_data()
                                         ? request_from_multipart(req)
                                         : request_from_json(req.body);
      const auto result = analyze(request, config_,
                                  upstream_ ? &*upstream_ : nullptr);
      const auto accept = req.get_header_value("Accept");
      if (accept.find("multipart/") != std::string::npos) {
        std::string body =
            multipart_part("result", kJson, "",
                           analyze_response_json(result, config_.classes, false));
        body += multipart_part("overlay", "image/png", "segmented.png",
                               as_text(result.overlay_png));
        body += multipart_part("erosion_mask", "image/png", "erosion_mask.png",
                               as_text(result.erosion_mask_png));
        body += std::string("--") + kMultipartBoundary + "--\r\n";
        res.set_content(body, std::string("multipart/form-data; boundary=") +
                                  kMultipartBoundary);
      } else {
        res.set_content(analyze_response_json(result, config_.classes, true),
                        kJson);
      }
    } catch (const ServiceError& e) {
      send_error(res, e);
    } catch (const std::exception& e) {
      send_error(res, ServiceError(500, "InternalError", e.what()));
    }
  });

  server.Post("/predict-proxy", [this](const httplib::Request& req,
                                       httplib::Response& res) {
    try {
      if (!upstream_) {
        throw ServiceError(422, "NoPredictionsAvailable",
                           "no upstream predictor configured");
      }
      std::vector<std::uint8_t> image;
      if (req.is_multipart_form_data()) {
        if (!req.has_file("image")) {
          bad_request("MalformedRequest", "multipart body needs an 'image' part");
        }
        const auto& c = req.get_file_value("image").content;
        image.assign(c.begin(), c.end());
      } else {
        image.assign(req.body.begin(), req.body.end());
      }
      if (detect_format(image) == ImageFormat::kUnknown) {
        bad_request("UnsupportedFormat", "only .png and .jpg images are accepted");
      }
      res.set_content(json{{"predictions", upstream_->predict(image)}}.dump(),
                      kJson);
    } catch (const ServiceError& e) {
      send_error(res, e);
    } catch (const std::exception& e) {
      send_error(res, ServiceError(500, "InternalError", e.what()));
    }
  });
}

Service::~Service() { stop(); }

int Service::bind() {
  auto& server = impl_->server;
  int port = config_.port;
  if (port == 0) {
    port = server.bind_to_any_port(config_.host);
  } else if (!server.bind_to_port(config_.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw Error(ErrorCode::kIoError, "cannot bind " + config_.host + ":" +
                                         std::to_string(config_.port));
  }
  config_.port = port;
  ready_ = true;
  return port;
}

void Service::listen() {
  impl_->server.listen_after_bind();
  ready_ = false;
}

void Service::stop() {
  ready_ = false;
  if (impl_) impl_->server.stop();
}

}  // namespace eroscan
