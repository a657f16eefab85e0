#include <httplib.h>

#include <json.hpp>

#include "eroscan/error.hpp"
#include "eroscan/imageio.hpp"
#include "eroscan/predio.hpp"
#include "eroscan/service.hpp"

namespace eroscan {

namespace {

using nlohmann::json;

[[noreturn]] void invalid_prediction(const std::string& why) {
  throw ServiceError(422, "UpstreamInvalidPrediction", why);
}

std::vector<NormPoint> read_polygon(const json& j) {
  if (!j.is_array()) invalid_prediction("polygon is not an array");
  std::vector<NormPoint> ring;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
        !p[1].is_number()) {
      invalid_prediction("polygon vertex is not an [x, y] pair");
    }
    ring.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return ring;
}

}  // namespace

std::string normalize_upstream_response(std::string_view body,
                                        const ClassMap& classes) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw ServiceError(502, "UpstreamBadResponse",
                       std::string("upstream answer is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("detections") ||
      !doc["detections"].is_array()) {
    throw ServiceError(502, "UpstreamBadResponse",
                       "upstream answer has no detections array");
  }
  std::vector<Prediction> preds;
  for (const auto& d : doc["detections"]) {
    if (!d.is_object() || !d.contains("class_id") ||
        !d["class_id"].is_number_integer() || !d.contains("confidence") ||
        !d["confidence"].is_number()) {
      invalid_prediction("detection needs integer class_id and confidence");
    }
    Prediction p;
    p.class_id = d["class_id"].get<int>();
    p.confidence = d["confidence"].get<double>();
    if (d.contains("polygon")) {
      p = make_polygon_annotation(p.class_id, read_polygon(d["polygon"]),
                                  p.confidence);
    } else if (d.contains("bbox") && d["bbox"].is_array() &&
               d["bbox"].size() == 4) {
      const auto& b = d["bbox"];
      for (const auto& v : b) {
        if (!v.is_number()) invalid_prediction("bbox entries must be numbers");
      }
      p.bbox = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                b[3].get<double>()};
    } else {
      invalid_prediction("detection has neither polygon nor bbox");
    }
    try {
      validate_annotation(p, classes);
    } catch (const Error& e) {
      invalid_prediction(std::string(e.name()) + ": " + e.what());
    }
    preds.push_back(std::move(p));
  }
  return serialize_predictions(preds, LabelMode::kAuto);
}

UpstreamPredictor::UpstreamPredictor(std::string url,
                                     std::chrono::milliseconds timeout,
                                     ClassMap classes)
    : url_(std::move(url)), timeout_(timeout), classes_(std::move(classes)) {
  constexpr std::string_view kScheme = "http://";
  if (url_.rfind(kScheme, 0) != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "upstream URL must start with http://");
  }
  const auto slash = url_.find('/', kScheme.size());
  base_ = url_.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : url_.substr(slash);
}

std::string UpstreamPredictor::predict(
    const std::vector<std::uint8_t>& image) const {
  httplib::Client client(base_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  const char* type =
      detect_format(image) == ImageFormat::kJpeg ? "image/jpeg" : "image/png";
  auto res = client.Post(path_, reinterpret_cast<const char*>(image.data()),
                         image.size(), type);
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
      throw ServiceError(504, "UpstreamTimeout",
                         "upstream predictor did not answer in time");
    }
    throw ServiceError(502, "UpstreamUnavailable",
                       "upstream predictor unreachable: " +
                           httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) {
    throw ServiceError(502, "UpstreamUnavailable",
                       "upstream predictor answered HTTP " +
                           std::to_string(res->status));
  }
  return normalize_upstream_response(res->body, classes_);
}

}  // namespace eroscan
