#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eroscan/labelset.hpp"
#include "eroscan/mask.hpp"

namespace eroscan {

struct ServiceConfig {
  std::string host = "0.0.0.0";
  int port = 8080;
  std::size_t max_payload_bytes = 25u * 1024u * 1024u;
  /// External inference endpoint, e.g. "http://127.0.0.1:9000/predict".
  std::optional<std::string> upstream_url;
  std::chrono::milliseconds upstream_timeout{30000};
  ClassColors colors = default_class_colors();
  ClassMap classes = ClassMap::defaults();
  int erosion_class = ClassMap::kErosion;
};

/// `id=r,g,b` entries separated by ';', e.g. "3=0,200,0;4=255,140,0".
/// Entries override the defaults. Throws InvalidArgument.
ClassColors parse_class_colors(std::string_view text,
                               ClassColors base = default_class_colors());

/// An HTTP-level failure: status code plus a machine-readable error class.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}

  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }

 private:
  int status_;
  std::string code_;
};

enum class AreaUnit { kPx, kM2 };

struct AnalyzeRequest {
  std::vector<std::uint8_t> image;
  /// Extended-YOLO prediction lines; an empty string is a valid "no objects"
  /// payload, an absent one asks the upstream predictor.
  std::optional<std::string> predictions;
  AreaUnit unit = AreaUnit::kPx;
  std::optional<PixelScale> pixel_scale;
  double min_confidence = 0.0;
};

struct AnalyzeResponse {
  int width = 0;
  int height = 0;
  AreaUnit unit = AreaUnit::kPx;
  std::vector<std::uint8_t> overlay_png;
  std::vector<std::uint8_t> erosion_mask_png;
  AreaResult area;
  std::map<int, std::size_t> per_class_counts;
};

/// Forwards images to an external inference service and normalizes its
/// answer into prediction lines.
///
/// The upstream receives the raw image bytes (Content-Type image/png or
/// image/jpeg) and must answer with
/// {"detections": [{"class_id": 3, "confidence": 0.9,
///                  "polygon": [[x, y], ...]} | "bbox": [xc, yc, w, h]}]}
/// in normalized coordinates.
class UpstreamPredictor {
 public:
  UpstreamPredictor(std::string url, std::chrono::milliseconds timeout,
                    ClassMap classes = ClassMap::defaults());

  /// Throws ServiceError 502 UpstreamUnavailable, 504 UpstreamTimeout or 422
  /// UpstreamInvalidPrediction.
  std::string predict(const std::vector<std::uint8_t>& image) const;

  const std::string& url() const noexcept { return url_; }

 private:
  std::string url_;
  std::string base_;
  std::string path_;
  std::chrono::milliseconds timeout_;
  ClassMap classes_;
};

/// Converts an upstream JSON answer into prediction lines. Throws
/// ServiceError 422 UpstreamInvalidPrediction or 502 UpstreamBadResponse.
std::string normalize_upstream_response(std::string_view body,
                                        const ClassMap& classes);

/// Runs predictions -> erosion mask -> area -> overlay for one request.
/// Throws ServiceError with the status the HTTP layer reports.
AnalyzeResponse analyze(const AnalyzeRequest& request,
                        const ServiceConfig& config,
                        const UpstreamPredictor* upstream);

/// Structured response document; PNGs are base64 when `embed_images` is set.
std::string analyze_response_json(const AnalyzeResponse& response,
                                  const ClassMap& classes, bool embed_images);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
/// Throws ServiceError 400 MalformedRequest on invalid input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// HTTP/1.1 front end for /analyze, /health and /predict-proxy.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds host:port (port 0 picks a free port) and returns the bound port.
  int bind();
  /// Serves until stop(); call after bind().
  void listen();
  /// Marks the service not-ready; /health reports it while requests drain.
  void begin_shutdown() { ready_ = false; }
  void stop();

  bool ready() const noexcept { return ready_; }
  const ServiceConfig& config() const noexcept { return config_; }

 private:
  struct Impl;

  ServiceConfig config_;
  std::optional<UpstreamPredictor> upstream_;
  std::atomic<bool> ready_{false};
  std::unique_ptr<Impl> impl_;
};

}  // namespace eroscan
