#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "nbbook/annotations.hpp"
#include "nbbook/error.hpp"
#include "nbbook/exporter.hpp"
#include "nbbook/overlay.hpp"

namespace nbbook {

/// Export timestamp that keeps output reproducible: the newest annotation's
/// creation time, or the epoch for an unannotated store.
inline std::int64_t default_export_time(const AnnotationStore& store) {
  std::int64_t t = 0;
  for (const auto& a : store.annotations) t = std::max(t, a.created_at);
  return t;
}

inline std::string_view export_mime(ExportFormat f) noexcept {
  switch (f) {
    case ExportFormat::Markdown: return "text/markdown; charset=utf-8";
    case ExportFormat::Html: return "text/html; charset=utf-8";
    case ExportFormat::SnapshotJson: return "application/json";
  }
  return "text/plain";
}

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks a free port
  std::string annotations_path;  // empty keeps annotations in memory only
  std::string viewer_dir;        // static bundle, optional
};

/// Local HTTP front for one overlay: GET /overlay, GET/POST /annotations,
/// GET /export. Reads run concurrently; annotation writes are serialized.
class OverlayServer {
 public:
  OverlayServer(std::string overlay_bytes, ServerConfig config)
      : overlay_bytes_(std::move(overlay_bytes)), overlay_(parse_overlay(overlay_bytes_)), config_(std::move(config)) {
    store_.notebook_id = overlay_.notebook_id;
    if (!config_.annotations_path.empty()) {
      std::ifstream in(config_.annotations_path, std::ios::binary);
      if (in) {
        std::stringstream buf;
        buf << in.rdbuf();
        store_ = load_store(buf.str(), overlay_.notebook_id, std::span<const Cell>(overlay_.cells), false);
      }
    }
    routes();
  }

  ~OverlayServer() { stop(); }

  OverlayServer(const OverlayServer&) = delete;
  OverlayServer& operator=(const OverlayServer&) = delete;

  /// Binds and starts serving on a background thread; returns the bound port.
  int start() {
    int port = config_.port;
    if (port == 0) {
      port = http_.bind_to_any_port(config_.host);
      if (port < 0) throw std::runtime_error("cannot bind " + config_.host);
    } else if (!http_.bind_to_port(config_.host, port)) {
      throw std::runtime_error("cannot bind " + config_.host + ":" + std::to_string(port));
    }
    thread_ = std::thread([this] { http_.listen_after_bind(); });
    http_.wait_until_ready();
    return port;
  }

  void wait() {
    if (thread_.joinable()) thread_.join();
  }

  void stop() {
    if (http_.is_running()) http_.stop();
    if (thread_.joinable()) thread_.join();
  }

  AnnotationStore annotations() const {
    std::lock_guard lock(mutex_);
    return store_;
  }

 private:
  static void send_error(httplib::Response& res, int status, std::string_view name, std::string_view message) {
    nlohmann::ordered_json j;
    j["error"] = std::string(name);
    j["message"] = std::string(message);
    res.status = status;
    res.set_content(j.dump(), "application/json");
  }

  static int status_for(ErrorKind k) noexcept {
    switch (k) {
      case ErrorKind::AnchorOutOfBounds:
      case ErrorKind::UnknownCell: return 422;
      case ErrorKind::DuplicateAnnotationId: return 409;
      default: return 400;
    }
  }

  void persist() const {
    if (config_.annotations_path.empty()) return;
    const std::string tmp = config_.annotations_path + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << save_store(store_);
    }
    std::rename(tmp.c_str(), config_.annotations_path.c_str());
  }

  void routes() {
    http_.Get("/overlay", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(overlay_bytes_, "application/json");
    });

    http_.Get("/annotations", [this](const httplib::Request&, httplib::Response& res) {
      std::string body;
      {
        std::lock_guard lock(mutex_);
        body = save_store(store_);
      }
      res.set_content(body, "application/json");
    });

    http_.Post("/annotations", [this](const httplib::Request& req, httplib::Response& res) {
      auto j = nlohmann::json::parse(req.body, nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        send_error(res, 400, "MalformedJson", "request body is not a JSON object");
        return;
      }
      if (!j.contains("created_at")) {
        const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count();
        j["created_at"] = text::format_iso8601(now);
      }
      try {
        const Annotation ann = annotation_from_json(j, ErrorKind::MalformedJson);
        std::lock_guard lock(mutex_);
        store_ = add_annotation(store_, ann, overlay_.cells);
        persist();
        res.status = 201;
        res.set_content(annotation_json(store_.annotations.back()).dump(), "application/json");
      } catch (const Error& e) {
        send_error(res, status_for(e.kind()), e.name(), e.what());
      }
    });

    http_.Get("/export", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        const auto format = parse_export_format(req.has_param("format") ? req.get_param_value("format") : "snapshot-json");
        const auto vs = parse_expand_spec(overlay_, req.has_param("expand") ? req.get_param_value("expand") : "none");
        AnnotationStore store;
        {
          std::lock_guard lock(mutex_);
          store = store_;
        }
        ExportOptions opts;
        opts.exported_at = default_export_time(store);
        const auto result = export_document(overlay_, store, vs, format, opts);
        res.set_content(result.document, std::string(export_mime(format)));
      } catch (const Error& e) {
        send_error(res, 400, e.name(), e.what());
      }
    });

    if (!config_.viewer_dir.empty()) http_.set_mount_point("/", config_.viewer_dir);
  }

  std::string overlay_bytes_;
  OverlayDocument overlay_;
  ServerConfig config_;
  mutable std::mutex mutex_;
  AnnotationStore store_;
  httplib::Server http_;
  std::thread thread_;
};

}  // namespace nbbook
