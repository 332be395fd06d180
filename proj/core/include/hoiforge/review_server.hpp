#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "hoiforge/review.hpp"

namespace hoiforge {

/// HTTP front end for a ReviewService.
///
///   GET  /api/batch?cursor=C&limit=L  -> {"items": [...], "next_cursor": int|null, "total": int}
///   GET  /api/image/{image_id}        -> image bytes, read from data_root / item.file
///   POST /api/verdict                 -> {"seq": int, "verdict": {...}}; the reviewer falls back
///                                        to the X-Reviewer header, the timestamp to server time
///   GET  /api/progress                -> {"pending", "accepted", "rejected", "edited"}
///   GET  /api/export                  -> {"header": {...}, "images": [...]}
///
/// Errors are {"error": message} with 400 (validation), 404 (unknown id) or 500.
class ReviewServer {
 public:
  ReviewServer(ReviewService& service, std::filesystem::path data_root);
  ~ReviewServer();
  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  /// Binds an ephemeral port and returns it; -1 on failure.
  int bind_to_any_port(const std::string& host = "127.0.0.1");
  bool bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hoiforge
