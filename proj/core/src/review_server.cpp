#include "hoiforge/review_server.hpp"

#include <chrono>

#include "codec.hpp"
#include "hoiforge/error.hpp"
#include "httplib.h"

namespace hoiforge {

namespace {

using detail::ordered_json;

void send_json(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, ordered_json{{"error", message}}.dump());
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string content_type_for(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".png") return "image/png";
  if (ext == ".webp") return "image/webp";
  return "application/octet-stream";
}

}  // namespace

struct ReviewServer::Impl {
  ReviewService& service;
  std::filesystem::path data_root;
  httplib::Server server;

  Impl(ReviewService& s, std::filesystem::path root) : service(s), data_root(std::move(root)) { routes(); }

  void routes() {
    server.Get("/api/batch", [this](const httplib::Request& req, httplib::Response& res) {
      const auto state = service.snapshot();
      std::size_t cursor = 0, limit = 50;
      try {
        if (req.has_param("cursor")) cursor = std::stoul(req.get_param_value("cursor"));
        if (req.has_param("limit")) limit = std::stoul(req.get_param_value("limit"));
      } catch (const std::logic_error&) {
        return send_error(res, 400, "cursor and limit must be non-negative integers");
      }
      const auto& items = state->items();
      const std::size_t begin = std::min(cursor, items.size());
      const std::size_t end = std::min(items.size(), begin + limit);
      ordered_json body;
      ordered_json arr = ordered_json::array();
      for (std::size_t i = begin; i < end; ++i) arr.push_back(ordered_json::parse(item_to_json(items[i])));
      body["items"] = std::move(arr);
      body["next_cursor"] = end < items.size() ? ordered_json(end) : ordered_json(nullptr);
      body["total"] = items.size();
      send_json(res, 200, body.dump());
    });

    server.Get(R"(/api/image/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string image_id = req.matches[1];
      const auto state = service.snapshot();
      const auto& items = state->items();
      auto it = std::find_if(items.begin(), items.end(),
                             [&](const ReviewItem& item) { return item.image.image_id == image_id; });
      if (it == items.end()) return send_error(res, 404, "unknown image_id " + image_id);
      std::error_code ec;
      const auto root = std::filesystem::weakly_canonical(data_root, ec);
      const auto file = std::filesystem::weakly_canonical(data_root / it->image.file, ec);
      const auto rel = file.lexically_relative(root);
      if (ec || rel.empty() || *rel.begin() == "..") return send_error(res, 404, "image path escapes the data root");
      try {
        res.set_content(detail::read_text_file(file), content_type_for(file));
        res.status = 200;
      } catch (const IoError& e) {
        send_error(res, 404, e.what());
      }
    });

    server.Post("/api/verdict", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        const auto j = detail::parse_json(req.body, "verdict");
        Verdict v = verdict_from_json(req.body);
        if (v.reviewer.empty()) v.reviewer = req.get_header_value("X-Reviewer");
        if (!j.contains("timestamp")) v.timestamp = now_ms();
        const auto seq = service.submit(v);
        ordered_json body;
        body["seq"] = seq;
        body["verdict"] = ordered_json::parse(verdict_to_json(v));
        send_json(res, 200, body.dump());
      } catch (const NotFoundError& e) {
        send_error(res, 404, e.what());
      } catch (const IoError& e) {
        send_error(res, 500, e.what());
      } catch (const Error& e) {
        send_error(res, 400, e.what());
      }
    });

    server.Get("/api/progress", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, progress_to_json(service.snapshot()->progress()));
    });

    server.Get("/api/export", [this](const httplib::Request&, httplib::Response& res) {
      const auto state = service.snapshot();
      const auto exported = export_verified(*state);
      const auto text = export_to_jsonl(*state, exported);
      ordered_json body;
      ordered_json images = ordered_json::array();
      std::size_t pos = text.find('\n');
      body["header"] = ordered_json::parse(text.substr(0, pos)).at("header");
      for (const auto& img : exported.images) images.push_back(detail::encode_image(img));
      body["images"] = std::move(images);
      send_json(res, 200, body.dump());
    });
  }
};

ReviewServer::ReviewServer(ReviewService& service, std::filesystem::path data_root)
    : impl_(std::make_unique<Impl>(service, std::move(data_root))) {}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool ReviewServer::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }

bool ReviewServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

void ReviewServer::stop() {
  if (impl_) impl_->server.stop();
}

void ReviewServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace hoiforge
