#include "hoiforge/review.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <numeric>

#include "codec.hpp"
#include "hoiforge/error.hpp"
#include "hoiforge/rng.hpp"

namespace hoiforge {

using detail::json;
using detail::ordered_json;

std::string_view to_string(ReviewStatus status) {
  switch (status) {
    case ReviewStatus::kPending:
      return "pending";
    case ReviewStatus::kAccepted:
      return "accepted";
    case ReviewStatus::kRejected:
      return "rejected";
    case ReviewStatus::kEdited:
      return "edited";
  }
  return "pending";
}

std::string_view to_string(Decision decision) {
  switch (decision) {
    case Decision::kAccept:
      return "accept";
    case Decision::kReject:
      return "reject";
    case Decision::kEdit:
      return "edit";
  }
  return "accept";
}

Decision parse_decision(std::string_view text) {
  if (text == "accept") return Decision::kAccept;
  if (text == "reject") return Decision::kReject;
  if (text == "edit") return Decision::kEdit;
  throw ValidationError("unknown decision '" + std::string(text) + "'");
}

ReviewStatus ReviewItem::status() const {
  bool any_edit = false, all_rejected = true;
  for (const auto& a : annotations) {
    if (a.status == ReviewStatus::kPending) return ReviewStatus::kPending;
    any_edit = any_edit || a.status == ReviewStatus::kEdited;
    all_rejected = all_rejected && a.status == ReviewStatus::kRejected;
  }
  if (annotations.empty()) return ReviewStatus::kPending;
  if (any_edit) return ReviewStatus::kEdited;
  return all_rejected ? ReviewStatus::kRejected : ReviewStatus::kAccepted;
}

std::string make_annotation_id(std::string_view image_id, std::size_t index) {
  return std::string(image_id) + "#" + std::to_string(index);
}

namespace {

ReviewItem make_item(const AnnotatedImage& img) {
  ReviewItem item;
  item.image = img;
  for (std::size_t k = 0; k < img.annotations.size(); ++k) {
    item.annotations.push_back({make_annotation_id(img.image_id, k), img.annotations[k], ReviewStatus::kPending, {}});
  }
  return item;
}

ReviewStatus status_for(Decision d) {
  switch (d) {
    case Decision::kAccept:
      return ReviewStatus::kAccepted;
    case Decision::kReject:
      return ReviewStatus::kRejected;
    case Decision::kEdit:
      return ReviewStatus::kEdited;
  }
  return ReviewStatus::kPending;
}

}  // namespace

std::vector<ReviewItem> sample_batch(const std::vector<AnnotatedImage>& manifest, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ArgumentError("fraction must be in (0, 1]");
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    if (manifest[i].kept) kept.push_back(i);
  }
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(kept.size())));
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) std::swap(kept[i], kept[i + rng.below(kept.size() - i)]);
  kept.resize(k);
  std::sort(kept.begin(), kept.end());
  std::vector<ReviewItem> out;
  out.reserve(k);
  for (std::size_t i : kept) out.push_back(make_item(manifest[i]));
  return out;
}

ReviewState::ReviewState(BatchInfo info, std::vector<ReviewItem> items) : info_(info), items_(std::move(items)) {
  for (std::size_t i = 0; i < items_.size(); ++i) {
    for (std::size_t k = 0; k < items_[i].annotations.size(); ++k) {
      if (!index_.emplace(items_[i].annotations[k].annotation_id, std::make_pair(i, k)).second) {
        throw ValidationError("duplicate annotation id " + items_[i].annotations[k].annotation_id);
      }
    }
  }
}

bool ReviewState::has_annotation(std::string_view annotation_id) const { return index_.contains(annotation_id); }

const ReviewAnnotation& ReviewState::annotation(std::string_view annotation_id) const {
  auto it = index_.find(annotation_id);
  if (it == index_.end()) throw NotFoundError("unknown annotation_id " + std::string(annotation_id));
  return items_[it->second.first].annotations[it->second.second];
}

void ReviewState::check(const Verdict& v) const {
  auto it = index_.find(v.annotation_id);
  if (it == index_.end()) throw NotFoundError("unknown annotation_id " + v.annotation_id);
  if (v.decision == Decision::kEdit) {
    if (!v.edited_annotation) throw ValidationError("edit verdict without edited_annotation");
    const auto& img = items_[it->second.first].image;
    const auto& e = *v.edited_annotation;
    for (const BBox* b : {&e.human_box, &e.object_box}) {
      if (!b->valid() || !b->within(img.width, img.height)) {
        throw ValidationError("edited annotation box invalid or outside the image");
      }
    }
    if (e.hoi_id < 0 || (info_.num_categories > 0 && e.hoi_id >= info_.num_categories)) {
      throw ValidationError("edited annotation hoi_id out of range");
    }
  }
}

void ReviewState::apply(const Verdict& v) {
  check(v);
  const std::uint64_t seq = next_seq_++;
  const auto [i, k] = index_.find(v.annotation_id)->second;
  auto clock = clocks_.find(v.annotation_id);
  if (clock != clocks_.end() && v.timestamp < clock->second.timestamp) return;
  clocks_[v.annotation_id] = Clock{v.timestamp, seq};
  auto& ann = items_[i].annotations[k];
  ann.status = status_for(v.decision);
  ann.edited.reset();
  if (v.decision == Decision::kEdit) {
    ann.edited = *v.edited_annotation;
    ann.edited->source = AnnotationSource::kEdited;
  }
}

Progress ReviewState::progress() const {
  Progress p;
  for (const auto& item : items_) {
    for (const auto& a : item.annotations) {
      switch (a.status) {
        case ReviewStatus::kPending:
          ++p.pending;
          break;
        case ReviewStatus::kAccepted:
          ++p.accepted;
          break;
        case ReviewStatus::kRejected:
          ++p.rejected;
          break;
        case ReviewStatus::kEdited:
          ++p.edited;
          break;
      }
    }
  }
  return p;
}

bool operator==(const ReviewState& a, const ReviewState& b) {
  if (a.items_.size() != b.items_.size() || a.next_seq_ != b.next_seq_) return false;
  for (std::size_t i = 0; i < a.items_.size(); ++i) {
    const auto& x = a.items_[i];
    const auto& y = b.items_[i];
    if (!(x.image == y.image) || x.annotations.size() != y.annotations.size()) return false;
    for (std::size_t k = 0; k < x.annotations.size(); ++k) {
      const auto& p = x.annotations[k];
      const auto& q = y.annotations[k];
      if (p.annotation_id != q.annotation_id || p.status != q.status || !(p.annotation == q.annotation) ||
          p.edited != q.edited) {
        return false;
      }
    }
  }
  return true;
}

ReviewState record_verdict(ReviewState state, const Verdict& v) {
  state.apply(v);
  return state;
}

VerifiedExport export_verified(const ReviewState& state) {
  VerifiedExport out;
  for (const auto& item : state.items()) {
    AnnotatedImage img = item.image;
    img.annotations.clear();
    img.kept = true;
    for (const auto& a : item.annotations) {
      if (a.status == ReviewStatus::kAccepted) {
        HoiAnnotation ann = a.annotation;
        ann.source = AnnotationSource::kVerified;
        img.annotations.push_back(ann);
      } else if (a.status == ReviewStatus::kEdited && a.edited) {
        HoiAnnotation ann = *a.edited;
        ann.source = AnnotationSource::kEdited;
        img.annotations.push_back(ann);
      }
    }
    if (img.annotations.empty()) continue;
    out.annotation_count += img.annotations.size();
    out.images.push_back(std::move(img));
  }
  return out;
}

std::string export_to_jsonl(const ReviewState& state, const VerifiedExport& exported) {
  ordered_json header;
  header["format"] = "hoiforge-verified-export";
  header["sampling_unit"] = "images";
  header["fraction"] = state.info().fraction;
  header["seed"] = state.info().seed;
  header["batch_images"] = state.items().size();
  header["exported_images"] = exported.images.size();
  header["exported_annotations"] = exported.annotation_count;
  std::string out = ordered_json{{"header", header}}.dump();
  out.push_back('\n');
  for (const auto& img : exported.images) {
    out += image_to_json_line(img);
    out.push_back('\n');
  }
  return out;
}

void write_export(const std::filesystem::path& path, const ReviewState& state) {
  detail::write_text_file(path, export_to_jsonl(state, export_verified(state)));
}

namespace {

ordered_json encode_verdict(const Verdict& v) {
  ordered_json j;
  j["annotation_id"] = v.annotation_id;
  j["decision"] = to_string(v.decision);
  if (v.edited_annotation) j["edited_annotation"] = detail::encode_annotation(*v.edited_annotation);
  j["reviewer"] = v.reviewer;
  j["timestamp"] = v.timestamp;
  return j;
}

Verdict decode_verdict(const json& j, std::string_view where) {
  Verdict v;
  v.annotation_id = detail::get_as<std::string>(j, "annotation_id", where);
  v.decision = parse_decision(detail::get_as<std::string>(j, "decision", where));
  if (j.contains("edited_annotation") && !j.at("edited_annotation").is_null()) {
    v.edited_annotation = detail::decode_annotation(j.at("edited_annotation"), std::string(where) + ".edited_annotation");
  }
  v.reviewer = detail::get_or<std::string>(j, "reviewer", "", where);
  v.timestamp = detail::get_or<std::int64_t>(j, "timestamp", 0, where);
  return v;
}

}  // namespace

std::string verdict_to_json(const Verdict& v) { return encode_verdict(v).dump(); }

Verdict verdict_from_json(std::string_view text) { return decode_verdict(detail::parse_json(text, "verdict"), "verdict"); }

std::string batch_log_line(const ReviewState& state) {
  ordered_json j;
  j["type"] = "batch";
  j["sampling_unit"] = "images";
  j["fraction"] = state.info().fraction;
  j["seed"] = state.info().seed;
  j["num_categories"] = state.info().num_categories;
  ordered_json items = ordered_json::array();
  for (const auto& item : state.items()) items.push_back(detail::encode_image(item.image));
  j["items"] = std::move(items);
  return j.dump();
}

std::string verdict_log_line(const Verdict& v, std::uint64_t seq) {
  ordered_json j;
  j["type"] = "verdict";
  j["seq"] = seq;
  const ordered_json body = encode_verdict(v);
  for (const auto& [key, value] : body.items()) j[key] = value;
  return j.dump();
}

std::string item_to_json(const ReviewItem& item) {
  ordered_json j;
  j["image_id"] = item.image.image_id;
  j["file"] = item.image.file;
  j["width"] = item.image.width;
  j["height"] = item.image.height;
  j["prompt_triplets"] = item.image.prompt_triplets;
  j["status"] = to_string(item.status());
  ordered_json anns = ordered_json::array();
  for (const auto& a : item.annotations) {
    ordered_json aj = detail::encode_annotation(a.annotation);
    aj["annotation_id"] = a.annotation_id;
    aj["status"] = to_string(a.status);
    if (a.edited) aj["edited_annotation"] = detail::encode_annotation(*a.edited);
    anns.push_back(std::move(aj));
  }
  j["annotations"] = std::move(anns);
  return j.dump();
}

std::string progress_to_json(const Progress& p) {
  ordered_json j;
  j["pending"] = p.pending;
  j["accepted"] = p.accepted;
  j["rejected"] = p.rejected;
  j["edited"] = p.edited;
  return j.dump();
}

ReviewState replay_log(std::string_view text) {
  std::optional<ReviewState> state;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "verdict log line " + std::to_string(line_no);
    const auto j = detail::parse_json(line, where);
    const auto type = detail::get_as<std::string>(j, "type", where);
    if (type == "batch") {
      if (state) throw SchemaError(where + ": second batch record");
      BatchInfo info;
      info.fraction = detail::get_as<double>(j, "fraction", where);
      info.seed = detail::get_as<std::uint64_t>(j, "seed", where);
      info.num_categories = detail::get_or<int>(j, "num_categories", 0, where);
      std::vector<ReviewItem> items;
      const auto& arr = detail::require(j, "items", where);
      for (std::size_t i = 0; i < arr.size(); ++i) {
        items.push_back(make_item(detail::decode_image(arr[i], where + " item " + std::to_string(i))));
      }
      state.emplace(info, std::move(items));
    } else if (type == "verdict") {
      if (!state) throw SchemaError(where + ": verdict before the batch record");
      const auto seq = detail::get_as<std::uint64_t>(j, "seq", where);
      if (seq != state->verdict_count()) throw SchemaError(where + ": out-of-order seq " + std::to_string(seq));
      state->apply(decode_verdict(j, where));
    } else {
      throw SchemaError(where + ": unknown record type '" + type + "'");
    }
  }
  if (!state) throw SchemaError("verdict log has no batch record");
  return std::move(*state);
}

ReviewState replay_log_file(const std::filesystem::path& path) { return replay_log(detail::read_text_file(path)); }

VerdictLog::VerdictLog(const std::filesystem::path& path) : path_(path) {
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError("cannot open verdict log " + path.string() + ": " + std::strerror(errno));
}

VerdictLog::~VerdictLog() {
  if (fd_ >= 0) ::close(fd_);
}

void VerdictLog::append(std::string_view line) {
  std::string buf(line);
  buf.push_back('\n');
  std::size_t done = 0;
  while (done < buf.size()) {
    const ssize_t n = ::write(fd_, buf.data() + done, buf.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("verdict log write failed: " + std::string(std::strerror(errno)));
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd_) != 0) throw IoError("verdict log fsync failed: " + std::string(std::strerror(errno)));
}

ReviewService::ReviewService(const std::filesystem::path& log_path, ReviewState initial) {
  const bool resume = std::filesystem::exists(log_path) && std::filesystem::file_size(log_path) > 0;
  if (resume) {
    ReviewState replayed = replay_log_file(log_path);
    if (replayed.info().seed != initial.info().seed || replayed.info().fraction != initial.info().fraction) {
      throw ConfigError("existing verdict log " + log_path.string() + " was written for a different batch");
    }
    state_ = std::make_shared<const ReviewState>(std::move(replayed));
    log_ = std::make_unique<VerdictLog>(log_path);
  } else {
    log_ = std::make_unique<VerdictLog>(log_path);
    log_->append(batch_log_line(initial));
    state_ = std::make_shared<const ReviewState>(std::move(initial));
  }
}

std::shared_ptr<const ReviewState> ReviewService::snapshot() const { return std::atomic_load(&state_); }

std::uint64_t ReviewService::submit(const Verdict& v) {
  std::lock_guard lock(write_mutex_);
  auto current = std::atomic_load(&state_);
  current->check(v);
  const std::uint64_t seq = current->verdict_count();
  log_->append(verdict_log_line(v, seq));
  auto next = std::make_shared<ReviewState>(*current);
  next->apply(v);
  std::atomic_store(&state_, std::shared_ptr<const ReviewState>(std::move(next)));
  return seq;
}

}  // namespace hoiforge
