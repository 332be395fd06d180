#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hoiforge/manifest.hpp"

namespace hoiforge {

enum class ReviewStatus { kPending, kAccepted, kRejected, kEdited };
enum class Decision { kAccept, kReject, kEdit };

std::string_view to_string(ReviewStatus status);
std::string_view to_string(Decision decision);
Decision parse_decision(std::string_view text);

struct ReviewAnnotation {
  /// "<image_id>#<index in the labeled manifest>"
  std::string annotation_id;
  HoiAnnotation annotation;
  ReviewStatus status = ReviewStatus::kPending;
  /// Effective edit when status is kEdited.
  std::optional<HoiAnnotation> edited;
};

struct ReviewItem {
  AnnotatedImage image;
  std::vector<ReviewAnnotation> annotations;

  /// Pending while any annotation is pending; otherwise rejected when every
  /// annotation was rejected, edited when any was edited, else accepted.
  ReviewStatus status() const;
};

std::string make_annotation_id(std::string_view image_id, std::size_t index);

struct Verdict {
  std::string annotation_id;
  Decision decision = Decision::kAccept;
  std::optional<HoiAnnotation> edited_annotation;
  std::string reviewer;
  /// UTC milliseconds.
  std::int64_t timestamp = 0;
};

/// Seeded uniform sample, without replacement, of round(fraction * N) kept
/// images (N = kept images in the manifest), returned in manifest order with
/// every annotation pending. Rounding is half away from zero.
std::vector<ReviewItem> sample_batch(const std::vector<AnnotatedImage>& manifest, double fraction, std::uint64_t seed);

struct BatchInfo {
  double fraction = 0.0;
  std::uint64_t seed = 0;
  /// hoi_id upper bound for edits; 0 disables the check.
  int num_categories = 0;
};

struct Progress {
  std::int64_t pending = 0;
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  std::int64_t edited = 0;
};

/// Batch plus the fold of every verdict applied so far.
class ReviewState {
 public:
  ReviewState() = default;
  ReviewState(BatchInfo info, std::vector<ReviewItem> items);

  const BatchInfo& info() const { return info_; }
  const std::vector<ReviewItem>& items() const { return items_; }
  std::uint64_t verdict_count() const { return next_seq_; }

  bool has_annotation(std::string_view annotation_id) const;
  const ReviewAnnotation& annotation(std::string_view annotation_id) const;

  /// Throws NotFoundError for an unknown annotation and ValidationError for
  /// a malformed verdict. Does not modify the state.
  void check(const Verdict& v) const;

  /// Applies v as log entry number verdict_count(). The verdict with the
  /// latest timestamp wins; equal timestamps go to the later log entry.
  void apply(const Verdict& v);

  Progress progress() const;

  friend bool operator==(const ReviewState& a, const ReviewState& b);

 private:
  struct Clock {
    std::int64_t timestamp = 0;
    std::uint64_t seq = 0;
  };

  BatchInfo info_;
  std::vector<ReviewItem> items_;
  std::map<std::string, std::pair<std::size_t, std::size_t>, std::less<>> index_;
  std::map<std::string, Clock, std::less<>> clocks_;
  std::uint64_t next_seq_ = 0;
};

/// Validates and applies one verdict, returning the new state.
ReviewState record_verdict(ReviewState state, const Verdict& v);

struct VerifiedExport {
  std::vector<AnnotatedImage> images;
  std::size_t annotation_count = 0;
};

/// Accepted annotations (source=verified) and edited ones in edited form
/// (source=edited). Images left with nothing to export are omitted.
VerifiedExport export_verified(const ReviewState& state);

/// Export header line followed by the manifest lines.
std::string export_to_jsonl(const ReviewState& state, const VerifiedExport& exported);
void write_export(const std::filesystem::path& path, const ReviewState& state);

// Verdict log: JSON lines. The first line is {"type":"batch",...} holding the
// batch; each later line is {"type":"verdict","seq":n,...}.
std::string batch_log_line(const ReviewState& state);
std::string verdict_log_line(const Verdict& v, std::uint64_t seq);
std::string verdict_to_json(const Verdict& v);
Verdict verdict_from_json(std::string_view text);
std::string item_to_json(const ReviewItem& item);
std::string progress_to_json(const Progress& p);

/// Folds a verdict log from its batch line onward.
ReviewState replay_log(std::string_view text);
ReviewState replay_log_file(const std::filesystem::path& path);

/// Append-only, fsync-on-append log file.
class VerdictLog {
 public:
  explicit VerdictLog(const std::filesystem::path& path);
  ~VerdictLog();
  VerdictLog(const VerdictLog&) = delete;
  VerdictLog& operator=(const VerdictLog&) = delete;

  /// Returns once the line is on stable storage.
  void append(std::string_view line);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

/// Thread-safe front end: one writer, lock-free snapshot readers.
class ReviewService {
 public:
  /// Opens `log_path`, replaying it when it already exists; otherwise writes
  /// the batch line for `initial`.
  ReviewService(const std::filesystem::path& log_path, ReviewState initial);

  std::shared_ptr<const ReviewState> snapshot() const;

  /// Validates, logs (durably), then applies. Returns the log sequence number.
  std::uint64_t submit(const Verdict& v);

 private:
  mutable std::mutex write_mutex_;
  std::unique_ptr<VerdictLog> log_;
  std::shared_ptr<const ReviewState> state_;
};

}  // namespace hoiforge
