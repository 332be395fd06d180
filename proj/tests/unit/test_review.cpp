#include <fstream>
#include <random>
#include <set>

#include "doctest.h"
#include "hoiforge/error.hpp"
#include "hoiforge/review.hpp"
#include "support/review_fixture.hpp"

using namespace hoiforge;

namespace {

ReviewState state_for(int images, double fraction = 1.0, std::uint64_t seed = 1) {
  return ReviewState({fraction, seed, 7}, sample_batch(fixtures::review_manifest(images), fraction, seed));
}

Verdict verdict(std::string id, Decision d, std::int64_t ts) {
  Verdict v;
  v.annotation_id = std::move(id);
  v.decision = d;
  v.reviewer = "r1";
  v.timestamp = ts;
  return v;
}

Verdict edit(std::string id, std::int64_t ts, BBox human) {
  auto v = verdict(std::move(id), Decision::kEdit, ts);
  HoiAnnotation a;
  a.human_box = human;
  a.object_box = {120, 50, 220, 150};
  a.hoi_id = 2;
  v.edited_annotation = a;
  return v;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("batch size follows rounding of the kept count") {
  CHECK(sample_batch(fixtures::review_manifest(100), 0.05, 3).size() == 5);
  CHECK(sample_batch(fixtures::review_manifest(30), 0.05, 3).size() == 2);  // 1.5 rounds away from zero
  CHECK(sample_batch({}, 0.05, 3).empty());
  auto manifest = fixtures::review_manifest(146772, 1);
  CHECK(sample_batch(manifest, 0.05, 9).size() == 7339);
  manifest[0].kept = false;
  manifest[0].annotations.clear();
  const auto batch = sample_batch(manifest, 1.0, 9);
  CHECK(batch.size() == 146771);
  CHECK_THROWS_AS(sample_batch(manifest, 0.0, 1), ArgumentError);
  CHECK_THROWS_AS(sample_batch(manifest, 1.5, 1), ArgumentError);
}

TEST_CASE("batches are deterministic, ordered and pending") {
  const auto manifest = fixtures::review_manifest(200);
  const auto a = sample_batch(manifest, 0.1, 5);
  const auto b = sample_batch(manifest, 0.1, 5);
  const auto c = sample_batch(manifest, 0.1, 6);
  REQUIRE(a.size() == 20);
  std::vector<std::string> ids_a, ids_c;
  for (const auto& item : a) ids_a.push_back(item.image.image_id);
  for (const auto& item : c) ids_c.push_back(item.image.image_id);
  std::vector<std::string> ids_b;
  for (const auto& item : b) ids_b.push_back(item.image.image_id);
  CHECK(ids_a == ids_b);
  CHECK(ids_a != ids_c);
  CHECK(std::set<std::string>(ids_a.begin(), ids_a.end()).size() == 20);
  for (const auto& item : a) {
    CHECK(item.status() == ReviewStatus::kPending);
    for (std::size_t k = 0; k < item.annotations.size(); ++k) {
      CHECK(item.annotations[k].annotation_id == make_annotation_id(item.image.image_id, k));
    }
  }
}

TEST_CASE("last write wins by timestamp, ties by log order") {
  auto s = state_for(3);
  const auto id = make_annotation_id("img0", 0);
  s = record_verdict(s, verdict(id, Decision::kAccept, 10));
  s = record_verdict(s, verdict(id, Decision::kReject, 20));
  CHECK(s.annotation(id).status == ReviewStatus::kRejected);
  s = record_verdict(s, verdict(id, Decision::kAccept, 15));  // older, ignored
  CHECK(s.annotation(id).status == ReviewStatus::kRejected);
  s = record_verdict(s, verdict(id, Decision::kAccept, 20));  // same time, later entry
  CHECK(s.annotation(id).status == ReviewStatus::kAccepted);
  CHECK(s.verdict_count() == 4);
}

TEST_CASE("verdict errors") {
  auto s = state_for(3);
  CHECK_THROWS_AS(record_verdict(s, verdict("nope#0", Decision::kAccept, 1)), NotFoundError);
  CHECK_THROWS_AS(record_verdict(s, verdict(make_annotation_id("img1", 0), Decision::kEdit, 1)), ValidationError);
  CHECK_THROWS_AS(record_verdict(s, edit(make_annotation_id("img1", 0), 1, {0, 0, 900, 10})), ValidationError);
  auto bad = edit(make_annotation_id("img1", 0), 1, {0, 0, 10, 10});
  bad.edited_annotation->hoi_id = 7;
  CHECK_THROWS_AS(record_verdict(s, bad), ValidationError);
  CHECK(s.verdict_count() == 0);
  CHECK_THROWS_AS(parse_decision("maybe"), ValidationError);
}

TEST_CASE("item status aggregates its annotations") {
  auto s = state_for(3);  // img2 holds three annotations
  const auto a0 = make_annotation_id("img2", 0), a1 = make_annotation_id("img2", 1), a2 = make_annotation_id("img2", 2);
  auto item_status = [&] { return s.items()[2].status(); };
  s = record_verdict(s, verdict(a0, Decision::kReject, 1));
  CHECK(item_status() == ReviewStatus::kPending);
  s = record_verdict(s, verdict(a1, Decision::kReject, 1));
  s = record_verdict(s, verdict(a2, Decision::kReject, 1));
  CHECK(item_status() == ReviewStatus::kRejected);
  s = record_verdict(s, verdict(a2, Decision::kAccept, 2));
  CHECK(item_status() == ReviewStatus::kAccepted);
  s = record_verdict(s, edit(a1, 3, {1, 1, 50, 50}));
  CHECK(item_status() == ReviewStatus::kEdited);
}

TEST_CASE("export holds accepted and edited annotations only") {
  auto s = state_for(5);  // 1 + 2 + 3 + 1 + 2 annotations
  CHECK(export_verified(s).images.empty());
  s = record_verdict(s, verdict(make_annotation_id("img0", 0), Decision::kAccept, 1));
  s = record_verdict(s, verdict(make_annotation_id("img1", 0), Decision::kAccept, 1));
  s = record_verdict(s, verdict(make_annotation_id("img1", 1), Decision::kAccept, 1));
  s = record_verdict(s, verdict(make_annotation_id("img2", 0), Decision::kReject, 1));
  const auto three = export_verified(s);
  CHECK(three.annotation_count == 3);
  CHECK(three.images.size() == 2);
  for (const auto& img : three.images)
    for (const auto& a : img.annotations) CHECK(a.source == AnnotationSource::kVerified);

  const BBox moved{33, 44, 55, 66};
  s = record_verdict(s, edit(make_annotation_id("img3", 0), 1, moved));
  const auto four = export_verified(s);
  CHECK(four.annotation_count == 4);
  const auto& edited = four.images.back();
  CHECK(edited.image_id == "img3");
  CHECK(edited.annotations[0].human_box == moved);
  CHECK(edited.annotations[0].hoi_id == 2);
  CHECK(edited.annotations[0].source == AnnotationSource::kEdited);

  const auto text = export_to_jsonl(s, four);
  CHECK(text.starts_with("{\"header\""));
  CHECK(text.find("\"sampling_unit\":\"images\"") != std::string::npos);
  const auto back = parse_manifest(text);
  REQUIRE(back.size() == 3);
  CHECK(back[2] == edited);
}

TEST_CASE("replaying the log reproduces the state") {
  auto s = state_for(20);
  std::string log = batch_log_line(s) + "\n";
  std::mt19937_64 rng(8);
  std::vector<std::string> ids;
  for (const auto& item : s.items())
    for (const auto& a : item.annotations) ids.push_back(a.annotation_id);
  for (int i = 0; i < 200; ++i) {
    const auto& id = ids[rng() % ids.size()];
    const auto ts = static_cast<std::int64_t>(rng() % 50);
    const auto v = rng() % 3 == 0 ? edit(id, ts, {1, 2, 30.5, 40}) : verdict(id, rng() % 2 ? Decision::kAccept : Decision::kReject, ts);
    log += verdict_log_line(v, s.verdict_count()) + "\n";
    s = record_verdict(s, v);
  }
  const auto replayed = replay_log(log);
  CHECK(replayed == s);
  CHECK(export_to_jsonl(replayed, export_verified(replayed)) == export_to_jsonl(s, export_verified(s)));
}

TEST_CASE("malformed logs are rejected") {
  const auto s = state_for(2);
  const auto batch = batch_log_line(s) + "\n";
  const auto v = verdict_log_line(verdict(make_annotation_id("img0", 0), Decision::kAccept, 1), 0) + "\n";
  CHECK_NOTHROW(replay_log(batch + v));
  CHECK_THROWS_AS(replay_log(v + batch), SchemaError);
  CHECK_THROWS_AS(replay_log(batch + batch), SchemaError);
  CHECK_THROWS_AS(replay_log(""), SchemaError);
  CHECK_THROWS_AS(replay_log(batch + verdict_log_line(verdict(make_annotation_id("img0", 0), Decision::kAccept, 1), 3)),
                  SchemaError);
}

TEST_CASE("verdict json round trip") {
  const auto v = edit(make_annotation_id("img0", 0), 1234, {1, 2, 3, 4});
  const auto back = verdict_from_json(verdict_to_json(v));
  CHECK(back.annotation_id == v.annotation_id);
  CHECK(back.decision == Decision::kEdit);
  CHECK(back.timestamp == 1234);
  CHECK(back.reviewer == "r1");
  REQUIRE(back.edited_annotation.has_value());
  CHECK(back.edited_annotation->human_box == BBox{1, 2, 3, 4});
}

TEST_CASE("service persists verdicts and resumes from its log") {
  const auto dir = fixtures::scratch_dir("service");
  const auto log = dir / "verdicts.jsonl";
  const auto id = make_annotation_id("img1", 1);
  {
    ReviewService svc(log, state_for(4));
    CHECK(svc.submit(verdict(id, Decision::kAccept, 5)) == 0);
    CHECK(svc.submit(edit(make_annotation_id("img0", 0), 6, {5, 5, 15, 15})) == 1);
    CHECK_THROWS_AS(svc.submit(verdict("x#9", Decision::kAccept, 5)), NotFoundError);
    CHECK(svc.snapshot()->verdict_count() == 2);
  }
  const auto text = read_file(log);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  {
    ReviewService svc(log, state_for(4));
    const auto snap = svc.snapshot();
    CHECK(snap->annotation(id).status == ReviewStatus::kAccepted);
    CHECK(snap->annotation(make_annotation_id("img0", 0)).status == ReviewStatus::kEdited);
    CHECK(svc.submit(verdict(id, Decision::kReject, 7)) == 2);
    CHECK(snap->annotation(id).status == ReviewStatus::kAccepted);  // old snapshot unchanged
    CHECK(svc.snapshot()->annotation(id).status == ReviewStatus::kRejected);
  }
  CHECK_THROWS_AS(ReviewService(log, state_for(4, 1.0, 99)), ConfigError);
  CHECK(replay_log_file(log).verdict_count() == 3);
  std::filesystem::remove_all(dir);
}

TEST_CASE("progress counts annotations by status") {
  auto s = state_for(3);  // 6 annotations
  s = record_verdict(s, verdict(make_annotation_id("img0", 0), Decision::kAccept, 1));
  s = record_verdict(s, verdict(make_annotation_id("img1", 0), Decision::kReject, 1));
  s = record_verdict(s, edit(make_annotation_id("img1", 1), 1, {1, 1, 9, 9}));
  const auto p = s.progress();
  CHECK(p.pending == 3);
  CHECK(p.accepted == 1);
  CHECK(p.rejected == 1);
  CHECK(p.edited == 1);
  CHECK(progress_to_json(p).find("\"pending\":3") != std::string::npos);
}
