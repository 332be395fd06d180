#include <cmath>
#include <random>

#include "doctest.h"
#include "hoiforge/datastats.hpp"
#include "hoiforge/error.hpp"
#include "support/fixtures.hpp"

using namespace hoiforge;

namespace {

HoiAnnotation ann(CategoryId id, BBox h = {0, 0, 10, 10}, BBox o = {20, 20, 30, 30}) {
  HoiAnnotation a;
  a.human_box = h;
  a.object_box = o;
  a.hoi_id = id;
  return a;
}

AnnotatedImage kept_image(std::string id, std::vector<HoiAnnotation> anns) {
  auto img = fixtures::image(std::move(id), {anns.front().hoi_id}, {});
  img.annotations = std::move(anns);
  img.kept = true;
  return img;
}

CategoryHistogram random_hist(std::mt19937_64& rng, std::size_t k) {
  std::uniform_int_distribution<std::int64_t> d(0, 100);
  CategoryHistogram h;
  for (std::size_t i = 0; i < k; ++i) h.counts.push_back(d(rng));
  return h;
}

// Verbs ride/hold over bicycle/horse.
TripletVocabulary two_verb_vocab() {
  return TripletVocabulary({{0, "ride", "riding", "bicycle", 1},
                            {1, "hold", "holding", "bicycle", 1},
                            {2, "ride", "riding", "horse", 2},
                            {3, "hold", "holding", "horse", 2}});
}

void check_partition(const ZeroShotSplit& s, int k2) {
  for (CategoryId c : s.unseen_hoi) CHECK(s.seen_hoi.count(c) == 0);
  CHECK(static_cast<int>(s.unseen_hoi.size() + s.seen_hoi.size()) == k2);
}

}  // namespace

TEST_CASE("histogram counts instances and images") {
  std::vector<AnnotatedImage> m{kept_image("a", {ann(5), ann(5, {1, 1, 9, 9})}), kept_image("b", {ann(5), ann(2)})};
  const auto inst = histogram(m, 7, CountUnit::kInstances);
  const auto imgs = histogram(m, 7, CountUnit::kImages);
  CHECK(inst[5] == 3);
  CHECK(imgs[5] == 2);
  CHECK(inst[2] == 1);
  CHECK(inst.total() == 4);
  CHECK(histogram({}, 7, CountUnit::kImages).counts == std::vector<std::int64_t>(7, 0));
  CHECK_THROWS_AS(histogram(m, 5, CountUnit::kInstances), ValidationError);
}

TEST_CASE("dataset totals count distinct boxes per image") {
  std::vector<AnnotatedImage> m{
      kept_image("a", {ann(0), ann(1), ann(2, {0, 0, 10, 10}, {50, 50, 60, 60})}),
      kept_image("b", {ann(3)}),
  };
  const auto t = dataset_totals(m);
  CHECK(t.images == 2);
  CHECK(t.person_boxes == 2);
  CHECK(t.object_boxes == 3);
  CHECK(t.triplets == 4);
}

TEST_CASE("tail report uses strict inequality") {
  CategoryHistogram h{{49, 50, 51}, CountUnit::kImages};
  const auto r = tail_report(h, 50);
  CHECK(r.count_below == 1);
  CHECK(r.categories == std::vector<CategoryId>{0});
  CategoryHistogram zeros{std::vector<std::int64_t>(600, 0), CountUnit::kImages};
  CHECK(tail_report(zeros, 1).count_below == 600);
  CategoryHistogram mixed{{7, 3, 7, 1}, CountUnit::kImages};
  CHECK(tail_report(mixed, 10).categories == std::vector<CategoryId>{3, 1, 0, 2});
}

TEST_CASE("merge examples and errors") {
  CategoryHistogram a{{1, 2}, CountUnit::kImages};
  CategoryHistogram b{{3, 4}, CountUnit::kImages};
  CHECK(merge(a, b).counts == std::vector<std::int64_t>{4, 6});
  CHECK(merge(a, CategoryHistogram{{0, 0}, CountUnit::kImages}) == a);
  CHECK_THROWS_AS(merge(a, CategoryHistogram{{1, 2, 3}, CountUnit::kImages}), ValidationError);
  CHECK_THROWS_AS(merge(a, CategoryHistogram{{1, 2}, CountUnit::kInstances}), ValidationError);
}

TEST_CASE("merge is commutative and associative and never worsens the tail") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_hist(rng, 40), b = random_hist(rng, 40), c = random_hist(rng, 40);
    CHECK(merge(a, b) == merge(b, a));
    CHECK(merge(merge(a, b), c) == merge(a, merge(b, c)));
    const auto before = tail_report(a, 50).categories;
    for (CategoryId id : tail_report(merge(a, b), 50).categories) {
      CHECK(std::find(before.begin(), before.end(), id) != before.end());
    }
  }
}

TEST_CASE("histogram json round trip") {
  CategoryHistogram h{{3, 0, 9}, CountUnit::kInstances};
  CHECK(parse_histogram(histogram_to_json(h)) == h);
  CHECK_THROWS_AS(parse_histogram(R"({"unit":"images","counts":[1,-2]})"), ValidationError);
  CHECK_THROWS_AS(parse_histogram(R"({"unit":"boxes","counts":[1]})"), Error);
}

TEST_CASE("clip score examples") {
  const std::vector<double> u{0.6, 0.8}, x{1, 0}, y{0, 1}, d{1, 1}, neg{-1, 0};
  CHECK(clip_score(u, u) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(clip_score(x, y, 2.5) == 0.0);
  CHECK(std::abs(clip_score(d, x) - 0.7071067811865476) <= 1e-6);
  CHECK(clip_score(neg, x) == 0.0);
  CHECK(clip_score(d, x, 2.5) == doctest::Approx(2.5 * 0.7071067811865476));
  const std::vector<double> zero{0, 0}, three{1, 2, 3};
  CHECK_THROWS_AS(clip_score(zero, x), ArgumentError);
  CHECK_THROWS_AS(clip_score(three, x), ArgumentError);
}

TEST_CASE("clip score is bounded and scale invariant") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0, 1);
  std::uniform_real_distribution<double> s(0.01, 100);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> a(16), b(16);
    for (auto& v : a) v = n(rng);
    for (auto& v : b) v = n(rng);
    const double w = 2.5;
    const double base = clip_score(a, b, w);
    CHECK(base >= 0.0);
    CHECK(base <= w);
    auto scaled = a;
    const double k = s(rng);
    for (auto& v : scaled) v *= k;
    CHECK(clip_score(scaled, b, w) == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("embedding files") {
  const auto e = parse_embeddings("{\"id\":\"a\",\"values\":[1,2]}\n\n{\"id\":\"b\",\"values\":[3,4]}\n");
  REQUIRE(e.size() == 2);
  CHECK(e[1].id == "b");
  CHECK(e[1].values == std::vector<double>{3, 4});
  CHECK_THROWS_AS(parse_embeddings(R"({"id":"a","values":[]})"), ValidationError);
  CHECK_THROWS_AS(parse_embeddings(R"({"id":"a"})"), SchemaError);
}

TEST_CASE("rare-first and non-rare-first splits") {
  const TripletVocabulary v({{0, "a", "aing", "x", 0}, {1, "b", "bing", "x", 0}, {2, "c", "cing", "x", 0}});
  CategoryHistogram h{{5, 1, 9}, CountUnit::kInstances};
  const auto rf = make_zero_shot_split(h, v, SplitKind::kRareFirst, 1, 0);
  const auto nf = make_zero_shot_split(h, v, SplitKind::kNonRareFirst, 1, 0);
  CHECK(rf.unseen_hoi == std::set<CategoryId>{1});
  CHECK(nf.unseen_hoi == std::set<CategoryId>{2});
  check_partition(rf, 3);
  check_partition(nf, 3);
  CHECK_THROWS_AS(make_zero_shot_split(h, v, SplitKind::kRareFirst, 3, 0), ArgumentError);
  CHECK_THROWS_AS(make_zero_shot_split(h, v, SplitKind::kRareFirst, 0, 0), ArgumentError);
}

TEST_CASE("count ties break by category id") {
  const TripletVocabulary v({{0, "a", "aing", "x", 0}, {1, "b", "bing", "x", 0}, {2, "c", "cing", "x", 0},
                             {3, "d", "ding", "x", 0}});
  CategoryHistogram h{{4, 2, 2, 4}, CountUnit::kInstances};
  CHECK(make_zero_shot_split(h, v, SplitKind::kRareFirst, 1, 0).unseen_hoi == std::set<CategoryId>{1});
  CHECK(make_zero_shot_split(h, v, SplitKind::kNonRareFirst, 1, 0).unseen_hoi == std::set<CategoryId>{0});
}

TEST_CASE("unseen verb and unseen object splits") {
  const auto v = two_verb_vocab();
  const auto uv = split_unseen_verbs(v, {"ride"});
  CHECK(uv.unseen_hoi == std::set<CategoryId>{0, 2});
  CHECK(uv.seen_hoi == std::set<CategoryId>{1, 3});
  const auto uo = split_unseen_objects(v, {2});
  CHECK(uo.unseen_hoi == std::set<CategoryId>{2, 3});
  check_partition(uv, 4);
  check_partition(uo, 4);
  CategoryHistogram h{{1, 1, 1, 1}, CountUnit::kInstances};
  CHECK_THROWS_AS(make_zero_shot_split(h, v, SplitKind::kUnseenVerb, 2, 0), ArgumentError);
  CHECK_THROWS_AS(make_zero_shot_split(h, v, SplitKind::kUnseenObject, 2, 0), ArgumentError);
}

TEST_CASE("seeded splits are partitions and deterministic") {
  std::vector<TripletEntry> entries;
  int id = 0;
  for (int verb = 0; verb < 10; ++verb)
    for (int obj = 0; obj < 12; ++obj)
      if ((verb + obj) % 3 != 0)
        entries.push_back({id++, "v" + std::to_string(verb), "v" + std::to_string(verb) + "ing", "o" + std::to_string(obj), obj});
  const TripletVocabulary v(entries);
  std::mt19937_64 rng(2);
  const auto h = random_hist(rng, entries.size());
  for (auto kind : {SplitKind::kRareFirst, SplitKind::kNonRareFirst, SplitKind::kUnseenObject, SplitKind::kUnseenVerb}) {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      const auto s = make_zero_shot_split(h, v, kind, 4, seed);
      check_partition(s, v.num_categories());
      CHECK(s.to_json() == make_zero_shot_split(h, v, kind, 4, seed).to_json());
      if (kind == SplitKind::kUnseenObject) {
        CHECK(s.unseen_objects.size() == 4);
        for (const auto& e : v.entries()) CHECK(s.unseen_hoi.count(e.hoi_id) == s.unseen_objects.count(e.object_id));
      }
      if (kind == SplitKind::kUnseenVerb) {
        CHECK(s.unseen_verbs.size() == 4);
        for (const auto& e : v.entries()) CHECK(s.unseen_hoi.count(e.hoi_id) == s.unseen_verbs.count(e.verb));
      }
    }
  }
}

TEST_CASE("rare-first and non-rare-first are disjoint on tie-free counts") {
  std::vector<TripletEntry> entries;
  CategoryHistogram h;
  for (int i = 0; i < 50; ++i) {
    entries.push_back({i, "v" + std::to_string(i), "ving", "o", 0});
    h.counts.push_back((i * 37) % 50);
  }
  const TripletVocabulary v(entries);
  const auto rf = make_zero_shot_split(h, v, SplitKind::kRareFirst, 20, 0);
  const auto nf = make_zero_shot_split(h, v, SplitKind::kNonRareFirst, 20, 0);
  for (CategoryId c : rf.unseen_hoi) CHECK(nf.unseen_hoi.count(c) == 0);
}

TEST_CASE("split kind names") {
  CHECK(parse_split_kind("RF-UC") == SplitKind::kRareFirst);
  CHECK(parse_split_kind("uv") == SplitKind::kUnseenVerb);
  CHECK(to_string(SplitKind::kNonRareFirst) == "nf-uc");
  CHECK_THROWS_AS(parse_split_kind("xx"), ArgumentError);
}
