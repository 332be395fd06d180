#include "hoiforge/datastats.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numeric>

#include "hoiforge/error.hpp"
#include "hoiforge/rng.hpp"
#include "json_util.hpp"

namespace hoiforge {

CategoryHistogram histogram(const std::vector<AnnotatedImage>& manifest, int num_categories, CountUnit unit) {
  CategoryHistogram h;
  h.unit = unit;
  h.counts.assign(static_cast<std::size_t>(num_categories), 0);
  std::vector<char> seen(h.counts.size());
  for (const auto& img : manifest) {
    std::fill(seen.begin(), seen.end(), 0);
    for (const auto& a : img.annotations) {
      if (a.hoi_id < 0 || a.hoi_id >= num_categories) {
        throw ValidationError("image " + img.image_id + ": hoi_id " + std::to_string(a.hoi_id) + " out of range");
      }
      const auto c = static_cast<std::size_t>(a.hoi_id);
      if (unit == CountUnit::kInstances) {
        ++h.counts[c];
      } else if (!seen[c]) {
        seen[c] = 1;
        ++h.counts[c];
      }
    }
  }
  return h;
}

DatasetTotals dataset_totals(const std::vector<AnnotatedImage>& manifest) {
  DatasetTotals t;
  auto key = [](const BBox& b) { return b.as_array(); };
  for (const auto& img : manifest) {
    if (!img.annotations.empty()) ++t.images;
    std::set<std::array<double, 4>> humans, objects;
    for (const auto& a : img.annotations) {
      humans.insert(key(a.human_box));
      objects.insert(key(a.object_box));
      ++t.triplets;
    }
    t.person_boxes += static_cast<std::int64_t>(humans.size());
    t.object_boxes += static_cast<std::int64_t>(objects.size());
  }
  return t;
}

TailReport tail_report(const CategoryHistogram& hist, std::int64_t threshold) {
  TailReport r;
  for (std::size_t c = 0; c < hist.size(); ++c) {
    if (hist[c] < threshold) r.categories.push_back(static_cast<CategoryId>(c));
  }
  std::stable_sort(r.categories.begin(), r.categories.end(), [&](CategoryId a, CategoryId b) {
    return hist[static_cast<std::size_t>(a)] < hist[static_cast<std::size_t>(b)];
  });
  r.count_below = static_cast<std::int64_t>(r.categories.size());
  return r;
}

CategoryHistogram merge(const CategoryHistogram& a, const CategoryHistogram& b) {
  if (a.size() != b.size()) throw ValidationError("merge: histogram lengths differ");
  if (a.unit != b.unit) throw ValidationError("merge: histogram units differ");
  CategoryHistogram out = a;
  for (std::size_t c = 0; c < out.size(); ++c) out.counts[c] += b.counts[c];
  return out;
}

double clip_score(std::span<const double> image_emb, std::span<const double> text_emb, double w) {
  if (image_emb.size() != text_emb.size()) throw ArgumentError("clip_score: embedding dimensions differ");
  if (image_emb.empty()) throw ArgumentError("clip_score: empty embedding");
  double dot = 0.0, ni = 0.0, nt = 0.0;
  for (std::size_t i = 0; i < image_emb.size(); ++i) {
    dot += image_emb[i] * text_emb[i];
    ni += image_emb[i] * image_emb[i];
    nt += text_emb[i] * text_emb[i];
  }
  if (!std::isfinite(dot) || !std::isfinite(ni) || !std::isfinite(nt)) {
    throw ArgumentError("clip_score: non-finite embedding");
  }
  if (ni == 0.0 || nt == 0.0) throw ArgumentError("clip_score: zero embedding");
  const double cosine = std::clamp(dot / (std::sqrt(ni) * std::sqrt(nt)), -1.0, 1.0);
  return w * std::max(0.0, cosine);
}

std::vector<Embedding> parse_embeddings(std::string_view text) {
  std::vector<Embedding> out;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "embeddings line " + std::to_string(line_no);
    const auto j = detail::parse_json(line, where);
    Embedding e;
    e.id = detail::get_as<std::string>(j, "id", where);
    e.values = detail::get_as<std::vector<double>>(j, "values", where);
    if (e.values.empty()) throw ValidationError(where + ": empty embedding");
    for (double v : e.values) {
      if (!std::isfinite(v)) throw ValidationError(where + ": non-finite value");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Embedding> load_embeddings(const std::filesystem::path& path) {
  return parse_embeddings(detail::read_text_file(path));
}

std::string_view to_string(SplitKind kind) {
  switch (kind) {
    case SplitKind::kRareFirst:
      return "rf-uc";
    case SplitKind::kNonRareFirst:
      return "nf-uc";
    case SplitKind::kUnseenObject:
      return "uo";
    case SplitKind::kUnseenVerb:
      return "uv";
  }
  return "rf-uc";
}

SplitKind parse_split_kind(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  std::replace(s.begin(), s.end(), '_', '-');
  if (s == "rf-uc") return SplitKind::kRareFirst;
  if (s == "nf-uc") return SplitKind::kNonRareFirst;
  if (s == "uo") return SplitKind::kUnseenObject;
  if (s == "uv") return SplitKind::kUnseenVerb;
  throw ArgumentError("unknown split kind '" + std::string(text) + "'");
}

namespace {

void fill_seen(ZeroShotSplit& split, int num_categories) {
  for (CategoryId c = 0; c < num_categories; ++c) {
    if (!split.unseen_hoi.contains(c)) split.seen_hoi.insert(c);
  }
}

// Seeded uniform sample of n distinct indices in [0, size), partial Fisher-Yates.
std::vector<std::size_t> sample_indices(std::size_t size, std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) std::swap(idx[i], idx[i + rng.below(size - i)]);
  idx.resize(n);
  return idx;
}

}  // namespace

ZeroShotSplit split_unseen_objects(const TripletVocabulary& vocab, const std::set<ObjectClassId>& objects) {
  ZeroShotSplit s;
  s.kind = SplitKind::kUnseenObject;
  s.n = static_cast<std::int64_t>(objects.size());
  s.unseen_objects = objects;
  for (const auto& e : vocab.entries()) {
    if (objects.contains(e.object_id)) s.unseen_hoi.insert(e.hoi_id);
  }
  fill_seen(s, vocab.num_categories());
  return s;
}

ZeroShotSplit split_unseen_verbs(const TripletVocabulary& vocab, const std::set<std::string>& verbs) {
  ZeroShotSplit s;
  s.kind = SplitKind::kUnseenVerb;
  s.n = static_cast<std::int64_t>(verbs.size());
  s.unseen_verbs = verbs;
  for (const auto& e : vocab.entries()) {
    if (verbs.contains(e.verb)) s.unseen_hoi.insert(e.hoi_id);
  }
  fill_seen(s, vocab.num_categories());
  return s;
}

ZeroShotSplit make_zero_shot_split(const CategoryHistogram& hist, const TripletVocabulary& vocab, SplitKind kind,
                                   std::int64_t n, std::uint64_t seed) {
  if (n <= 0) throw ArgumentError("split: n must be positive");
  const auto k2 = static_cast<std::size_t>(vocab.num_categories());
  ZeroShotSplit s;
  switch (kind) {
    case SplitKind::kRareFirst:
    case SplitKind::kNonRareFirst: {
      if (hist.size() != k2) throw ArgumentError("split: histogram length does not match the vocabulary");
      if (static_cast<std::size_t>(n) >= k2) throw ArgumentError("split: n must be below the category count");
      std::vector<CategoryId> order(k2);
      std::iota(order.begin(), order.end(), 0);
      const bool rare_first = kind == SplitKind::kRareFirst;
      std::stable_sort(order.begin(), order.end(), [&](CategoryId a, CategoryId b) {
        const auto ca = hist[static_cast<std::size_t>(a)], cb = hist[static_cast<std::size_t>(b)];
        return rare_first ? ca < cb : ca > cb;
      });
      s.kind = kind;
      s.n = n;
      s.unseen_hoi.insert(order.begin(), order.begin() + n);
      fill_seen(s, vocab.num_categories());
      break;
    }
    case SplitKind::kUnseenObject: {
      const auto objects = vocab.object_ids();
      if (static_cast<std::size_t>(n) >= objects.size()) {
        throw ArgumentError("split: n must be below the object class count");
      }
      std::set<ObjectClassId> chosen;
      for (auto i : sample_indices(objects.size(), static_cast<std::size_t>(n), seed)) chosen.insert(objects[i]);
      s = split_unseen_objects(vocab, chosen);
      break;
    }
    case SplitKind::kUnseenVerb: {
      const auto verbs = vocab.verbs();
      if (static_cast<std::size_t>(n) >= verbs.size()) throw ArgumentError("split: n must be below the verb count");
      std::set<std::string> chosen;
      for (auto i : sample_indices(verbs.size(), static_cast<std::size_t>(n), seed)) chosen.insert(verbs[i]);
      s = split_unseen_verbs(vocab, chosen);
      break;
    }
  }
  s.seed = seed;
  return s;
}

std::string ZeroShotSplit::to_json() const {
  detail::ordered_json j;
  j["kind"] = to_string(kind);
  j["n"] = n;
  j["seed"] = seed;
  j["unseen_hoi"] = unseen_hoi;
  j["seen_hoi"] = seen_hoi;
  if (kind == SplitKind::kUnseenObject) j["unseen_objects"] = unseen_objects;
  if (kind == SplitKind::kUnseenVerb) j["unseen_verbs"] = unseen_verbs;
  return j.dump(2);
}

}  // namespace hoiforge
