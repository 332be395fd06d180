// hoiforge: command-line front end for the dataset and evaluation toolkit.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hoiforge/autolabel.hpp"
#include "hoiforge/datastats.hpp"
#include "hoiforge/error.hpp"
#include "hoiforge/hoieval.hpp"
#include "hoiforge/prompt.hpp"
#include "hoiforge/review.hpp"
#include "hoiforge/review_server.hpp"
#include "hoiforge/setmatch.hpp"
#include "json.hpp"

namespace {

using nlohmann::ordered_json;
namespace hf = hoiforge;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw hf::IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw hf::IoError("cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

struct PromptsArgs {
  std::string vocab, attrs, cooc, hist, out = "prompts.jsonl";
  std::int64_t target = 50;
  double retention = hf::kDefaultRetentionRate;
  std::uint64_t seed = 0;
  std::size_t max_triplets = 2;
  std::size_t negatives = 5;
};

int run_prompts(const PromptsArgs& a) {
  const auto vocab = hf::load_vocabulary(a.vocab);
  const auto attrs = hf::load_attributes(a.attrs);
  const auto table = a.cooc.empty() ? hf::CoOccurrenceTable{} : hf::load_cooccurrence(a.cooc);
  hf::CategoryHistogram hist;
  if (a.hist.empty()) {
    hist.counts.assign(static_cast<std::size_t>(vocab.num_categories()), 0);
  } else {
    hist = hf::load_histogram(a.hist);
    if (hist.size() != static_cast<std::size_t>(vocab.num_categories())) {
      throw hf::ValidationError("histogram length does not match the vocabulary");
    }
  }
  hf::PromptOptions opts;
  opts.max_triplets = a.max_triplets;
  opts.negative_count = a.negatives;
  const auto plan = hf::build_generation_plan(hist, a.target, a.retention);
  const auto prompts = hf::generate_prompts(plan, vocab, attrs, table, a.seed, opts);

  std::string text;
  for (const auto& p : prompts) text += hf::prompt_to_json_line(p) + "\n";
  emit(a.out, text);

  ordered_json meta;
  meta["seed"] = a.seed;
  meta["plan_target"] = a.target;
  meta["retention_rate"] = a.retention;
  meta["max_triplets_per_prompt"] = a.max_triplets;
  meta["negative_count"] = a.negatives;
  meta["total_prompts"] = plan.total_prompts();
  meta["per_category"] = plan.per_category;
  if (a.out != "-") emit(a.out + ".meta.json", meta.dump(2));
  std::cerr << "wrote " << prompts.size() << " prompts\n";
  return 0;
}

int run_label(const std::string& manifest, const std::string& vocab_path, const hf::LabelOptions& opts,
              const std::string& out, const std::string& summary) {
  const auto vocab = hf::load_vocabulary(vocab_path);
  const auto images = hf::read_manifest(manifest);
  const auto ds = hf::label_dataset(images, vocab, opts);
  hf::write_manifest(out, ds.images);
  emit(summary, ds.summary.to_json());
  return 0;
}

struct StatsArgs {
  std::string manifest, vocab, unit = "images", merge_with, hist_out, out;
  std::int64_t tail = 50;
};

int run_stats(const StatsArgs& a) {
  const auto vocab = hf::load_vocabulary(a.vocab);
  const auto images = hf::read_manifest(a.manifest);
  for (const auto& img : images) hf::validate_image(img, &vocab);
  const auto hist = hf::histogram(images, vocab.num_categories(), hf::parse_count_unit(a.unit));
  const auto totals = hf::dataset_totals(images);
  const auto tail = hf::tail_report(hist, a.tail);

  ordered_json j;
  j["totals"] = {{"images", totals.images},
                 {"person_boxes", totals.person_boxes},
                 {"object_boxes", totals.object_boxes},
                 {"triplets", totals.triplets}};
  j["unit"] = hf::to_string(hist.unit);
  j["tail_threshold"] = a.tail;
  j["tail"] = {{"count_below", tail.count_below}, {"categories", tail.categories}};
  if (!a.merge_with.empty()) {
    const auto merged = hf::merge(hist, hf::load_histogram(a.merge_with));
    const auto mt = hf::tail_report(merged, a.tail);
    j["merged_tail"] = {{"count_below", mt.count_below}, {"categories", mt.categories}};
  }
  j["counts"] = hist.counts;
  if (!a.hist_out.empty()) emit(a.hist_out, hf::histogram_to_json(hist));
  emit(a.out, j.dump(2));
  return 0;
}

int run_split(const std::string& hist_path, const std::string& vocab_path, const std::string& kind, std::int64_t n,
              std::uint64_t seed, const std::string& out) {
  const auto vocab = hf::load_vocabulary(vocab_path);
  const auto k = hf::parse_split_kind(kind);
  hf::CategoryHistogram hist;
  if (!hist_path.empty()) {
    hist = hf::load_histogram(hist_path);
  } else if (k == hf::SplitKind::kRareFirst || k == hf::SplitKind::kNonRareFirst) {
    throw hf::ArgumentError("--hist is required for rf-uc and nf-uc");
  }
  emit(out, hf::make_zero_shot_split(hist, vocab, k, n, seed).to_json());
  return 0;
}

int run_clipscore(const std::string& images_path, const std::string& texts_path, double w, const std::string& out) {
  const auto images = hf::load_embeddings(images_path);
  const auto texts = hf::load_embeddings(texts_path);
  std::map<std::string, const hf::Embedding*> by_id;
  for (const auto& t : texts) by_id[t.id] = &t;
  ordered_json scores = ordered_json::array();
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& img : images) {
    auto it = by_id.find(img.id);
    if (it == by_id.end()) throw hf::ValidationError("no text embedding for id " + img.id);
    const double s = hf::clip_score(img.values, it->second->values, w);
    scores.push_back({{"id", img.id}, {"score", s}});
    sum += s;
    ++n;
  }
  ordered_json j;
  j["w"] = w;
  j["count"] = n;
  j["mean"] = n == 0 ? ordered_json(nullptr) : ordered_json(sum / static_cast<double>(n));
  j["scores"] = std::move(scores);
  emit(out, j.dump(2));
  return 0;
}

int run_match(const std::string& pred, const std::string& gt, const std::string& weights, const std::string& report) {
  const auto w = hf::CostWeights::parse(weights);
  const auto p = hf::parse_prediction_set(slurp(pred));
  const auto g = hf::parse_ground_truth_set(slurp(gt));
  emit(report, hf::match_report_json(hf::match_and_score(p, g, w), w));
  return 0;
}

struct EvalArgs {
  std::string pred, gt, mode = "default", rare_hist, vocab, known_index, out;
  double iou = 0.5;
  std::int64_t rare_threshold = 10;
};

int run_eval(const EvalArgs& a) {
  hf::EvalSettings s;
  s.iou_threshold = a.iou;
  s.mode = hf::parse_eval_mode(a.mode);
  std::optional<hf::TripletVocabulary> vocab;
  if (!a.vocab.empty()) {
    vocab = hf::load_vocabulary(a.vocab);
    s.num_categories = vocab->num_categories();
    for (const auto& e : vocab->entries()) s.hoi_object.push_back(e.object_id);
  }
  if (!a.rare_hist.empty()) {
    const auto train = hf::load_histogram(a.rare_hist);
    if (s.num_categories == 0) s.num_categories = static_cast<int>(train.size());
    if (train.size() != static_cast<std::size_t>(s.num_categories)) {
      throw hf::ConfigError("rare histogram length does not match the category count");
    }
    s.rare_set = hf::derive_rare_set(train, a.rare_threshold);
  }
  if (s.num_categories == 0) throw hf::ConfigError("pass --vocab or --rare-hist so the category count is known");
  if (s.mode == hf::EvalMode::kKnownObject) {
    if (a.known_index.empty()) throw hf::ConfigError("--mode known requires --known-index");
    if (!vocab) throw hf::ConfigError("--mode known requires --vocab");
    s.known_object_index = hf::parse_known_object_index(slurp(a.known_index));
  }
  const auto preds = hf::load_eval_predictions(a.pred);
  const auto gts = hf::ground_truth_from_manifest(hf::read_manifest(a.gt));
  emit(a.out, hf::map_report(preds, gts, s).to_json());
  return 0;
}

hf::ReviewServer* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

struct ServeArgs {
  std::string data = ".", manifest, log = "verdicts.jsonl", host = "0.0.0.0", vocab;
  double fraction = 0.05;
  std::uint64_t seed = 0;
  int port = 8080;
};

int run_serve(ServeArgs a) {
  if (const char* env = std::getenv("HOIFORGE_DATA_ROOT"); env != nullptr && *env != '\0') a.data = env;
  const auto images = hf::read_manifest(a.manifest);
  hf::BatchInfo info{a.fraction, a.seed, 0};
  if (!a.vocab.empty()) info.num_categories = hf::load_vocabulary(a.vocab).num_categories();
  hf::ReviewState initial(info, hf::sample_batch(images, a.fraction, a.seed));
  hf::ReviewService service(a.log, std::move(initial));
  hf::ReviewServer server(service, a.data);
  if (!server.bind(a.host, a.port)) throw hf::IoError("cannot bind " + a.host + ":" + std::to_string(a.port));
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const auto snap = service.snapshot();
  std::cerr << "serving " << snap->items().size() << " images (" << snap->progress().pending
            << " pending annotations) on " << a.host << ":" << a.port << ", log " << a.log << "\n";
  server.listen_after_bind();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hoiforge: HOI dataset construction and evaluation toolkit"};
  app.require_subcommand(1);

  PromptsArgs pa;
  auto* prompts = app.add_subcommand("prompts", "Plan and compose generation prompts");
  prompts->add_option("--vocab", pa.vocab, "Triplet vocabulary JSON")->required();
  prompts->add_option("--attrs", pa.attrs, "Attribute vocabulary JSON")->required();
  prompts->add_option("--cooc", pa.cooc, "Co-occurrence JSON");
  prompts->add_option("--hist", pa.hist, "Existing per-category histogram JSON (default: all zero)");
  prompts->add_option("--plan-target", pa.target, "Minimum per-category count to reach")->capture_default_str();
  prompts->add_option("--retention", pa.retention, "Expected filter retention rate")->capture_default_str();
  prompts->add_option("--seed", pa.seed, "Base seed")->capture_default_str();
  prompts->add_option("--max-triplets", pa.max_triplets, "Triplets per prompt cap")->capture_default_str();
  prompts->add_option("--negatives", pa.negatives, "Negative prompt entries")->capture_default_str();
  prompts->add_option("--out", pa.out, "Output JSON-lines")->capture_default_str();

  std::string l_manifest, l_vocab, l_out = "labeled.jsonl", l_summary = "summary.json";
  hf::LabelOptions lo;
  auto* label = app.add_subcommand("label", "Filter and associate detector output");
  label->add_option("--manifest", l_manifest, "Input manifest JSON-lines")->required();
  label->add_option("--vocab", l_vocab, "Triplet vocabulary JSON")->required();
  label->add_option("--threshold", lo.threshold, "Confidence threshold")->capture_default_str();
  label->add_option("--person-class", lo.person_class, "Detection class id of persons")->capture_default_str();
  label->add_option("--threads", lo.threads, "Worker threads")->capture_default_str();
  label->add_option("--out", l_out, "Labeled manifest")->capture_default_str();
  label->add_option("--summary", l_summary, "Summary JSON")->capture_default_str();

  StatsArgs sa;
  auto* stats = app.add_subcommand("stats", "Histogram, totals and long-tail report");
  stats->add_option("--manifest", sa.manifest, "Manifest JSON-lines")->required();
  stats->add_option("--vocab", sa.vocab, "Triplet vocabulary JSON")->required();
  stats->add_option("--unit", sa.unit, "images|instances")->capture_default_str();
  stats->add_option("--tail", sa.tail, "Tail threshold")->capture_default_str();
  stats->add_option("--merge", sa.merge_with, "Histogram JSON to merge before a second tail report");
  stats->add_option("--hist-out", sa.hist_out, "Write the histogram JSON here");
  stats->add_option("--out", sa.out, "Report JSON (default stdout)");

  std::string sp_hist, sp_vocab, sp_kind = "rf-uc", sp_out;
  std::int64_t sp_n = 120;
  std::uint64_t sp_seed = 0;
  auto* split = app.add_subcommand("split", "Build a zero-shot split");
  split->add_option("--hist", sp_hist, "Training histogram JSON (rf-uc, nf-uc)");
  split->add_option("--vocab", sp_vocab, "Triplet vocabulary JSON")->required();
  split->add_option("--kind", sp_kind, "rf-uc|nf-uc|uo|uv")->capture_default_str();
  split->add_option("--n", sp_n, "Unseen categories, objects or verbs")->capture_default_str();
  split->add_option("--seed", sp_seed, "Seed for uo/uv")->capture_default_str();
  split->add_option("--out", sp_out, "Split JSON (default stdout)");

  std::string c_images, c_texts, c_out;
  double c_w = 1.0;
  auto* clip = app.add_subcommand("clipscore", "CLIPScore over precomputed embeddings");
  clip->add_option("--images", c_images, "Image embeddings JSON-lines")->required();
  clip->add_option("--texts", c_texts, "Text embeddings JSON-lines")->required();
  clip->add_option("--w", c_w, "Scale factor")->capture_default_str();
  clip->add_option("--out", c_out, "Report JSON (default stdout)");

  std::string m_pred, m_gt, m_weights = "2.5,1,1,1", m_report;
  auto* match = app.add_subcommand("match", "Hungarian matching and composite loss for one image");
  match->add_option("--pred", m_pred, "Prediction set JSON")->required();
  match->add_option("--gt", m_gt, "Ground-truth set JSON")->required();
  match->add_option("--weights", m_weights, "lambda_b,lambda_g,lambda_c_o,lambda_c_i")->capture_default_str();
  match->add_option("--report", m_report, "Report JSON (default stdout)");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "HOI detection mAP");
  eval->add_option("--pred", ea.pred, "Predictions JSON-lines")->required();
  eval->add_option("--gt", ea.gt, "Ground-truth manifest JSON-lines")->required();
  eval->add_option("--mode", ea.mode, "default|known")->capture_default_str();
  eval->add_option("--iou", ea.iou, "IoU threshold")->capture_default_str();
  eval->add_option("--rare-hist", ea.rare_hist, "Training histogram for the rare set");
  eval->add_option("--rare-threshold", ea.rare_threshold, "Rare if training count is below this")->capture_default_str();
  eval->add_option("--vocab", ea.vocab, "Triplet vocabulary JSON");
  eval->add_option("--known-index", ea.known_index, "Known-object index JSON");
  eval->add_option("--out", ea.out, "Report JSON (default stdout)");

  ServeArgs va;
  auto* serve = app.add_subcommand("serve", "Serve a review batch over HTTP");
  serve->add_option("--data", va.data, "Image data root (HOIFORGE_DATA_ROOT overrides)")->capture_default_str();
  serve->add_option("--manifest", va.manifest, "Labeled manifest")->required();
  serve->add_option("--fraction", va.fraction, "Fraction of kept images to sample")->capture_default_str();
  serve->add_option("--seed", va.seed, "Sampling seed")->capture_default_str();
  serve->add_option("--port", va.port, "Port")->capture_default_str();
  serve->add_option("--host", va.host, "Bind address")->capture_default_str();
  serve->add_option("--log", va.log, "Verdict log JSON-lines")->capture_default_str();
  serve->add_option("--vocab", va.vocab, "Triplet vocabulary (validates edited hoi_id)");

  std::string x_log, x_out = "synhoi_sub.jsonl";
  auto* exp = app.add_subcommand("export", "Export verified annotations from a verdict log");
  exp->add_option("--log", x_log, "Verdict log JSON-lines")->required();
  exp->add_option("--out", x_out, "Verified manifest")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*prompts) return run_prompts(pa);
    if (*label) return run_label(l_manifest, l_vocab, lo, l_out, l_summary);
    if (*stats) return run_stats(sa);
    if (*split) return run_split(sp_hist, sp_vocab, sp_kind, sp_n, sp_seed, sp_out);
    if (*clip) return run_clipscore(c_images, c_texts, c_w, c_out);
    if (*match) return run_match(m_pred, m_gt, m_weights, m_report);
    if (*eval) return run_eval(ea);
    if (*serve) return run_serve(va);
    if (*exp) {
      hf::write_export(x_out, hf::replay_log_file(x_log));
      return 0;
    }
  } catch (const hf::Error& e) {
    std::cerr << "hoiforge: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
