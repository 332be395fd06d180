#include "hoiforge/manifest.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <ostream>

#include "codec.hpp"

namespace hoiforge {

std::string_view to_string(AnnotationSource source) {
  switch (source) {
    case AnnotationSource::kAuto:
      return "auto";
    case AnnotationSource::kVerified:
      return "verified";
    case AnnotationSource::kEdited:
      return "edited";
  }
  return "auto";
}

AnnotationSource parse_annotation_source(std::string_view text) {
  if (text == "auto") return AnnotationSource::kAuto;
  if (text == "verified") return AnnotationSource::kVerified;
  if (text == "edited") return AnnotationSource::kEdited;
  throw SchemaError("unknown annotation source '" + std::string(text) + "'");
}

namespace detail {

ordered_json encode_box(const BBox& box) { return ordered_json::array({box.x1, box.y1, box.x2, box.y2}); }

BBox decode_box(const json& j, std::string_view where) {
  if (!j.is_array() || j.size() != 4) throw SchemaError(std::string(where) + ": box must be [x1,y1,x2,y2]");
  std::array<double, 4> a{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!j[i].is_number()) throw SchemaError(std::string(where) + ": box coordinate is not a number");
    a[i] = j[i].get<double>();
  }
  return BBox::from_array(a);
}

ordered_json encode_annotation(const HoiAnnotation& ann) {
  ordered_json j;
  j["human_box"] = encode_box(ann.human_box);
  j["object_box"] = encode_box(ann.object_box);
  j["hoi_id"] = ann.hoi_id;
  j["source"] = to_string(ann.source);
  if (ann.pass != 0) j["pass"] = ann.pass;
  return j;
}

HoiAnnotation decode_annotation(const json& j, std::string_view where) {
  HoiAnnotation a;
  a.human_box = decode_box(require(j, "human_box", where), std::string(where) + ".human_box");
  a.object_box = decode_box(require(j, "object_box", where), std::string(where) + ".object_box");
  a.hoi_id = get_as<int>(j, "hoi_id", where);
  a.source = parse_annotation_source(get_or<std::string>(j, "source", "auto", where));
  a.pass = get_or<int>(j, "pass", 0, where);
  return a;
}

ordered_json encode_image(const AnnotatedImage& img) {
  ordered_json j;
  j["image_id"] = img.image_id;
  j["file"] = img.file;
  j["width"] = img.width;
  j["height"] = img.height;
  j["prompt_triplets"] = img.prompt_triplets;
  ordered_json dets = ordered_json::array();
  for (const auto& d : img.detections) {
    ordered_json dj;
    dj["class_id"] = d.class_id;
    dj["box"] = encode_box(d.box);
    dj["confidence"] = d.confidence;
    dets.push_back(std::move(dj));
  }
  j["detections"] = std::move(dets);
  ordered_json anns = ordered_json::array();
  for (const auto& a : img.annotations) anns.push_back(encode_annotation(a));
  j["annotations"] = std::move(anns);
  j["kept"] = img.kept;
  if (!img.flag.empty()) j["flag"] = img.flag;
  return j;
}

AnnotatedImage decode_image(const json& j, std::string_view where) {
  AnnotatedImage img;
  img.image_id = get_as<std::string>(j, "image_id", where);
  const std::string ctx = std::string(where) + " (image_id " + img.image_id + ")";
  img.file = get_or<std::string>(j, "file", "", ctx);
  img.width = get_as<int>(j, "width", ctx);
  img.height = get_as<int>(j, "height", ctx);
  img.prompt_triplets = get_or<std::vector<int>>(j, "prompt_triplets", {}, ctx);
  if (j.contains("detections")) {
    const auto& dets = j.at("detections");
    if (!dets.is_array()) throw SchemaError(ctx + ": 'detections' must be an array");
    for (std::size_t i = 0; i < dets.size(); ++i) {
      const std::string dw = ctx + " detection " + std::to_string(i);
      DetectionRecord d;
      d.image_id = get_or<std::string>(dets[i], "image_id", img.image_id, dw);
      d.class_id = get_as<int>(dets[i], "class_id", dw);
      d.box = decode_box(require(dets[i], "box", dw), dw);
      d.confidence = get_as<double>(dets[i], "confidence", dw);
      img.detections.push_back(std::move(d));
    }
  }
  if (j.contains("annotations")) {
    const auto& anns = j.at("annotations");
    if (!anns.is_array()) throw SchemaError(ctx + ": 'annotations' must be an array");
    for (std::size_t i = 0; i < anns.size(); ++i) {
      img.annotations.push_back(decode_annotation(anns[i], ctx + " annotation " + std::to_string(i)));
    }
  }
  img.kept = get_or<bool>(j, "kept", false, ctx);
  img.flag = get_or<std::string>(j, "flag", "", ctx);
  return img;
}

}  // namespace detail

void validate_image(const AnnotatedImage& img, const TripletVocabulary* vocab) {
  const std::string ctx = "image " + img.image_id + ": ";
  if (img.width <= 0 || img.height <= 0) throw ValidationError(ctx + "width and height must be positive");
  auto check_box = [&](const BBox& b, const std::string& what) {
    if (!b.valid()) throw ValidationError(ctx + what + " is not a valid box");
    if (!b.within(img.width, img.height)) throw ValidationError(ctx + what + " lies outside the image");
  };
  for (std::size_t i = 0; i < img.detections.size(); ++i) {
    const auto& d = img.detections[i];
    check_box(d.box, "detection " + std::to_string(i));
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
      throw ValidationError(ctx + "detection " + std::to_string(i) + " confidence outside [0,1]");
    }
    if (d.class_id < 0) throw ValidationError(ctx + "detection " + std::to_string(i) + " has negative class");
  }
  if (!img.kept && !img.annotations.empty()) throw ValidationError(ctx + "discarded image carries annotations");
  for (std::size_t i = 0; i < img.annotations.size(); ++i) {
    const auto& a = img.annotations[i];
    check_box(a.human_box, "annotation " + std::to_string(i) + " human_box");
    check_box(a.object_box, "annotation " + std::to_string(i) + " object_box");
    if (vocab != nullptr && !vocab->contains(a.hoi_id)) {
      throw ValidationError(ctx + "annotation " + std::to_string(i) + " hoi_id " + std::to_string(a.hoi_id) +
                            " out of range");
    }
  }
  if (vocab != nullptr) {
    for (CategoryId id : img.prompt_triplets) {
      if (!vocab->contains(id)) throw ValidationError(ctx + "prompt triplet " + std::to_string(id) + " out of range");
    }
  }
}

AnnotatedImage image_from_json_line(std::string_view line) {
  return detail::decode_image(detail::parse_json(line, "manifest line"), "manifest line");
}

std::string image_to_json_line(const AnnotatedImage& img) { return detail::encode_image(img).dump(); }

std::string annotation_to_json(const HoiAnnotation& ann) { return detail::encode_annotation(ann).dump(); }

HoiAnnotation annotation_from_json(std::string_view text) {
  return detail::decode_annotation(detail::parse_json(text, "annotation"), "annotation");
}

std::vector<AnnotatedImage> parse_manifest(std::string_view text) {
  std::vector<AnnotatedImage> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "manifest line " + std::to_string(line_no);
    const auto j = detail::parse_json(line, where);
    if (out.empty() && j.is_object() && j.contains("header")) continue;
    out.push_back(detail::decode_image(j, where));
  }
  return out;
}

std::vector<AnnotatedImage> read_manifest(const std::filesystem::path& path) {
  return parse_manifest(detail::read_text_file(path));
}

void write_manifest(std::ostream& out, const std::vector<AnnotatedImage>& images) {
  for (const auto& img : images) out << image_to_json_line(img) << '\n';
}

void write_manifest(const std::filesystem::path& path, const std::vector<AnnotatedImage>& images) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  write_manifest(out, images);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace hoiforge
