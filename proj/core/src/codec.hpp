#pragma once

// JSON encoders/decoders shared by the manifest, review and evaluation code.

#include <string_view>

#include "hoiforge/manifest.hpp"
#include "json_util.hpp"

namespace hoiforge::detail {

ordered_json encode_box(const BBox& box);
BBox decode_box(const json& j, std::string_view where);

ordered_json encode_annotation(const HoiAnnotation& ann);
HoiAnnotation decode_annotation(const json& j, std::string_view where);

ordered_json encode_image(const AnnotatedImage& img);
AnnotatedImage decode_image(const json& j, std::string_view where);

}  // namespace hoiforge::detail
