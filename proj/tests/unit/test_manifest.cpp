#include <sstream>

#include "doctest.h"
#include "hoiforge/error.hpp"
#include "hoiforge/manifest.hpp"
#include "support/fixtures.hpp"

using namespace hoiforge;

TEST_CASE("manifest round trip") {
  auto img = fixtures::image("a", {0, 5}, {fixtures::det_at(0, 50, 50, 0.9), fixtures::det_at(1, 60, 60, 0.125)});
  img.kept = true;
  img.annotations.push_back({img.detections[0].box, img.detections[1].box, 0, AnnotationSource::kAuto, 1});
  std::ostringstream out;
  write_manifest(out, {img, fixtures::image("b", {1}, {})});
  const auto back = parse_manifest("{\"header\":{\"x\":1}}\n" + out.str() + "\n\n");
  REQUIRE(back.size() == 2);
  CHECK(back[0] == img);
  CHECK(back[1].image_id == "b");
}

TEST_CASE("image validation") {
  const auto v = fixtures::small_vocab();
  auto img = fixtures::image("a", {0}, {fixtures::det(1, 0, 0, 300, 10, 0.9)});
  CHECK_THROWS_AS(validate_image(img, &v), ValidationError);
  img = fixtures::image("a", {0}, {fixtures::det(1, 0, 0, 10, 10, 1.2)});
  CHECK_THROWS_AS(validate_image(img, &v), ValidationError);
  img = fixtures::image("a", {0}, {});
  img.annotations.push_back({{0, 0, 5, 5}, {5, 5, 9, 9}, 0, AnnotationSource::kAuto, 1});
  CHECK_THROWS_AS(validate_image(img, &v), ValidationError);  // annotations on a discarded image
  img.kept = true;
  CHECK_NOTHROW(validate_image(img, &v));
  img.annotations[0].hoi_id = 9;
  CHECK_THROWS_AS(validate_image(img, &v), ValidationError);
}

TEST_CASE("manifest schema errors name the line") {
  try {
    parse_manifest("{\"image_id\":\"a\",\"file\":\"a.jpg\",\"width\":1,\"height\":1,\"prompt_triplets\":[0]}\n{\"image_id\":3}\n");
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}
