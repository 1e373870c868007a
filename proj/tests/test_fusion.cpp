#include <cmath>

#include "doctest.h"
#include "pagefuse/fusion.hpp"

using namespace pagefuse;

namespace {

Sample toy_sample() {
  Sample s;
  s.image = Image(8, 8, 1, 0.9);
  s.image.at(2, 2, 0) = 0.1;
  s.tokens = {{"alpha", Box{1, 1, 4, 3}, 0}, {"beta", Box{5, 5, 8, 7}, 1}};
  s.token_channels = {{1.0f, -1.0f}, {2.0f, 0.5f}};
  s.mask = ClassMask(8, 8, 0);
  s.mask.at(6, 6) = 1;
  return s;
}

}  // namespace

TEST_SUITE("fusion") {

TEST_CASE("modality names round-trip") {
  CHECK(parse_modality("image") == Modality::Image);
  CHECK(parse_modality("text") == Modality::Text);
  CHECK(parse_modality("image+text") == Modality::ImageText);
  CHECK(modality_name(Modality::ImageText) == "image+text");
  CHECK_THROWS_AS(parse_modality("audio"), std::runtime_error);
}

TEST_CASE("fused channel counts") {
  CHECK(fused_channel_count(1, 4, Modality::Image) == 1);
  CHECK(fused_channel_count(1, 4, Modality::Text) == 5);
  CHECK(fused_channel_count(3, 16, Modality::ImageText) == 19);
}

TEST_CASE("fusion contract per modality") {
  Sample s = toy_sample();

  Image img_only = make_fused_input(s, Modality::Image);
  CHECK(img_only.channels == 1);
  CHECK(img_only.at(2, 2, 0) == 0.1);

  Image text_only = make_fused_input(s, Modality::Text);
  CHECK(text_only.channels == 3);
  CHECK(text_only.at(2, 2, 0) == 0.0);  // image channel zeroed
  CHECK(text_only.at(2, 2, 1) == 1.0);  // inside token alpha
  CHECK(text_only.at(2, 2, 2) == -1.0);
  CHECK(text_only.at(0, 0, 1) == 0.0);  // unowned pixel

  Image both = make_fused_input(s, Modality::ImageText);
  CHECK(both.channels == 3);
  CHECK(both.at(2, 2, 0) == 0.1);
  CHECK(both.at(6, 6, 1) == 2.0);  // token beta
  // Embedding channels identical across text and image+text.
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x)
      for (int c = 1; c < 3; ++c) REQUIRE(both.at(y, x, c) == text_only.at(y, x, c));
}

TEST_CASE("resize passes small pages through untouched") {
  Sample s = toy_sample();
  ResizeResult r = resize_to_budget(s.image, s.tokens, 500000);
  CHECK(r.scale == 1.0);
  CHECK(r.image == s.image);
  CHECK(r.tokens.size() == s.tokens.size());
}

TEST_CASE("resize respects the pixel budget and aspect ratio") {
  Image big(3000, 4000, 1, 0.5);
  std::vector<Token> tokens = {{"w", Box{100, 100, 400, 200}, 0}};
  ResizeResult r = resize_to_budget(big, tokens, 500000);
  long long area = static_cast<long long>(r.image.height) * r.image.width;
  CHECK(area <= 500000);
  double in_aspect = 4000.0 / 3000.0;
  double out_aspect = static_cast<double>(r.image.width) / r.image.height;
  CHECK(std::abs(in_aspect - out_aspect) < in_aspect * (2.0 / r.image.height + 2.0 / r.image.width));
  REQUIRE(r.tokens.size() == 1);
  CHECK_FALSE(r.tokens[0].box.empty());
  CHECK(r.tokens[0].box.x_max <= r.image.width);
}

TEST_CASE("identity augmentation is a no-op for mask and boxes") {
  Sample s = toy_sample();
  Sample out = apply_augment(s, {1.0, 0.0});
  CHECK(out.mask == s.mask);
  for (size_t i = 0; i < s.tokens.size(); ++i) CHECK(out.tokens[i].box == s.tokens[i].box);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x)
      REQUIRE(out.image.at(y, x, 0) == doctest::Approx(s.image.at(y, x, 0)));
}

TEST_CASE("augmentation keeps token indices aligned with channels") {
  Sample s = toy_sample();
  Sample out = apply_augment(s, {1.2, 0.01});
  REQUIRE(out.tokens.size() == s.tokens.size());
  for (size_t i = 0; i < out.tokens.size(); ++i)
    CHECK(out.tokens[i].index == s.tokens[i].index);
  CHECK(out.token_channels == s.token_channels);
  // Boxes stay within the page.
  for (const auto& t : out.tokens) {
    CHECK(t.box.x_min >= 0);
    CHECK(t.box.x_max <= 8);
  }
}

TEST_CASE("augment is deterministic under a fixed seed") {
  Sample s = toy_sample();
  Rng r1(77), r2(77);
  Sample a = augment(s, r1), b = augment(s, r2);
  CHECK(a.image == b.image);
  CHECK(a.mask == b.mask);
  for (size_t i = 0; i < a.tokens.size(); ++i) CHECK(a.tokens[i].box == b.tokens[i].box);
}

}  // TEST_SUITE
