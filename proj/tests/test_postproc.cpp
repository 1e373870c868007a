#include "doctest.h"
#include "pagefuse/postproc.hpp"
#include "pagefuse/rng.hpp"

using namespace pagefuse;

TEST_SUITE("postproc") {

TEST_CASE("argmax with background threshold") {
  ProbabilityMap map(1, 3, 2);
  map.at(0, 0, 0) = 0.3f;  // both below theta -> background
  map.at(0, 0, 1) = 0.4f;
  map.at(0, 1, 0) = 0.7f;  // class 1 wins
  map.at(0, 1, 1) = 0.6f;
  map.at(0, 2, 0) = 0.8f;  // exact tie -> lowest class id
  map.at(0, 2, 1) = 0.8f;
  ClassMask mask = argmax_with_background(map, 0.5);
  CHECK(mask.at(0, 0) == 0);
  CHECK(mask.at(0, 1) == 1);
  CHECK(mask.at(0, 2) == 1);

  // p == theta qualifies (>=).
  ProbabilityMap edge(1, 1, 1);
  edge.at(0, 0, 0) = 0.5f;
  CHECK(argmax_with_background(edge, 0.5).at(0, 0) == 1);

  CHECK_THROWS_AS(argmax_with_background(map, 0.0), std::runtime_error);
  CHECK_THROWS_AS(argmax_with_background(map, 1.0), std::runtime_error);
}

TEST_CASE("connectivity: diagonal joins with 8, splits with 4") {
  ClassMask mask(4, 4, 0);
  mask.at(0, 0) = 1;
  mask.at(1, 1) = 1;
  CHECK(connected_components(mask, 1, 8).size() == 1);
  CHECK(connected_components(mask, 1, 4).size() == 2);
}

TEST_CASE("component bounds and areas") {
  ClassMask mask(6, 6, 0);
  for (int y = 1; y < 3; ++y)
    for (int x = 2; x < 5; ++x) mask.at(y, x) = 2;
  auto comps = connected_components(mask, 2, 8);
  REQUIRE(comps.size() == 1);
  CHECK(comps[0].area() == 6);
  CHECK(comps[0].bounds == Box{2, 1, 5, 3});
}

TEST_CASE("filter: strictly-below-5% components removed, exactly-5% kept") {
  // 10x10 page: 5% of area = 5 pixels.
  ClassMask mask(10, 10, 0);
  for (int x = 0; x < 5; ++x) mask.at(0, x) = 1;  // 5 px: exactly 5%, kept
  for (int x = 0; x < 4; ++x) mask.at(5, x) = 2;  // 4 px: removed
  ClassMask filtered = filter_small_components(mask, 0.05);
  CHECK(filtered.count(1) == 5);
  CHECK(filtered.count(2) == 0);
}

TEST_CASE("filter idempotent on random masks") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    ClassMask mask(16, 16, 0);
    for (auto& v : mask.labels) v = static_cast<uint8_t>(rng.below(3));
    ClassMask once = filter_small_components(mask, 0.05);
    ClassMask twice = filter_small_components(once, 0.05);
    REQUIRE(once == twice);
  }
}

TEST_CASE("probability map file round-trip") {
  ProbabilityMap map(3, 4, 2);
  Rng rng(5);
  for (auto& v : map.probs) v = static_cast<float>(rng.uniform());
  write_probability_map(map, "roundtrip.prb");
  ProbabilityMap again = read_probability_map("roundtrip.prb");
  CHECK(again.height == 3);
  CHECK(again.width == 4);
  CHECK(again.num_classes == 2);
  CHECK(again.probs == map.probs);
}

}  // TEST_SUITE
