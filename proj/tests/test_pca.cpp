#include <cmath>

#include "doctest.h"
#include "pagefuse/embedmap.hpp"
#include "pagefuse/embeddings.hpp"
#include "pagefuse/pca.hpp"
#include "pagefuse/rng.hpp"

using namespace pagefuse;

namespace {

std::vector<std::vector<float>> correlated_cloud(int n, uint64_t seed) {
  // Strongly elongated along (1, 1, 0) in 3-d.
  Rng rng(seed);
  std::vector<std::vector<float>> out;
  for (int i = 0; i < n; ++i) {
    double t = rng.normal() * 5.0;
    out.push_back({static_cast<float>(t + rng.normal() * 0.1),
                   static_cast<float>(t + rng.normal() * 0.1),
                   static_cast<float>(rng.normal() * 0.1)});
  }
  return out;
}

}  // namespace

TEST_SUITE("pca") {

TEST_CASE("first axis follows the dominant direction; axes orthonormal") {
  PCAModel pca = fit_pca(correlated_cloud(200, 5), 3);
  REQUIRE(pca.axis_count() == 3);
  const auto& a0 = pca.axes[0];
  CHECK(std::abs(std::abs(a0[0]) - std::sqrt(0.5)) < 0.05);
  CHECK(std::abs(std::abs(a0[1]) - std::sqrt(0.5)) < 0.05);
  CHECK(std::abs(a0[2]) < 0.1);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double dot = 0;
      for (int d = 0; d < 3; ++d) dot += double(pca.axes[i][d]) * pca.axes[j][d];
      CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-5);
    }
  // Deterministic sign: largest-magnitude component positive.
  for (const auto& axis : pca.axes) {
    float largest = 0;
    for (float v : axis)
      if (std::abs(v) > std::abs(largest)) largest = v;
    CHECK(largest > 0);
  }
}

TEST_CASE("duplicates and zero vectors excluded from the fit") {
  std::vector<std::vector<float>> vecs = {
      {0, 0}, {0, 0}, {1, 0}, {1, 0}, {0, 1}};
  PCAModel pca = fit_pca(vecs, 2);  // 2 distinct nonzero vectors, ok
  CHECK(pca.axis_count() == 2);
  CHECK_THROWS_AS(fit_pca({{0, 0}, {1, 1}, {1, 1}}, 2), std::runtime_error);
}

TEST_CASE("zero vector projects to exactly zero") {
  PCAModel pca = fit_pca(correlated_cloud(50, 9), 3);
  std::vector<float> zero(3, 0.0f);
  for (int a = 0; a < 3; ++a) CHECK(pca.project(zero, a) == 0.0f);
}

TEST_CASE("k = N channel reduction preserves pairwise distances") {
  auto cloud = correlated_cloud(40, 11);
  PCAModel pca = fit_pca(cloud, 3);
  auto dist = [](const std::vector<float>& u, const std::vector<float>& v) {
    double s = 0;
    for (size_t i = 0; i < u.size(); ++i) s += (double(u[i]) - v[i]) * (double(u[i]) - v[i]);
    return std::sqrt(s);
  };
  for (int i = 0; i < 10; ++i)
    for (int j = i + 1; j < 10; ++j) {
      std::vector<float> pi(3), pj(3);
      for (int a = 0; a < 3; ++a) {
        pi[a] = pca.project(cloud[i], a);
        pj[a] = pca.project(cloud[j], a);
      }
      CHECK(dist(pi, pj) == doctest::Approx(dist(cloud[i], cloud[j])).epsilon(1e-4));
    }
}

TEST_CASE("reduced map: unowned pixels stay exactly zero") {
  EmbeddingStore store(3, OovPolicy::SubwordHash, "t");
  store.insert("un", {1.0f, 0.2f, 0.1f});
  store.insert("deux", {-1.0f, 0.4f, 0.2f});
  store.insert("trois", {0.3f, -1.0f, 0.5f});
  std::vector<Token> tokens = {{"un", Box{0, 0, 2, 2}, 0}, {"deux", Box{4, 4, 6, 6}, 1}};
  TextEmbeddingMap map = build_map(8, 8, tokens, store);
  PCAModel pca = fit_pca({store.lookup("un"), store.lookup("deux"), store.lookup("trois")}, 2);
  Image reduced = reduce_map_channels(map, pca, 2);
  CHECK(reduced.channels == 2);
  for (int c = 0; c < 2; ++c) {
    CHECK(reduced.at(7, 7, c) == 0.0);  // unowned
    CHECK(reduced.at(0, 0, c) != 0.0);  // owned
  }
}

TEST_CASE("false-color rendering: background is white") {
  EmbeddingStore store(3, OovPolicy::SubwordHash, "t");
  store.insert("un", {1.0f, 0.0f, 0.0f});
  store.insert("deux", {0.0f, 1.0f, 0.0f});
  store.insert("trois", {0.0f, 0.0f, 1.0f});
  std::vector<Token> tokens = {{"un", Box{0, 0, 2, 2}, 0},
                               {"deux", Box{3, 0, 5, 2}, 1},
                               {"trois", Box{0, 3, 2, 5}, 2}};
  TextEmbeddingMap map = build_map(6, 6, tokens, store);
  PCAModel pca = fit_pca_on_maps({&map}, 3);
  auto rgb = project_map(map, pca);
  REQUIRE(rgb.size() == 6u * 6u * 3u);
  size_t bg = (5 * 6 + 5) * 3;
  CHECK(rgb[bg] == 255);
  CHECK(rgb[bg + 1] == 255);
  CHECK(rgb[bg + 2] == 255);
  size_t fg = 0;  // pixel (0,0), owned
  bool not_white = rgb[fg] != 255 || rgb[fg + 1] != 255 || rgb[fg + 2] != 255;
  CHECK(not_white);
}

TEST_CASE("pca model save/load round-trip") {
  PCAModel pca = fit_pca(correlated_cloud(30, 13), 2);
  save_pca(pca, "roundtrip.pca");
  PCAModel again = load_pca("roundtrip.pca");
  CHECK(again.dim == pca.dim);
  CHECK(again.axes == pca.axes);
  CHECK(again.mean == pca.mean);
  CHECK(again.proj_min == pca.proj_min);
  CHECK(again.proj_max == pca.proj_max);
}

}  // TEST_SUITE
