#include <set>

#include "doctest.h"
#include "pagefuse/synthgen.hpp"

using namespace pagefuse;

TEST_SUITE("synthgen") {

TEST_CASE("corpus generation is deterministic under the seed") {
  CorpusSpec spec = confusable_pair_spec(42);
  auto a = generate_corpus(spec, 8);
  auto b = generate_corpus(spec, 8);
  REQUIRE(a.size() == 8);
  for (size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].page.image == b[i].page.image);
    REQUIRE(*a[i].page.label_mask == *b[i].page.label_mask);
    REQUIRE(a[i].page.tokens.size() == b[i].page.tokens.size());
    CHECK(a[i].page_seed == b[i].page_seed);
  }
  CorpusSpec other = confusable_pair_spec(43);
  auto c = generate_corpus(other, 8);
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) differs |= !(a[i].page.image == c[i].page.image);
  CHECK(differs);
}

TEST_CASE("blank fraction produces pages without class regions") {
  CorpusSpec spec = confusable_pair_spec(7);
  spec.blank_fraction = 0.5;
  auto pages = generate_corpus(spec, 60);
  int blank = 0;
  for (const auto& p : pages) {
    size_t fg = p.page.label_mask->labels.size() - p.page.label_mask->count(0);
    if (fg == 0) ++blank;
  }
  CHECK(blank > 10);
  CHECK(blank < 50);
}

TEST_CASE("class tokens come from the class vocabulary and lie in the mask") {
  CorpusSpec spec = confusable_pair_spec(11);
  auto pages = generate_corpus(spec, 30);
  std::set<std::string> cluster1(spec.clusters[1].tokens.begin(), spec.clusters[1].tokens.end());
  bool saw_class1 = false;
  for (const auto& p : pages) {
    const auto& mask = *p.page.label_mask;
    for (const auto& t : p.page.tokens) {
      uint8_t owner_class = mask.at(t.box.y_min, t.box.x_min);
      // Tokens are placed wholly inside one region (or background).
      for (int y = t.box.y_min; y < t.box.y_max; ++y)
        for (int x = t.box.x_min; x < t.box.x_max; ++x)
          REQUIRE(mask.at(y, x) == owner_class);
      if (owner_class == 1) {
        saw_class1 = true;
        CHECK(cluster1.count(t.text) == 1);
      }
    }
  }
  CHECK(saw_class1);
}

TEST_CASE("ocr noise perturbs some tokens") {
  CorpusSpec spec = confusable_pair_spec(13);
  spec.ocr_noise = 0.5;
  auto noisy = generate_corpus(spec, 10);
  std::set<std::string> vocab;
  for (const auto& c : spec.clusters)
    vocab.insert(c.tokens.begin(), c.tokens.end());
  int off_vocab = 0, total = 0;
  for (const auto& p : noisy)
    for (const auto& t : p.page.tokens) {
      ++total;
      off_vocab += vocab.count(t.text) == 0;
    }
  CHECK(off_vocab > total / 10);
}

TEST_CASE("drift overrides layout but only for the scheduled period") {
  CorpusSpec spec = layout_drift_spec(3);
  CorpusSpec p1 = apply_drift(spec, 1);
  CHECK(p1.classes[0].archetype == Archetype::BottomStrip);
  CorpusSpec p2 = apply_drift(spec, 2);
  CHECK(p2.classes[0].archetype == Archetype::PlainColumn);
  CHECK(p2.classes[0].position == RegionPosition::Top);
  CHECK(p2.classes[0].cluster == spec.classes[0].cluster);  // vocabulary stable

  CorpusSpec bad = spec;
  bad.drift[3] = {{"nonexistent", Archetype::TableGrid, {}, {}, {}}};
  CHECK_THROWS_AS(apply_drift(bad, 3), std::runtime_error);
}

TEST_CASE("synthetic embeddings cluster by vocabulary") {
  CorpusSpec spec = confusable_pair_spec(21);
  EmbeddingStore store = make_synthetic_store(spec);
  CHECK(store.dimension() == spec.embedding_dim);
  auto dist = [](const std::vector<float>& a, const std::vector<float>& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += (double(a[i]) - b[i]) * (double(a[i]) - b[i]);
    return s;
  };
  // Within-cluster distances far below cross-cluster distances.
  auto c1a = store.lookup(spec.clusters[1].tokens[0]);
  auto c1b = store.lookup(spec.clusters[1].tokens[1]);
  auto c2a = store.lookup(spec.clusters[2].tokens[0]);
  CHECK(dist(c1a, c1b) < dist(c1a, c2a) / 4);
}

TEST_CASE("corpus spec JSON round-trip, validation, and stable hash") {
  CorpusSpec spec = layout_drift_spec(17);
  std::string json_text = corpus_spec_to_json(spec);
  CorpusSpec again = parse_corpus_spec(json_text);
  CHECK(corpus_spec_to_json(again) == json_text);
  CHECK(corpus_spec_hash(again) == corpus_spec_hash(spec));

  CorpusSpec changed = spec;
  changed.seed += 1;
  CHECK(corpus_spec_hash(changed) != corpus_spec_hash(spec));

  CorpusSpec bad = spec;
  bad.classes[0].frequency = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::runtime_error);
  CorpusSpec bad2 = spec;
  bad2.classes[0].cluster = 99;
  CHECK_THROWS_AS(bad2.validate(), std::runtime_error);

  CHECK_THROWS_AS(parse_corpus_spec("{not json"), std::runtime_error);
}

TEST_CASE("archetype names round-trip") {
  for (auto a : {Archetype::FramedBox, Archetype::BottomStrip, Archetype::TableGrid,
                 Archetype::PlainColumn})
    CHECK(parse_archetype(archetype_name(a)) == a);
  CHECK_THROWS_AS(parse_archetype("spiral"), std::runtime_error);
}

}  // TEST_SUITE
