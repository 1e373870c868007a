#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pagefuse/embeddings.hpp"
#include "pagefuse/page.hpp"

namespace pagefuse {

/// Visual archetype of a class region, the minimal set covering the usual
/// newspaper content-item stories: framed notice, front-page bottom strip,
/// line-ruled table, and an unadorned text column.
enum class Archetype { FramedBox, BottomStrip, TableGrid, PlainColumn };

Archetype parse_archetype(const std::string& name);
std::string archetype_name(Archetype a);

enum class RegionPosition { Free, Top, Bottom };

struct ClusterSpec {
  int id = 0;
  uint64_t embed_seed = 0;
  std::vector<std::string> tokens;
};

struct SynthClassSpec {
  uint8_t id = 0;
  std::string name;
  Archetype archetype = Archetype::FramedBox;
  int cluster = 0;
  double frequency = 0.0;
  int frame_thickness = 2;
  RegionPosition position = RegionPosition::Free;
};

/// Per-period layout overrides; vocabulary clusters stay put unless
/// explicitly overridden (layout drifts, textual conventions are stable).
struct ClassOverride {
  std::string class_name;
  std::optional<Archetype> archetype;
  std::optional<RegionPosition> position;
  std::optional<int> frame_thickness;
  std::optional<int> cluster;
};

struct CorpusSpec {
  int page_width = 64;
  int page_height = 64;
  uint64_t seed = 1;
  int embedding_dim = 16;
  double cluster_sigma = 0.08;
  double blank_fraction = 0.0;  // pages forced to carry no class region
  double ocr_noise = 0.0;       // per-token character-perturbation probability
  int background_cluster = 0;
  std::vector<ClusterSpec> clusters;
  std::vector<SynthClassSpec> classes;
  std::map<int, std::vector<ClassOverride>> drift;  // period -> overrides

  void validate() const;
  std::vector<ClassLabel> class_labels() const;  // background + classes
};

struct SyntheticPage {
  Page page;
  int period = 1;
  uint64_t page_seed = 0;
  std::string spec_hash;
};

/// Layout overrides of `period` applied; period 1 (or an absent schedule
/// entry) leaves the spec unchanged.
CorpusSpec apply_drift(const CorpusSpec& spec, int period);

/// Deterministic under spec.seed; page i uses the derived seed
/// hash(corpus seed, page index). Throws when a region cannot be placed
/// after bounded retries.
std::vector<SyntheticPage> generate_corpus(const CorpusSpec& spec, int n_pages, int period = 1);

/// Seeded isotropic-Gaussian embeddings around per-cluster centroids for
/// every inventory token; OOV falls back to the subword hash.
EmbeddingStore make_synthetic_store(const CorpusSpec& spec);

CorpusSpec load_corpus_spec(const std::string& path);
CorpusSpec parse_corpus_spec(const std::string& json_text);
std::string corpus_spec_to_json(const CorpusSpec& spec);
std::string corpus_spec_hash(const CorpusSpec& spec);

/// Canned specs for the experiment scenarios: a visually-confusable /
/// textually-distinct framed pair, and a layout-drift schedule with a
/// stable vocabulary.
CorpusSpec confusable_pair_spec(uint64_t seed = 1);
CorpusSpec layout_drift_spec(uint64_t seed = 1);

}  // namespace pagefuse
