#include "pagefuse/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "pagefuse/rng.hpp"

namespace pagefuse {

namespace {

using nlohmann::json;

constexpr double kInkFrame = 0.05;
constexpr double kInkRule = 0.05;
constexpr double kInkGrid = 0.15;
constexpr double kInkDrop = 0.23;  // token ink darkens the surface under it
constexpr double kPaper = 0.93;
constexpr double kRegionTint = 0.78;
constexpr int kPlacementRetries = 60;

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void fill_rect(Image& img, const Box& b, double v) {
  for (int y = std::max(0, b.y_min); y < std::min(img.height, b.y_max); ++y)
    for (int x = std::max(0, b.x_min); x < std::min(img.width, b.x_max); ++x)
      img.at(y, x, 0) = v;
}

bool boxes_intersect(const Box& a, const Box& b) {
  return a.x_min < b.x_max && b.x_min < a.x_max && a.y_min < b.y_max && b.y_min < a.y_max;
}

std::string perturb_token(const std::string& text, Rng& rng) {
  if (text.empty()) return text;
  std::string out = text;
  size_t pos = rng.below(out.size());
  out[pos] = static_cast<char>('a' + rng.below(26));
  return out;
}

// Lay rows of small token boxes through `area`, skipping anything that
// touches an excluded rect; paints the boxes and appends the tokens.
void lay_tokens(Rng& rng, const Box& area, const std::vector<std::string>& vocab,
                double ocr_noise, const std::vector<Box>& exclude, Image& img,
                std::vector<Token>& tokens) {
  if (vocab.empty()) return;
  const int token_h = 3;
  for (int y = area.y_min; y + token_h <= area.y_max; y += token_h + 1) {
    int x = area.x_min;
    while (x + 4 <= area.x_max) {
      int w = 4 + static_cast<int>(rng.below(5));
      w = std::min(w, area.x_max - x);
      Box b{x, y, x + w, y + token_h};
      bool blocked = false;
      for (const auto& ex : exclude)
        if (boxes_intersect(b, ex)) {
          blocked = true;
          break;
        }
      if (!blocked) {
        Token t;
        t.text = vocab[rng.below(vocab.size())];
        if (ocr_noise > 0.0 && rng.uniform() < ocr_noise) t.text = perturb_token(t.text, rng);
        t.box = b;
        t.index = static_cast<int>(tokens.size());
        tokens.push_back(std::move(t));
        // Ink darkens whatever it is printed on, so tokens inside a tinted
        // region stay distinguishable from tokens on bare paper.
        for (int ty = b.y_min; ty < b.y_max; ++ty)
          for (int tx = b.x_min; tx < b.x_max; ++tx)
            img.at(ty, tx, 0) = std::max(0.0, img.at(ty, tx, 0) - kInkDrop);
      }
      x += w + 1;
    }
  }
}

struct PlacedRegion {
  Box rect;
  const SynthClassSpec* cls;
};

Box sample_region_rect(Rng& rng, const SynthClassSpec& cls, int W, int H) {
  int w, h;
  switch (cls.archetype) {
    case Archetype::BottomStrip:
      w = W - 2;
      h = static_cast<int>(H * (0.16 + 0.08 * rng.uniform()));
      break;
    case Archetype::PlainColumn:
      w = static_cast<int>(W * (0.28 + 0.10 * rng.uniform()));
      h = static_cast<int>(H * (0.40 + 0.20 * rng.uniform()));
      break;
    default:  // FramedBox, TableGrid
      w = static_cast<int>(W * (0.32 + 0.14 * rng.uniform()));
      h = static_cast<int>(H * (0.28 + 0.14 * rng.uniform()));
      break;
  }
  w = std::min(w, W - 2);
  h = std::min(h, H - 2);

  int x, y;
  if (cls.archetype == Archetype::BottomStrip) {
    x = 1;
  } else {
    x = 1 + static_cast<int>(rng.below(std::max(1, W - 1 - w)));
  }
  switch (cls.position) {
    case RegionPosition::Top:
      y = 1 + static_cast<int>(rng.below(std::max(1, H / 4 - h / 4)));
      break;
    case RegionPosition::Bottom:
      y = H - 1 - h;
      break;
    default:
      y = cls.archetype == Archetype::BottomStrip
              ? H - 1 - h
              : 1 + static_cast<int>(rng.below(std::max(1, H - 1 - h)));
      break;
  }
  return Box{x, y, x + w, y + h};
}

void render_region(Image& img, const Box& r, const SynthClassSpec& cls) {
  int t = std::max(1, cls.frame_thickness);
  // Framed, strip, and grid regions sit on a light tint so their interiors
  // are visually distinct from the page; plain columns differ only by text.
  if (cls.archetype != Archetype::PlainColumn) fill_rect(img, r, kRegionTint);
  switch (cls.archetype) {
    case Archetype::FramedBox: {
      fill_rect(img, {r.x_min, r.y_min, r.x_max, r.y_min + t}, kInkFrame);
      fill_rect(img, {r.x_min, r.y_max - t, r.x_max, r.y_max}, kInkFrame);
      fill_rect(img, {r.x_min, r.y_min, r.x_min + t, r.y_max}, kInkFrame);
      fill_rect(img, {r.x_max - t, r.y_min, r.x_max, r.y_max}, kInkFrame);
      break;
    }
    case Archetype::BottomStrip:
      fill_rect(img, {r.x_min, r.y_min, r.x_max, r.y_min + t}, kInkRule);
      break;
    case Archetype::TableGrid: {
      fill_rect(img, {r.x_min, r.y_min, r.x_max, r.y_min + 1}, kInkGrid);
      fill_rect(img, {r.x_min, r.y_max - 1, r.x_max, r.y_max}, kInkGrid);
      for (int x = r.x_min; x < r.x_max; x += 6)
        fill_rect(img, {x, r.y_min, x + 1, r.y_max}, kInkGrid);
      for (int y = r.y_min; y < r.y_max; y += 5)
        fill_rect(img, {r.x_min, y, r.x_max, y + 1}, kInkGrid);
      break;
    }
    case Archetype::PlainColumn:
      break;
  }
}

Box region_interior(const Box& r, const SynthClassSpec& cls) {
  int pad;
  switch (cls.archetype) {
    case Archetype::FramedBox: pad = cls.frame_thickness + 1; break;
    case Archetype::TableGrid: pad = 2; break;
    case Archetype::BottomStrip: {
      Box b = r;
      b.y_min += cls.frame_thickness + 1;
      b.x_min += 1;
      b.x_max -= 1;
      return b;
    }
    default: pad = 0; break;
  }
  return Box{r.x_min + pad, r.y_min + pad, r.x_max - pad, r.y_max - pad};
}

const ClusterSpec& find_cluster(const CorpusSpec& spec, int id) {
  for (const auto& c : spec.clusters)
    if (c.id == id) return c;
  throw std::runtime_error("corpus spec: unknown cluster id " + std::to_string(id));
}

}  // namespace

Archetype parse_archetype(const std::string& name) {
  if (name == "framed_box") return Archetype::FramedBox;
  if (name == "bottom_strip") return Archetype::BottomStrip;
  if (name == "table_grid") return Archetype::TableGrid;
  if (name == "plain_column") return Archetype::PlainColumn;
  throw std::runtime_error("unknown archetype '" + name + "'");
}

std::string archetype_name(Archetype a) {
  switch (a) {
    case Archetype::FramedBox: return "framed_box";
    case Archetype::BottomStrip: return "bottom_strip";
    case Archetype::TableGrid: return "table_grid";
    case Archetype::PlainColumn: return "plain_column";
  }
  return "?";
}

namespace {

RegionPosition parse_position(const std::string& name) {
  if (name == "free") return RegionPosition::Free;
  if (name == "top") return RegionPosition::Top;
  if (name == "bottom") return RegionPosition::Bottom;
  throw std::runtime_error("unknown region position '" + name + "'");
}

std::string position_name(RegionPosition p) {
  switch (p) {
    case RegionPosition::Free: return "free";
    case RegionPosition::Top: return "top";
    case RegionPosition::Bottom: return "bottom";
  }
  return "?";
}

}  // namespace

void CorpusSpec::validate() const {
  if (page_width <= 4 || page_height <= 4)
    throw std::runtime_error("corpus spec: page too small");
  if (embedding_dim <= 0) throw std::runtime_error("corpus spec: embedding_dim must be positive");
  double total = 0.0;
  for (const auto& c : classes) {
    if (c.frequency < 0.0 || c.frequency > 1.0)
      throw std::runtime_error("corpus spec: class frequency out of [0,1]");
    total += c.frequency;
    find_cluster(*this, c.cluster);
    if (c.id == 0) throw std::runtime_error("corpus spec: class id 0 is reserved for background");
  }
  if (total > static_cast<double>(classes.size()))
    throw std::runtime_error("corpus spec: frequencies out of range");
  find_cluster(*this, background_cluster);
}

std::vector<ClassLabel> CorpusSpec::class_labels() const {
  std::vector<ClassLabel> out;
  out.push_back({0, "background"});
  for (const auto& c : classes) out.push_back({c.id, c.name});
  return out;
}

CorpusSpec apply_drift(const CorpusSpec& spec, int period) {
  auto it = spec.drift.find(period);
  if (it == spec.drift.end()) return spec;
  CorpusSpec out = spec;
  for (const auto& ov : it->second) {
    bool found = false;
    for (auto& c : out.classes) {
      if (c.name != ov.class_name) continue;
      found = true;
      if (ov.archetype) c.archetype = *ov.archetype;
      if (ov.position) c.position = *ov.position;
      if (ov.frame_thickness) c.frame_thickness = *ov.frame_thickness;
      if (ov.cluster) c.cluster = *ov.cluster;
    }
    if (!found)
      throw std::runtime_error("drift override names unknown class '" + ov.class_name + "'");
  }
  return out;
}

std::vector<SyntheticPage> generate_corpus(const CorpusSpec& base_spec, int n_pages, int period) {
  base_spec.validate();
  CorpusSpec spec = apply_drift(base_spec, period);
  std::string hash = corpus_spec_hash(base_spec);
  const int W = spec.page_width, H = spec.page_height;
  const auto& bg_vocab = find_cluster(spec, spec.background_cluster).tokens;

  std::vector<SyntheticPage> out;
  out.reserve(n_pages);
  for (int i = 0; i < n_pages; ++i) {
    uint64_t page_seed = Rng::mix(spec.seed, static_cast<uint64_t>(period) << 32 | i);
    Rng rng(page_seed);

    SyntheticPage sp;
    sp.period = period;
    sp.page_seed = page_seed;
    sp.spec_hash = hash;
    Page& page = sp.page;
    {
      std::ostringstream id;
      id << "t" << period << "_p" << i;
      page.id = id.str();
    }
    page.width = W;
    page.height = H;
    page.image = Image(H, W, 1, kPaper);
    ClassMask mask(H, W, 0);

    bool blank = spec.blank_fraction > 0.0 && rng.uniform() < spec.blank_fraction;
    double freq_scale = spec.blank_fraction < 1.0 ? 1.0 / (1.0 - spec.blank_fraction) : 1.0;

    std::vector<PlacedRegion> placed;
    if (!blank) {
      std::vector<const SynthClassSpec*> wanted;
      for (const auto& cls : spec.classes)
        if (rng.uniform() < std::min(1.0, cls.frequency * freq_scale)) wanted.push_back(&cls);
      // An early region can land where a later one has no legal spot, so a
      // failed class restarts the whole page layout rather than respinning
      // only itself.
      bool all_ok = wanted.empty();
      for (int restart = 0; restart < kPlacementRetries && !all_ok; ++restart) {
        placed.clear();
        all_ok = true;
        for (const SynthClassSpec* cls : wanted) {
          bool ok = false;
          for (int attempt = 0; attempt < kPlacementRetries && !ok; ++attempt) {
            Box rect = sample_region_rect(rng, *cls, W, H);
            bool clash = false;
            for (const auto& p : placed)
              if (boxes_intersect(rect, p.rect)) {
                clash = true;
                break;
              }
            if (clash) continue;
            placed.push_back({rect, cls});
            ok = true;
          }
          if (!ok) {
            all_ok = false;
            break;
          }
        }
      }
      if (!all_ok)
        throw std::runtime_error("generate_corpus: cannot place regions for page '" + page.id +
                                 "'; lower class frequencies or region sizes");
    }

    std::vector<Box> class_rects;
    for (const auto& p : placed) {
      render_region(page.image, p.rect, *p.cls);
      for (int y = p.rect.y_min; y < p.rect.y_max; ++y)
        for (int x = p.rect.x_min; x < p.rect.x_max; ++x) mask.at(y, x) = p.cls->id;
      const auto& vocab = find_cluster(spec, p.cls->cluster).tokens;
      lay_tokens(rng, region_interior(p.rect, *p.cls), vocab, spec.ocr_noise, {}, page.image,
                 page.tokens);
      class_rects.push_back(p.rect);
    }

    // Filler text everywhere else; a one-pixel halo keeps filler tokens
    // clear of class regions.
    std::vector<Box> exclude;
    for (const auto& r : class_rects)
      exclude.push_back({r.x_min - 1, r.y_min - 1, r.x_max + 1, r.y_max + 1});
    lay_tokens(rng, Box{1, 1, W - 1, H - 1}, bg_vocab, spec.ocr_noise, exclude, page.image,
               page.tokens);

    // Scanner-style additive noise.
    for (double& v : page.image.data)
      v = std::clamp(v + rng.uniform(-0.03, 0.03), 0.0, 1.0);

    page.label_mask = std::move(mask);
    out.push_back(std::move(sp));
  }
  return out;
}

EmbeddingStore make_synthetic_store(const CorpusSpec& spec) {
  spec.validate();
  EmbeddingStore store(spec.embedding_dim, OovPolicy::SubwordHash, "synthetic:" + corpus_spec_hash(spec));
  for (const auto& cluster : spec.clusters) {
    Rng crng(cluster.embed_seed);
    std::vector<float> centroid(spec.embedding_dim);
    for (auto& v : centroid) v = static_cast<float>(crng.normal());
    for (const auto& token : cluster.tokens) {
      Rng trng(Rng::mix(cluster.embed_seed, fnv1a64(token)));
      std::vector<float> vec(spec.embedding_dim);
      for (int d = 0; d < spec.embedding_dim; ++d)
        vec[d] = centroid[d] + static_cast<float>(spec.cluster_sigma * trng.normal());
      store.insert(token, std::move(vec));
    }
  }
  return store;
}

CorpusSpec parse_corpus_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("corpus spec: invalid document: ") + e.what());
  }
  CorpusSpec spec;
  spec.page_width = doc.value("page_width", spec.page_width);
  spec.page_height = doc.value("page_height", spec.page_height);
  spec.seed = doc.value("seed", spec.seed);
  spec.embedding_dim = doc.value("embedding_dim", spec.embedding_dim);
  spec.cluster_sigma = doc.value("cluster_sigma", spec.cluster_sigma);
  spec.blank_fraction = doc.value("blank_fraction", spec.blank_fraction);
  spec.ocr_noise = doc.value("ocr_noise", spec.ocr_noise);
  spec.background_cluster = doc.value("background_cluster", spec.background_cluster);
  for (const auto& jc : doc.value("clusters", json::array())) {
    ClusterSpec c;
    c.id = jc.at("id").get<int>();
    c.embed_seed = jc.value("seed", static_cast<uint64_t>(c.id) + 7);
    c.tokens = jc.at("tokens").get<std::vector<std::string>>();
    spec.clusters.push_back(std::move(c));
  }
  for (const auto& jc : doc.value("classes", json::array())) {
    SynthClassSpec c;
    c.id = static_cast<uint8_t>(jc.at("id").get<int>());
    c.name = jc.at("name").get<std::string>();
    c.archetype = parse_archetype(jc.at("archetype").get<std::string>());
    c.cluster = jc.at("cluster").get<int>();
    c.frequency = jc.at("frequency").get<double>();
    c.frame_thickness = jc.value("frame_thickness", c.frame_thickness);
    c.position = parse_position(jc.value("position", std::string("free")));
    spec.classes.push_back(std::move(c));
  }
  if (doc.contains("drift")) {
    for (const auto& [period_key, jovs] : doc["drift"].items()) {
      int period = std::stoi(period_key);
      for (const auto& jo : jovs) {
        ClassOverride ov;
        ov.class_name = jo.at("class").get<std::string>();
        if (jo.contains("archetype"))
          ov.archetype = parse_archetype(jo["archetype"].get<std::string>());
        if (jo.contains("position")) ov.position = parse_position(jo["position"].get<std::string>());
        if (jo.contains("frame_thickness")) ov.frame_thickness = jo["frame_thickness"].get<int>();
        if (jo.contains("cluster")) ov.cluster = jo["cluster"].get<int>();
        spec.drift[period].push_back(std::move(ov));
      }
    }
  }
  spec.validate();
  return spec;
}

CorpusSpec load_corpus_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus spec: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_corpus_spec(ss.str());
}

std::string corpus_spec_to_json(const CorpusSpec& spec) {
  json doc;
  doc["page_width"] = spec.page_width;
  doc["page_height"] = spec.page_height;
  doc["seed"] = spec.seed;
  doc["embedding_dim"] = spec.embedding_dim;
  doc["cluster_sigma"] = spec.cluster_sigma;
  doc["blank_fraction"] = spec.blank_fraction;
  doc["ocr_noise"] = spec.ocr_noise;
  doc["background_cluster"] = spec.background_cluster;
  doc["clusters"] = json::array();
  for (const auto& c : spec.clusters)
    doc["clusters"].push_back({{"id", c.id}, {"seed", c.embed_seed}, {"tokens", c.tokens}});
  doc["classes"] = json::array();
  for (const auto& c : spec.classes)
    doc["classes"].push_back({{"id", c.id},
                              {"name", c.name},
                              {"archetype", archetype_name(c.archetype)},
                              {"cluster", c.cluster},
                              {"frequency", c.frequency},
                              {"frame_thickness", c.frame_thickness},
                              {"position", position_name(c.position)}});
  if (!spec.drift.empty()) {
    doc["drift"] = json::object();
    for (const auto& [period, ovs] : spec.drift) {
      json arr = json::array();
      for (const auto& ov : ovs) {
        json jo;
        jo["class"] = ov.class_name;
        if (ov.archetype) jo["archetype"] = archetype_name(*ov.archetype);
        if (ov.position) jo["position"] = position_name(*ov.position);
        if (ov.frame_thickness) jo["frame_thickness"] = *ov.frame_thickness;
        if (ov.cluster) jo["cluster"] = *ov.cluster;
        arr.push_back(jo);
      }
      doc["drift"][std::to_string(period)] = arr;
    }
  }
  return doc.dump(2);
}

std::string corpus_spec_hash(const CorpusSpec& spec) {
  uint64_t h = fnv1a64(corpus_spec_to_json(spec));
  std::ostringstream ss;
  ss << std::hex << h;
  return ss.str();
}

namespace {

std::vector<std::string> background_vocab() {
  return {"le",  "la",   "de",   "et",  "un",   "une", "les", "des", "il",   "elle",
          "dans", "pour", "sur", "avec", "est", "son", "par", "plus", "pas", "au"};
}

}  // namespace

CorpusSpec confusable_pair_spec(uint64_t seed) {
  CorpusSpec spec;
  spec.seed = seed;
  spec.page_width = 64;
  spec.page_height = 64;
  spec.embedding_dim = 16;
  spec.blank_fraction = 0.1;
  spec.clusters.push_back({0, 101, background_vocab()});
  spec.clusters.push_back({1, 102,
                           {"funeral", "deces", "regrets", "famille", "condoleances", "obseques",
                            "defunt", "memoire", "repose", "paix", "eglise", "ceremonie"}});
  spec.clusters.push_back({2, 103,
                           {"vente", "prix", "offre", "magasin", "solde", "achat", "occasion",
                            "rabais", "boutique", "livraison", "gratuit", "promotion"}});
  // Identical framed-box archetypes, disjoint vocabularies: visually
  // confusable, textually distinct.
  spec.classes.push_back({1, "death_notice", Archetype::FramedBox, 1, 0.5, 2, RegionPosition::Free});
  spec.classes.push_back({2, "advert", Archetype::FramedBox, 2, 0.5, 2, RegionPosition::Free});
  return spec;
}

CorpusSpec layout_drift_spec(uint64_t seed) {
  CorpusSpec spec;
  spec.seed = seed;
  spec.page_width = 64;
  spec.page_height = 64;
  spec.embedding_dim = 16;
  spec.blank_fraction = 0.1;
  spec.clusters.push_back({0, 201, background_vocab()});
  spec.clusters.push_back({1, 202,
                           {"chapitre", "roman", "suite", "episode", "heros", "histoire",
                            "aventure", "conte", "recit", "auteur", "feuilleton", "lecture"}});
  spec.classes.push_back({1, "serial", Archetype::BottomStrip, 1, 0.6, 2, RegionPosition::Bottom});
  // Period 2: the layout convention changes, the vocabulary does not.
  ClassOverride ov;
  ov.class_name = "serial";
  ov.archetype = Archetype::PlainColumn;
  ov.position = RegionPosition::Top;
  spec.drift[2] = {ov};
  return spec;
}

}  // namespace pagefuse
