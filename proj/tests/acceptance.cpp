// Acceptance suite: one criterion per invocation (argv[1] in 1..10), one
// [PASS]/[FAIL] line on stdout, exit 0/1. Criteria with runtime budgets
// enforce them in-process.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pagefuse/experiment.hpp"
#include "pagefuse/fusion.hpp"
#include "pagefuse/model.hpp"
#include "pagefuse/postproc.hpp"
#include "pagefuse/rng.hpp"
#include "pagefuse/segmetrics.hpp"
#include "pagefuse/stats.hpp"
#include "pagefuse/synthgen.hpp"
#include "pagefuse/train.hpp"

using namespace pagefuse;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------- criterion 1: metric-oracle equivalence ----------

struct OracleCounts {
  long long inter = 0, uni = 0, pred = 0, truth = 0;
};

OracleCounts enumerate(const MaskPair& mp) {
  OracleCounts c;
  for (size_t i = 0; i < mp.predicted.size(); ++i) {
    bool p = mp.predicted[i] != 0, g = mp.truth[i] != 0;
    c.inter += p && g;
    c.uni += p || g;
    c.pred += p;
    c.truth += g;
  }
  return c;
}

Outcome oracle_outcome(const OracleCounts& c, int pct) {
  if (c.uni == 0) return Outcome::TN;
  if (c.inter == 0 && c.pred == 0) return Outcome::FN;
  return 100 * c.inter >= static_cast<long long>(pct) * c.uni ? Outcome::TP : Outcome::FP;
}

Check criterion1() {
  Check ck;
  auto t0 = std::chrono::steady_clock::now();
  Rng rng(20260823);
  std::vector<Outcome> lib_outs, oracle_outs;
  for (int trial = 0; trial < 1000; ++trial) {
    MaskPair mp;
    mp.height = 16;
    mp.width = 16;
    mp.predicted.resize(256);
    mp.truth.resize(256);
    // Mixed densities, including frequent all-empty masks.
    double dp = rng.uniform() < 0.15 ? 0.0 : rng.uniform();
    double dg = rng.uniform() < 0.15 ? 0.0 : rng.uniform();
    for (auto& v : mp.predicted) v = rng.uniform() < dp;
    for (auto& v : mp.truth) v = rng.uniform() < dg;

    IoUResult r = iou(mp);
    OracleCounts c = enumerate(mp);
    if (r.intersection != c.inter || r.union_count != c.uni || r.predicted_count != c.pred ||
        r.truth_count != c.truth)
      ck.fail("integer counts diverge from enumeration at trial " + std::to_string(trial));
    for (int pct : {50, 60, 80, 95}) {
      if (classify_outcome_pct(r, pct) != oracle_outcome(c, pct))
        ck.fail("outcome diverges at trial " + std::to_string(trial));
    }
    lib_outs.push_back(classify_outcome_pct(r, 60));
    oracle_outs.push_back(oracle_outcome(c, 60));
  }
  // Precision/recall over the whole population against hand counts.
  long long tp = 0, fp = 0, fn = 0;
  for (Outcome o : oracle_outs) {
    tp += o == Outcome::TP;
    fp += o == Outcome::FP;
    fn += o == Outcome::FN;
  }
  MeanResult p = precision_at(lib_outs), r = recall_at(lib_outs);
  if (tp + fp > 0 && p.value != static_cast<double>(tp) / (tp + fp)) ck.fail("precision mismatch");
  if (tp + fn > 0 && r.value != static_cast<double>(tp) / (tp + fn)) ck.fail("recall mismatch");
  double dt = seconds_since(t0);
  if (dt >= 5.0) ck.fail("runtime budget exceeded: " + std::to_string(dt) + "s");
  return ck;
}

// ---------- criterion 2: mIoU exclusion semantics ----------

Check criterion2() {
  Check ck;
  auto make = [](long long i, long long u) { return IoUResult{i, u, i, u}; };
  MeanResult m = miou({make(4, 4), make(2, 4), make(0, 0)});
  if (m.empty || std::abs(m.value - 0.75) > 1e-15) ck.fail("J-set mean wrong");
  if (m.used != 2 || m.skipped != 1) ck.fail("exclusion counts wrong");
  if (miou({make(5, 5)}).value != 1.0) ck.fail("single defined pair wrong");
  MeanResult all_tn = miou({make(0, 0), make(0, 0), make(0, 0)});
  if (!all_tn.empty) ck.fail("all-undefined must be EMPTY, not a number");
  if (all_tn.value != 0.0 || all_tn.used != 0) ck.fail("EMPTY result carries stray values");
  return ck;
}

// ---------- criterion 3: embedding-map oracle equivalence ----------

Check criterion3() {
  Check ck;
  auto t0 = std::chrono::steady_clock::now();
  EmbeddingStore store(4, OovPolicy::SubwordHash, "acc");
  Rng rng(31337);
  for (int page = 0; page < 1000; ++page) {
    int n = 1 + static_cast<int>(rng.below(6));
    std::vector<Token> tokens;
    for (int i = 0; i < n; ++i) {
      int x0 = static_cast<int>(rng.below(15)), y0 = static_cast<int>(rng.below(15));
      Box b = Box{x0, y0, x0 + 1 + static_cast<int>(rng.below(9)),
                  y0 + 1 + static_cast<int>(rng.below(9))}
                  .clipped(16, 16);
      tokens.push_back({"w" + std::to_string(i), b, i});
    }
    TextEmbeddingMap map = build_map(16, 16, tokens, store);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) {
        // Brute-force closest-center / lowest-index oracle.
        int32_t best = kNoOwner;
        double best_d = 0.0;
        for (const auto& t : tokens) {
          if (!t.box.contains(x, y)) continue;
          auto [cx, cy] = t.box.center();
          double d = (cx - x - 0.5) * (cx - x - 0.5) + (cy - y - 0.5) * (cy - y - 0.5);
          if (best == kNoOwner || d < best_d) {
            best = t.index;
            best_d = d;
          }
        }
        if (map.owner_at(y, x) != best) {
          ck.fail("owner mismatch on page " + std::to_string(page));
          break;
        }
        if (best == kNoOwner && !map.cell_is_zero(y, x)) ck.fail("uncovered pixel not zero");
        if (best != kNoOwner && map.cell(y, x) != store.lookup(tokens[best].text))
          ck.fail("covered pixel carries the wrong vector");
      }
    if (!ck.ok) break;
  }
  double dt = seconds_since(t0);
  if (dt >= 10.0) ck.fail("runtime budget exceeded: " + std::to_string(dt) + "s");
  return ck;
}

// ---------- criterion 4: post-processing boundary behavior ----------

Check criterion4() {
  Check ck;
  // 20x20 page: 5% = 20 px. A 16-px (4%) blob must go, a 20-px blob stays.
  ClassMask mask(20, 20, 0);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) mask.at(y, x) = 1;  // 16 px
  for (int y = 10; y < 14; ++y)
    for (int x = 10; x < 15; ++x) mask.at(y, x) = 2;  // 20 px
  ClassMask filtered = filter_small_components(mask, 0.05);
  if (filtered.count(1) != 0) ck.fail("4% component survived the strict filter");
  if (filtered.count(2) != 20) ck.fail("exactly-5% component was removed");

  Rng rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    ClassMask m(20, 20, 0);
    for (auto& v : m.labels) v = static_cast<uint8_t>(rng.below(4));
    ClassMask once = filter_small_components(m, 0.05);
    if (!(filter_small_components(once, 0.05) == once)) {
      ck.fail("filter not idempotent at trial " + std::to_string(trial));
      break;
    }
  }
  return ck;
}

// ---------- criterion 5: resize budget ----------

Check criterion5() {
  Check ck;
  Rng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    int w = 1 + static_cast<int>(rng.below(4000));
    int h = 1 + static_cast<int>(rng.below(3000));
    Image img(h, w, 1, 0.5);
    ResizeResult r = resize_to_budget(img, {}, 500000);
    long long area = static_cast<long long>(r.image.height) * r.image.width;
    if (area > 500000) {
      ck.fail("area over budget for " + std::to_string(w) + "x" + std::to_string(h));
      break;
    }
    double s = r.scale;
    if (std::abs(r.image.width - w * s) > 1.0 || std::abs(r.image.height - h * s) > 1.0) {
      ck.fail("aspect drifted past rounding for " + std::to_string(w) + "x" + std::to_string(h));
      break;
    }
  }
  return ck;
}

// ---------- criterion 6: gradient check ----------

Check criterion6() {
  Check ck;
  // 6x6 page, 1 image channel + 4 embedding channels, 2 classes.
  const int h = 6, w = 6, cin = 1 + 4, k = 2;
  PixelModel model = PixelModel::create(cin, k, {4}, 606);
  Rng rng(607);
  std::vector<LabeledInput> batch;
  for (int b = 0; b < 2; ++b) {
    LabeledInput li;
    li.input = Image(h, w, cin);
    for (auto& v : li.input.data) v = rng.uniform(-1.0, 1.0);
    li.mask = ClassMask(h, w, 0);
    for (auto& m : li.mask.labels) m = static_cast<uint8_t>(rng.below(k + 1));
    batch.push_back(std::move(li));
  }
  const double reg = 1e-6;
  std::vector<double> grads;
  compute_loss_and_grads(model, batch, reg, grads);
  auto params = model.flatten_parameters();
  const double step = 1e-6;
  double worst = 0.0;
  for (size_t i = 0; i < params.size(); ++i) {
    auto p = params;
    p[i] += step;
    model.load_parameters(p);
    double lp = compute_loss(model, batch, reg);
    p[i] -= 2 * step;
    model.load_parameters(p);
    double lm = compute_loss(model, batch, reg);
    double fd = (lp - lm) / (2 * step);
    double rel = std::abs(grads[i] - fd) / std::max({std::abs(grads[i]), std::abs(fd), 1e-8});
    worst = std::max(worst, rel);
  }
  if (worst >= 1e-4)
    ck.fail("worst relative gradient error " + std::to_string(worst));
  else
    ck.detail = "worst relative error " + std::to_string(worst);
  return ck;
}

// ---------- criteria 7/8 helpers ----------

TrainConfig desk_train_config() {
  TrainConfig tc;
  tc.steps = 1500;
  tc.widths = {8, 8};
  tc.dev_eval_interval = 100;
  tc.learning_rate = 3e-3;  // desk-scale pages tolerate a hotter schedule
  return tc;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / v.size();
}

// Per-seed class mIoU of a trained model over a test set.
double test_miou(const PixelModel& model, const std::vector<Sample>& test, Modality modality,
                 int class_id) {
  std::vector<IoUResult> results;
  for (const auto& sample : test) {
    ProbabilityMap probs = predict(model, make_fused_input(sample, modality));
    ClassMask pred = filter_small_components(argmax_with_background(probs, 0.5), 0.05);
    results.push_back(iou(MaskPair::from_masks(pred, sample.mask, uint8_t(class_id))));
  }
  MeanResult m = miou(results);
  return m.empty ? 0.0 : m.value;
}

Check criterion7() {
  Check ck;
  auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.corpus = confusable_pair_spec(7001);
  cfg.train_pages = 400;
  cfg.test_pages = 100;
  cfg.runs = 5;
  cfg.modalities = {Modality::Image, Modality::ImageText};
  cfg.train = desk_train_config();
  cfg.pca_channels = 4;
  cfg.seed = 7002;
  ExperimentResult res = run_experiment(cfg);

  const int confusable_class = 1;  // death_notice
  auto img = res.series(Modality::Image, confusable_class, ReportMetric::MIoU);
  auto fused = res.series(Modality::ImageText, confusable_class, ReportMetric::MIoU);
  if (img.size() != 5 || fused.size() != 5) {
    ck.fail("expected 5 mIoU observations per modality");
    return ck;
  }
  double gap = 100.0 * (mean_of(fused) - mean_of(img));
  WelchResult wt = welch_t_test(fused, img);
  std::ostringstream d;
  d << "mIoU image " << 100.0 * mean_of(img) << ", image+text " << 100.0 * mean_of(fused)
    << ", gap " << gap << " pts, p " << wt.p;
  ck.detail = d.str();
  if (gap < 10.0) ck.fail("gap below 10 points: " + d.str());
  if (wt.p > 0.05) ck.fail("not significant: " + d.str());
  double dt = seconds_since(t0);
  if (dt >= 900.0) ck.fail("runtime budget exceeded: " + std::to_string(dt) + "s");
  return ck;
}

Check criterion8() {
  Check ck;
  auto t0 = std::chrono::steady_clock::now();
  CorpusSpec spec = layout_drift_spec(8001);
  const int n_train = 300, n_test = 100;

  auto pool = generate_corpus(spec, n_train + n_test, 1);
  std::vector<SyntheticPage> train_pages(pool.begin(), pool.begin() + n_train);
  std::vector<SyntheticPage> test_in(pool.begin() + n_train, pool.end());
  std::vector<SyntheticPage> test_out = generate_corpus(spec, n_test, 2);

  EmbeddingStore store = make_synthetic_store(spec);
  const int pca_k = 4;
  std::vector<SyntheticPage> all = train_pages;
  all.insert(all.end(), test_in.begin(), test_in.end());
  all.insert(all.end(), test_out.begin(), test_out.end());
  std::vector<Sample> samples = make_samples(all, store, pca_k);
  std::vector<Sample> train_samples(samples.begin(), samples.begin() + n_train);
  std::vector<Sample> in_period(samples.begin() + n_train, samples.begin() + n_train + n_test);
  std::vector<Sample> out_period(samples.begin() + n_train + n_test, samples.end());

  TrainConfig tc = desk_train_config();
  std::vector<double> in_img, out_img, in_fused, out_fused, drop_img, drop_fused;
  for (int seed = 0; seed < 5; ++seed) {
    for (Modality m : {Modality::Image, Modality::ImageText}) {
      tc.seed = Rng::mix(8002, (m == Modality::Image ? 0 : 100) + seed);
      TrainResult tr = train(train_samples, m, 1, tc);
      double mi = test_miou(tr.model, in_period, m, 1);
      double mo = test_miou(tr.model, out_period, m, 1);
      if (m == Modality::Image) {
        in_img.push_back(mi);
        out_img.push_back(mo);
        drop_img.push_back(mi - mo);
      } else {
        in_fused.push_back(mi);
        out_fused.push_back(mo);
        drop_fused.push_back(mi - mo);
      }
    }
  }
  double di = 100.0 * mean_of(drop_img);
  double df = 100.0 * mean_of(drop_fused);
  WelchResult wt = welch_t_test(drop_img, drop_fused);
  std::ostringstream d;
  d << "image in/out " << 100.0 * mean_of(in_img) << "/" << 100.0 * mean_of(out_img)
    << " (drop " << di << "), image+text in/out " << 100.0 * mean_of(in_fused) << "/"
    << 100.0 * mean_of(out_fused) << " (drop " << df << "), p " << wt.p;
  ck.detail = d.str();
  if (di < 15.0) ck.fail("image drop below 15 points: " + d.str());
  if (df > di / 2.0) ck.fail("fused drop exceeds half the image drop: " + d.str());
  if (wt.p > 0.05) ck.fail("drop difference not significant: " + d.str());
  double dt = seconds_since(t0);
  if (dt >= 900.0) ck.fail("runtime budget exceeded: " + std::to_string(dt) + "s");
  return ck;
}

// ---------- criterion 9: Welch/stars golden values ----------

Check criterion9() {
  Check ck;
  // Frozen from an arbitrary-precision reference implementation.
  struct Golden {
    std::vector<double> a, b;
    double t, df, p;
  };
  std::vector<Golden> golden = {
      {{1, 2, 3, 4, 5}, {2, 3, 4, 5, 6}, -1.0, 8.0, 0.346593507087},
      {{10.2, 9.8, 10.1, 10.4, 9.9},
       {8.0, 9.5, 9.1, 8.7, 9.3, 8.9, 9.0},
       5.42346083002,
       9.17317551432,
       0.000393229752168},
      {{1, 2, 3}, {10, 20, 35, 50}, -3.05050950437, 3.02609327448, 0.0547844119185},
  };
  for (const auto& g : golden) {
    WelchResult w = welch_t_test(g.a, g.b);
    if (std::abs(w.t - g.t) > 1e-6 * std::max(1.0, std::abs(g.t))) ck.fail("t mismatch");
    if (std::abs(w.df - g.df) > 1e-6 * g.df) ck.fail("df mismatch");
    if (std::abs(w.p - g.p) > 1e-6) ck.fail("p mismatch");
  }
  struct StarCase {
    double p;
    const char* stars;
  };
  for (const auto& c : std::vector<StarCase>{{0.06, ""},
                                             {0.05, "*"},
                                             {0.02, "*"},
                                             {0.01, "**"},
                                             {0.005, "**"},
                                             {0.001, "***"},
                                             {0.0005, "***"},
                                             {0.0001, "****"},
                                             {1e-7, "****"}})
    if (significance_stars(c.p) != c.stars)
      ck.fail("stars wrong at p=" + std::to_string(c.p));
  return ck;
}

// ---------- criterion 10: determinism ----------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Check criterion10() {
  Check ck;
  ExperimentConfig cfg;
  cfg.corpus = confusable_pair_spec(1010);
  cfg.train_pages = 40;
  cfg.test_pages = 10;
  cfg.runs = 2;
  cfg.modalities = {Modality::Image, Modality::Text, Modality::ImageText};
  cfg.train.steps = 60;
  cfg.train.widths = {6};
  cfg.train.dev_eval_interval = 20;
  cfg.pca_channels = 3;
  cfg.seed = 1011;

  cfg.output_dir = "acc10_a";
  run_experiment(cfg);
  cfg.output_dir = "acc10_b";
  run_experiment(cfg);

  for (const auto& entry : fs::directory_iterator("acc10_a")) {
    std::string name = entry.path().filename().string();
    if (name == "timestamp.txt") continue;  // the declared sidecar
    if (slurp(entry.path()) != slurp(fs::path("acc10_b") / name)) {
      ck.fail("output differs between identical reruns: " + name);
      break;
    }
  }
  if (!fs::exists("acc10_b/report.txt")) ck.fail("report missing");
  return ck;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: pagefuse_acceptance <criterion 1..10>\n";
    return 1;
  }
  int n = std::atoi(argv[1]);
  static const char* kNames[] = {
      "",
      "metric-oracle equivalence on 1000 random mask pairs",
      "mIoU true-negative exclusion semantics",
      "embedding-map oracle equivalence on 1000 random pages",
      "post-processing strict 5% filter and idempotence",
      "resize pixel budget and aspect preservation",
      "analytic gradients vs central finite differences",
      "multimodal gain on the confusable-pair corpus",
      "generalization under layout drift",
      "Welch golden values and star cutoffs",
      "byte-identical reports under identical seeds",
  };
  Check ck;
  try {
    switch (n) {
      case 1: ck = criterion1(); break;
      case 2: ck = criterion2(); break;
      case 3: ck = criterion3(); break;
      case 4: ck = criterion4(); break;
      case 5: ck = criterion5(); break;
      case 6: ck = criterion6(); break;
      case 7: ck = criterion7(); break;
      case 8: ck = criterion8(); break;
      case 9: ck = criterion9(); break;
      case 10: ck = criterion10(); break;
      default:
        std::cerr << "unknown criterion " << n << "\n";
        return 1;
    }
  } catch (const std::exception& e) {
    ck.fail(std::string("exception: ") + e.what());
  }
  std::cout << (ck.ok ? "[PASS] " : "[FAIL] ") << "criterion " << n << ": " << kNames[n];
  if (!ck.detail.empty()) std::cout << " (" << ck.detail << ")";
  std::cout << "\n";
  return ck.ok ? 0 : 1;
}
