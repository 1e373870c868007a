// pagefuse: command-line entry point wiring the library into pipelines.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pagefuse/annotations.hpp"
#include "pagefuse/embedmap.hpp"
#include "pagefuse/embeddings.hpp"
#include "pagefuse/experiment.hpp"
#include "pagefuse/model.hpp"
#include "pagefuse/pca.hpp"
#include "pagefuse/png_io.hpp"
#include "pagefuse/postproc.hpp"
#include "pagefuse/synthgen.hpp"
#include "pagefuse/token_io.hpp"
#include "pagefuse/train.hpp"

using namespace pagefuse;
namespace fs = std::filesystem;

namespace {

std::map<std::string, ClassLabel> parse_class_list(const std::string& csv) {
  std::map<std::string, ClassLabel> out;
  std::istringstream ss(csv);
  std::string name;
  uint8_t id = 1;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    out[name] = ClassLabel{id++, name};
  }
  if (out.empty()) throw std::runtime_error("empty class list");
  return out;
}

CorpusSpec load_scenario(const std::string& scenario, uint64_t seed) {
  if (scenario == "confusable") return confusable_pair_spec(seed);
  if (scenario == "drift") return layout_drift_spec(seed);
  CorpusSpec spec = load_corpus_spec(scenario);  // treat as a spec file path
  spec.seed = seed ? seed : spec.seed;
  return spec;
}

std::shared_ptr<EmbeddingStore> open_store(const std::string& vectors, const std::string& cache,
                                           const std::string& oov) {
  OovPolicy policy = oov == "zero" ? OovPolicy::Zero : OovPolicy::SubwordHash;
  if (!cache.empty())
    return std::make_shared<EmbeddingStore>(EmbeddingStore::load_cache(cache, policy));
  if (!vectors.empty())
    return std::make_shared<EmbeddingStore>(EmbeddingStore::load_vectors(vectors, policy));
  throw std::runtime_error("need --vectors or --cache");
}

std::vector<Modality> parse_modalities(const std::string& csv) {
  std::vector<Modality> out;
  std::istringstream ss(csv);
  std::string name;
  while (std::getline(ss, name, ',')) out.push_back(parse_modality(name));
  if (out.empty()) throw std::runtime_error("empty modality list");
  return out;
}

// ---------- commands ----------

int cmd_ingest(const std::string& tokens_path, const std::string& ann_path,
               const std::string& classes_csv, const std::string& out_dir) {
  auto class_map = parse_class_list(classes_csv);
  auto pages = parse_token_file(tokens_path);
  fs::create_directories(out_dir);

  std::map<std::string, PageAnnotations> ann_by_id;
  int without_annotations = 0;
  if (!ann_path.empty()) {
    for (auto& pa : parse_annotations(ann_path, class_map)) ann_by_id[pa.page_id] = std::move(pa);
  }
  for (const auto& pt : pages) {
    auto it = ann_by_id.find(pt.page_id);
    if (it == ann_by_id.end() || it->second.regions.empty()) {
      ++without_annotations;
      if (it == ann_by_id.end()) continue;
    }
    ClassMask mask = rasterize_labels(it->second.regions, pt.height, pt.width);
    write_mask_png((fs::path(out_dir) / (pt.page_id + "_mask.png")).string(), mask);
  }
  std::cout << "pages: " << pages.size() << "\npages without annotations: " << without_annotations
            << "\n";
  for (const auto& pt : pages)
    std::cout << pt.page_id << ": " << pt.tokens.size() << " tokens, " << pt.dropped
              << " dropped\n";
  return 0;
}

int cmd_synth(const std::string& scenario, int n_pages, int period, uint64_t seed,
              const std::string& out_dir) {
  CorpusSpec spec = load_scenario(scenario, seed);
  auto pages = generate_corpus(spec, n_pages, period);
  fs::create_directories(out_dir);

  std::vector<PageTokens> token_pages;
  std::vector<PageAnnotations> ann_pages;
  for (const auto& sp : pages) {
    const Page& p = sp.page;
    token_pages.push_back({p.id, p.width, p.height, p.tokens, 0});
    write_image_png((fs::path(out_dir) / (p.id + ".png")).string(), p.image);
    write_mask_png((fs::path(out_dir) / (p.id + "_mask.png")).string(), *p.label_mask);

    PageAnnotations pa;
    pa.page_id = p.id;
    // Rect per connected run of each class; the synthetic generator emits
    // one rect per class instance, so the bounding rect is exact.
    for (const auto& cls : spec.classes) {
      const ClassMask& m = *p.label_mask;
      int x0 = p.width, y0 = p.height, x1 = -1, y1 = -1;
      for (int y = 0; y < p.height; ++y)
        for (int x = 0; x < p.width; ++x)
          if (m.at(y, x) == cls.id) {
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
          }
      if (x1 >= 0)
        pa.regions.push_back({RegionShape::Rect,
                              {double(x0), double(y0), double(x1 + 1), double(y1 + 1)},
                              cls.id,
                              cls.name});
    }
    ann_pages.push_back(std::move(pa));
  }
  write_token_file((fs::path(out_dir) / "tokens.txt").string(), token_pages);
  write_annotations((fs::path(out_dir) / "annotations.json").string(), ann_pages);
  {
    std::ofstream out(fs::path(out_dir) / "corpus_spec.json", std::ios::binary);
    out << corpus_spec_to_json(spec) << '\n';
  }
  std::cout << "wrote " << pages.size() << " pages to " << out_dir << "\n";
  return 0;
}

int cmd_build_maps(const std::string& tokens_path, const std::string& vectors,
                   const std::string& cache, const std::string& oov, const std::string& out_dir) {
  auto store = open_store(vectors, cache, oov);
  auto pages = parse_token_file(tokens_path);
  fs::create_directories(out_dir);
  for (const auto& pt : pages) {
    TextEmbeddingMap map = build_map(pt.height, pt.width, pt.tokens, *store);
    serialize_map(map, (fs::path(out_dir) / (pt.page_id + ".tem")).string());
  }
  std::cout << "wrote " << pages.size() << " maps to " << out_dir << "\n";
  return 0;
}

int cmd_visualize(const std::string& map_path, const std::string& pca_path,
                  const std::string& save_pca_path, const std::string& out_path) {
  TextEmbeddingMap map = deserialize_map(map_path);
  PCAModel pca = pca_path.empty() ? fit_pca_on_maps({&map}, 3) : load_pca(pca_path);
  auto rgb = project_map(map, pca);
  write_rgb_png(out_path, map.height, map.width, rgb);
  if (!save_pca_path.empty()) save_pca(pca, save_pca_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_train(const std::string& scenario, const std::string& modality_name, int pages,
              int steps, int pca_channels, uint64_t seed, const std::string& model_out,
              const std::string& log_out, const std::string& save_pca_path) {
  CorpusSpec spec = load_scenario(scenario, seed);
  Modality modality = parse_modality(modality_name);
  auto corpus = generate_corpus(spec, pages, 1);
  EmbeddingStore store = make_synthetic_store(spec);
  PCAModel fitted;
  std::vector<Sample> samples = make_samples(corpus, store, pca_channels, &fitted);
  if (!save_pca_path.empty()) {
    if (pca_channels <= 0)
      throw std::runtime_error("--save-pca requires --pca-channels > 0");
    save_pca(fitted, save_pca_path);
  }
  int num_classes = 0;
  for (const auto& c : spec.classes) num_classes = std::max(num_classes, int(c.id));

  TrainConfig cfg;
  cfg.steps = steps;
  cfg.seed = seed;
  TrainResult result = train(samples, modality, num_classes, cfg);
  save_model(result.model, model_out);
  if (!log_out.empty()) write_train_log(result.log, log_out);
  std::cout << "best dev loss " << result.best_dev_loss << " at step " << result.best_step
            << "; model written to " << model_out << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& image_path,
                const std::string& tokens_path, const std::string& vectors,
                const std::string& cache, const std::string& oov, const std::string& pca_path,
                const std::string& modality_name, const std::string& out_prefix) {
  PixelModel model = load_model(model_path);
  Modality modality = parse_modality(modality_name);

  Sample sample;
  sample.image = read_image_png(image_path);
  if (!tokens_path.empty()) {
    auto pages = parse_token_file(tokens_path);
    if (pages.size() != 1)
      throw std::runtime_error("predict expects a single-page token file");
    sample.tokens = pages[0].tokens;
    auto store = open_store(vectors, cache, oov);
    if (!pca_path.empty()) {
      PCAModel pca = load_pca(pca_path);
      for (const auto& t : sample.tokens) {
        auto v = store->lookup(t.text);
        std::vector<float> reduced(pca.axis_count());
        for (int a = 0; a < pca.axis_count(); ++a) reduced[a] = pca.project(v, a);
        sample.token_channels.push_back(std::move(reduced));
      }
    } else {
      for (const auto& t : sample.tokens) sample.token_channels.push_back(store->lookup(t.text));
    }
  }
  auto resized = resize_to_budget(sample.image, sample.tokens);
  sample.image = resized.image;
  sample.tokens = resized.tokens;

  Image input = make_fused_input(sample, modality);
  ProbabilityMap probs = predict(model, input);
  ClassMask mask = filter_small_components(argmax_with_background(probs, 0.5), 0.05);
  write_probability_map(probs, out_prefix + ".prb");
  write_mask_png(out_prefix + "_mask.png", mask);
  std::cout << "wrote " << out_prefix << ".prb and " << out_prefix << "_mask.png\n";
  return 0;
}

int cmd_evaluate(const std::string& pred_dir, const std::string& gt_dir, int num_classes,
                 const std::string& range_str, const std::string& report_out) {
  ThresholdRange range = ThresholdRange::parse(range_str);
  std::vector<PageOutcome> outcomes;
  int pages = 0;
  for (const auto& entry : fs::directory_iterator(gt_dir)) {
    if (entry.path().extension() != ".png") continue;
    fs::path pred_path = fs::path(pred_dir) / entry.path().filename();
    if (!fs::exists(pred_path))
      throw std::runtime_error("missing prediction for " + entry.path().filename().string());
    ClassMask truth = read_mask_png(entry.path().string());
    ClassMask pred = read_mask_png(pred_path.string());
    ++pages;
    for (int c = 1; c <= num_classes; ++c) {
      IoUResult r = iou(MaskPair::from_masks(pred, truth, static_cast<uint8_t>(c)));
      outcomes.push_back({0, entry.path().stem().string(), c, r.intersection, r.union_count,
                          r.predicted_count, r.truth_count});
    }
  }
  if (pages == 0) throw std::runtime_error("no ground-truth masks in " + gt_dir);

  std::vector<ReportEntry> entries;
  for (int c = 0; c <= num_classes; ++c) {
    std::vector<IoUResult> results;
    for (const auto& o : outcomes)
      if (c == 0 || o.class_id == c) results.push_back(o.iou());
    ReportEntry e;
    e.modality = "eval";
    e.class_name = c == 0 ? "average" : "class" + std::to_string(c);
    e.series.add(compute_metric_row(results, range));
    if (c != 0) entries.push_back(std::move(e));
    else entries.insert(entries.end(), std::move(e));
  }
  std::string report = format_report(entries, "eval", range);
  if (report_out.empty()) {
    std::cout << report;
  } else {
    std::ofstream out(report_out, std::ios::binary);
    out << report;
    write_outcomes(outcomes, report_out + ".outcomes");
    std::cout << "wrote " << report_out << "\n";
  }
  return 0;
}

int cmd_experiment(const std::string& scenario, const std::string& modalities_csv, int runs,
                   int train_pages, int test_pages, int train_period, int test_period,
                   double train_fraction, int steps, int pca_channels, uint64_t seed,
                   const std::string& out_dir) {
  ExperimentConfig cfg;
  cfg.corpus = load_scenario(scenario, seed);
  cfg.modalities = parse_modalities(modalities_csv);
  cfg.runs = runs;
  cfg.train_pages = train_pages;
  cfg.test_pages = test_pages;
  cfg.train_period = train_period;
  cfg.test_period = test_period;
  cfg.train_fraction = train_fraction;
  cfg.train.steps = steps;
  cfg.pca_channels = pca_channels;
  cfg.seed = seed;
  cfg.output_dir = out_dir;
  ExperimentResult res = run_experiment(cfg);
  std::cout << res.report;
  if (!out_dir.empty()) std::cout << "artifacts in " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pagefuse: text-embedding-map segmentation toolkit"};
  app.require_subcommand(1);

  uint64_t seed = 1;

  // ingest
  std::string tokens_path, ann_path, classes_csv, out_dir;
  auto* ingest = app.add_subcommand("ingest", "parse tokens + annotations, write masks");
  ingest->add_option("--tokens", tokens_path)->required();
  ingest->add_option("--annotations", ann_path);
  ingest->add_option("--classes", classes_csv, "comma-separated class names (ids 1..n)")
      ->required();
  ingest->add_option("--out", out_dir)->required();

  // synth
  std::string scenario = "confusable";
  int n_pages = 100, period = 1;
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--scenario", scenario, "confusable | drift | path to a spec file");
  synth->add_option("--pages", n_pages);
  synth->add_option("--period", period);
  synth->add_option("--seed", seed);
  synth->add_option("--out", out_dir)->required();

  // build-maps
  std::string vectors, cache, oov = "subword";
  auto* maps = app.add_subcommand("build-maps", "rasterize token embedding maps");
  maps->add_option("--tokens", tokens_path)->required();
  maps->add_option("--vectors", vectors, "text vector file");
  maps->add_option("--cache", cache, "binary vector cache");
  maps->add_option("--oov", oov)->check(CLI::IsMember({"zero", "subword"}));
  maps->add_option("--out", out_dir)->required();

  // visualize
  std::string map_path, pca_path, save_pca_path, out_path;
  auto* vis = app.add_subcommand("visualize", "false-color PCA rendering of a map");
  vis->add_option("--map", map_path)->required();
  vis->add_option("--pca", pca_path, "existing PCA model (fit on the map when absent)");
  vis->add_option("--save-pca", save_pca_path);
  vis->add_option("--out", out_path)->required();

  // train
  std::string modality = "image+text", model_out, log_out;
  int steps = 2000, pca_channels = 4, pages = 200;
  auto* tr = app.add_subcommand("train", "train a pixel classifier on a synthetic corpus");
  tr->add_option("--scenario", scenario);
  tr->add_option("--modality", modality);
  tr->add_option("--pages", pages);
  tr->add_option("--steps", steps);
  tr->add_option("--pca-channels", pca_channels);
  tr->add_option("--seed", seed);
  tr->add_option("--out", model_out)->required();
  tr->add_option("--log", log_out);
  std::string train_save_pca;
  tr->add_option("--save-pca", train_save_pca, "write the fitted PCA for later predict calls");

  // predict
  std::string model_path, image_path, out_prefix;
  auto* pr = app.add_subcommand("predict", "predict masks for one page");
  pr->add_option("--model", model_path)->required();
  pr->add_option("--image", image_path)->required();
  pr->add_option("--tokens", tokens_path);
  pr->add_option("--vectors", vectors);
  pr->add_option("--cache", cache);
  pr->add_option("--oov", oov)->check(CLI::IsMember({"zero", "subword"}));
  pr->add_option("--pca", pca_path);
  pr->add_option("--modality", modality);
  pr->add_option("--out", out_prefix)->required();

  // evaluate
  std::string pred_dir, gt_dir, range_str = "50:5:95", report_out;
  int num_classes = 4;
  auto* ev = app.add_subcommand("evaluate", "evaluate predicted masks against ground truth");
  ev->add_option("--pred", pred_dir)->required();
  ev->add_option("--gt", gt_dir)->required();
  ev->add_option("--classes", num_classes);
  ev->add_option("--range", range_str);
  ev->add_option("--out", report_out);

  // experiment
  std::string modalities_csv = "image,text,image+text";
  int runs = 10, train_pages = 400, test_pages = 100, train_period = 1, test_period = 1;
  double train_fraction = 1.0;
  auto* ex = app.add_subcommand("experiment", "modality ablation with repeated runs");
  ex->add_option("--scenario", scenario);
  ex->add_option("--modalities", modalities_csv);
  ex->add_option("--runs", runs);
  ex->add_option("--train-pages", train_pages);
  ex->add_option("--test-pages", test_pages);
  ex->add_option("--train-period", train_period);
  ex->add_option("--test-period", test_period);
  ex->add_option("--train-fraction", train_fraction);
  ex->add_option("--steps", steps);
  ex->add_option("--pca-channels", pca_channels);
  ex->add_option("--seed", seed);
  ex->add_option("--out", out_dir);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return cmd_ingest(tokens_path, ann_path, classes_csv, out_dir);
    if (*synth) return cmd_synth(scenario, n_pages, period, seed, out_dir);
    if (*maps) return cmd_build_maps(tokens_path, vectors, cache, oov, out_dir);
    if (*vis) return cmd_visualize(map_path, pca_path, save_pca_path, out_path);
    if (*tr) return cmd_train(scenario, modality, pages, steps, pca_channels, seed, model_out,
                              log_out, train_save_pca);
    if (*pr) return cmd_predict(model_path, image_path, tokens_path, vectors, cache, oov,
                                pca_path, modality, out_prefix);
    if (*ev) return cmd_evaluate(pred_dir, gt_dir, num_classes, range_str, report_out);
    if (*ex) return cmd_experiment(scenario, modalities_csv, runs, train_pages, test_pages,
                                   train_period, test_period, train_fraction, steps, pca_channels,
                                   seed, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::string what = e.what();
    bool numeric = what.find("diverged") != std::string::npos ||
                   what.find("degenerate") != std::string::npos ||
                   what.find("variance") != std::string::npos;
    return numeric ? 3 : 2;
  }
  return 1;
}
