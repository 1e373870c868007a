#include "pagefuse/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "pagefuse/model.hpp"
#include "pagefuse/pca.hpp"
#include "pagefuse/postproc.hpp"
#include "pagefuse/segmetrics.hpp"

namespace pagefuse {

namespace fs = std::filesystem;
using nlohmann::json;

void ExperimentConfig::validate() const {
  corpus.validate();
  if (train_pages <= 0 || test_pages <= 0)
    throw std::runtime_error("experiment: page counts must be positive");
  if (train_fraction <= 0.0 || train_fraction > 1.0)
    throw std::runtime_error("experiment: train_fraction must be in (0,1]");
  if (runs < 1) throw std::runtime_error("experiment: runs must be >= 1");
  if (modalities.empty()) throw std::runtime_error("experiment: no modalities listed");
  range.validate();
}

std::vector<Sample> make_samples(const std::vector<SyntheticPage>& pages,
                                 const VectorSource& store, int pca_channels,
                                 PCAModel* fitted_pca) {
  PCAModel pca;
  if (pca_channels > 0) {
    std::set<std::vector<float>> distinct;
    for (const auto& sp : pages)
      for (const auto& t : sp.page.tokens) distinct.insert(store.lookup(t.text));
    pca = fit_pca(std::vector<std::vector<float>>(distinct.begin(), distinct.end()),
                  pca_channels);
  }
  if (fitted_pca) *fitted_pca = pca;

  std::vector<Sample> out;
  out.reserve(pages.size());
  for (const auto& sp : pages) {
    const Page& page = sp.page;
    if (!page.label_mask) throw std::runtime_error("experiment: page '" + page.id +
                                                   "' carries no label mask");
    Sample s;
    s.image = page.image;
    s.tokens = page.tokens;
    s.mask = *page.label_mask;
    s.token_channels.reserve(page.tokens.size());
    for (const auto& t : page.tokens) {
      std::vector<float> v = store.lookup(t.text);
      if (pca_channels > 0) {
        std::vector<float> reduced(pca_channels);
        for (int a = 0; a < pca_channels; ++a) reduced[a] = pca.project(v, a);
        v = std::move(reduced);
      }
      s.token_channels.push_back(std::move(v));
    }
    out.push_back(std::move(s));
  }
  return out;
}

void evaluate_page(const ClassMask& predicted, const ClassMask& truth, int num_classes, int run,
                   const std::string& page_id, std::vector<PageOutcome>& outcomes) {
  for (int c = 1; c <= num_classes; ++c) {
    IoUResult r = iou(MaskPair::from_masks(predicted, truth, static_cast<uint8_t>(c)));
    outcomes.push_back({run, page_id, c, r.intersection, r.union_count, r.predicted_count,
                        r.truth_count});
  }
}

namespace {

MetricRow row_for(const std::vector<PageOutcome>& outcomes, int class_id,
                  const ThresholdRange& range) {
  std::vector<IoUResult> results;
  for (const auto& o : outcomes)
    if (class_id == 0 || o.class_id == class_id) results.push_back(o.iou());
  return compute_metric_row(results, range);
}

json series_json(const MetricSeries& s) {
  json obj = json::object();
  for (int m = 0; m < kReportMetricCount; ++m)
    obj[report_metric_name(static_cast<ReportMetric>(m))] = s.values[m];
  return obj;
}

}  // namespace

std::vector<double> ExperimentResult::series(Modality modality, int class_id,
                                             ReportMetric metric) const {
  std::vector<double> out;
  for (const auto& cell : cells) {
    if (cell.modality != modality) continue;
    const MetricRow& row = class_id == 0 ? cell.micro : cell.per_class.at(class_id);
    auto v = row[static_cast<int>(metric)];
    if (v) out.push_back(*v);
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();

  // Train pool and test set; a shared pool keeps same-period page seeds
  // disjoint between the two.
  std::vector<SyntheticPage> train_pages, test_pages;
  if (config.test_period == config.train_period) {
    auto pool = generate_corpus(config.corpus, config.train_pages + config.test_pages,
                                config.train_period);
    test_pages.assign(pool.begin() + config.train_pages, pool.end());
    pool.resize(config.train_pages);
    train_pages = std::move(pool);
  } else {
    train_pages = generate_corpus(config.corpus, config.train_pages, config.train_period);
    test_pages = generate_corpus(config.corpus, config.test_pages, config.test_period);
  }
  size_t train_count =
      std::max<size_t>(1, static_cast<size_t>(train_pages.size() * config.train_fraction));
  train_pages.resize(train_count);

  EmbeddingStore store = make_synthetic_store(config.corpus);
  std::vector<SyntheticPage> all_pages = train_pages;
  all_pages.insert(all_pages.end(), test_pages.begin(), test_pages.end());
  std::vector<Sample> all_samples = make_samples(all_pages, store, config.pca_channels);
  std::vector<Sample> train_samples(all_samples.begin(),
                                    all_samples.begin() + train_pages.size());
  std::vector<Sample> test_samples(all_samples.begin() + train_pages.size(), all_samples.end());

  int num_classes = 0;
  for (const auto& c : config.corpus.classes) num_classes = std::max(num_classes, int(c.id));
  if (num_classes == 0) throw std::runtime_error("experiment: corpus has no classes");

  if (!config.output_dir.empty()) fs::create_directories(config.output_dir);

  ExperimentResult result;
  result.train_count = static_cast<int>(train_samples.size());
  result.test_count = static_cast<int>(test_samples.size());

  for (size_t mi = 0; mi < config.modalities.size(); ++mi) {
    Modality modality = config.modalities[mi];
    for (int run = 0; run < config.runs; ++run) {
      TrainConfig tc = config.train;
      tc.seed = Rng::mix(config.seed, mi * 1000003ull + static_cast<uint64_t>(run));

      TrainResult trained = train(train_samples, modality, num_classes, tc);

      CellResult cell;
      cell.modality = modality;
      cell.run = run;
      cell.best_step = trained.best_step;
      cell.best_dev_loss = trained.best_dev_loss;
      for (size_t ti = 0; ti < test_samples.size(); ++ti) {
        Image input = make_fused_input(test_samples[ti], modality);
        ProbabilityMap probs = predict(trained.model, input);
        ClassMask pred = argmax_with_background(probs, 0.5);
        pred = filter_small_components(pred, 0.05);
        evaluate_page(pred, test_samples[ti].mask, num_classes, run, test_pages[ti].page.id,
                      cell.outcomes);
      }
      for (int c = 1; c <= num_classes; ++c)
        cell.per_class[c] = row_for(cell.outcomes, c, config.range);
      cell.micro = row_for(cell.outcomes, 0, config.range);

      if (!config.output_dir.empty()) {
        std::ostringstream name;
        name << "outcomes_" << modality_name(modality) << "_run" << run << ".txt";
        std::string fname = name.str();
        std::replace(fname.begin(), fname.end(), '+', '-');
        write_outcomes(cell.outcomes, (fs::path(config.output_dir) / fname).string());
      }
      result.cells.push_back(std::move(cell));
    }
  }

  // Rows: per class then the pooled row, for each modality in listed order.
  std::map<int, std::string> class_names;
  for (const auto& c : config.corpus.classes) class_names[c.id] = c.name;
  for (Modality modality : config.modalities) {
    for (const auto& [cid, cname] : class_names) {
      ReportEntry e;
      e.modality = modality_name(modality);
      e.class_name = cname;
      for (const auto& cell : result.cells)
        if (cell.modality == modality) e.series.add(cell.per_class.at(cid));
      result.entries.push_back(std::move(e));
    }
    ReportEntry avg;
    avg.modality = modality_name(modality);
    avg.class_name = "average";
    for (const auto& cell : result.cells)
      if (cell.modality == modality) avg.series.add(cell.micro);
    result.entries.push_back(std::move(avg));
  }

  std::string baseline = modality_name(config.modalities.front());
  result.report = format_report(result.entries, baseline, config.range);

  if (!config.output_dir.empty()) {
    fs::path dir(config.output_dir);
    {
      std::ofstream out(dir / "report.txt", std::ios::binary);
      out << result.report;
    }
    {
      json doc;
      doc["baseline"] = baseline;
      doc["train_pages"] = result.train_count;
      doc["test_pages"] = result.test_count;
      doc["runs"] = config.runs;
      doc["seed"] = config.seed;
      doc["rows"] = json::array();
      for (const auto& e : result.entries)
        doc["rows"].push_back({{"modality", e.modality},
                               {"class", e.class_name},
                               {"metrics", series_json(e.series)}});
      std::ofstream out(dir / "results.json", std::ios::binary);
      out << doc.dump(2) << '\n';
    }
    {
      // The only output allowed to differ between identical reruns.
      auto now = std::chrono::system_clock::now().time_since_epoch();
      std::ofstream out(dir / "timestamp.txt", std::ios::binary);
      out << std::chrono::duration_cast<std::chrono::seconds>(now).count() << '\n';
    }
  }
  return result;
}

}  // namespace pagefuse
