#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pagefuse/fusion.hpp"
#include "pagefuse/pca.hpp"
#include "pagefuse/report.hpp"
#include "pagefuse/synthgen.hpp"
#include "pagefuse/train.hpp"

namespace pagefuse {

/// One full experiment: a synthetic corpus, a train/test split, a set of
/// modalities, repeated training runs, and a report versus the first
/// modality listed (the baseline for star annotations).
struct ExperimentConfig {
  CorpusSpec corpus;
  int train_pages = 400;
  int test_pages = 100;
  int train_period = 1;
  int test_period = 1;          // differs from train_period for drift runs
  double train_fraction = 1.0;  // training-size series use < 1.0
  std::vector<Modality> modalities = {Modality::Image, Modality::Text, Modality::ImageText};
  int runs = 10;
  TrainConfig train;
  int pca_channels = 0;  // > 0 reduces embedding channels before fusion
  uint64_t seed = 1;
  std::string output_dir;  // empty: nothing written to disk
  ThresholdRange range;

  void validate() const;
};

/// One (modality, run) cell with its persisted observations.
struct CellResult {
  Modality modality = Modality::Image;
  int run = 0;
  int best_step = 0;
  double best_dev_loss = 0.0;
  std::vector<PageOutcome> outcomes;
  std::map<int, MetricRow> per_class;  // class id -> columns
  MetricRow micro;                     // pooled over classes
};

struct ExperimentResult {
  std::vector<CellResult> cells;
  std::vector<ReportEntry> entries;  // per (modality, class) + pooled rows
  std::string report;
  int train_count = 0;
  int test_count = 0;

  /// Per-run values of one metric for a modality; class_id 0 selects the
  /// pooled row.
  std::vector<double> series(Modality modality, int class_id, ReportMetric metric) const;
};

/// Build classifier-ready samples from synthetic pages: raw image channels,
/// token boxes, per-token embedding channels (optionally PCA-reduced), and
/// the label mask.
std::vector<Sample> make_samples(const std::vector<SyntheticPage>& pages,
                                 const VectorSource& store, int pca_channels = 0,
                                 PCAModel* fitted_pca = nullptr);

/// Evaluate one prediction against ground truth for every non-background
/// class; appends one outcome record per class.
void evaluate_page(const ClassMask& predicted, const ClassMask& truth, int num_classes, int run,
                   const std::string& page_id, std::vector<PageOutcome>& outcomes);

/// Run all (modality x run) cells: train, predict the held-out pages,
/// post-process (argmax at 0.5, drop components under 5% of page area),
/// evaluate, and format the report. Deterministic under config.seed; when
/// output_dir is set, writes outcome files, the report, a machine-readable
/// results file, and a timestamp sidecar (the only non-reproducible output).
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace pagefuse
