#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pagefuse/page.hpp"

namespace pagefuse {

/// Predicted and ground-truth pixel sets for one image and one class,
/// stored as bitmaps of equal dimensions.
struct MaskPair {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> predicted;  // 0/1
  std::vector<uint8_t> truth;      // 0/1

  static MaskPair from_masks(const ClassMask& predicted, const ClassMask& truth,
                             uint8_t class_id);
};

/// Exact integer intersection/union counts. The IoU value is undefined
/// (a true negative) iff the union is empty.
struct IoUResult {
  long long intersection = 0;
  long long union_count = 0;
  long long predicted_count = 0;
  long long truth_count = 0;

  bool defined() const { return union_count > 0; }
  double value() const {
    return static_cast<double>(intersection) / static_cast<double>(union_count);
  }
};

enum class Outcome { TP, TN, FP, FN };

/// Integer-percent threshold sweep a:s:b, e.g. 50:5:95.
struct ThresholdRange {
  int start = 50;
  int step = 5;
  int end = 95;

  void validate() const;
  std::vector<int> percents() const;
  static ThresholdRange parse(const std::string& text);  // "50:5:95"
  std::string str() const;
};

/// Mean that distinguishes "no defined observations" from zero.
struct MeanResult {
  bool empty = true;
  double value = 0.0;
  int used = 0;
  int skipped = 0;
};

IoUResult iou(const MaskPair& pair);

/// Mean IoU over the pairs whose union is nonempty (true negatives are
/// excluded). All pairs undefined -> empty result, never a silent zero.
MeanResult miou(const std::vector<IoUResult>& results);

/// Case analysis at threshold tau (in (0,1]):
/// undefined -> TN; zero IoU with no predicted pixels -> FN;
/// IoU >= tau -> TP; otherwise FP.
Outcome classify_outcome(const IoUResult& result, double tau);
/// Same, with exact integer arithmetic at an integer percent threshold.
Outcome classify_outcome_pct(const IoUResult& result, int tau_pct);

MeanResult precision_at(const std::vector<Outcome>& outcomes);
MeanResult recall_at(const std::vector<Outcome>& outcomes);

enum class Metric { Precision, Recall };

/// P@tau or R@tau at a single integer percent threshold.
MeanResult metric_at_pct(Metric metric, const std::vector<IoUResult>& results, int tau_pct);

/// Unweighted mean of the metric over the range's thresholds; undefined
/// thresholds are skipped and the divisor reduced.
MeanResult averaged_metric(Metric metric, const std::vector<IoUResult>& results,
                           const ThresholdRange& range);

/// Per-run values of one metric across repeated training runs.
struct RunStats {
  std::vector<double> values;

  double mean() const;
  double stddev() const;  // sample standard deviation (n-1)
};

}  // namespace pagefuse
