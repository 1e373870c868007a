#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pagefuse/segmetrics.hpp"

namespace pagefuse {

/// One persisted per-page, per-class observation. Reports are recomputed
/// from these records; no arithmetic lives only in the report layer.
struct PageOutcome {
  int run = 0;
  std::string page_id;
  int class_id = 0;
  long long intersection = 0;
  long long union_count = 0;
  long long predicted_count = 0;
  long long truth_count = 0;

  IoUResult iou() const {
    return {intersection, union_count, predicted_count, truth_count};
  }
};

void write_outcomes(const std::vector<PageOutcome>& outcomes, const std::string& path);
std::vector<PageOutcome> read_outcomes(const std::string& path);

/// The report's column set.
enum class ReportMetric { MIoU, P60, P80, PRange, R60, R80, RRange };
constexpr int kReportMetricCount = 7;
std::string report_metric_name(ReportMetric m);

/// One run's column values for one class (or the pooled micro-average);
/// a column is absent when every observation was undefined.
using MetricRow = std::array<std::optional<double>, kReportMetricCount>;

MetricRow compute_metric_row(const std::vector<IoUResult>& results, const ThresholdRange& range);

/// Column series over repeated runs, one vector per metric.
struct MetricSeries {
  std::array<std::vector<double>, kReportMetricCount> values;

  void add(const MetricRow& row);
};

struct ReportEntry {
  std::string modality;
  std::string class_name;  // "average" for the pooled row
  MetricSeries series;
};

/// Fixed-width table with one row per (modality, class): mean and standard
/// deviation over runs for every column, plus significance stars against
/// the first modality's matching row (Welch two-tailed, inclusive cutoffs).
/// Entries sharing the baseline modality carry no stars.
std::string format_report(const std::vector<ReportEntry>& entries,
                          const std::string& baseline_modality, const ThresholdRange& range);

}  // namespace pagefuse
