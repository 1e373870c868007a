#include "pagefuse/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "pagefuse/stats.hpp"

namespace pagefuse {

void write_outcomes(const std::vector<PageOutcome>& outcomes, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write outcome file: " + path);
  out << "# run page class intersection union predicted truth\n";
  for (const auto& o : outcomes)
    out << o.run << ' ' << o.page_id << ' ' << o.class_id << ' ' << o.intersection << ' '
        << o.union_count << ' ' << o.predicted_count << ' ' << o.truth_count << '\n';
}

std::vector<PageOutcome> read_outcomes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open outcome file: " + path);
  std::vector<PageOutcome> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    PageOutcome o;
    if (!(ss >> o.run >> o.page_id >> o.class_id >> o.intersection >> o.union_count >>
          o.predicted_count >> o.truth_count))
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed outcome line");
    out.push_back(std::move(o));
  }
  return out;
}

std::string report_metric_name(ReportMetric m) {
  switch (m) {
    case ReportMetric::MIoU: return "mIoU";
    case ReportMetric::P60: return "P@60";
    case ReportMetric::P80: return "P@80";
    case ReportMetric::PRange: return "P@rng";
    case ReportMetric::R60: return "R@60";
    case ReportMetric::R80: return "R@80";
    case ReportMetric::RRange: return "R@rng";
  }
  return "?";
}

MetricRow compute_metric_row(const std::vector<IoUResult>& results, const ThresholdRange& range) {
  MetricRow row;
  auto put = [&row](ReportMetric m, const MeanResult& r) {
    if (!r.empty) row[static_cast<int>(m)] = r.value;
  };
  put(ReportMetric::MIoU, miou(results));
  put(ReportMetric::P60, metric_at_pct(Metric::Precision, results, 60));
  put(ReportMetric::P80, metric_at_pct(Metric::Precision, results, 80));
  put(ReportMetric::PRange, averaged_metric(Metric::Precision, results, range));
  put(ReportMetric::R60, metric_at_pct(Metric::Recall, results, 60));
  put(ReportMetric::R80, metric_at_pct(Metric::Recall, results, 80));
  put(ReportMetric::RRange, averaged_metric(Metric::Recall, results, range));
  return row;
}

void MetricSeries::add(const MetricRow& row) {
  for (int m = 0; m < kReportMetricCount; ++m)
    if (row[m]) values[m].push_back(*row[m]);
}

namespace {

std::string format_cell(const std::vector<double>& vals, const std::vector<double>* baseline) {
  if (vals.empty()) return "-";
  RunStats stats{vals};
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << 100.0 * stats.mean();
  if (vals.size() > 1) ss << "+-" << std::fixed << std::setprecision(2) << 100.0 * stats.stddev();
  if (baseline && baseline->size() >= 2 && vals.size() >= 2) {
    RunStats base{*baseline};
    bool both_const = stats.stddev() == 0.0 && base.stddev() == 0.0;
    if (!both_const) {
      WelchResult w = welch_t_test(vals, *baseline);
      ss << significance_stars(w.p);
    }
  }
  return ss.str();
}

}  // namespace

std::string format_report(const std::vector<ReportEntry>& entries,
                          const std::string& baseline_modality, const ThresholdRange& range) {
  // Baseline series per class for star annotation.
  std::map<std::string, const MetricSeries*> baseline;
  for (const auto& e : entries)
    if (e.modality == baseline_modality) baseline[e.class_name] = &e.series;

  std::vector<std::string> headers = {"modality", "class"};
  for (int m = 0; m < kReportMetricCount; ++m) {
    std::string name = report_metric_name(static_cast<ReportMetric>(m));
    if (name == "P@rng") name = "P@" + range.str();
    if (name == "R@rng") name = "R@" + range.str();
    headers.push_back(name);
  }

  std::vector<std::vector<std::string>> rows;
  for (const auto& e : entries) {
    std::vector<std::string> row = {e.modality, e.class_name};
    const MetricSeries* base = nullptr;
    if (e.modality != baseline_modality) {
      auto it = baseline.find(e.class_name);
      if (it != baseline.end()) base = it->second;
    }
    for (int m = 0; m < kReportMetricCount; ++m)
      row.push_back(format_cell(e.series.values[m], base ? &base->values[m] : nullptr));
    rows.push_back(std::move(row));
  }

  std::vector<size_t> width(headers.size());
  for (size_t c = 0; c < headers.size(); ++c) {
    width[c] = headers[c].size();
    for (const auto& row : rows) width[c] = std::max(width[c], row[c].size());
  }

  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (size_t c = 0; c < row.size(); ++c) {
      out << std::left << std::setw(static_cast<int>(width[c])) << row[c];
      out << (c + 1 < row.size() ? "  " : "");
    }
    out << '\n';
  };
  emit(headers);
  {
    std::vector<std::string> rule;
    for (size_t c = 0; c < headers.size(); ++c) rule.push_back(std::string(width[c], '-'));
    emit(rule);
  }
  for (const auto& row : rows) emit(row);
  out << "stars: Welch's t-test versus the " << baseline_modality
      << " rows; * p<=0.05 ** p<=0.01 *** p<=0.001 **** p<=0.0001\n";
  return out.str();
}

}  // namespace pagefuse
