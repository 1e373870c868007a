#include "pagefuse/segmetrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pagefuse {

MaskPair MaskPair::from_masks(const ClassMask& predicted, const ClassMask& truth,
                              uint8_t class_id) {
  if (predicted.height != truth.height || predicted.width != truth.width)
    throw std::runtime_error("mask pair: dimension mismatch");
  MaskPair pair;
  pair.height = predicted.height;
  pair.width = predicted.width;
  pair.predicted.resize(predicted.labels.size());
  pair.truth.resize(truth.labels.size());
  for (size_t i = 0; i < predicted.labels.size(); ++i) {
    pair.predicted[i] = predicted.labels[i] == class_id;
    pair.truth[i] = truth.labels[i] == class_id;
  }
  return pair;
}

void ThresholdRange::validate() const {
  if (step <= 0) throw std::runtime_error("threshold range: step must be positive");
  if (start > end) throw std::runtime_error("threshold range: start > end");
  if ((end - start) % step != 0)
    throw std::runtime_error("threshold range: (end - start) not divisible by step");
  if (start <= 0 || end > 100) throw std::runtime_error("threshold range: bounds in (0,100]");
}

std::vector<int> ThresholdRange::percents() const {
  validate();
  std::vector<int> out;
  for (int t = start; t <= end; t += step) out.push_back(t);
  return out;
}

ThresholdRange ThresholdRange::parse(const std::string& text) {
  ThresholdRange r;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> r.start >> c1 >> r.step >> c2 >> r.end) || c1 != ':' || c2 != ':')
    throw std::runtime_error("threshold range: expected start:step:end, got '" + text + "'");
  r.validate();
  return r;
}

std::string ThresholdRange::str() const {
  return std::to_string(start) + ":" + std::to_string(step) + ":" + std::to_string(end);
}

IoUResult iou(const MaskPair& pair) {
  if (pair.predicted.size() != pair.truth.size())
    throw std::runtime_error("iou: dimension mismatch");
  IoUResult r;
  for (size_t i = 0; i < pair.predicted.size(); ++i) {
    bool p = pair.predicted[i] != 0;
    bool g = pair.truth[i] != 0;
    r.intersection += (p && g);
    r.union_count += (p || g);
    r.predicted_count += p;
    r.truth_count += g;
  }
  return r;
}

MeanResult miou(const std::vector<IoUResult>& results) {
  MeanResult m;
  double sum = 0.0;
  for (const auto& r : results) {
    if (!r.defined()) {
      ++m.skipped;
      continue;
    }
    sum += r.value();
    ++m.used;
  }
  if (m.used > 0) {
    m.empty = false;
    m.value = sum / m.used;
  }
  return m;
}

Outcome classify_outcome(const IoUResult& r, double tau) {
  if (!r.defined()) return Outcome::TN;
  if (r.intersection == 0 && r.predicted_count == 0) return Outcome::FN;
  if (static_cast<double>(r.intersection) >= tau * static_cast<double>(r.union_count))
    return Outcome::TP;
  return Outcome::FP;
}

Outcome classify_outcome_pct(const IoUResult& r, int tau_pct) {
  if (!r.defined()) return Outcome::TN;
  if (r.intersection == 0 && r.predicted_count == 0) return Outcome::FN;
  if (100 * r.intersection >= static_cast<long long>(tau_pct) * r.union_count)
    return Outcome::TP;
  return Outcome::FP;
}

namespace {

MeanResult ratio_from_counts(long long num, long long den) {
  MeanResult m;
  if (den > 0) {
    m.empty = false;
    m.value = static_cast<double>(num) / static_cast<double>(den);
    m.used = 1;
  }
  return m;
}

}  // namespace

MeanResult precision_at(const std::vector<Outcome>& outcomes) {
  long long tp = 0, fp = 0;
  for (Outcome o : outcomes) {
    tp += o == Outcome::TP;
    fp += o == Outcome::FP;
  }
  return ratio_from_counts(tp, tp + fp);
}

MeanResult recall_at(const std::vector<Outcome>& outcomes) {
  long long tp = 0, fn = 0;
  for (Outcome o : outcomes) {
    tp += o == Outcome::TP;
    fn += o == Outcome::FN;
  }
  return ratio_from_counts(tp, tp + fn);
}

MeanResult metric_at_pct(Metric metric, const std::vector<IoUResult>& results, int tau_pct) {
  std::vector<Outcome> outcomes;
  outcomes.reserve(results.size());
  for (const auto& r : results) outcomes.push_back(classify_outcome_pct(r, tau_pct));
  return metric == Metric::Precision ? precision_at(outcomes) : recall_at(outcomes);
}

MeanResult averaged_metric(Metric metric, const std::vector<IoUResult>& results,
                           const ThresholdRange& range) {
  MeanResult m;
  double sum = 0.0;
  for (int pct : range.percents()) {
    MeanResult at = metric_at_pct(metric, results, pct);
    if (at.empty) {
      ++m.skipped;
      continue;
    }
    sum += at.value;
    ++m.used;
  }
  if (m.used > 0) {
    m.empty = false;
    m.value = sum / m.used;
  }
  return m;
}

double RunStats::mean() const {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double RunStats::stddev() const {
  if (values.size() < 2) return 0.0;
  double m = mean();
  double s = 0.0;
  for (double v : values) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(values.size() - 1));
}

}  // namespace pagefuse
