#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pagefuse/fusion.hpp"
#include "pagefuse/model.hpp"

namespace pagefuse {

struct TrainConfig {
  int steps = 2000;             // desk-scale default; full-scale reference value below
  int reference_steps = 17000;  // full-scale setting, unused at desk scale
  int batch_size = 4;
  double learning_rate = 1e-4;
  double lr_decay = 0.95;  // per epoch-equivalent
  double weight_reg = 1e-6;
  double dev_fraction = 0.10;
  double scale_min = 0.8, scale_max = 1.2;
  double rot_min = -0.01, rot_max = 0.01;
  long long pixel_budget = 500000;
  bool use_augment = true;
  int dev_eval_interval = 50;
  std::vector<int> widths = {16, 16};
  uint64_t seed = 0;
  // Adam moments; the optimizer's conventional defaults.
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
};

struct LabeledInput {
  Image input;     // fused channels
  ClassMask mask;  // ground truth (0 = background, 1..K = class)
};

struct TrainLogEntry {
  int step = 0;
  double loss = 0.0;
  double dev_loss = 0.0;
  bool has_dev = false;
};

struct TrainResult {
  PixelModel model;  // snapshot with the lowest dev loss
  std::vector<TrainLogEntry> log;
  double best_dev_loss = 0.0;
  int best_step = 0;
};

/// Mean per-class sigmoid cross-entropy over pixels and classes, plus L2
/// weight regularization; gradients aligned with flatten_parameters().
/// Exposed so tests can check the analytic gradient against finite
/// differences.
double compute_loss_and_grads(const PixelModel& model, const std::vector<LabeledInput>& batch,
                              double weight_reg, std::vector<double>& grads);

double compute_loss(const PixelModel& model, const std::vector<LabeledInput>& batch,
                    double weight_reg);

/// Train a pixel classifier on the samples: deterministic seeded 10% dev
/// split, Adam with exponential learning-rate decay, per-step augmentation,
/// and dev-loss model selection.
TrainResult train(const std::vector<Sample>& dataset, Modality modality, int num_classes,
                  const TrainConfig& config);

void write_train_log(const std::vector<TrainLogEntry>& log, const std::string& path);

}  // namespace pagefuse
