#include "pagefuse/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "pagefuse/rng.hpp"

namespace pagefuse {

namespace {

struct LayerGrads {
  std::vector<double> weights;
  std::vector<double> bias;
};

// Backprop one image through the model; accumulates into layer_grads
// (scaled by `scale`) and returns the data loss.
double backprop_image(const PixelModel& model, const LabeledInput& sample,
                      std::vector<LayerGrads>& layer_grads, double scale) {
  std::vector<Image> acts;  // input + post-ReLU hidden activations
  Image logits = forward_logits(model, sample.input, &acts);
  const int h = logits.height, w = logits.width, k = logits.channels;
  const double denom = static_cast<double>(h) * w * k;

  // Sigmoid cross-entropy per class; dL/dz = (sigma(z) - y) / denom.
  double loss = 0.0;
  Image grad_out(h, w, k);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      uint8_t cls = sample.mask.at(y, x);
      for (int c = 0; c < k; ++c) {
        double z = logits.at(y, x, c);
        double target = (cls == c + 1) ? 1.0 : 0.0;
        loss += std::max(z, 0.0) - z * target + std::log1p(std::exp(-std::abs(z)));
        double sigma = 1.0 / (1.0 + std::exp(-z));
        grad_out.at(y, x, c) = (sigma - target) / denom;
      }
    }
  }
  loss /= denom;

  // Walk the layers backwards.
  for (int li = static_cast<int>(model.layers.size()) - 1; li >= 0; --li) {
    const ConvLayer& layer = model.layers[li];
    const Image& in = acts[li];
    const int ci = layer.in_channels, co = layer.out_channels;
    LayerGrads& lg = layer_grads[li];
    Image grad_in(h, w, ci);

    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double* go = &grad_out.at(y, x, 0);
        for (int oc = 0; oc < co; ++oc)
          lg.bias[oc] += go[oc] * scale;
        for (int ky = 0; ky < 3; ++ky) {
          int sy = y + ky - 1;
          if (sy < 0 || sy >= h) continue;
          for (int kx = 0; kx < 3; ++kx) {
            int sx = x + kx - 1;
            if (sx < 0 || sx >= w) continue;
            const double* in_px = &in.at(sy, sx, 0);
            double* gin_px = &grad_in.at(sy, sx, 0);
            for (int oc = 0; oc < co; ++oc) {
              double g = go[oc] * scale;
              double go_oc = go[oc];
              size_t wbase = ((static_cast<size_t>(oc) * 3 + ky) * 3 + kx) * ci;
              double* gw = &lg.weights[wbase];
              const double* wp = &layer.weights[wbase];
              for (int ic = 0; ic < ci; ++ic) {
                gw[ic] += g * in_px[ic];
                gin_px[ic] += go_oc * wp[ic];
              }
            }
          }
        }
      }
    }

    if (li > 0) {
      // Through the ReLU that produced acts[li].
      for (size_t i = 0; i < grad_in.data.size(); ++i)
        if (in.data[i] <= 0.0) grad_in.data[i] = 0.0;
      grad_out = std::move(grad_in);
    }
  }
  return loss;
}

std::vector<double> flatten_grads(const PixelModel& model,
                                 const std::vector<LayerGrads>& layer_grads) {
  std::vector<double> flat;
  flat.reserve(model.parameter_count());
  for (const auto& lg : layer_grads) {
    flat.insert(flat.end(), lg.weights.begin(), lg.weights.end());
    flat.insert(flat.end(), lg.bias.begin(), lg.bias.end());
  }
  return flat;
}

}  // namespace

double compute_loss_and_grads(const PixelModel& model, const std::vector<LabeledInput>& batch,
                              double weight_reg, std::vector<double>& grads) {
  if (batch.empty()) throw std::runtime_error("train: empty batch");
  std::vector<LayerGrads> layer_grads(model.layers.size());
  for (size_t i = 0; i < model.layers.size(); ++i) {
    layer_grads[i].weights.assign(model.layers[i].weights.size(), 0.0);
    layer_grads[i].bias.assign(model.layers[i].bias.size(), 0.0);
  }

  double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const auto& sample : batch) loss += backprop_image(model, sample, layer_grads, scale);
  loss *= scale;

  // L2 on weights only.
  double reg_loss = 0.0;
  for (size_t li = 0; li < model.layers.size(); ++li) {
    const auto& w = model.layers[li].weights;
    auto& gw = layer_grads[li].weights;
    for (size_t i = 0; i < w.size(); ++i) {
      reg_loss += 0.5 * weight_reg * static_cast<double>(w[i]) * w[i];
      gw[i] += weight_reg * w[i];
    }
  }
  grads = flatten_grads(model, layer_grads);
  return loss + reg_loss;
}

double compute_loss(const PixelModel& model, const std::vector<LabeledInput>& batch,
                    double weight_reg) {
  if (batch.empty()) throw std::runtime_error("train: empty batch");
  double loss = 0.0;
  for (const auto& sample : batch) {
    Image logits = forward_logits(model, sample.input);
    const int h = logits.height, w = logits.width, k = logits.channels;
    double img_loss = 0.0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        uint8_t cls = sample.mask.at(y, x);
        for (int c = 0; c < k; ++c) {
          double z = logits.at(y, x, c);
          double target = (cls == c + 1) ? 1.0 : 0.0;
          img_loss += std::max(z, 0.0) - z * target + std::log1p(std::exp(-std::abs(z)));
        }
      }
    loss += img_loss / (static_cast<double>(h) * w * k);
  }
  loss /= static_cast<double>(batch.size());
  for (const auto& layer : model.layers)
    for (double w : layer.weights) loss += 0.5 * weight_reg * w * w;
  return loss;
}

TrainResult train(const std::vector<Sample>& dataset, Modality modality, int num_classes,
                  const TrainConfig& config) {
  if (dataset.empty()) throw std::runtime_error("train: empty dataset");
  if (num_classes <= 0) throw std::runtime_error("train: num_classes must be positive");

  Rng rng(config.seed);

  // Deterministic seeded shuffle, then a 10% dev split.
  std::vector<size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  for (size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.below(i)]);
  size_t dev_count = static_cast<size_t>(dataset.size() * config.dev_fraction);
  if (dev_count == 0) throw std::runtime_error("train: dev split is empty; add more samples");
  std::vector<size_t> dev_idx(order.begin(), order.begin() + dev_count);
  std::vector<size_t> train_idx(order.begin() + dev_count, order.end());
  if (train_idx.empty()) throw std::runtime_error("train: no training samples after dev split");

  // Dev inputs are fixed (no augmentation); fuse them once.
  std::vector<LabeledInput> dev_batch;
  dev_batch.reserve(dev_idx.size());
  for (size_t i : dev_idx)
    dev_batch.push_back({make_fused_input(dataset[i], modality), dataset[i].mask});

  int in_channels = dev_batch.front().input.channels;
  PixelModel model = PixelModel::create(in_channels, num_classes, config.widths, rng.next());

  size_t n_params = model.parameter_count();
  std::vector<double> m1(n_params, 0.0), m2(n_params, 0.0);
  int epoch_steps = std::max<int>(1, static_cast<int>(train_idx.size()) / config.batch_size);

  TrainResult result;
  result.best_dev_loss = compute_loss(model, dev_batch, config.weight_reg);
  result.best_step = 0;
  std::vector<double> best_params = model.flatten_parameters();

  std::vector<double> params = model.flatten_parameters();
  std::vector<double> grads;

  for (int step = 1; step <= config.steps; ++step) {
    std::vector<LabeledInput> batch;
    batch.reserve(config.batch_size);
    for (int b = 0; b < config.batch_size; ++b) {
      const Sample& base = dataset[train_idx[rng.below(train_idx.size())]];
      if (config.use_augment) {
        Sample aug = augment(base, rng, config.scale_min, config.scale_max, config.rot_min,
                             config.rot_max);
        batch.push_back({make_fused_input(aug, modality), aug.mask});
      } else {
        batch.push_back({make_fused_input(base, modality), base.mask});
      }
    }

    double loss = compute_loss_and_grads(model, batch, config.weight_reg, grads);
    if (std::isnan(loss) || std::isinf(loss))
      throw std::runtime_error("train: loss diverged (NaN/inf) at step " + std::to_string(step));

    double lr = config.learning_rate * std::pow(config.lr_decay, step / epoch_steps);
    double bc1 = 1.0 - std::pow(config.adam_beta1, step);
    double bc2 = 1.0 - std::pow(config.adam_beta2, step);
    for (size_t i = 0; i < n_params; ++i) {
      double g = grads[i];
      m1[i] = config.adam_beta1 * m1[i] + (1.0 - config.adam_beta1) * g;
      m2[i] = config.adam_beta2 * m2[i] + (1.0 - config.adam_beta2) * g * g;
      double update = lr * (m1[i] / bc1) / (std::sqrt(m2[i] / bc2) + config.adam_eps);
      params[i] = params[i] - update;
    }
    model.load_parameters(params);

    TrainLogEntry entry;
    entry.step = step;
    entry.loss = loss;
    if (step % config.dev_eval_interval == 0 || step == config.steps) {
      entry.dev_loss = compute_loss(model, dev_batch, config.weight_reg);
      entry.has_dev = true;
      if (entry.dev_loss < result.best_dev_loss) {
        result.best_dev_loss = entry.dev_loss;
        result.best_step = step;
        best_params = params;
      }
    }
    result.log.push_back(entry);
  }

  model.load_parameters(best_params);
  result.model = std::move(model);
  return result;
}

void write_train_log(const std::vector<TrainLogEntry>& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write training log: " + path);
  for (const auto& e : log) {
    out << e.step << ' ' << e.loss;
    if (e.has_dev) out << ' ' << e.dev_loss;
    out << '\n';
  }
}

}  // namespace pagefuse
