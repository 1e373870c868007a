#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pagefuse/page.hpp"
#include "pagefuse/postproc.hpp"

namespace pagefuse {

/// 3x3 same-padding convolution. Weight layout: [out][ky][kx][in],
/// matching the HWC activation layout so the inner loop is contiguous.
struct ConvLayer {
  int in_channels = 0;
  int out_channels = 0;
  std::vector<double> weights;  // out * 3 * 3 * in
  std::vector<double> bias;     // out
};

/// Small convolutional per-pixel classifier: a stack of 3x3 conv + ReLU
/// layers with per-class sigmoid outputs on the last layer.
struct PixelModel {
  std::vector<ConvLayer> layers;

  int input_channels() const { return layers.empty() ? 0 : layers.front().in_channels; }
  int num_classes() const { return layers.empty() ? 0 : layers.back().out_channels; }

  size_t parameter_count() const;
  std::vector<double> flatten_parameters() const;
  void load_parameters(const std::vector<double>& flat);

  /// He-initialized model; `widths` are the hidden layer widths
  /// (default 16/16), the final layer has num_classes outputs.
  static PixelModel create(int input_channels, int num_classes,
                           const std::vector<int>& widths, uint64_t seed);
};

/// Forward pass; returns per-class sigmoid probabilities.
ProbabilityMap predict(const PixelModel& model, const Image& input);

/// Pre-sigmoid logits of the last layer (used by the training loss).
Image forward_logits(const PixelModel& model, const Image& input,
                     std::vector<Image>* activations = nullptr);

/// Model file: magic `PXM1`, version, layer widths, little-endian 32-bit
/// floats (parameters are rounded to single precision on disk).
void save_model(const PixelModel& model, const std::string& path);
PixelModel load_model(const std::string& path);

}  // namespace pagefuse
