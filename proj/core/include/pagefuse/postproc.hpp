#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pagefuse/page.hpp"

namespace pagefuse {

/// Per-pixel probabilities over the K non-background classes. Values are
/// sigmoid-style: each in [0,1], no cross-class normalization assumed.
struct ProbabilityMap {
  int height = 0;
  int width = 0;
  int num_classes = 0;
  std::vector<float> probs;  // (y * W + x) * K + k

  ProbabilityMap() = default;
  ProbabilityMap(int h, int w, int k, float fill = 0.0f)
      : height(h), width(w), num_classes(k),
        probs(static_cast<size_t>(h) * w * k, fill) {}

  float at(int y, int x, int k) const {
    return probs[(static_cast<size_t>(y) * width + x) * num_classes + k];
  }
  float& at(int y, int x, int k) {
    return probs[(static_cast<size_t>(y) * width + x) * num_classes + k];
  }
};

/// Connected pixel region of one class.
struct Component {
  uint8_t class_id = 0;
  std::vector<std::pair<int, int>> pixels;  // (y, x)
  Box bounds;
  size_t area() const { return pixels.size(); }
};

/// Pixel -> background (0) when all class probabilities are below theta,
/// otherwise the argmax class (class ids are 1-based; tie -> lowest id).
ClassMask argmax_with_background(const ProbabilityMap& map, double theta = 0.5);

/// Maximal connected sets of `class_id` pixels (8-connectivity by default).
std::vector<Component> connected_components(const ClassMask& mask, uint8_t class_id,
                                            int connectivity = 8);

/// Components (of any class) with area strictly smaller than
/// min_area_ratio * H * W are set to background.
ClassMask filter_small_components(const ClassMask& mask, double min_area_ratio = 0.05,
                                  int connectivity = 8);

/// Probability map file: magic `PRB1`, H, W, K, little-endian 32-bit floats.
void write_probability_map(const ProbabilityMap& map, const std::string& path);
ProbabilityMap read_probability_map(const std::string& path);

}  // namespace pagefuse
