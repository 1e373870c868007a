#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pagefuse/geometry.hpp"

namespace pagefuse {

/// One OCR word and its clipped bounding box on a page.
struct Token {
  std::string text;
  Box box;
  int index = 0;  // ordinal position in reading order
};

/// Content-item class. Id 0 is reserved for background.
struct ClassLabel {
  uint8_t id = 0;
  std::string name;
};

/// Per-pixel class-id grid, row-major.
struct ClassMask {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> labels;

  ClassMask() = default;
  ClassMask(int h, int w, uint8_t fill = 0)
      : height(h), width(w), labels(static_cast<size_t>(h) * w, fill) {}

  uint8_t at(int y, int x) const { return labels[static_cast<size_t>(y) * width + x]; }
  uint8_t& at(int y, int x) { return labels[static_cast<size_t>(y) * width + x]; }

  size_t count(uint8_t cls) const {
    size_t n = 0;
    for (uint8_t v : labels) n += (v == cls);
    return n;
  }

  bool operator==(const ClassMask&) const = default;
};

/// Dense H x W x C raster, channel-last (HWC) layout. Double precision so
/// training-loss gradients check cleanly against finite differences.
struct Image {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> data;

  Image() = default;
  Image(int h, int w, int c, double fill = 0.0)
      : height(h), width(w), channels(c),
        data(static_cast<size_t>(h) * w * c, fill) {}

  const double& at(int y, int x, int c) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  double& at(int y, int x, int c) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }

  bool operator==(const Image&) const = default;
};

/// Canonical in-memory page: image raster, OCR tokens, optional ground truth.
struct Page {
  std::string id;
  int width = 0;
  int height = 0;
  std::vector<Token> tokens;
  Image image;
  std::optional<ClassMask> label_mask;
};

}  // namespace pagefuse
