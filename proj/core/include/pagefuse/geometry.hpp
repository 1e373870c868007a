#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

namespace pagefuse {

/// Axis-aligned box in pixel coordinates, origin top-left,
/// half-open on the max edges: a pixel (x, y) belongs to the box
/// iff x_min <= x < x_max and y_min <= y < y_max.
struct Box {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  int width() const { return x_max - x_min; }
  int height() const { return y_max - y_min; }
  long long area() const {
    return empty() ? 0 : static_cast<long long>(width()) * height();
  }
  bool empty() const { return x_min >= x_max || y_min >= y_max; }

  bool contains(int x, int y) const {
    return x >= x_min && x < x_max && y >= y_min && y < y_max;
  }

  std::pair<double, double> center() const {
    return {(x_min + x_max) / 2.0, (y_min + y_max) / 2.0};
  }

  Box clipped(int page_w, int page_h) const {
    Box b;
    b.x_min = std::clamp(x_min, 0, page_w);
    b.y_min = std::clamp(y_min, 0, page_h);
    b.x_max = std::clamp(x_max, 0, page_w);
    b.y_max = std::clamp(y_max, 0, page_h);
    return b;
  }

  /// Scale by s with floor on mins, ceil on maxes, so a non-empty box
  /// stays non-empty for any s > 0.
  Box scaled(double s) const {
    Box b;
    b.x_min = static_cast<int>(std::floor(x_min * s));
    b.y_min = static_cast<int>(std::floor(y_min * s));
    b.x_max = static_cast<int>(std::ceil(x_max * s));
    b.y_max = static_cast<int>(std::ceil(y_max * s));
    return b;
  }

  bool operator==(const Box&) const = default;
};

}  // namespace pagefuse
