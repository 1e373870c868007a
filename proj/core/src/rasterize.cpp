#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pagefuse/annotations.hpp"

namespace pagefuse {

bool point_in_polygon(const std::vector<double>& c, double x, double y) {
  size_t n = c.size() / 2;
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    double xi = c[2 * i], yi = c[2 * i + 1];
    double xj = c[2 * j], yj = c[2 * j + 1];
    if ((yi > y) != (yj > y)) {
      double x_cross = xj + (y - yj) / (yi - yj) * (xi - xj);
      if (x < x_cross) inside = !inside;
    }
  }
  return inside;
}

ClassMask rasterize_labels(const std::vector<Region>& regions, int height, int width) {
  if (height <= 0 || width <= 0)
    throw std::runtime_error("rasterize_labels: non-positive dimensions");
  ClassMask mask(height, width, 0);

  // File order; later regions overwrite earlier ones.
  for (const auto& r : regions) {
    if (r.shape == RegionShape::Rect) {
      double x0 = r.coords[0], y0 = r.coords[1], x1 = r.coords[2], y1 = r.coords[3];
      // pixel center (x + 0.5, y + 0.5) in [x0, x1) x [y0, y1)
      int xa = std::max(0, static_cast<int>(std::ceil(x0 - 0.5)));
      int ya = std::max(0, static_cast<int>(std::ceil(y0 - 0.5)));
      int xb = std::min(width, static_cast<int>(std::ceil(x1 - 0.5)));
      int yb = std::min(height, static_cast<int>(std::ceil(y1 - 0.5)));
      for (int y = ya; y < yb; ++y)
        for (int x = xa; x < xb; ++x) mask.at(y, x) = r.class_id;
    } else {
      double min_x = r.coords[0], max_x = r.coords[0];
      double min_y = r.coords[1], max_y = r.coords[1];
      for (size_t i = 0; i < r.coords.size(); i += 2) {
        min_x = std::min(min_x, r.coords[i]);
        max_x = std::max(max_x, r.coords[i]);
        min_y = std::min(min_y, r.coords[i + 1]);
        max_y = std::max(max_y, r.coords[i + 1]);
      }
      int xa = std::max(0, static_cast<int>(std::floor(min_x)));
      int ya = std::max(0, static_cast<int>(std::floor(min_y)));
      int xb = std::min(width, static_cast<int>(std::ceil(max_x)) + 1);
      int yb = std::min(height, static_cast<int>(std::ceil(max_y)) + 1);
      for (int y = ya; y < yb; ++y)
        for (int x = xa; x < xb; ++x)
          if (point_in_polygon(r.coords, x + 0.5, y + 0.5)) mask.at(y, x) = r.class_id;
    }
  }
  return mask;
}

}  // namespace pagefuse
