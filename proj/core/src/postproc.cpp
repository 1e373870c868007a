#include "pagefuse/postproc.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace pagefuse {

ClassMask argmax_with_background(const ProbabilityMap& map, double theta) {
  if (theta <= 0.0 || theta >= 1.0)
    throw std::runtime_error("argmax_with_background: theta must be in (0,1)");
  ClassMask mask(map.height, map.width, 0);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      int best = -1;
      float best_p = 0.0f;
      for (int k = 0; k < map.num_classes; ++k) {
        float p = map.at(y, x, k);
        if (p >= theta && (best == -1 || p > best_p)) {
          best = k;
          best_p = p;
        }
      }
      mask.at(y, x) = best == -1 ? 0 : static_cast<uint8_t>(best + 1);
    }
  }
  return mask;
}

std::vector<Component> connected_components(const ClassMask& mask, uint8_t class_id,
                                            int connectivity) {
  if (connectivity != 4 && connectivity != 8)
    throw std::runtime_error("connected_components: connectivity must be 4 or 8");
  const int h = mask.height, w = mask.width;
  std::vector<uint8_t> visited(static_cast<size_t>(h) * w, 0);
  std::vector<Component> out;
  std::vector<std::pair<int, int>> stack;

  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      size_t si = static_cast<size_t>(sy) * w + sx;
      if (visited[si] || mask.labels[si] != class_id) continue;

      Component comp;
      comp.class_id = class_id;
      comp.bounds = {sx, sy, sx + 1, sy + 1};
      stack.clear();
      stack.push_back({sy, sx});
      visited[si] = 1;
      while (!stack.empty()) {
        auto [y, x] = stack.back();
        stack.pop_back();
        comp.pixels.push_back({y, x});
        comp.bounds.x_min = std::min(comp.bounds.x_min, x);
        comp.bounds.y_min = std::min(comp.bounds.y_min, y);
        comp.bounds.x_max = std::max(comp.bounds.x_max, x + 1);
        comp.bounds.y_max = std::max(comp.bounds.y_max, y + 1);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dy == 0 && dx == 0) continue;
            if (connectivity == 4 && dy != 0 && dx != 0) continue;
            int ny = y + dy, nx = x + dx;
            if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
            size_t ni = static_cast<size_t>(ny) * w + nx;
            if (visited[ni] || mask.labels[ni] != class_id) continue;
            visited[ni] = 1;
            stack.push_back({ny, nx});
          }
        }
      }
      out.push_back(std::move(comp));
    }
  }
  return out;
}

ClassMask filter_small_components(const ClassMask& mask, double min_area_ratio,
                                  int connectivity) {
  if (min_area_ratio < 0.0 || min_area_ratio > 1.0)
    throw std::runtime_error("filter_small_components: ratio must be in [0,1]");
  double min_area = min_area_ratio * mask.height * mask.width;

  ClassMask out = mask;
  std::vector<uint8_t> classes;
  for (uint8_t v : mask.labels)
    if (v != 0 && std::find(classes.begin(), classes.end(), v) == classes.end())
      classes.push_back(v);

  for (uint8_t cls : classes) {
    for (const auto& comp : connected_components(mask, cls, connectivity)) {
      // Strict: a component of exactly min_area pixels is kept.
      if (static_cast<double>(comp.area()) < min_area) {
        for (auto [y, x] : comp.pixels) out.at(y, x) = 0;
      }
    }
  }
  return out;
}

void write_probability_map(const ProbabilityMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write probability map: " + path);
  out.write("PRB1", 4);
  uint32_t h = map.height, w = map.width, k = map.num_classes;
  out.write(reinterpret_cast<const char*>(&h), 4);
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&k), 4);
  out.write(reinterpret_cast<const char*>(map.probs.data()),
            static_cast<std::streamsize>(map.probs.size()) * 4);
}

ProbabilityMap read_probability_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open probability map: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "PRB1", 4) != 0)
    throw std::runtime_error("probability map: bad magic");
  uint32_t h = 0, w = 0, k = 0;
  in.read(reinterpret_cast<char*>(&h), 4);
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&k), 4);
  if (!in) throw std::runtime_error("probability map: truncated header");
  ProbabilityMap map(static_cast<int>(h), static_cast<int>(w), static_cast<int>(k));
  in.read(reinterpret_cast<char*>(map.probs.data()),
          static_cast<std::streamsize>(map.probs.size()) * 4);
  if (!in) throw std::runtime_error("probability map: truncated data");
  return map;
}

}  // namespace pagefuse
