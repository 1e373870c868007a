#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pagefuse/embedmap.hpp"
#include "pagefuse/page.hpp"

namespace pagefuse {

/// Principal axes of a token-vector set, with the per-axis projection range
/// observed at fit time (used to scale visualizations into [0, 255]).
struct PCAModel {
  int dim = 0;
  std::vector<float> mean;                  // length dim
  std::vector<std::vector<float>> axes;     // k x dim, orthonormal
  std::vector<float> proj_min, proj_max;    // per-axis, over the fitted set

  int axis_count() const { return static_cast<int>(axes.size()); }
  /// Uncentered projection onto axis a; the constant mean offset is absorbed
  /// by the min-max scaling (and by the model's bias terms downstream), so
  /// zero vectors project to exactly zero.
  float project(const std::vector<float>& v, int a) const;
};

/// Fit the top-k principal axes of the distinct nonzero vectors in the set.
/// Deterministic sign convention: the largest-magnitude component of each
/// axis is positive. Throws if fewer than k distinct nonzero vectors exist.
PCAModel fit_pca(const std::vector<std::vector<float>>& vectors, int k = 3);

/// Convenience: fit on all distinct token vectors of a map collection.
PCAModel fit_pca_on_maps(const std::vector<const TextEmbeddingMap*>& maps, int k = 3);

/// False-color rendering: zero-vector pixels are white, token pixels get the
/// per-axis min-max scaled 3-axis projection as (R, G, B). Returns H*W*3 bytes.
std::vector<uint8_t> project_map(const TextEmbeddingMap& map, const PCAModel& pca);

/// PCA-to-k channel reduction of the map's embedding channels; unowned and
/// zero-vector pixels stay exactly zero. `pca` must have at least k axes.
Image reduce_map_channels(const TextEmbeddingMap& map, const PCAModel& pca, int k);

void save_pca(const PCAModel& pca, const std::string& path);
PCAModel load_pca(const std::string& path);

}  // namespace pagefuse
