#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pagefuse/embeddings.hpp"
#include "pagefuse/page.hpp"

namespace pagefuse {

constexpr int32_t kNoOwner = -1;

/// H x W x N pixel-to-embedding map. Stored as an owner grid (token index
/// per pixel, or kNoOwner) plus one vector per token; a cell's value is the
/// owning token's vector, or the zero vector where no token covers it.
struct TextEmbeddingMap {
  int height = 0;
  int width = 0;
  int dim = 0;
  std::vector<int32_t> owner;                      // H*W, row-major
  std::vector<std::vector<float>> token_vectors;   // indexed by token index

  int32_t owner_at(int y, int x) const { return owner[static_cast<size_t>(y) * width + x]; }

  /// Copy of the cell's embedding vector (zero vector for unowned cells).
  std::vector<float> cell(int y, int x) const {
    int32_t k = owner_at(y, x);
    if (k == kNoOwner) return std::vector<float>(dim, 0.0f);
    return token_vectors[k];
  }

  bool cell_is_zero(int y, int x) const {
    int32_t k = owner_at(y, x);
    if (k == kNoOwner) return true;
    for (float v : token_vectors[k])
      if (v != 0.0f) return false;
    return true;
  }
};

/// Build the map for a page: a pixel covered by exactly one token box takes
/// that token's vector; covered by several, the token whose box center is
/// nearest the pixel center wins (exact tie: lowest token index); covered by
/// none, the zero vector. `max_cells` bounds H*W*N.
TextEmbeddingMap build_map(const Page& page, const VectorSource& store,
                           size_t max_cells = size_t{1} << 31);

TextEmbeddingMap build_map(int height, int width, const std::vector<Token>& tokens,
                           const VectorSource& store, size_t max_cells = size_t{1} << 31);

/// The ownership rasterization alone: token index per pixel (kNoOwner where
/// no box covers the pixel), closest-center / lowest-index rule on overlap.
std::vector<int32_t> rasterize_owners(int height, int width, const std::vector<Token>& tokens);

/// Map file: magic `TEM1`, version, H, W, N, run-length encoded owner grid,
/// token-vector dictionary, little-endian 32-bit floats.
void serialize_map(const TextEmbeddingMap& map, const std::string& path);
TextEmbeddingMap deserialize_map(const std::string& path);

}  // namespace pagefuse
