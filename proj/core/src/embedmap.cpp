#include "pagefuse/embedmap.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace pagefuse {

std::vector<int32_t> rasterize_owners(int height, int width, const std::vector<Token>& tokens) {
  std::vector<int32_t> owner(static_cast<size_t>(height) * width, kNoOwner);
  // Tokens are visited in index order, so on an exact distance tie the
  // incumbent (lower index) keeps the pixel.
  for (size_t k = 0; k < tokens.size(); ++k) {
    const Box& b = tokens[k].box;
    auto [kcx, kcy] = b.center();
    for (int y = std::max(0, b.y_min); y < std::min(height, b.y_max); ++y) {
      for (int x = std::max(0, b.x_min); x < std::min(width, b.x_max); ++x) {
        int32_t& cur = owner[static_cast<size_t>(y) * width + x];
        if (cur == kNoOwner) {
          cur = static_cast<int32_t>(k);
          continue;
        }
        double px = x + 0.5, py = y + 0.5;
        auto [ocx, ocy] = tokens[cur].box.center();
        double d_old = (px - ocx) * (px - ocx) + (py - ocy) * (py - ocy);
        double d_new = (px - kcx) * (px - kcx) + (py - kcy) * (py - kcy);
        if (d_new < d_old) cur = static_cast<int32_t>(k);
      }
    }
  }
  return owner;
}

TextEmbeddingMap build_map(int height, int width, const std::vector<Token>& tokens,
                           const VectorSource& store, size_t max_cells) {
  int dim = store.dimension();
  if (dim <= 0) throw std::runtime_error("build_map: embedding dimension must be positive");
  if (height <= 0 || width <= 0) throw std::runtime_error("build_map: empty page");
  size_t cells = static_cast<size_t>(height) * width * dim;
  if (cells > max_cells)
    throw std::runtime_error(
        "build_map: H*W*N exceeds the memory budget; reduce dimensions or use sparse mode");

  TextEmbeddingMap map;
  map.height = height;
  map.width = width;
  map.dim = dim;
  map.token_vectors.reserve(tokens.size());
  for (const auto& t : tokens) map.token_vectors.push_back(store.lookup(t.text));
  map.owner = rasterize_owners(height, width, tokens);
  return map;
}

TextEmbeddingMap build_map(const Page& page, const VectorSource& store, size_t max_cells) {
  return build_map(page.height, page.width, page.tokens, store, max_cells);
}

namespace {

constexpr uint32_t kMapVersion = 1;

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("map file: truncated");
}

}  // namespace

void serialize_map(const TextEmbeddingMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write map file: " + path);
  out.write("TEM1", 4);
  put(out, kMapVersion);
  put(out, static_cast<uint32_t>(map.height));
  put(out, static_cast<uint32_t>(map.width));
  put(out, static_cast<uint32_t>(map.dim));

  // Run-length encode the owner grid; maps are mostly constant runs.
  std::vector<std::pair<int32_t, uint32_t>> runs;
  for (int32_t v : map.owner) {
    if (!runs.empty() && runs.back().first == v && runs.back().second != UINT32_MAX)
      ++runs.back().second;
    else
      runs.push_back({v, 1});
  }
  put(out, static_cast<uint64_t>(runs.size()));
  for (const auto& [v, n] : runs) {
    put(out, v);
    put(out, n);
  }

  put(out, static_cast<uint32_t>(map.token_vectors.size()));
  for (const auto& vec : map.token_vectors)
    out.write(reinterpret_cast<const char*>(vec.data()),
              static_cast<std::streamsize>(vec.size()) * 4);
}

TextEmbeddingMap deserialize_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open map file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "TEM1", 4) != 0)
    throw std::runtime_error("map file: bad magic");
  uint32_t version = 0, h = 0, w = 0, n = 0;
  get(in, version);
  if (version != kMapVersion) throw std::runtime_error("map file: unsupported version");
  get(in, h);
  get(in, w);
  get(in, n);

  TextEmbeddingMap map;
  map.height = static_cast<int>(h);
  map.width = static_cast<int>(w);
  map.dim = static_cast<int>(n);
  size_t total = static_cast<size_t>(h) * w;

  uint64_t run_count = 0;
  get(in, run_count);
  map.owner.reserve(total);
  for (uint64_t i = 0; i < run_count; ++i) {
    int32_t value = 0;
    uint32_t length = 0;
    get(in, value);
    get(in, length);
    if (map.owner.size() + length > total)
      throw std::runtime_error("map file: owner runs exceed grid size");
    map.owner.insert(map.owner.end(), length, value);
  }
  if (map.owner.size() != total) throw std::runtime_error("map file: owner runs short of grid size");

  uint32_t token_count = 0;
  get(in, token_count);
  map.token_vectors.assign(token_count, std::vector<float>(n));
  for (auto& vec : map.token_vectors) {
    in.read(reinterpret_cast<char*>(vec.data()), static_cast<std::streamsize>(n) * 4);
    if (!in) throw std::runtime_error("map file: truncated");
  }
  for (int32_t v : map.owner)
    if (v != kNoOwner && (v < 0 || static_cast<uint32_t>(v) >= token_count))
      throw std::runtime_error("map file: owner index out of range");
  return map;
}

}  // namespace pagefuse
