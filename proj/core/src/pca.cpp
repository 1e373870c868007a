#include "pagefuse/pca.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace pagefuse {

namespace {

// Cyclic Jacobi eigen decomposition of a symmetric matrix (row-major n x n).
// Returns eigenvalues and fills `vectors` with the eigenvectors as rows.
std::vector<double> jacobi_eigen(std::vector<double> a, int n,
                                 std::vector<std::vector<double>>& vectors) {
  vectors.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) vectors[i][i] = 1.0;

  auto A = [&](int i, int j) -> double& { return a[static_cast<size_t>(i) * n + j]; };

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += A(i, j) * A(i, j);
    if (off < 1e-24) break;

    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = A(p, q);
        if (std::abs(apq) < 1e-30) continue;
        double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int i = 0; i < n; ++i) {
          double aip = A(i, p), aiq = A(i, q);
          A(i, p) = c * aip - s * aiq;
          A(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          double api = A(p, i), aqi = A(q, i);
          A(p, i) = c * api - s * aqi;
          A(q, i) = s * api + c * aqi;
        }
        for (int i = 0; i < n; ++i) {
          double vip = vectors[i][p], viq = vectors[i][q];
          vectors[i][p] = c * vip - s * viq;
          vectors[i][q] = s * vip + c * viq;
        }
      }
    }
  }
  std::vector<double> eigenvalues(n);
  for (int i = 0; i < n; ++i) eigenvalues[i] = A(i, i);
  // Transpose: row i of the result is eigenvector i.
  std::vector<std::vector<double>> rows(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) rows[j][i] = vectors[i][j];
  vectors = std::move(rows);
  return eigenvalues;
}

}  // namespace

float PCAModel::project(const std::vector<float>& v, int a) const {
  const auto& axis = axes[a];
  double acc = 0.0;
  for (size_t i = 0; i < axis.size(); ++i) acc += static_cast<double>(axis[i]) * v[i];
  return static_cast<float>(acc);
}

PCAModel fit_pca(const std::vector<std::vector<float>>& vectors, int k) {
  if (k <= 0) throw std::runtime_error("fit_pca: k must be positive");

  // Deduplicate exactly and drop zero vectors before fitting.
  std::set<std::vector<float>> distinct;
  for (const auto& v : vectors) {
    bool nonzero = std::any_of(v.begin(), v.end(), [](float x) { return x != 0.0f; });
    if (nonzero) distinct.insert(v);
  }
  if (static_cast<int>(distinct.size()) < k)
    throw std::runtime_error("fit_pca: needs at least " + std::to_string(k) +
                             " distinct nonzero vectors, got " +
                             std::to_string(distinct.size()));

  int n = static_cast<int>(distinct.begin()->size());
  for (const auto& v : distinct)
    if (static_cast<int>(v.size()) != n)
      throw std::runtime_error("fit_pca: inconsistent vector lengths");

  PCAModel model;
  model.dim = n;
  model.mean.assign(n, 0.0f);
  std::vector<double> mean(n, 0.0);
  for (const auto& v : distinct)
    for (int i = 0; i < n; ++i) mean[i] += v[i];
  for (int i = 0; i < n; ++i) {
    mean[i] /= static_cast<double>(distinct.size());
    model.mean[i] = static_cast<float>(mean[i]);
  }

  std::vector<double> cov(static_cast<size_t>(n) * n, 0.0);
  for (const auto& v : distinct) {
    for (int i = 0; i < n; ++i) {
      double di = v[i] - mean[i];
      for (int j = i; j < n; ++j) cov[static_cast<size_t>(i) * n + j] += di * (v[j] - mean[j]);
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double c = cov[static_cast<size_t>(i) * n + j] / static_cast<double>(distinct.size());
      cov[static_cast<size_t>(i) * n + j] = c;
      cov[static_cast<size_t>(j) * n + i] = c;
    }

  std::vector<std::vector<double>> eigvecs;
  std::vector<double> eigvals = jacobi_eigen(std::move(cov), n, eigvecs);

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return eigvals[a] > eigvals[b]; });

  if (k > n) throw std::runtime_error("fit_pca: k exceeds vector dimension");
  for (int a = 0; a < k; ++a) {
    std::vector<double>& ev = eigvecs[order[a]];
    double norm = std::sqrt(std::inner_product(ev.begin(), ev.end(), ev.begin(), 0.0));
    // Sign convention: largest-magnitude component positive.
    int arg = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(ev[i]) > std::abs(ev[arg])) arg = i;
    double sign = ev[arg] < 0 ? -1.0 : 1.0;
    std::vector<float> axis(n);
    for (int i = 0; i < n; ++i) axis[i] = static_cast<float>(sign * ev[i] / norm);
    model.axes.push_back(std::move(axis));
  }

  model.proj_min.assign(k, std::numeric_limits<float>::max());
  model.proj_max.assign(k, std::numeric_limits<float>::lowest());
  for (const auto& v : distinct) {
    for (int a = 0; a < k; ++a) {
      float p = model.project(v, a);
      model.proj_min[a] = std::min(model.proj_min[a], p);
      model.proj_max[a] = std::max(model.proj_max[a], p);
    }
  }
  return model;
}

PCAModel fit_pca_on_maps(const std::vector<const TextEmbeddingMap*>& maps, int k) {
  std::vector<std::vector<float>> vectors;
  for (const auto* m : maps)
    for (const auto& v : m->token_vectors) vectors.push_back(v);
  return fit_pca(vectors, k);
}

std::vector<uint8_t> project_map(const TextEmbeddingMap& map, const PCAModel& pca) {
  if (pca.dim != map.dim) throw std::runtime_error("project_map: dimension mismatch");
  if (pca.axis_count() < 3) throw std::runtime_error("project_map: needs 3 axes");

  std::vector<uint8_t> rgb(static_cast<size_t>(map.height) * map.width * 3, 255);

  // Per-token colors, computed once and splatted over owned pixels.
  std::vector<std::array<uint8_t, 3>> colors(map.token_vectors.size());
  for (size_t t = 0; t < map.token_vectors.size(); ++t) {
    for (int a = 0; a < 3; ++a) {
      float p = pca.project(map.token_vectors[t], a);
      float span = pca.proj_max[a] - pca.proj_min[a];
      float scaled = span > 0 ? (p - pca.proj_min[a]) / span * 255.0f : 127.0f;
      colors[t][a] = static_cast<uint8_t>(std::clamp(scaled, 0.0f, 255.0f));
    }
  }
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      if (map.cell_is_zero(y, x)) continue;  // white background
      const auto& c = colors[map.owner_at(y, x)];
      size_t base = (static_cast<size_t>(y) * map.width + x) * 3;
      rgb[base] = c[0];
      rgb[base + 1] = c[1];
      rgb[base + 2] = c[2];
    }
  }
  return rgb;
}

Image reduce_map_channels(const TextEmbeddingMap& map, const PCAModel& pca, int k) {
  if (pca.dim != map.dim) throw std::runtime_error("reduce_map_channels: dimension mismatch");
  if (k <= 0 || k > pca.axis_count())
    throw std::runtime_error("reduce_map_channels: need 1..axis_count channels");

  Image out(map.height, map.width, k, 0.0f);
  std::vector<std::vector<float>> proj(map.token_vectors.size(), std::vector<float>(k));
  for (size_t t = 0; t < map.token_vectors.size(); ++t)
    for (int a = 0; a < k; ++a) proj[t][a] = pca.project(map.token_vectors[t], a);

  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x) {
      int32_t t = map.owner_at(y, x);
      if (t == kNoOwner) continue;
      for (int a = 0; a < k; ++a) out.at(y, x, a) = proj[t][a];
    }
  return out;
}

void save_pca(const PCAModel& pca, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write pca file: " + path);
  out.write("PCA1", 4);
  uint32_t dim = static_cast<uint32_t>(pca.dim);
  uint32_t k = static_cast<uint32_t>(pca.axis_count());
  out.write(reinterpret_cast<const char*>(&dim), 4);
  out.write(reinterpret_cast<const char*>(&k), 4);
  out.write(reinterpret_cast<const char*>(pca.mean.data()), static_cast<std::streamsize>(pca.dim) * 4);
  for (const auto& axis : pca.axes)
    out.write(reinterpret_cast<const char*>(axis.data()), static_cast<std::streamsize>(pca.dim) * 4);
  out.write(reinterpret_cast<const char*>(pca.proj_min.data()), static_cast<std::streamsize>(k) * 4);
  out.write(reinterpret_cast<const char*>(pca.proj_max.data()), static_cast<std::streamsize>(k) * 4);
}

PCAModel load_pca(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open pca file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "PCA1", 4) != 0) throw std::runtime_error("pca file: bad magic");
  uint32_t dim = 0, k = 0;
  in.read(reinterpret_cast<char*>(&dim), 4);
  in.read(reinterpret_cast<char*>(&k), 4);
  PCAModel pca;
  pca.dim = static_cast<int>(dim);
  pca.mean.resize(dim);
  in.read(reinterpret_cast<char*>(pca.mean.data()), static_cast<std::streamsize>(dim) * 4);
  pca.axes.assign(k, std::vector<float>(dim));
  for (auto& axis : pca.axes)
    in.read(reinterpret_cast<char*>(axis.data()), static_cast<std::streamsize>(dim) * 4);
  pca.proj_min.resize(k);
  pca.proj_max.resize(k);
  in.read(reinterpret_cast<char*>(pca.proj_min.data()), static_cast<std::streamsize>(k) * 4);
  in.read(reinterpret_cast<char*>(pca.proj_max.data()), static_cast<std::streamsize>(k) * 4);
  if (!in) throw std::runtime_error("pca file: truncated");
  return pca;
}

}  // namespace pagefuse
