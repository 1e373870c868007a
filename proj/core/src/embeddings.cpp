#include "pagefuse/embeddings.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pagefuse {

namespace {

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

uint64_t splitmix64(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Unit vector derived only from the n-gram bytes; stable across platforms.
std::vector<float> hashed_unit_vector(const std::string& ngram, int dim) {
  uint64_t state = fnv1a64(ngram);
  std::vector<double> v(dim);
  double norm_sq = 0.0;
  for (int i = 0; i < dim; ++i) {
    // Box-Muller on splitmix64 draws.
    double u1 = (splitmix64(state) >> 11) * 0x1.0p-53;
    double u2 = (splitmix64(state) >> 11) * 0x1.0p-53;
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    v[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    norm_sq += v[i] * v[i];
  }
  double norm = std::sqrt(norm_sq);
  std::vector<float> out(dim);
  for (int i = 0; i < dim; ++i)
    out[i] = static_cast<float>(norm > 0 ? v[i] / norm : 0.0);
  return out;
}

std::string lowercase_ascii(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::string normalize_token(const std::string& token) {
  std::string low = lowercase_ascii(token);
  size_t b = 0, e = low.size();
  while (b < e && std::ispunct(static_cast<unsigned char>(low[b]))) ++b;
  while (e > b && std::ispunct(static_cast<unsigned char>(low[e - 1]))) --e;
  if (b == e) return low;  // only punctuation: look it up as-is
  return low.substr(b, e - b);
}

std::vector<float> subword_hash_vector(const std::string& token, int dim) {
  std::string wrapped = "<" + token + ">";
  std::vector<float> acc(dim, 0.0f);
  int count = 0;
  for (size_t len = 3; len <= 6; ++len) {
    if (wrapped.size() < len) break;
    for (size_t i = 0; i + len <= wrapped.size(); ++i) {
      std::vector<float> v = hashed_unit_vector(wrapped.substr(i, len), dim);
      for (int d = 0; d < dim; ++d) acc[d] += v[d];
      ++count;
    }
  }
  if (count == 0) return std::vector<float>(dim, 0.0f);
  for (float& x : acc) x /= static_cast<float>(count);
  return acc;
}

EmbeddingStore::EmbeddingStore(int dimension, OovPolicy policy, std::string source_name)
    : dim_(dimension), policy_(policy), source_(std::move(source_name)) {
  if (dimension <= 0) throw std::runtime_error("embedding store: dimension must be positive");
}

void EmbeddingStore::insert(const std::string& token, std::vector<float> vec) {
  if (static_cast<int>(vec.size()) != dim_)
    throw std::runtime_error("embedding store: vector length mismatch");
  std::string key = lowercase_ascii(token);
  auto [it, inserted] = vocab_.insert_or_assign(key, std::move(vec));
  (void)it;
  if (!inserted) ++collisions_;
}

std::vector<float> EmbeddingStore::lookup(const std::string& token) const {
  std::string key = normalize_token(token);
  auto it = vocab_.find(key);
  if (it != vocab_.end()) return it->second;
  if (policy_ == OovPolicy::Zero) return std::vector<float>(dim_, 0.0f);
  return subword_hash_vector(key, dim_);
}

EmbeddingStore EmbeddingStore::load_vectors_text(const std::string& text, OovPolicy policy,
                                                 const std::string& name) {
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;

  if (!std::getline(in, line)) throw std::runtime_error("vector file: empty file");
  ++line_no;
  std::istringstream header(line);
  long long vocab_size = 0;
  int dim = 0;
  if (!(header >> vocab_size >> dim) || vocab_size < 0 || dim <= 0)
    throw std::runtime_error("vector file: bad header line");

  EmbeddingStore store(dim, policy, name);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string token;
    if (!(ls >> token)) continue;
    std::vector<float> vec(dim);
    for (int d = 0; d < dim; ++d) {
      if (!(ls >> vec[d]))
        throw std::runtime_error("vector file: line " + std::to_string(line_no) +
                                 ": expected " + std::to_string(dim) + " floats");
    }
    float extra;
    if (ls >> extra)
      throw std::runtime_error("vector file: line " + std::to_string(line_no) +
                               ": too many floats");
    store.insert(token, std::move(vec));
  }
  if (store.vocabulary_size() == 0) throw std::runtime_error("vector file: empty vocabulary");
  return store;
}

EmbeddingStore EmbeddingStore::load_vectors(const std::string& path, OovPolicy policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open vector file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_vectors_text(ss.str(), policy, path);
}

void EmbeddingStore::save_cache(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write embedding cache: " + path);
  out.write("EMB1", 4);
  uint32_t n = static_cast<uint32_t>(dim_);
  uint64_t size = vocab_.size();
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&size), 8);

  std::vector<std::string> keys;
  keys.reserve(vocab_.size());
  for (const auto& [k, v] : vocab_) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (const auto& k : keys) {
    uint32_t len = static_cast<uint32_t>(k.size());
    out.write(reinterpret_cast<const char*>(&len), 4);
    out.write(k.data(), len);
    const auto& v = vocab_.at(k);
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * 4));
  }
}

EmbeddingStore EmbeddingStore::load_cache(const std::string& path, OovPolicy policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open embedding cache: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "EMB1", 4) != 0)
    throw std::runtime_error("embedding cache: bad magic");
  uint32_t n = 0;
  uint64_t size = 0;
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&size), 8);
  if (!in || n == 0) throw std::runtime_error("embedding cache: bad header");

  EmbeddingStore store(static_cast<int>(n), policy, path);
  for (uint64_t i = 0; i < size; ++i) {
    uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 4);
    std::string key(len, '\0');
    in.read(key.data(), len);
    std::vector<float> vec(n);
    in.read(reinterpret_cast<char*>(vec.data()), static_cast<std::streamsize>(n) * 4);
    if (!in) throw std::runtime_error("embedding cache: truncated file");
    store.insert(key, std::move(vec));
  }
  return store;
}

StackedStore::StackedStore(std::vector<std::shared_ptr<const VectorSource>> parts)
    : parts_(std::move(parts)), dim_(0) {
  if (parts_.empty()) throw std::runtime_error("stacked store: needs at least one part");
  for (const auto& p : parts_) dim_ += p->dimension();
}

std::vector<float> StackedStore::lookup(const std::string& token) const {
  std::vector<float> out;
  out.reserve(dim_);
  for (const auto& p : parts_) {
    std::vector<float> v = p->lookup(token);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

}  // namespace pagefuse
