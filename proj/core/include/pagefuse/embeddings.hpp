#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace pagefuse {

/// Anything that maps a token to a fixed-length vector. Lookup is total:
/// it never fails, whatever the input.
class VectorSource {
 public:
  virtual ~VectorSource() = default;
  virtual int dimension() const = 0;
  virtual std::vector<float> lookup(const std::string& token) const = 0;
};

enum class OovPolicy { Zero, SubwordHash };

/// Token normalization applied before every lookup: ASCII lowercasing and
/// stripping of leading/trailing punctuation. A token that is only
/// punctuation is kept as-is (lowercased).
std::string normalize_token(const std::string& token);

/// Deterministic subword fallback: mean of hash-seeded unit vectors for the
/// character 3-6-grams of the token wrapped in boundary markers `<`/`>`.
std::vector<float> subword_hash_vector(const std::string& token, int dimension);

/// Word-vector table loaded from a text vector file.
class EmbeddingStore : public VectorSource {
 public:
  EmbeddingStore(int dimension, OovPolicy policy, std::string source_name);

  int dimension() const override { return dim_; }
  std::vector<float> lookup(const std::string& token) const override;

  void insert(const std::string& token, std::vector<float> vec);
  size_t vocabulary_size() const { return vocab_.size(); }
  bool contains(const std::string& token) const { return vocab_.count(token) > 0; }
  const std::string& source_name() const { return source_; }
  OovPolicy oov_policy() const { return policy_; }
  void set_oov_policy(OovPolicy p) { policy_ = p; }

  /// Duplicate tokens seen while loading (later row wins).
  int collision_count() const { return collisions_; }

  /// Text vector file: first line `<vocab_size> <N>`, then one token and N
  /// floats per line. Tokens are lowercased at load time.
  static EmbeddingStore load_vectors(const std::string& path,
                                     OovPolicy policy = OovPolicy::Zero);
  static EmbeddingStore load_vectors_text(const std::string& text,
                                          OovPolicy policy, const std::string& name);

  /// Binary cache: magic `EMB1`, u32 N, u64 vocab size, then sorted
  /// token/vector records, little-endian 32-bit floats.
  void save_cache(const std::string& path) const;
  static EmbeddingStore load_cache(const std::string& path,
                                   OovPolicy policy = OovPolicy::Zero);

 private:
  int dim_;
  OovPolicy policy_;
  std::string source_;
  std::unordered_map<std::string, std::vector<float>> vocab_;
  int collisions_ = 0;
};

/// Ordered concatenation of several sources; dimension is the sum.
class StackedStore : public VectorSource {
 public:
  explicit StackedStore(std::vector<std::shared_ptr<const VectorSource>> parts);

  int dimension() const override { return dim_; }
  std::vector<float> lookup(const std::string& token) const override;
  size_t part_count() const { return parts_.size(); }

 private:
  std::vector<std::shared_ptr<const VectorSource>> parts_;
  int dim_;
};

}  // namespace pagefuse
