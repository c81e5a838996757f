#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qta/corpus.hpp"
#include "qta/errors.hpp"
#include "qta/hash.hpp"
#include "qta/rng.hpp"

namespace qta {

enum class ProviderKind { contextual_backend, deterministic_test };

inline const char* to_string(ProviderKind k) {
  return k == ProviderKind::contextual_backend ? "contextual-backend"
                                               : "deterministic-test";
}

inline ProviderKind provider_kind_from_string(const std::string& s) {
  if (s == "contextual-backend") return ProviderKind::contextual_backend;
  if (s == "deterministic-test") return ProviderKind::deterministic_test;
  throw Error(ErrorCode::InvalidConfig, "unknown provider kind '" + s + "'");
}

inline const std::vector<std::string>& default_sentinel_tokens() {
  static const std::vector<std::string> kTokens = {
      "[CLS]", "[SEP]", "[PAD]", "[UNK]", "[MASK]", "<s>", "</s>", "<pad>"};
  return kTokens;
}

struct EmbeddingProviderConfig {
  std::string model_id = "det-64";
  ProviderKind kind = ProviderKind::deterministic_test;
  std::size_t dimension = 64;
  std::uint64_t seed = 42;
  /// contextual-backend only; e.g. "http://127.0.0.1:8089"
  std::string endpoint;
  /// backend tokens excluded from returned matrices
  std::vector<std::string> sentinel_tokens = default_sentinel_tokens();
  /// optional transparent JSONL cache
  std::string cache_path;

  bool operator==(const EmbeddingProviderConfig&) const = default;
};

inline void validate(const EmbeddingProviderConfig& cfg) {
  if (cfg.model_id.empty()) {
    throw Error(ErrorCode::InvalidConfig, "embedding model_id is empty");
  }
  if (cfg.dimension < 2) {
    throw Error(ErrorCode::InvalidConfig,
                "embedding dimension must be >= 2, got " +
                    std::to_string(cfg.dimension));
  }
  if (cfg.kind == ProviderKind::contextual_backend && cfg.endpoint.empty()) {
    throw Error(ErrorCode::InvalidConfig,
                "contextual backend requires an endpoint");
  }
}

/// Per-token unit vectors for one text under one model. Row-major storage.
struct TokenEmbeddings {
  std::string model_id;
  std::size_t dim = 0;
  std::vector<std::string> tokens;
  std::vector<double> data;

  std::size_t rows() const { return tokens.size(); }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data.data() + i * dim, dim);
  }

  bool operator==(const TokenEmbeddings&) const = default;
};

namespace detail {

inline void normalize_row(double* row, std::size_t dim) {
  double norm_sq = 0.0;
  for (std::size_t j = 0; j < dim; ++j) norm_sq += row[j] * row[j];
  if (norm_sq == 0.0) {
    row[0] = 1.0;
    return;
  }
  double norm = std::sqrt(norm_sq);
  for (std::size_t j = 0; j < dim; ++j) row[j] /= norm;
}

/// Fixed pseudo-random unit vector for (seed, token); identical tokens
/// always share a vector.
inline void deterministic_token_vector(std::uint64_t seed,
                                       const std::string& token,
                                       double* row, std::size_t dim) {
  unsigned char seed_bytes[8];
  for (int b = 0; b < 8; ++b) {
    seed_bytes[b] = static_cast<unsigned char>((seed >> (8 * b)) & 0xff);
  }
  std::uint64_t h = fnv1a64(
      std::string_view(reinterpret_cast<const char*>(seed_bytes), 8));
  h = fnv1a64(token, h);
  SplitMix64 stream{h};
  for (std::size_t j = 0; j < dim; ++j) {
    row[j] = 2.0 * Lcg64::to_unit(stream.next()) - 1.0;
  }
  normalize_row(row, dim);
}

inline TokenEmbeddings deterministic_embed(const std::string& text,
                                           const EmbeddingProviderConfig& cfg) {
  TokenEmbeddings out;
  out.model_id = cfg.model_id;
  out.dim = cfg.dimension;
  out.tokens = tokenize(text);
  if (out.tokens.empty()) {
    throw Error(ErrorCode::EmptyText, "no tokens survive tokenization");
  }
  out.data.resize(out.tokens.size() * out.dim);
  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    deterministic_token_vector(cfg.seed, out.tokens[i],
                               out.data.data() + i * out.dim, out.dim);
  }
  return out;
}

// defined in qta/http.hpp to keep httplib out of this header's includes
TokenEmbeddings contextual_embed(const std::string& text,
                                 const EmbeddingProviderConfig& cfg);

}  // namespace detail

/// Transparent JSONL-backed cache keyed by (model_id, text hash). One
/// process-wide instance per file path.
class EmbeddingCache {
 public:
  static std::shared_ptr<EmbeddingCache> open(const std::string& path) {
    static std::mutex registry_mutex;
    static std::map<std::string, std::shared_ptr<EmbeddingCache>> registry;
    std::lock_guard<std::mutex> lock(registry_mutex);
    auto it = registry.find(path);
    if (it != registry.end()) return it->second;
    auto cache = std::shared_ptr<EmbeddingCache>(new EmbeddingCache(path));
    registry[path] = cache;
    return cache;
  }

  std::optional<TokenEmbeddings> lookup(const std::string& model_id,
                                        const std::string& text_hash) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(key(model_id, text_hash));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void store(const std::string& model_id, const std::string& text_hash,
             const TokenEmbeddings& emb) {
    std::lock_guard<std::mutex> lock(mutex_);
    std::string k = key(model_id, text_hash);
    if (entries_.count(k)) return;
    entries_[k] = emb;
    nlohmann::json record{{"model_id", model_id},
                          {"text_hash", text_hash},
                          {"dim", emb.dim},
                          {"tokens", emb.tokens},
                          {"data", emb.data}};
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (out) out << record.dump() << '\n';
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size();
  }

 private:
  explicit EmbeddingCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) continue;
      TokenEmbeddings emb;
      emb.model_id = j.value("model_id", "");
      emb.dim = j.value("dim", std::size_t{0});
      emb.tokens = j.value("tokens", std::vector<std::string>{});
      emb.data = j.value("data", std::vector<double>{});
      if (emb.dim == 0 || emb.data.size() != emb.tokens.size() * emb.dim) {
        continue;
      }
      entries_[key(emb.model_id, j.value("text_hash", ""))] = std::move(emb);
    }
  }

  static std::string key(const std::string& model_id,
                         const std::string& text_hash) {
    return model_id + "|" + text_hash;
  }

  std::string path_;
  mutable std::mutex mutex_;
  std::map<std::string, TokenEmbeddings> entries_;
};

/// One row per provider token, rows unit-normalized, backend sentinel
/// tokens excluded.
inline TokenEmbeddings embed_tokens(const std::string& text,
                                    const EmbeddingProviderConfig& cfg) {
  validate(cfg);
  std::shared_ptr<EmbeddingCache> cache;
  std::string text_hash;
  if (!cfg.cache_path.empty()) {
    cache = EmbeddingCache::open(cfg.cache_path);
    text_hash = content_hash(text);
    if (auto hit = cache->lookup(cfg.model_id, text_hash)) return *hit;
  }
  TokenEmbeddings out = cfg.kind == ProviderKind::deterministic_test
                            ? detail::deterministic_embed(text, cfg)
                            : detail::contextual_embed(text, cfg);
  if (cache) cache->store(cfg.model_id, text_hash, out);
  return out;
}

/// Mean of the token rows, re-normalized to unit norm.
inline std::vector<double> mean_normalized(const TokenEmbeddings& emb) {
  if (emb.rows() == 0) {
    throw Error(ErrorCode::EmptyText, "no rows to average");
  }
  std::vector<double> mean(emb.dim, 0.0);
  for (std::size_t i = 0; i < emb.rows(); ++i) {
    auto row = emb.row(i);
    for (std::size_t j = 0; j < emb.dim; ++j) mean[j] += row[j];
  }
  for (double& v : mean) v /= static_cast<double>(emb.rows());
  double norm_sq = 0.0;
  for (double v : mean) norm_sq += v * v;
  if (norm_sq == 0.0) {
    throw Error(ErrorCode::ZeroVector, "token rows cancel to a zero vector");
  }
  double norm = std::sqrt(norm_sq);
  for (double& v : mean) v /= norm;
  return mean;
}

inline std::vector<double> embed_text(const std::string& text,
                                      const EmbeddingProviderConfig& cfg) {
  return mean_normalized(embed_tokens(text, cfg));
}

// --- config JSON ----------------------------------------------------------

inline void to_json(nlohmann::json& j, const EmbeddingProviderConfig& cfg) {
  j = nlohmann::json{{"model_id", cfg.model_id},
                     {"kind", to_string(cfg.kind)},
                     {"dimension", cfg.dimension},
                     {"seed", cfg.seed}};
  if (!cfg.endpoint.empty()) j["endpoint"] = cfg.endpoint;
  if (cfg.sentinel_tokens != default_sentinel_tokens()) {
    j["sentinel_tokens"] = cfg.sentinel_tokens;
  }
  if (!cfg.cache_path.empty()) j["cache_path"] = cfg.cache_path;
}

inline void from_json(const nlohmann::json& j, EmbeddingProviderConfig& cfg) {
  cfg = EmbeddingProviderConfig{};
  j.at("model_id").get_to(cfg.model_id);
  if (j.contains("kind")) {
    cfg.kind = provider_kind_from_string(j.at("kind").get<std::string>());
  }
  cfg.dimension = j.value("dimension", cfg.dimension);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.endpoint = j.value("endpoint", "");
  if (j.contains("sentinel_tokens")) {
    j.at("sentinel_tokens").get_to(cfg.sentinel_tokens);
  }
  cfg.cache_path = j.value("cache_path", "");
}

}  // namespace qta
