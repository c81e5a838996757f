#pragma once

#include <algorithm>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "qta/embedding.hpp"
#include "qta/errors.hpp"

namespace qta {
namespace detail {

/// POST a JSON body, expect a JSON reply. Throws `unavailable_code` on
/// connection failure, non-200 status or an unparseable body.
inline nlohmann::json http_post_json(const std::string& endpoint,
                                     const std::string& route,
                                     const nlohmann::json& body,
                                     ErrorCode unavailable_code) {
  httplib::Client client(endpoint);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(30, 0);
  auto res = client.Post(route, body.dump(), "application/json");
  if (!res) {
    throw Error(unavailable_code,
                "no response from " + endpoint + route + " (" +
                    httplib::to_string(res.error()) + ")");
  }
  if (res->status != 200) {
    throw Error(unavailable_code, endpoint + route + " returned status " +
                                      std::to_string(res->status));
  }
  nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.is_discarded()) {
    throw Error(unavailable_code,
                "unparseable reply from " + endpoint + route);
  }
  return reply;
}

/// Contextual embedding wire format:
///   POST {endpoint}/embed  {"model_id": ..., "text": ...}
///   -> {"tokens": [t0, ...], "vectors": [[...], ...]}  (one row per token)
/// Sentinel tokens are dropped and the remaining rows re-normalized.
inline TokenEmbeddings contextual_embed(const std::string& text,
                                        const EmbeddingProviderConfig& cfg) {
  if (tokenize(text).empty()) {
    throw Error(ErrorCode::EmptyText, "no tokens survive tokenization");
  }
  nlohmann::json reply = http_post_json(
      cfg.endpoint, "/embed",
      nlohmann::json{{"model_id", cfg.model_id}, {"text", text}},
      ErrorCode::ProviderUnavailable);

  std::vector<std::string> tokens;
  std::vector<std::vector<double>> vectors;
  try {
    reply.at("tokens").get_to(tokens);
    reply.at("vectors").get_to(vectors);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ProviderUnavailable,
                "malformed embedding reply: " + std::string(e.what()));
  }
  if (tokens.size() != vectors.size()) {
    throw Error(ErrorCode::ProviderUnavailable,
                "embedding reply token/vector count mismatch");
  }

  TokenEmbeddings out;
  out.model_id = cfg.model_id;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    bool sentinel = std::find(cfg.sentinel_tokens.begin(),
                              cfg.sentinel_tokens.end(),
                              tokens[i]) != cfg.sentinel_tokens.end();
    if (sentinel) continue;
    if (out.dim == 0) {
      out.dim = vectors[i].size();
      if (out.dim < 2) {
        throw Error(ErrorCode::ProviderUnavailable,
                    "backend returned dimension < 2");
      }
    } else if (vectors[i].size() != out.dim) {
      throw Error(ErrorCode::ProviderUnavailable,
                  "backend returned rows of varying dimension");
    }
    out.tokens.push_back(tokens[i]);
    out.data.insert(out.data.end(), vectors[i].begin(), vectors[i].end());
  }
  if (out.tokens.empty()) {
    throw Error(ErrorCode::EmptyText,
                "backend returned only sentinel tokens");
  }
  for (std::size_t i = 0; i < out.rows(); ++i) {
    normalize_row(out.data.data() + i * out.dim, out.dim);
  }
  return out;
}

}  // namespace detail
}  // namespace qta
