#pragma once

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qta/errors.hpp"

namespace qta {

struct Turn {
  std::string speaker;
  std::string text;

  bool operator==(const Turn&) const = default;
};

/// One parsed interview. Turn order matches the source file.
struct Transcript {
  std::string id;
  std::vector<Turn> turns;
  std::string source_path;

  /// Turn texts joined by newlines; the text chunking, grounding and LDA
  /// all operate on.
  std::string full_text() const {
    std::string out;
    for (std::size_t i = 0; i < turns.size(); ++i) {
      if (i > 0) out += '\n';
      out += turns[i].text;
    }
    return out;
  }

  bool operator==(const Transcript&) const = default;
};

/// Contiguous token window over one transcript. token_span is end-exclusive
/// over the transcript's token sequence; text is the verbatim substring
/// covering those tokens.
struct Chunk {
  std::string id;
  std::string transcript_id;
  std::string text;
  std::size_t token_start = 0;
  std::size_t token_end = 0;

  bool operator==(const Chunk&) const = default;
};

struct ResearchQuestion {
  std::string id;
  std::string text;
  std::vector<std::string> sub_questions;

  bool operator==(const ResearchQuestion&) const = default;
};

struct GoldTopicSet {
  std::string question_id;
  std::vector<std::string> topics;

  bool operator==(const GoldTopicSet&) const = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Speaker-prefix grammar: ^[A-Za-z][\w ]*:\s
// Returns the index just past the whitespace following ':' when the line
// opens a turn, or npos.
inline std::size_t match_speaker_prefix(std::string_view line,
                                        std::string* speaker) {
  if (line.empty()) return std::string_view::npos;
  unsigned char first = static_cast<unsigned char>(line[0]);
  if (!std::isalpha(first)) return std::string_view::npos;
  std::size_t i = 1;
  while (i < line.size()) {
    unsigned char c = static_cast<unsigned char>(line[i]);
    if (c == ':') break;
    if (!(std::isalnum(c) || c == '_' || c == ' ')) return std::string_view::npos;
    ++i;
  }
  if (i >= line.size() || line[i] != ':') return std::string_view::npos;
  if (i + 1 >= line.size()) return std::string_view::npos;
  unsigned char after = static_cast<unsigned char>(line[i + 1]);
  if (!std::isspace(after)) return std::string_view::npos;
  if (speaker) *speaker = trim(line.substr(0, i));
  return i + 2;
}

}  // namespace detail

/// Lines matching `<Speaker>: <text>` open a new turn; other lines are
/// merged into the current turn. Lines before the first speaker line are
/// dropped.
inline Transcript parse_transcript(const std::string& raw_text,
                                   const std::string& id) {
  if (detail::trim(raw_text).empty()) {
    throw Error(ErrorCode::EmptyTranscript, "blank input for '" + id + "'");
  }
  Transcript out;
  out.id = id;
  std::istringstream stream(raw_text);
  std::string line;
  bool saw_speaker_line = false;
  while (std::getline(stream, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string speaker;
    std::size_t text_begin = detail::match_speaker_prefix(line, &speaker);
    if (text_begin != std::string_view::npos) {
      saw_speaker_line = true;
      out.turns.push_back(
          Turn{speaker, detail::trim(std::string_view(line).substr(text_begin))});
      continue;
    }
    std::string continuation = detail::trim(line);
    if (continuation.empty() || out.turns.empty()) continue;
    Turn& current = out.turns.back();
    if (!current.text.empty()) current.text += ' ';
    current.text += continuation;
  }
  if (!saw_speaker_line) {
    throw Error(ErrorCode::NoTurns,
                "no line matches the speaker-prefix grammar in '" + id + "'");
  }
  std::erase_if(out.turns, [](const Turn& t) { return t.text.empty(); });
  if (out.turns.empty()) {
    throw Error(ErrorCode::NoTurns, "all turns empty in '" + id + "'");
  }
  return out;
}

/// Token with its character span in the source text (end-exclusive).
struct TokenSpan {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Word-level tokenizer: lowercased maximal alphanumeric runs, punctuation
/// dropped. Used by chunking, LDA and the deterministic embedding provider.
inline std::vector<TokenSpan> tokenize_spans(std::string_view text) {
  std::vector<TokenSpan> out;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (!std::isalnum(c)) {
      ++i;
      continue;
    }
    std::size_t begin = i;
    std::string tok;
    while (i < text.size() &&
           std::isalnum(static_cast<unsigned char>(text[i]))) {
      tok += static_cast<char>(
          std::tolower(static_cast<unsigned char>(text[i])));
      ++i;
    }
    out.push_back(TokenSpan{std::move(tok), begin, i});
  }
  return out;
}

inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (auto& span : tokenize_spans(text)) out.push_back(std::move(span.text));
  return out;
}

inline std::string chunk_id_for(const std::string& transcript_id,
                                std::size_t token_start) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06zu", token_start);
  return transcript_id + ":" + buf;
}

/// Overlapping windows advancing by stride = size - overlap; the final
/// window is truncated at the text end. Every token lands in >= 1 chunk.
inline std::vector<Chunk> chunk_transcript(const Transcript& t,
                                           std::size_t size,
                                           std::size_t overlap) {
  if (size < 1 || overlap >= size) {
    throw Error(ErrorCode::InvalidChunking,
                "need size >= 1 and overlap < size (size=" +
                    std::to_string(size) +
                    ", overlap=" + std::to_string(overlap) + ")");
  }
  std::string text = t.full_text();
  std::vector<TokenSpan> spans = tokenize_spans(text);
  std::vector<Chunk> out;
  if (spans.empty()) return out;
  std::size_t stride = size - overlap;
  for (std::size_t start = 0;; start += stride) {
    std::size_t end = std::min(start + size, spans.size());
    Chunk c;
    c.id = chunk_id_for(t.id, start);
    c.transcript_id = t.id;
    c.token_start = start;
    c.token_end = end;
    c.text = text.substr(spans[start].begin,
                         spans[end - 1].end - spans[start].begin);
    out.push_back(std::move(c));
    if (end == spans.size()) break;
  }
  return out;
}

// --- JSON formats ---------------------------------------------------------

inline void to_json(nlohmann::json& j, const Turn& t) {
  j = nlohmann::json{{"speaker", t.speaker}, {"text", t.text}};
}

inline void from_json(const nlohmann::json& j, Turn& t) {
  j.at("speaker").get_to(t.speaker);
  j.at("text").get_to(t.text);
}

inline void to_json(nlohmann::json& j, const Transcript& t) {
  j = nlohmann::json{{"id", t.id}, {"turns", t.turns}};
  if (!t.source_path.empty()) j["source_path"] = t.source_path;
}

inline void from_json(const nlohmann::json& j, Transcript& t) {
  j.at("id").get_to(t.id);
  j.at("turns").get_to(t.turns);
  t.source_path = j.value("source_path", "");
}

inline void to_json(nlohmann::json& j, const ResearchQuestion& q) {
  j = nlohmann::json{
      {"id", q.id}, {"text", q.text}, {"sub_questions", q.sub_questions}};
}

inline void from_json(const nlohmann::json& j, ResearchQuestion& q) {
  j.at("id").get_to(q.id);
  j.at("text").get_to(q.text);
  q.sub_questions = j.value("sub_questions", std::vector<std::string>{});
}

inline void to_json(nlohmann::json& j, const GoldTopicSet& g) {
  j = nlohmann::json{{"question_id", g.question_id}, {"topics", g.topics}};
}

inline void from_json(const nlohmann::json& j, GoldTopicSet& g) {
  j.at("question_id").get_to(g.question_id);
  j.at("topics").get_to(g.topics);
}

// --- File loaders ---------------------------------------------------------

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::NotFound, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path,
                       std::string_view content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  }
  out << content;
  if (!out) {
    throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
  }
}

inline nlohmann::json parse_json_file(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseFailure,
                path.string() + ": " + std::string(e.what()));
  }
}

}  // namespace detail

/// Loads one transcript file: JSON `{id, turns:[...]}` when the extension
/// is .json, the speaker-prefixed plain-text grammar otherwise. The id
/// defaults to the file stem.
inline Transcript load_transcript_file(const std::filesystem::path& path) {
  Transcript t;
  if (path.extension() == ".json") {
    try {
      t = detail::parse_json_file(path).get<Transcript>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseFailure,
                  path.string() + ": " + std::string(e.what()));
    }
    if (t.id.empty()) t.id = path.stem().string();
    if (t.turns.empty()) {
      throw Error(ErrorCode::NoTurns, "no turns in " + path.string());
    }
  } else {
    t = parse_transcript(detail::read_file(path), path.stem().string());
  }
  t.source_path = path.string();
  return t;
}

inline std::vector<Transcript> load_corpus_file(
    const std::filesystem::path& path) {
  nlohmann::json j = detail::parse_json_file(path);
  try {
    std::vector<Transcript> out =
        j.contains("transcripts")
            ? j.at("transcripts").get<std::vector<Transcript>>()
            : j.get<std::vector<Transcript>>();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseFailure,
                path.string() + ": " + std::string(e.what()));
  }
}

inline void save_corpus_file(const std::filesystem::path& path,
                             const std::vector<Transcript>& transcripts) {
  nlohmann::json j{{"transcripts", transcripts}};
  detail::write_file(path, j.dump(2) + "\n");
}

inline std::vector<ResearchQuestion> load_questions_file(
    const std::filesystem::path& path) {
  nlohmann::json j = detail::parse_json_file(path);
  std::vector<ResearchQuestion> out;
  try {
    if (j.is_array()) {
      out = j.get<std::vector<ResearchQuestion>>();
    } else if (j.contains("questions")) {
      out = j.at("questions").get<std::vector<ResearchQuestion>>();
    } else {
      out.push_back(j.get<ResearchQuestion>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseFailure,
                path.string() + ": " + std::string(e.what()));
  }
  for (const auto& q : out) {
    if (detail::trim(q.text).empty()) {
      throw Error(ErrorCode::ParseFailure,
                  "question '" + q.id + "' has empty text in " + path.string());
    }
  }
  return out;
}

inline std::vector<GoldTopicSet> load_gold_file(
    const std::filesystem::path& path) {
  nlohmann::json j = detail::parse_json_file(path);
  std::vector<GoldTopicSet> out;
  try {
    if (j.is_array()) {
      out = j.get<std::vector<GoldTopicSet>>();
    } else if (j.contains("gold")) {
      out = j.at("gold").get<std::vector<GoldTopicSet>>();
    } else {
      out.push_back(j.get<GoldTopicSet>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseFailure,
                path.string() + ": " + std::string(e.what()));
  }
  for (const auto& g : out) {
    if (g.topics.empty()) {
      throw Error(ErrorCode::ParseFailure,
                  "gold set for '" + g.question_id + "' has no topics in " +
                      path.string());
    }
  }
  return out;
}

}  // namespace qta
