#pragma once

#include <stdexcept>
#include <string>

namespace qta {

enum class ErrorCode {
  // corpus
  EmptyTranscript,
  NoTurns,
  InvalidChunking,
  // embedding
  ProviderUnavailable,
  EmptyText,
  // retrieval
  EmptyCorpus,
  DuplicateChunkId,
  EmptyQuery,
  // llm
  BackendUnavailable,
  ScriptExhausted,
  // prompting
  MissingContext,
  UnexpectedContext,
  MalformedResponse,
  // metrics
  ZeroVector,
  DimensionMismatch,
  EmptyTokenSet,
  ModelMismatch,
  EmptyTopicSet,
  DuplicateCell,
  // lda
  EmptyVocabulary,
  TopicOutOfRange,
  // workbench
  RunClosed,
  IoFailure,
  DigestMismatch,
  LiveBackendNotReplayable,
  // generic
  InvalidConfig,
  InvalidArgument,
  NotFound,
  ParseFailure,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyTranscript: return "EmptyTranscript";
    case ErrorCode::NoTurns: return "NoTurns";
    case ErrorCode::InvalidChunking: return "InvalidChunking";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::DuplicateChunkId: return "DuplicateChunkId";
    case ErrorCode::EmptyQuery: return "EmptyQuery";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::ScriptExhausted: return "ScriptExhausted";
    case ErrorCode::MissingContext: return "MissingContext";
    case ErrorCode::UnexpectedContext: return "UnexpectedContext";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyTokenSet: return "EmptyTokenSet";
    case ErrorCode::ModelMismatch: return "ModelMismatch";
    case ErrorCode::EmptyTopicSet: return "EmptyTopicSet";
    case ErrorCode::DuplicateCell: return "DuplicateCell";
    case ErrorCode::EmptyVocabulary: return "EmptyVocabulary";
    case ErrorCode::TopicOutOfRange: return "TopicOutOfRange";
    case ErrorCode::RunClosed: return "RunClosed";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::DigestMismatch: return "DigestMismatch";
    case ErrorCode::LiveBackendNotReplayable: return "LiveBackendNotReplayable";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::ParseFailure: return "ParseFailure";
  }
  return "UnknownError";
}

/// Library-wide exception type. what() is prefixed with the code name so
/// CLI output and logs stay greppable.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qta
