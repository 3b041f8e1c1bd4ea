#include "mixcsc/types.hpp"

#include <algorithm>

namespace mixcsc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptySource: return "EmptySource";
    case ErrorCode::kInvalidCharacter: return "InvalidCharacter";
    case ErrorCode::kSliceLengthMismatch: return "SliceLengthMismatch";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kSpanOutOfRange: return "SpanOutOfRange";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kSpanOverflow: return "SpanOverflow";
    case ErrorCode::kCandidateViolation: return "CandidateViolation";
    case ErrorCode::kNoCompleteHypothesis: return "NoCompleteHypothesis";
    case ErrorCode::kSearchSpaceTooLarge: return "SearchSpaceTooLarge";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kParse: return "Parse";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

namespace {

bool has_line_break(TextView text) {
  return std::any_of(text.begin(), text.end(),
                     [](Char c) { return c == U'\n' || c == U'\r'; });
}

}  // namespace

ValidatedInstance validate_instance(CorrectionInstance inst) {
  if (inst.source.empty()) {
    throw Error(ErrorCode::kEmptySource, "instance '" + inst.id + "'");
  }
  if (inst.reference && inst.reference->size() != inst.source.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "instance '" + inst.id + "': source has " +
                    std::to_string(inst.source.size()) +
                    " characters, reference has " +
                    std::to_string(inst.reference->size()));
  }
  if (has_line_break(inst.source) ||
      (inst.reference && has_line_break(*inst.reference))) {
    throw Error(ErrorCode::kInvalidCharacter,
                "instance '" + inst.id + "' contains a line break");
  }
  return ValidatedInstance(std::move(inst));
}

void CandidatePolicy::validate() const {
  if (top_k_classifier < 0) {
    throw Error(ErrorCode::kInvalidConfig, "top_k_classifier must be >= 0");
  }
  if (!include_identity) {
    throw Error(ErrorCode::kInvalidConfig,
                "candidate sets must contain the identity character");
  }
  if (max_size < 1) {
    throw Error(ErrorCode::kInvalidConfig, "max candidate set size must be >= 1");
  }
}

void MixtureConfig::validate() const {
  if (!(alpha >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "alpha must be >= 0");
  }
  if (!(beta >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "beta must be >= 0");
  }
  if (beam_size < 1) {
    throw Error(ErrorCode::kInvalidConfig, "beam size must be >= 1");
  }
  candidates.validate();
}

}  // namespace mixcsc
