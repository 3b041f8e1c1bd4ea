#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mixcsc {

// A character is one Unicode scalar value. No grapheme clustering.
using Char = char32_t;
using Text = std::u32string;
using TextView = std::u32string_view;
using TokenId = std::int32_t;

// log(0). Any sum it enters stays -inf.
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Reserved symbol standing in for characters outside a model's alphabet.
inline constexpr Char kUnknownChar = U'\uFFFD';

enum class ErrorCode {
  kLengthMismatch,
  kEmptySource,
  kInvalidCharacter,
  kSliceLengthMismatch,
  kEmptyCorpus,
  kIndexOutOfRange,
  kSpanOutOfRange,
  kNotNormalized,
  kSpanOverflow,
  kCandidateViolation,
  kNoCompleteHypothesis,
  kSearchSpaceTooLarge,
  kInvalidConfig,
  kParse,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// One line of a parallel corpus: the unit of correction and evaluation.
struct CorrectionInstance {
  std::string id;
  Text source;
  std::optional<Text> reference;
};

// A CorrectionInstance whose invariants were checked by validate_instance.
class ValidatedInstance {
 public:
  const CorrectionInstance& get() const noexcept { return inst_; }
  const Text& source() const noexcept { return inst_.source; }
  const std::optional<Text>& reference() const noexcept {
    return inst_.reference;
  }
  const std::string& id() const noexcept { return inst_.id; }

 private:
  friend ValidatedInstance validate_instance(CorrectionInstance inst);
  explicit ValidatedInstance(CorrectionInstance inst) : inst_(std::move(inst)) {}
  CorrectionInstance inst_;
};

// Throws kEmptySource, kLengthMismatch, or kInvalidCharacter (newline in text).
ValidatedInstance validate_instance(CorrectionInstance inst);

// An LM token: one or more characters plus its index in the LM vocabulary.
struct Token {
  Text chars;
  TokenId id = -1;

  std::size_t length() const noexcept { return chars.size(); }
  friend bool operator==(const Token&, const Token&) = default;
};

// Accumulated decomposed score of a (partial) output. dm and sm are stored
// after weighting (alpha/beta and the faithfulness multiplier).
struct ScoreBreakdown {
  double lm = 0.0;
  double dm = 0.0;
  double sm = 0.0;
  double total = 0.0;

  void add(double lm_term, double dm_term, double sm_term) {
    lm += lm_term;
    dm += dm_term;
    sm += sm_term;
    total = lm + dm + sm;
  }
};

struct CandidatePolicy {
  int top_k_classifier = 8;
  bool include_confusion = true;
  // Must stay true: every candidate set contains the source character.
  bool include_identity = true;
  std::size_t max_size = 16;

  void validate() const;
};

// Weights and switches of the mixture score. All logs are natural logs.
struct MixtureConfig {
  double alpha = 0.5;
  double beta = 0.9;
  int beam_size = 12;
  bool dm_enabled = true;
  bool fr_enabled = true;
  CandidatePolicy candidates;

  void validate() const;
};

}  // namespace mixcsc
