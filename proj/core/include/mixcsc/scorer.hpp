#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mixcsc/types.hpp"

namespace mixcsc {

// Opaque generative-scorer state. Its contents are defined by the scorer that
// produced it; callers only copy, compare and hash it.
struct ScorerState {
  std::vector<std::int32_t> data;

  friend bool operator==(const ScorerState&, const ScorerState&) = default;
};

struct ScorerStateHash {
  std::size_t operator()(const ScorerState& s) const noexcept;
};

// Autoregressive scorer over a token vocabulary (the "language model" side of
// the mixture). Implementations must be immutable and thread-safe: every
// method is a pure function of its arguments.
class GenerativeScorer {
 public:
  virtual ~GenerativeScorer() = default;

  // Token ids equal their index in this span.
  virtual std::span<const Token> vocabulary() const = 0;
  virtual std::optional<TokenId> find_token(TextView chars) const = 0;
  // Token used for single characters missing from the vocabulary.
  virtual TokenId unknown_token() const = 0;

  virtual ScorerState initial_state() const = 0;
  virtual ScorerState step(const ScorerState& state, TokenId token) const = 0;
  // Natural-log probabilities over the whole vocabulary, indexed by token id.
  virtual std::vector<double> distribution(const ScorerState& state) const = 0;
};

// Log-probability map over a character alphabet. Characters outside the
// alphabet fall back to the kUnknownChar entry when present, else -inf.
class CharDistribution {
 public:
  CharDistribution() = default;
  explicit CharDistribution(std::vector<std::pair<Char, double>> log_probs);

  double logprob(Char c) const;
  bool contains(Char c) const;
  std::span<const std::pair<Char, double>> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // Up to k characters by descending probability, ties by code point.
  // kUnknownChar is never proposed.
  std::vector<Char> top_k(std::size_t k) const;
  Char argmax() const;

 private:
  std::vector<std::pair<Char, double>> entries_;  // sorted by Char
};

// Per-position character classifier (the "small model" side of the mixture).
// distribution_at must depend only on (source, i).
class PositionClassifier {
 public:
  virtual ~PositionClassifier() = default;
  // Throws kIndexOutOfRange when i >= source.size().
  virtual CharDistribution distribution_at(TextView source,
                                           std::size_t i) const = 0;
};

// Log-probability of a token ending at character offset `end` (exclusive),
// summed left to right over its characters' classifier log-probabilities.
// Throws kSpanOutOfRange when the token does not fit in [0, n).
double sm_token_logprob(const PositionClassifier& classifier, TextView source,
                        std::size_t end, TextView token_chars);
// Same, over precomputed per-position distributions (one per source char).
double sm_token_logprob(std::span<const CharDistribution> positions,
                        std::size_t end, TextView token_chars);

// Numerically stable log(sum(exp(x))). Returns -inf for an empty or
// all -inf input.
double log_sum_exp(std::span<const double> values);

}  // namespace mixcsc
