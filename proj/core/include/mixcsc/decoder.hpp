#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <vector>

#include "mixcsc/distortion.hpp"
#include "mixcsc/scorer.hpp"
#include "mixcsc/types.hpp"

namespace mixcsc {

// ---------------------------------------------------------------------------
// Candidate sets

// Allowed output characters per source position. The source character is
// always a member and comes first.
class CandidateSet {
 public:
  static constexpr std::size_t kDefaultMaxSize = 16;

  CandidateSet() = default;
  // Throws kCandidateViolation when sizes disagree with the source, a position
  // lacks its source character, holds duplicates, or exceeds max_size.
  CandidateSet(TextView source, std::vector<std::vector<Char>> per_position,
               std::size_t max_size = kDefaultMaxSize);

  static CandidateSet identity(TextView source);

  std::size_t size() const { return per_position_.size(); }
  std::span<const Char> at(std::size_t i) const { return per_position_.at(i); }
  bool contains(std::size_t i, Char c) const;
  // Product of set sizes, saturating at UINT64_MAX.
  std::uint64_t product_size() const;

 private:
  std::vector<std::vector<Char>> per_position_;
};

// identity ∪ confusion set (if enabled) ∪ classifier top-k (if k > 0),
// truncated to policy.max_size. Order: identity, classifier top-k by
// probability, then remaining confusion characters by classifier probability
// (ties by code point).
CandidateSet build_candidates(TextView source, const CandidatePolicy& policy,
                              const SimilarityResources& resources,
                              std::span<const CharDistribution> positions);
CandidateSet build_candidates(TextView source, const CandidatePolicy& policy,
                              const SimilarityResources& resources,
                              const PositionClassifier& classifier);

// ---------------------------------------------------------------------------
// Entropy and the per-step mixture rule

struct EntropyValue {
  double nats = 0.0;
};

// -sum p ln p over a natural-log distribution, with 0 ln 0 = 0.
// Throws kNotNormalized when probabilities do not sum to 1 within 1e-6.
EntropyValue entropy(std::span<const double> log_probs);

// Weighted increments contributed by one token.
struct StepIncrement {
  double lm = 0.0;
  double dm = 0.0;
  double sm = 0.0;
  double multiplier = 1.0;
};

// One application of the mixture rule:
//   lm + m * (alpha * dm + beta * sm),  m = 1 + H if FR is on, else 1.
// A disabled DM or zero weight contributes exactly 0, even for -inf inputs.
StepIncrement mixture_step(double lm_logprob, double lm_entropy,
                           double dm_logprob, double sm_logprob,
                           const MixtureConfig& config);

// ---------------------------------------------------------------------------
// Hypotheses and per-sentence context

struct MixtureModels {
  const GenerativeScorer& lm;
  const PositionClassifier& classifier;
  const DistortionTable& distortion;
  const SimilarityResources& resources;
};

struct Hypothesis {
  std::vector<Token> tokens;
  Text output;
  std::size_t covered_chars = 0;
  ScoreBreakdown score;
  ScorerState lm_state;
  // Faithfulness multiplier applied by the most recent extension.
  double last_multiplier = 1.0;
};

// Scoring state for one sentence: the source, its candidate sets, cached
// classifier distributions (computed once per position) and cached LM
// distributions (computed once per LM state). Not thread-safe; use one per
// sentence. Models must outlive it.
class SentenceContext {
 public:
  struct LmEntry {
    std::vector<double> log_probs;
    double entropy = 0.0;
  };

  // Candidates built from config.candidates.
  SentenceContext(const MixtureModels& models, const MixtureConfig& config,
                  Text source);
  SentenceContext(const MixtureModels& models, const MixtureConfig& config,
                  Text source, CandidateSet candidates);

  const MixtureModels& models() const { return models_; }
  const MixtureConfig& config() const { return config_; }
  const Text& source() const { return source_; }
  const CandidateSet& candidates() const { return candidates_; }
  std::span<const CharDistribution> classifier_positions() const {
    return positions_;
  }

  const LmEntry& lm_at(const ScorerState& state) const;
  // Tokens starting at `pos` whose every character is a candidate at its
  // position. Out-of-vocabulary single characters map to the unknown token.
  std::span<const Token> expansions(std::size_t pos) const {
    return expansions_.at(pos);
  }

  Hypothesis initial() const;

 private:
  void index_expansions();

  MixtureModels models_;
  MixtureConfig config_;
  Text source_;
  std::vector<CharDistribution> positions_;
  CandidateSet candidates_;
  std::vector<std::vector<Token>> expansions_;
  mutable std::unordered_map<ScorerState, LmEntry, ScorerStateHash> lm_cache_;
};

// New score after appending `token` to `hyp`. Throws kSpanOverflow when the
// token runs past the source, kCandidateViolation when a character is not a
// candidate at its position.
ScoreBreakdown extend_score(const Hypothesis& hyp, const Token& token,
                            const SentenceContext& ctx);
Hypothesis extend(const Hypothesis& hyp, const Token& token,
                  const SentenceContext& ctx);

// ---------------------------------------------------------------------------
// Search

struct DecodedOutput {
  Text output;
  ScoreBreakdown score;
  std::vector<Token> tokens;
};

// Called once per pruned frontier (hypotheses covering `covered` characters)
// and once for the final ranked list.
using TraceSink =
    std::function<void(std::size_t covered, std::span<const Hypothesis> beam)>;

// Frontier beam search. Hypotheses are only compared at equal covered length;
// each frontier keeps its best config.beam_size entries (ties: output text,
// then token ids). Hypotheses with identical output and LM state are merged
// keeping the best. Returns up to beam_size distinct complete outputs, best
// first. Throws kNoCompleteHypothesis if every path scores -inf.
std::vector<DecodedOutput> beam_search(const SentenceContext& ctx,
                                       const TraceSink& trace = {});

inline constexpr std::uint64_t kDefaultMaxSearchPaths = 2'000'000;

// Number of complete token sequences consistent with the candidate sets,
// saturating at limit + 1.
std::uint64_t count_search_paths(const SentenceContext& ctx,
                                 std::uint64_t limit = kDefaultMaxSearchPaths);

// Scores every complete token sequence and returns the maximum (ties broken
// by output text). Throws kSearchSpaceTooLarge above max_paths.
DecodedOutput exhaustive_search(const SentenceContext& ctx,
                                std::uint64_t max_paths = kDefaultMaxSearchPaths);

// Convenience: build the context and return the best beam-search output.
DecodedOutput decode(const MixtureModels& models, const MixtureConfig& config,
                     TextView source);

// Per-position argmax of the classifier over its full alphabet.
Text classifier_argmax(const PositionClassifier& classifier, TextView source);

}  // namespace mixcsc
