#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mixcsc/scorer.hpp"

namespace mixcsc {

// Character n-gram model with add-k smoothing:
//
//   p(c | h) = (count(h, c) + k) / (count(h) + k * |alphabet|)
//
// where h is the previous order-1 characters (padded with a sentence-start
// symbol) and the alphabet is the training characters plus kUnknownChar.
// There is no backoff. The vocabulary holds one token per alphabet character
// (token id == alphabet index) followed by optional multi-character tokens
// whose probability is the product of their characters' conditionals; the
// whole vocabulary is then renormalized.
class NGramLM final : public GenerativeScorer {
 public:
  static constexpr int kDefaultOrder = 3;
  static constexpr double kDefaultK = 0.1;
  static constexpr std::string_view kFormatTag = "mixcsc-ngram";
  static constexpr std::string_view kFormatVersion = "v1";
  // Sentence-start padding as written in serialized contexts.
  static constexpr Char kBosChar = U'\uE000';

  // Throws kEmptyCorpus when the corpus has no characters, kInvalidConfig on
  // bad order/k or a multi-character token using unseen characters.
  static NGramLM train(std::span<const Text> corpus, int order = kDefaultOrder,
                       double k = kDefaultK,
                       std::span<const Text> multi_tokens = {});

  // Serialized form (UTF-8, line based, sorted):
  //   mixcsc-ngram TAB v1 TAB order=N TAB k=K TAB alphabet=CHARS TAB tokens=M
  //     TAB meta=L
  //   L free-form metadata lines (provenance), kept verbatim
  //   M lines, one multi-character token each
  //   context TAB char TAB count        (sorted by context, then char)
  static NGramLM load(std::istream& in);
  static NGramLM load_file(const std::string& path);
  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;

  // The n most frequent character bigrams (ties by text), for use as
  // multi-character tokens. Bigrams touching non-CJK characters are skipped.
  static std::vector<Text> frequent_bigrams(std::span<const Text> corpus,
                                            std::size_t n);

  // Free-form lines carried through save/load. Must not contain newlines.
  const std::vector<std::string>& metadata() const { return metadata_; }
  void set_metadata(std::vector<std::string> lines);

  int order() const { return order_; }
  double k() const { return k_; }
  std::span<const Char> alphabet() const { return alphabet_; }

  // p(c | history); only the last order-1 history characters matter.
  double conditional(TextView history, Char c) const;
  // Per-character perplexity under the conditionals (multi-character tokens
  // are not involved).
  double perplexity(std::span<const Text> corpus) const;
  // count(c) summed over all contexts, in alphabet order.
  std::vector<std::pair<Char, std::uint64_t>> unigram_counts() const;

  std::span<const Token> vocabulary() const override { return vocab_; }
  std::optional<TokenId> find_token(TextView chars) const override;
  TokenId unknown_token() const override { return unk_index_; }
  ScorerState initial_state() const override;
  ScorerState step(const ScorerState& state, TokenId token) const override;
  std::vector<double> distribution(const ScorerState& state) const override;

 private:
  static constexpr std::int32_t kBos = -1;

  struct ContextCounts {
    std::uint64_t total = 0;
    std::vector<std::pair<std::int32_t, std::uint64_t>> next;  // sorted
  };

  NGramLM() = default;
  void init_alphabet(std::vector<Char> chars);
  void init_vocabulary(std::vector<Text> multi_tokens);
  std::int32_t index_of(Char c) const;
  void push(ScorerState& state, std::int32_t index) const;
  double conditional_index(const ScorerState& context, std::int32_t c) const;
  const ContextCounts* find_context(const ScorerState& context) const;

  int order_ = kDefaultOrder;
  double k_ = kDefaultK;
  std::vector<Char> alphabet_;
  std::unordered_map<Char, std::int32_t> char_index_;
  std::int32_t unk_index_ = 0;
  std::vector<Token> vocab_;
  std::unordered_map<Text, TokenId> token_index_;
  std::unordered_map<ScorerState, ContextCounts, ScorerStateHash> counts_;
  std::vector<std::string> metadata_;
};

}  // namespace mixcsc
