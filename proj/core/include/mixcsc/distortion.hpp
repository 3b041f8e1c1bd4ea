#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mixcsc/types.hpp"

namespace mixcsc {

// Relation between a source character and a candidate character. Declared in
// precedence order: when several relations hold, the first one wins.
enum class DistortionType : std::uint8_t {
  kIdentical = 0,
  kSamePinyin = 1,
  kSimilarPinyin = 2,
  kSimilarShape = 3,
  kUnrelated = 4,
};

inline constexpr std::size_t kDistortionTypeCount = 5;
inline constexpr std::array<DistortionType, kDistortionTypeCount>
    kAllDistortionTypes = {DistortionType::kIdentical,
                           DistortionType::kSamePinyin,
                           DistortionType::kSimilarPinyin,
                           DistortionType::kSimilarShape,
                           DistortionType::kUnrelated};

std::string_view to_string(DistortionType type);
std::optional<DistortionType> distortion_type_from_string(std::string_view s);

// Probability of observing the source character given the intended one,
// keyed only by the similarity type of the pair.
class DistortionTable {
 public:
  static constexpr std::array<double, kDistortionTypeCount> kDefaultProbabilities =
      {0.962, 0.023, 0.008, 0.004, 0.003};

  DistortionTable() : DistortionTable(kDefaultProbabilities) {}
  // Every probability must lie in (0, 1]. Throws kInvalidConfig otherwise.
  explicit DistortionTable(
      const std::array<double, kDistortionTypeCount>& probabilities);

  double probability(DistortionType type) const {
    return probabilities_[static_cast<std::size_t>(type)];
  }
  double log_probability(DistortionType type) const {
    return log_probabilities_[static_cast<std::size_t>(type)];
  }
  const std::array<double, kDistortionTypeCount>& probabilities() const {
    return probabilities_;
  }

  // "p0,p1,p2,p3,p4" in DistortionType order.
  static DistortionTable parse(std::string_view spec);

 private:
  std::array<double, kDistortionTypeCount> probabilities_;
  std::array<double, kDistortionTypeCount> log_probabilities_;
};

// Pinyin, fuzzy-pinyin and glyph-shape data backing classify_pair.
// Immutable once built.
class SimilarityResources {
 public:
  class Builder {
   public:
    // Syllables are toneless lowercase ASCII ('v' spells u-umlaut).
    Builder& add_pinyin(Char c, const std::vector<std::string>& syllables);
    Builder& add_shape_pair(Char a, Char b);
    Builder& add_fuzzy_pair(const std::string& a, const std::string& b);

    // Line formats: pinyin "char TAB syl[,syl...]"; shape "char TAB
    // char[,char...]"; fuzzy "a TAB b". '#' comments and blank lines are
    // skipped. `origin` labels parse errors.
    Builder& read_pinyin(std::istream& in, const std::string& origin);
    Builder& read_shape(std::istream& in, const std::string& origin);
    Builder& read_fuzzy(std::istream& in, const std::string& origin);

    SimilarityResources build() &&;

   private:
    std::unordered_map<Char, std::vector<std::string>> pinyin_;
    std::set<std::pair<Char, Char>> shape_pairs_;
    std::set<std::pair<std::string, std::string>> fuzzy_pairs_;
  };

  SimilarityResources() = default;

  // Empty path skips that resource. Throws kIo naming a missing file.
  static SimilarityResources load(const std::string& pinyin_path,
                                  const std::string& shape_path,
                                  const std::string& fuzzy_path);

  std::vector<std::string_view> syllables(Char c) const;
  bool shares_syllable(Char a, Char b) const;
  bool similar_pinyin(Char a, Char b) const;
  bool shape_similar(Char a, Char b) const;
  // Edit distance 1, or one listed fuzzy initial/final substitution.
  bool syllables_similar(std::string_view a, std::string_view b) const;

  // Characters c' != c with classify_pair(c, c') == type, sorted by code
  // point. Only the three similarity types are enumerable; other types give
  // an empty list.
  std::vector<Char> related(Char c, DistortionType type) const;
  // Union of the three similarity relations of c.
  std::vector<Char> confusion_set(Char c) const;

  std::size_t pinyin_entries() const { return char_syllables_.size(); }
  std::size_t syllable_count() const { return syllables_.size(); }

 private:
  using SyllableId = std::uint32_t;

  const std::vector<SyllableId>* syllable_ids(Char c) const;

  std::vector<std::string> syllables_;
  std::unordered_map<std::string, SyllableId> syllable_index_;
  std::unordered_map<Char, std::vector<SyllableId>> char_syllables_;
  std::vector<std::vector<Char>> syllable_chars_;
  std::vector<std::vector<SyllableId>> similar_syllables_;
  std::unordered_map<Char, std::vector<Char>> shape_;
  std::set<std::pair<std::string, std::string>> fuzzy_pairs_;
};

DistortionType classify_pair(Char a, Char b, const SimilarityResources& res);

// ln table[classify_pair(a, b)]: the log-probability of seeing source char a
// when b was intended.
double distortion_logprob(Char a, Char b, const DistortionTable& table,
                          const SimilarityResources& res);

// Sum of per-character distortion log-probabilities, accumulated left to
// right. Throws kSliceLengthMismatch when the lengths differ.
double token_distortion_logprob(TextView source_slice, TextView token_chars,
                                const DistortionTable& table,
                                const SimilarityResources& res);
double token_distortion_logprob(TextView source_slice, const Token& token,
                                const DistortionTable& table,
                                const SimilarityResources& res);

}  // namespace mixcsc
