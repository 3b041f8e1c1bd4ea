#include "mixcsc/distortion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "mixcsc/corpus.hpp"
#include "mixcsc/utf8.hpp"

namespace mixcsc {

std::string_view to_string(DistortionType type) {
  switch (type) {
    case DistortionType::kIdentical: return "Identical";
    case DistortionType::kSamePinyin: return "SamePinyin";
    case DistortionType::kSimilarPinyin: return "SimilarPinyin";
    case DistortionType::kSimilarShape: return "SimilarShape";
    case DistortionType::kUnrelated: return "Unrelated";
  }
  return "Unknown";
}

std::optional<DistortionType> distortion_type_from_string(std::string_view s) {
  for (auto type : kAllDistortionTypes) {
    if (to_string(type) == s) return type;
  }
  return std::nullopt;
}

DistortionTable::DistortionTable(
    const std::array<double, kDistortionTypeCount>& probabilities)
    : probabilities_(probabilities) {
  for (std::size_t i = 0; i < kDistortionTypeCount; ++i) {
    const double p = probabilities_[i];
    if (!(p > 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "distortion probability for " +
                      std::string(to_string(kAllDistortionTypes[i])) +
                      " must lie in (0, 1]");
    }
    log_probabilities_[i] = std::log(p);
  }
}

// ---------------------------------------------------------------------------
// Syllable similarity

namespace {

constexpr std::string_view kInitials[] = {"zh", "ch", "sh", "b", "p", "m",
                                          "f",  "d",  "t",  "n", "l", "g",
                                          "k",  "h",  "j",  "q", "x", "r",
                                          "z",  "c",  "s",  "y", "w"};

std::pair<std::string_view, std::string_view> split_syllable(
    std::string_view syl) {
  for (auto initial : kInitials) {
    if (syl.size() > initial.size() && syl.substr(0, initial.size()) == initial) {
      return {syl.substr(0, initial.size()), syl.substr(initial.size())};
    }
  }
  return {std::string_view(), syl};
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                         diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

bool valid_syllable(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return c >= 'a' && c <= 'z';
  });
}

std::vector<std::string_view> split_fields(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad_line(const std::string& origin, std::size_t line,
                           const std::string& what) {
  throw Error(ErrorCode::kParse,
              origin + ":" + std::to_string(line) + ": " + what);
}

Char single_char(std::string_view field, const std::string& origin,
                 std::size_t line) {
  Text t;
  try {
    t = utf8_decode(field);
  } catch (const Error& e) {
    bad_line(origin, line, e.what());
  }
  if (t.size() != 1) bad_line(origin, line, "expected a single character");
  return t[0];
}

// Iterates "key TAB value" lines, skipping comments and blanks.
template <typename Fn>
void for_each_record(std::istream& in, const std::string& origin, Fn&& fn) {
  std::string raw;
  std::size_t line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    const auto line = chomp(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cols = split_fields(line, '\t');
    if (cols.size() != 2 || cols[1].empty()) {
      bad_line(origin, line_number, "expected 'key<TAB>value'");
    }
    fn(cols[0], cols[1], line_number);
  }
}

}  // namespace

DistortionTable DistortionTable::parse(std::string_view spec) {
  const auto fields = split_fields(spec, ',');
  if (fields.size() != kDistortionTypeCount) {
    throw Error(ErrorCode::kInvalidConfig,
                "distortion table needs exactly 5 comma-separated values");
  }
  std::array<double, kDistortionTypeCount> probs{};
  for (std::size_t i = 0; i < fields.size(); ++i) {
    auto f = fields[i];
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.remove_suffix(1);
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), probs[i]);
    if (ec != std::errc() || ptr != f.data() + f.size()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "bad distortion probability '" + std::string(f) + "'");
    }
  }
  return DistortionTable(probs);
}

// ---------------------------------------------------------------------------
// Builder

SimilarityResources::Builder& SimilarityResources::Builder::add_pinyin(
    Char c, const std::vector<std::string>& syllables) {
  auto& dst = pinyin_[c];
  for (const auto& s : syllables) {
    if (!valid_syllable(s)) {
      throw Error(ErrorCode::kParse, "invalid pinyin syllable '" + s + "'");
    }
    if (std::find(dst.begin(), dst.end(), s) == dst.end()) dst.push_back(s);
  }
  return *this;
}

SimilarityResources::Builder& SimilarityResources::Builder::add_shape_pair(
    Char a, Char b) {
  if (a != b) {
    shape_pairs_.emplace(a, b);
    shape_pairs_.emplace(b, a);
  }
  return *this;
}

SimilarityResources::Builder& SimilarityResources::Builder::add_fuzzy_pair(
    const std::string& a, const std::string& b) {
  if (!valid_syllable(a) || !valid_syllable(b)) {
    throw Error(ErrorCode::kParse, "invalid fuzzy pair '" + a + "'/'" + b + "'");
  }
  if (a != b) {
    fuzzy_pairs_.emplace(a, b);
    fuzzy_pairs_.emplace(b, a);
  }
  return *this;
}

SimilarityResources::Builder& SimilarityResources::Builder::read_pinyin(
    std::istream& in, const std::string& origin) {
  for_each_record(in, origin, [&](std::string_view key, std::string_view value,
                                  std::size_t line) {
    const Char c = single_char(key, origin, line);
    std::vector<std::string> syllables;
    for (auto s : split_fields(value, ',')) {
      if (!valid_syllable(s)) {
        bad_line(origin, line, "invalid syllable '" + std::string(s) + "'");
      }
      syllables.emplace_back(s);
    }
    add_pinyin(c, syllables);
  });
  return *this;
}

SimilarityResources::Builder& SimilarityResources::Builder::read_shape(
    std::istream& in, const std::string& origin) {
  for_each_record(in, origin, [&](std::string_view key, std::string_view value,
                                  std::size_t line) {
    const Char a = single_char(key, origin, line);
    for (auto field : split_fields(value, ',')) {
      add_shape_pair(a, single_char(field, origin, line));
    }
  });
  return *this;
}

SimilarityResources::Builder& SimilarityResources::Builder::read_fuzzy(
    std::istream& in, const std::string& origin) {
  for_each_record(in, origin, [&](std::string_view a, std::string_view b,
                                  std::size_t line) {
    if (!valid_syllable(a) || !valid_syllable(b)) {
      bad_line(origin, line, "fuzzy pair must be lowercase ASCII");
    }
    add_fuzzy_pair(std::string(a), std::string(b));
  });
  return *this;
}

SimilarityResources SimilarityResources::Builder::build() && {
  SimilarityResources res;
  res.fuzzy_pairs_ = std::move(fuzzy_pairs_);

  // Intern syllables in sorted order so ids are deterministic.
  std::set<std::string> all;
  for (const auto& [c, syls] : pinyin_) all.insert(syls.begin(), syls.end());
  res.syllables_.assign(all.begin(), all.end());
  for (SyllableId id = 0; id < res.syllables_.size(); ++id) {
    res.syllable_index_.emplace(res.syllables_[id], id);
  }
  res.syllable_chars_.resize(res.syllables_.size());
  for (const auto& [c, syls] : pinyin_) {
    auto& ids = res.char_syllables_[c];
    for (const auto& s : syls) {
      const SyllableId id = res.syllable_index_.at(s);
      ids.push_back(id);
      res.syllable_chars_[id].push_back(c);
    }
    std::sort(ids.begin(), ids.end());
  }
  for (auto& chars : res.syllable_chars_) std::sort(chars.begin(), chars.end());

  res.similar_syllables_.resize(res.syllables_.size());
  for (SyllableId i = 0; i < res.syllables_.size(); ++i) {
    for (SyllableId j = i + 1; j < res.syllables_.size(); ++j) {
      if (res.syllables_similar(res.syllables_[i], res.syllables_[j])) {
        res.similar_syllables_[i].push_back(j);
        res.similar_syllables_[j].push_back(i);
      }
    }
  }
  for (auto& adj : res.similar_syllables_) std::sort(adj.begin(), adj.end());

  for (const auto& [a, b] : shape_pairs_) res.shape_[a].push_back(b);
  // std::set iteration already yields each list sorted.
  return res;
}

SimilarityResources SimilarityResources::load(const std::string& pinyin_path,
                                              const std::string& shape_path,
                                              const std::string& fuzzy_path) {
  Builder builder;
  auto open = [](const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) {
      throw Error(ErrorCode::kIo,
                  std::string("cannot open ") + what + " file " + path);
    }
    return in;
  };
  if (!pinyin_path.empty()) {
    auto in = open(pinyin_path, "pinyin");
    builder.read_pinyin(in, pinyin_path);
  }
  if (!shape_path.empty()) {
    auto in = open(shape_path, "shape");
    builder.read_shape(in, shape_path);
  }
  if (!fuzzy_path.empty()) {
    auto in = open(fuzzy_path, "fuzzy-pair");
    builder.read_fuzzy(in, fuzzy_path);
  }
  return std::move(builder).build();
}

// ---------------------------------------------------------------------------
// Queries

const std::vector<SimilarityResources::SyllableId>*
SimilarityResources::syllable_ids(Char c) const {
  const auto it = char_syllables_.find(c);
  return it == char_syllables_.end() ? nullptr : &it->second;
}

std::vector<std::string_view> SimilarityResources::syllables(Char c) const {
  std::vector<std::string_view> out;
  if (const auto* ids = syllable_ids(c)) {
    for (auto id : *ids) out.emplace_back(syllables_[id]);
  }
  return out;
}

bool SimilarityResources::shares_syllable(Char a, Char b) const {
  const auto* ia = syllable_ids(a);
  const auto* ib = syllable_ids(b);
  if (!ia || !ib) return false;
  auto x = ia->begin();
  auto y = ib->begin();
  while (x != ia->end() && y != ib->end()) {
    if (*x == *y) return true;
    if (*x < *y) ++x;
    else ++y;
  }
  return false;
}

bool SimilarityResources::similar_pinyin(Char a, Char b) const {
  const auto* ia = syllable_ids(a);
  const auto* ib = syllable_ids(b);
  if (!ia || !ib) return false;
  for (auto sa : *ia) {
    const auto& adj = similar_syllables_[sa];
    for (auto sb : *ib) {
      if (std::binary_search(adj.begin(), adj.end(), sb)) return true;
    }
  }
  return false;
}

bool SimilarityResources::shape_similar(Char a, Char b) const {
  const auto it = shape_.find(a);
  return it != shape_.end() &&
         std::binary_search(it->second.begin(), it->second.end(), b);
}

bool SimilarityResources::syllables_similar(std::string_view a,
                                            std::string_view b) const {
  if (a == b) return false;
  if (edit_distance(a, b) == 1) return true;
  if (fuzzy_pairs_.empty()) return false;
  const auto [ia, fa] = split_syllable(a);
  const auto [ib, fb] = split_syllable(b);
  auto listed = [this](std::string_view x, std::string_view y) {
    return fuzzy_pairs_.count({std::string(x), std::string(y)}) > 0;
  };
  if (ia == ib && fa != fb) return listed(fa, fb);
  if (fa == fb && ia != ib) return listed(ia, ib);
  return false;
}

std::vector<Char> SimilarityResources::related(Char c,
                                               DistortionType type) const {
  std::vector<Char> same;
  std::vector<Char> similar;
  if (const auto* ids = syllable_ids(c)) {
    for (auto id : *ids) {
      same.insert(same.end(), syllable_chars_[id].begin(),
                  syllable_chars_[id].end());
    }
    if (type != DistortionType::kSamePinyin) {
      for (auto id : *ids) {
        for (auto adj : similar_syllables_[id]) {
          similar.insert(similar.end(), syllable_chars_[adj].begin(),
                         syllable_chars_[adj].end());
        }
      }
    }
  }
  auto normalize = [c](std::vector<Char>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    v.erase(std::remove(v.begin(), v.end(), c), v.end());
  };
  auto subtract = [](std::vector<Char>& v, const std::vector<Char>& minus) {
    std::vector<Char> out;
    std::set_difference(v.begin(), v.end(), minus.begin(), minus.end(),
                        std::back_inserter(out));
    v.swap(out);
  };
  normalize(same);
  switch (type) {
    case DistortionType::kSamePinyin:
      return same;
    case DistortionType::kSimilarPinyin:
      normalize(similar);
      subtract(similar, same);
      return similar;
    case DistortionType::kSimilarShape: {
      std::vector<Char> shape;
      if (const auto it = shape_.find(c); it != shape_.end()) shape = it->second;
      normalize(similar);
      subtract(shape, same);
      subtract(shape, similar);
      return shape;
    }
    default:
      return {};
  }
}

std::vector<Char> SimilarityResources::confusion_set(Char c) const {
  std::vector<Char> out;
  for (auto type : {DistortionType::kSamePinyin, DistortionType::kSimilarPinyin,
                    DistortionType::kSimilarShape}) {
    const auto part = related(c, type);
    out.insert(out.end(), part.begin(), part.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

DistortionType classify_pair(Char a, Char b, const SimilarityResources& res) {
  if (a == b) return DistortionType::kIdentical;
  if (res.shares_syllable(a, b)) return DistortionType::kSamePinyin;
  if (res.similar_pinyin(a, b)) return DistortionType::kSimilarPinyin;
  if (res.shape_similar(a, b)) return DistortionType::kSimilarShape;
  return DistortionType::kUnrelated;
}

double distortion_logprob(Char a, Char b, const DistortionTable& table,
                          const SimilarityResources& res) {
  return table.log_probability(classify_pair(a, b, res));
}

double token_distortion_logprob(TextView source_slice, TextView token_chars,
                                const DistortionTable& table,
                                const SimilarityResources& res) {
  if (source_slice.size() != token_chars.size()) {
    throw Error(ErrorCode::kSliceLengthMismatch,
                "source slice has " + std::to_string(source_slice.size()) +
                    " characters, token has " +
                    std::to_string(token_chars.size()));
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < token_chars.size(); ++j) {
    sum += distortion_logprob(source_slice[j], token_chars[j], table, res);
  }
  return sum;
}

double token_distortion_logprob(TextView source_slice, const Token& token,
                                const DistortionTable& table,
                                const SimilarityResources& res) {
  return token_distortion_logprob(source_slice, TextView(token.chars), table,
                                  res);
}

}  // namespace mixcsc
