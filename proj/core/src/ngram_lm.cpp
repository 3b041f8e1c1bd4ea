#include "mixcsc/ngram_lm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "mixcsc/corpus.hpp"
#include "mixcsc/utf8.hpp"

namespace mixcsc {

namespace {

bool reserved(Char c) {
  return c == U'\t' || c == U'\n' || c == U'\r' || c == NGramLM::kBosChar;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

[[noreturn]] void bad_model(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kParse,
              "n-gram model line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_tabs(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find('\t', start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, std::size_t line, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    bad_model(line, std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

std::string_view header_field(std::string_view field, std::string_view key,
                              std::size_t line) {
  if (field.substr(0, key.size()) != key || field.size() <= key.size() ||
      field[key.size()] != '=') {
    bad_model(line, "expected header field '" + std::string(key) + "='");
  }
  return field.substr(key.size() + 1);
}

void check_hyperparameters(int order, double k) {
  if (order < 1) throw Error(ErrorCode::kInvalidConfig, "order must be >= 1");
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw Error(ErrorCode::kInvalidConfig, "add-k constant must be > 0");
  }
}

bool is_cjk(Char c) { return c >= 0x4E00 && c <= 0x9FFF; }

}  // namespace

// ---------------------------------------------------------------------------
// Construction

void NGramLM::init_alphabet(std::vector<Char> chars) {
  chars.push_back(kUnknownChar);
  std::sort(chars.begin(), chars.end());
  chars.erase(std::unique(chars.begin(), chars.end()), chars.end());
  alphabet_ = std::move(chars);
  char_index_.clear();
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    char_index_.emplace(alphabet_[i], static_cast<std::int32_t>(i));
  }
  unk_index_ = char_index_.at(kUnknownChar);
}

void NGramLM::init_vocabulary(std::vector<Text> multi_tokens) {
  std::sort(multi_tokens.begin(), multi_tokens.end());
  multi_tokens.erase(std::unique(multi_tokens.begin(), multi_tokens.end()),
                     multi_tokens.end());
  vocab_.clear();
  token_index_.clear();
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    vocab_.push_back(Token{Text(1, alphabet_[i]), static_cast<TokenId>(i)});
  }
  for (auto& t : multi_tokens) {
    if (t.size() < 2) {
      throw Error(ErrorCode::kInvalidConfig,
                  "multi-character token '" + utf8_encode(t) +
                      "' must have at least two characters");
    }
    for (Char c : t) {
      if (c == kUnknownChar || !char_index_.count(c)) {
        throw Error(ErrorCode::kInvalidConfig,
                    "multi-character token '" + utf8_encode(t) +
                        "' uses a character outside the alphabet");
      }
    }
    vocab_.push_back(Token{std::move(t), static_cast<TokenId>(vocab_.size())});
  }
  for (const auto& tok : vocab_) token_index_.emplace(tok.chars, tok.id);
}

NGramLM NGramLM::train(std::span<const Text> corpus, int order, double k,
                       std::span<const Text> multi_tokens) {
  check_hyperparameters(order, k);
  std::set<Char> seen;
  for (const auto& sentence : corpus) {
    for (Char c : sentence) {
      if (reserved(c)) {
        throw Error(ErrorCode::kInvalidCharacter,
                    "training corpus contains a reserved character");
      }
      seen.insert(c);
    }
  }
  if (seen.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "n-gram training corpus is empty");
  }

  NGramLM lm;
  lm.order_ = order;
  lm.k_ = k;
  lm.init_alphabet(std::vector<Char>(seen.begin(), seen.end()));
  lm.init_vocabulary(
      std::vector<Text>(multi_tokens.begin(), multi_tokens.end()));

  std::unordered_map<ScorerState, std::map<std::int32_t, std::uint64_t>,
                     ScorerStateHash>
      raw;
  for (const auto& sentence : corpus) {
    ScorerState ctx = lm.initial_state();
    for (Char c : sentence) {
      const std::int32_t idx = lm.index_of(c);
      ++raw[ctx][idx];
      lm.push(ctx, idx);
    }
  }
  for (auto& [ctx, next] : raw) {
    ContextCounts cc;
    for (const auto& [idx, n] : next) {
      cc.total += n;
      cc.next.emplace_back(idx, n);
    }
    lm.counts_.emplace(ctx, std::move(cc));
  }
  return lm;
}

std::vector<Text> NGramLM::frequent_bigrams(std::span<const Text> corpus,
                                            std::size_t n) {
  std::map<Text, std::uint64_t> counts;
  for (const auto& s : corpus) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (is_cjk(s[i]) && is_cjk(s[i + 1])) ++counts[s.substr(i, 2)];
    }
  }
  std::vector<std::pair<Text, std::uint64_t>> sorted(counts.begin(),
                                                      counts.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  std::vector<Text> out;
  for (std::size_t i = 0; i < std::min(n, sorted.size()); ++i) {
    out.push_back(sorted[i].first);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scoring

std::int32_t NGramLM::index_of(Char c) const {
  const auto it = char_index_.find(c);
  return it == char_index_.end() ? unk_index_ : it->second;
}

void NGramLM::push(ScorerState& state, std::int32_t index) const {
  if (state.data.empty()) return;
  std::rotate(state.data.begin(), state.data.begin() + 1, state.data.end());
  state.data.back() = index;
}

const NGramLM::ContextCounts* NGramLM::find_context(
    const ScorerState& context) const {
  const auto it = counts_.find(context);
  return it == counts_.end() ? nullptr : &it->second;
}

double NGramLM::conditional_index(const ScorerState& context,
                                  std::int32_t c) const {
  const double size = static_cast<double>(alphabet_.size());
  const ContextCounts* cc = find_context(context);
  if (!cc) return 1.0 / size;
  std::uint64_t count = 0;
  const auto it = std::lower_bound(
      cc->next.begin(), cc->next.end(), c,
      [](const auto& e, std::int32_t key) { return e.first < key; });
  if (it != cc->next.end() && it->first == c) count = it->second;
  return (static_cast<double>(count) + k_) /
         (static_cast<double>(cc->total) + k_ * size);
}

double NGramLM::conditional(TextView history, Char c) const {
  ScorerState ctx = initial_state();
  for (Char h : history) push(ctx, index_of(h));
  return conditional_index(ctx, index_of(c));
}

double NGramLM::perplexity(std::span<const Text> corpus) const {
  double log_sum = 0.0;
  std::size_t n = 0;
  for (const auto& sentence : corpus) {
    ScorerState ctx = initial_state();
    for (Char c : sentence) {
      const auto idx = index_of(c);
      log_sum += std::log(conditional_index(ctx, idx));
      push(ctx, idx);
      ++n;
    }
  }
  if (n == 0) throw Error(ErrorCode::kEmptyCorpus, "perplexity of empty corpus");
  return std::exp(-log_sum / static_cast<double>(n));
}

std::vector<std::pair<Char, std::uint64_t>> NGramLM::unigram_counts() const {
  std::vector<std::uint64_t> totals(alphabet_.size(), 0);
  for (const auto& [ctx, cc] : counts_) {
    for (const auto& [idx, n] : cc.next) totals[static_cast<std::size_t>(idx)] += n;
  }
  std::vector<std::pair<Char, std::uint64_t>> out;
  out.reserve(alphabet_.size());
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    out.emplace_back(alphabet_[i], totals[i]);
  }
  return out;
}

std::optional<TokenId> NGramLM::find_token(TextView chars) const {
  const auto it = token_index_.find(Text(chars));
  if (it == token_index_.end()) return std::nullopt;
  return it->second;
}

ScorerState NGramLM::initial_state() const {
  return ScorerState{std::vector<std::int32_t>(
      static_cast<std::size_t>(order_ - 1), kBos)};
}

ScorerState NGramLM::step(const ScorerState& state, TokenId token) const {
  if (token < 0 || static_cast<std::size_t>(token) >= vocab_.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "token id " + std::to_string(token) + " outside vocabulary");
  }
  ScorerState next = state;
  for (Char c : vocab_[static_cast<std::size_t>(token)].chars) {
    push(next, index_of(c));
  }
  return next;
}

std::vector<double> NGramLM::distribution(const ScorerState& state) const {
  const std::size_t size = alphabet_.size();
  std::vector<double> probs(vocab_.size());

  const ContextCounts* cc = find_context(state);
  const double denom =
      (cc ? static_cast<double>(cc->total) : 0.0) + k_ * static_cast<double>(size);
  for (std::size_t i = 0; i < size; ++i) probs[i] = k_ / denom;
  if (cc) {
    for (const auto& [idx, n] : cc->next) {
      probs[static_cast<std::size_t>(idx)] =
          (static_cast<double>(n) + k_) / denom;
    }
  }

  double multi_mass = 0.0;
  for (std::size_t t = size; t < vocab_.size(); ++t) {
    ScorerState ctx = state;
    double p = 1.0;
    for (Char c : vocab_[t].chars) {
      const auto idx = index_of(c);
      p *= conditional_index(ctx, idx);
      push(ctx, idx);
    }
    probs[t] = p;
    multi_mass += p;
  }

  const double log_z = multi_mass > 0.0 ? std::log1p(multi_mass) : 0.0;
  for (auto& p : probs) p = std::log(p) - log_z;
  return probs;
}

// ---------------------------------------------------------------------------
// Serialization

void NGramLM::set_metadata(std::vector<std::string> lines) {
  for (const auto& line : lines) {
    if (line.find_first_of("\r\n") != std::string::npos) {
      throw Error(ErrorCode::kInvalidConfig, "metadata line contains a newline");
    }
  }
  metadata_ = std::move(lines);
}

void NGramLM::save(std::ostream& out) const {
  Text alphabet_text(alphabet_.begin(), alphabet_.end());
  out << kFormatTag << '\t' << kFormatVersion << "\torder=" << order_
      << "\tk=" << format_double(k_)
      << "\talphabet=" << utf8_encode(alphabet_text)
      << "\ttokens=" << (vocab_.size() - alphabet_.size())
      << "\tmeta=" << metadata_.size() << '\n';
  for (const auto& m : metadata_) out << m << '\n';
  for (std::size_t t = alphabet_.size(); t < vocab_.size(); ++t) {
    out << utf8_encode(vocab_[t].chars) << '\n';
  }

  auto context_text = [this](const ScorerState& ctx) {
    Text t;
    for (auto idx : ctx.data) {
      t.push_back(idx == kBos ? kBosChar : alphabet_[static_cast<std::size_t>(idx)]);
    }
    return t;
  };
  std::vector<std::pair<Text, const ContextCounts*>> contexts;
  contexts.reserve(counts_.size());
  for (const auto& [ctx, cc] : counts_) {
    contexts.emplace_back(context_text(ctx), &cc);
  }
  std::sort(contexts.begin(), contexts.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [ctx, cc] : contexts) {
    const std::string ctx_utf8 = utf8_encode(ctx);
    // next is sorted by alphabet index, i.e. by code point.
    for (const auto& [idx, n] : cc->next) {
      out << ctx_utf8 << '\t' << utf8_encode(alphabet_[static_cast<std::size_t>(idx)])
          << '\t' << n << '\n';
    }
  }
}

void NGramLM::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write model file " + path);
  save(out);
  if (!out) throw Error(ErrorCode::kIo, "failed writing model file " + path);
}

NGramLM NGramLM::load(std::istream& in) {
  std::string raw;
  std::size_t line_number = 1;
  if (!std::getline(in, raw)) bad_model(1, "missing header");
  const auto header = split_tabs(chomp(raw));
  if (header.size() != 7 || header[0] != kFormatTag) {
    bad_model(1, "not a mixcsc n-gram model");
  }
  if (header[1] != kFormatVersion) {
    bad_model(1, "unsupported version '" + std::string(header[1]) + "'");
  }
  NGramLM lm;
  lm.order_ = parse_number<int>(header_field(header[2], "order", 1), 1, "order");
  lm.k_ = parse_number<double>(header_field(header[3], "k", 1), 1, "k");
  check_hyperparameters(lm.order_, lm.k_);
  const Text alphabet = utf8_decode(header_field(header[4], "alphabet", 1));
  const auto n_tokens = parse_number<std::size_t>(
      header_field(header[5], "tokens", 1), 1, "token count");
  for (Char c : alphabet) {
    if (reserved(c)) bad_model(1, "alphabet contains a reserved character");
  }
  lm.init_alphabet(std::vector<Char>(alphabet.begin(), alphabet.end()));
  if (lm.alphabet_.size() != alphabet.size() ||
      !std::equal(alphabet.begin(), alphabet.end(), lm.alphabet_.begin())) {
    bad_model(1, "alphabet must be sorted, unique and contain U+FFFD");
  }

  const auto n_meta = parse_number<std::size_t>(
      header_field(header[6], "meta", 1), 1, "metadata count");
  for (std::size_t i = 0; i < n_meta; ++i) {
    ++line_number;
    if (!std::getline(in, raw)) bad_model(line_number, "missing metadata line");
    lm.metadata_.emplace_back(chomp(raw));
  }

  std::vector<Text> tokens;
  for (std::size_t i = 0; i < n_tokens; ++i) {
    ++line_number;
    if (!std::getline(in, raw)) bad_model(line_number, "missing token line");
    tokens.push_back(utf8_decode(chomp(raw)));
  }
  lm.init_vocabulary(std::move(tokens));

  const auto ctx_len = static_cast<std::size_t>(lm.order_ - 1);
  while (std::getline(in, raw)) {
    ++line_number;
    const auto view = chomp(raw);
    if (view.empty()) continue;
    const auto cols = split_tabs(view);
    if (cols.size() != 3) bad_model(line_number, "expected 3 columns");
    const Text ctx_text = utf8_decode(cols[0]);
    const Text next_text = utf8_decode(cols[1]);
    if (ctx_text.size() != ctx_len) bad_model(line_number, "context length");
    if (next_text.size() != 1 || !lm.char_index_.count(next_text[0])) {
      bad_model(line_number, "character outside alphabet");
    }
    ScorerState ctx;
    for (Char c : ctx_text) {
      if (c == kBosChar) {
        ctx.data.push_back(kBos);
      } else if (auto it = lm.char_index_.find(c); it != lm.char_index_.end()) {
        ctx.data.push_back(it->second);
      } else {
        bad_model(line_number, "context character outside alphabet");
      }
    }
    const auto count = parse_number<std::uint64_t>(cols[2], line_number, "count");
    auto& cc = lm.counts_[ctx];
    const std::int32_t idx = lm.char_index_.at(next_text[0]);
    if (!cc.next.empty() && cc.next.back().first >= idx) {
      bad_model(line_number, "entries not sorted");
    }
    cc.next.emplace_back(idx, count);
    cc.total += count;
  }
  return lm;
}

NGramLM NGramLM::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open model file " + path);
  return load(in);
}

}  // namespace mixcsc
