#include "mixcsc/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mixcsc/utf8.hpp"

namespace mixcsc {

// ---------------------------------------------------------------------------
// Entropy and mixture rule

EntropyValue entropy(std::span<const double> log_probs) {
  double mass = 0.0;
  double h = 0.0;
  for (double lp : log_probs) {
    if (lp == kNegInf) continue;
    const double p = std::exp(lp);
    mass += p;
    h -= p * lp;
  }
  if (!(std::fabs(mass - 1.0) <= 1e-6)) {
    throw Error(ErrorCode::kNotNormalized,
                "distribution sums to " + std::to_string(mass));
  }
  return EntropyValue{h};
}

StepIncrement mixture_step(double lm_logprob, double lm_entropy,
                           double dm_logprob, double sm_logprob,
                           const MixtureConfig& config) {
  StepIncrement inc;
  inc.lm = lm_logprob;
  inc.multiplier = config.fr_enabled ? 1.0 + lm_entropy : 1.0;
  if (config.dm_enabled && config.alpha != 0.0) {
    inc.dm = inc.multiplier * (config.alpha * dm_logprob);
  }
  if (config.beta != 0.0) {
    inc.sm = inc.multiplier * (config.beta * sm_logprob);
  }
  return inc;
}

// ---------------------------------------------------------------------------
// SentenceContext

namespace {

std::vector<CharDistribution> position_distributions(
    const PositionClassifier& classifier, TextView source) {
  std::vector<CharDistribution> out;
  out.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    out.push_back(classifier.distribution_at(source, i));
  }
  return out;
}

}  // namespace

SentenceContext::SentenceContext(const MixtureModels& models,
                                 const MixtureConfig& config, Text source)
    : models_(models), config_(config), source_(std::move(source)) {
  config_.validate();
  if (source_.empty()) throw Error(ErrorCode::kEmptySource, "nothing to decode");
  positions_ = position_distributions(models_.classifier, source_);
  candidates_ = build_candidates(source_, config_.candidates, models_.resources,
                                 positions_);
  index_expansions();
}

SentenceContext::SentenceContext(const MixtureModels& models,
                                 const MixtureConfig& config, Text source,
                                 CandidateSet candidates)
    : models_(models),
      config_(config),
      source_(std::move(source)),
      candidates_(std::move(candidates)) {
  config_.validate();
  if (source_.empty()) throw Error(ErrorCode::kEmptySource, "nothing to decode");
  if (candidates_.size() != source_.size()) {
    throw Error(ErrorCode::kCandidateViolation,
                "candidate set does not match the source length");
  }
  positions_ = position_distributions(models_.classifier, source_);
  index_expansions();
}

void SentenceContext::index_expansions() {
  const auto& lm = models_.lm;
  const std::size_t n = source_.size();
  expansions_.assign(n, {});
  for (std::size_t pos = 0; pos < n; ++pos) {
    for (Char c : candidates_.at(pos)) {
      const Text chars(1, c);
      const auto id = lm.find_token(chars);
      expansions_[pos].push_back(Token{chars, id ? *id : lm.unknown_token()});
    }
  }
  for (const auto& tok : lm.vocabulary()) {
    const std::size_t len = tok.chars.size();
    if (len < 2 || len > n) continue;
    for (std::size_t pos = 0; pos + len <= n; ++pos) {
      bool fits = true;
      for (std::size_t j = 0; j < len && fits; ++j) {
        fits = candidates_.contains(pos + j, tok.chars[j]);
      }
      if (fits) expansions_[pos].push_back(tok);
    }
  }
}

const SentenceContext::LmEntry& SentenceContext::lm_at(
    const ScorerState& state) const {
  auto it = lm_cache_.find(state);
  if (it == lm_cache_.end()) {
    LmEntry entry;
    entry.log_probs = models_.lm.distribution(state);
    entry.entropy = entropy(entry.log_probs).nats;
    it = lm_cache_.emplace(state, std::move(entry)).first;
  }
  return it->second;
}

Hypothesis SentenceContext::initial() const {
  Hypothesis h;
  h.lm_state = models_.lm.initial_state();
  return h;
}

// ---------------------------------------------------------------------------
// Extension

namespace {

StepIncrement step_increment(const Hypothesis& hyp, const Token& token,
                             const SentenceContext& ctx) {
  const std::size_t begin = hyp.covered_chars;
  const std::size_t len = token.chars.size();
  const TextView source = ctx.source();
  if (len == 0 || begin + len > source.size()) {
    throw Error(ErrorCode::kSpanOverflow,
                "token of length " + std::to_string(len) + " at offset " +
                    std::to_string(begin) + " overruns a sentence of " +
                    std::to_string(source.size()) + " characters");
  }
  for (std::size_t j = 0; j < len; ++j) {
    if (!ctx.candidates().contains(begin + j, token.chars[j])) {
      throw Error(ErrorCode::kCandidateViolation,
                  "'" + utf8_encode(token.chars[j]) + "' is not a candidate at " +
                      std::to_string(begin + j));
    }
  }
  const auto& vocab = ctx.models().lm.vocabulary();
  if (token.id < 0 || static_cast<std::size_t>(token.id) >= vocab.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "token id " + std::to_string(token.id) + " outside vocabulary");
  }

  const auto& config = ctx.config();
  const auto& lm = ctx.lm_at(hyp.lm_state);
  const double lm_logprob = lm.log_probs[static_cast<std::size_t>(token.id)];
  const double dm_logprob =
      config.dm_enabled
          ? token_distortion_logprob(source.substr(begin, len), token.chars,
                                     ctx.models().distortion,
                                     ctx.models().resources)
          : 0.0;
  const double sm_logprob =
      config.beta != 0.0
          ? sm_token_logprob(ctx.classifier_positions(), begin + len, token.chars)
          : 0.0;
  return mixture_step(lm_logprob, lm.entropy, dm_logprob, sm_logprob, config);
}

}  // namespace

ScoreBreakdown extend_score(const Hypothesis& hyp, const Token& token,
                            const SentenceContext& ctx) {
  const auto inc = step_increment(hyp, token, ctx);
  ScoreBreakdown score = hyp.score;
  score.add(inc.lm, inc.dm, inc.sm);
  return score;
}

Hypothesis extend(const Hypothesis& hyp, const Token& token,
                  const SentenceContext& ctx) {
  const auto inc = step_increment(hyp, token, ctx);
  Hypothesis next;
  next.tokens.reserve(hyp.tokens.size() + 1);
  next.tokens = hyp.tokens;
  next.tokens.push_back(token);
  next.output = hyp.output + token.chars;
  next.covered_chars = hyp.covered_chars + token.chars.size();
  next.score = hyp.score;
  next.score.add(inc.lm, inc.dm, inc.sm);
  next.lm_state = ctx.models().lm.step(hyp.lm_state, token.id);
  next.last_multiplier = inc.multiplier;
  return next;
}

// ---------------------------------------------------------------------------
// Search

namespace {

bool alive(const Hypothesis& h) { return h.score.total > kNegInf; }

std::vector<TokenId> token_ids(const Hypothesis& h) {
  std::vector<TokenId> ids;
  ids.reserve(h.tokens.size());
  for (const auto& t : h.tokens) ids.push_back(t.id);
  return ids;
}

// Strict ordering: total desc, output asc, token boundaries, token ids.
bool better(const Hypothesis& a, const Hypothesis& b) {
  if (a.score.total != b.score.total) return a.score.total > b.score.total;
  if (a.output != b.output) return a.output < b.output;
  if (a.tokens.size() != b.tokens.size()) return a.tokens.size() < b.tokens.size();
  for (std::size_t i = 0; i < a.tokens.size(); ++i) {
    if (a.tokens[i].chars.size() != b.tokens[i].chars.size()) {
      return a.tokens[i].chars.size() > b.tokens[i].chars.size();
    }
  }
  return token_ids(a) < token_ids(b);
}

// Merges hypotheses with equal output and LM state, keeping the best, then
// keeps the top `keep`. Leaves the frontier sorted best-first.
void prune(std::vector<Hypothesis>& frontier, std::size_t keep) {
  std::sort(frontier.begin(), frontier.end(), better);
  std::vector<Hypothesis> kept;
  kept.reserve(std::min(keep, frontier.size()));
  std::unordered_map<ScorerState, std::vector<const Text*>, ScorerStateHash> seen;
  for (auto& h : frontier) {
    if (kept.size() == keep) break;
    auto& outputs = seen[h.lm_state];
    const bool duplicate = std::any_of(outputs.begin(), outputs.end(),
                                       [&h](const Text* t) { return *t == h.output; });
    if (duplicate) continue;
    kept.push_back(std::move(h));
    outputs.push_back(&kept.back().output);
  }
  frontier = std::move(kept);
}

DecodedOutput to_output(const Hypothesis& h) {
  return DecodedOutput{h.output, h.score, h.tokens};
}

}  // namespace

std::vector<DecodedOutput> beam_search(const SentenceContext& ctx,
                                       const TraceSink& trace) {
  const std::size_t n = ctx.source().size();
  const auto beam = static_cast<std::size_t>(ctx.config().beam_size);

  std::vector<std::vector<Hypothesis>> frontiers(n + 1);
  frontiers[0].push_back(ctx.initial());
  for (std::size_t covered = 0; covered < n; ++covered) {
    auto& frontier = frontiers[covered];
    if (frontier.empty()) continue;
    // prune() reserves `kept` up front, so output pointers stay valid.
    prune(frontier, beam);
    if (trace) trace(covered, frontier);
    for (const auto& hyp : frontier) {
      for (const auto& tok : ctx.expansions(covered)) {
        if (covered + tok.chars.size() > n) continue;
        auto next = extend(hyp, tok, ctx);
        if (alive(next)) frontiers[next.covered_chars].push_back(std::move(next));
      }
    }
    frontier.clear();
    frontier.shrink_to_fit();
  }

  auto& complete = frontiers[n];
  std::sort(complete.begin(), complete.end(), better);
  std::vector<Hypothesis> ranked;
  for (auto& h : complete) {
    if (ranked.size() == beam) break;
    const bool seen = std::any_of(ranked.begin(), ranked.end(), [&h](const Hypothesis& r) {
      return r.output == h.output;
    });
    if (!seen) ranked.push_back(std::move(h));
  }
  if (ranked.empty()) {
    throw Error(ErrorCode::kNoCompleteHypothesis,
                "no finite-scoring output for '" + utf8_encode(ctx.source()) + "'");
  }
  if (trace) trace(n, ranked);

  std::vector<DecodedOutput> out;
  out.reserve(ranked.size());
  for (const auto& h : ranked) out.push_back(to_output(h));
  return out;
}

std::uint64_t count_search_paths(const SentenceContext& ctx,
                                 std::uint64_t limit) {
  const std::size_t n = ctx.source().size();
  const std::uint64_t cap = limit == std::numeric_limits<std::uint64_t>::max()
                                ? limit
                                : limit + 1;
  std::vector<std::uint64_t> paths(n + 1, 0);
  paths[n] = 1;
  for (std::size_t pos = n; pos-- > 0;) {
    std::uint64_t total = 0;
    for (const auto& tok : ctx.expansions(pos)) {
      const std::size_t end = pos + tok.chars.size();
      if (end > n) continue;
      total = std::min(cap, total + paths[end]);
    }
    paths[pos] = total;
  }
  return paths[0];
}

DecodedOutput exhaustive_search(const SentenceContext& ctx,
                                std::uint64_t max_paths) {
  const std::uint64_t paths = count_search_paths(ctx, max_paths);
  if (paths > max_paths) {
    throw Error(ErrorCode::kSearchSpaceTooLarge,
                "more than " + std::to_string(max_paths) + " paths for '" +
                    utf8_encode(ctx.source()) + "'");
  }
  const std::size_t n = ctx.source().size();
  std::optional<Hypothesis> best;

  // Iterative DFS over (hypothesis, next expansion index).
  struct Frame {
    Hypothesis hyp;
    std::size_t next = 0;
  };
  std::vector<Frame> stack;
  stack.push_back({ctx.initial(), 0});
  while (!stack.empty()) {
    auto& top = stack.back();
    if (top.hyp.covered_chars == n) {
      if (!best || top.hyp.score.total > best->score.total ||
          (top.hyp.score.total == best->score.total &&
           top.hyp.output < best->output)) {
        best = top.hyp;
      }
      stack.pop_back();
      continue;
    }
    const auto expansions = ctx.expansions(top.hyp.covered_chars);
    if (top.next == expansions.size()) {
      stack.pop_back();
      continue;
    }
    const Token& tok = expansions[top.next++];
    if (top.hyp.covered_chars + tok.chars.size() > n) continue;
    auto next = extend(top.hyp, tok, ctx);
    if (alive(next)) stack.push_back({std::move(next), 0});
  }
  if (!best) {
    throw Error(ErrorCode::kNoCompleteHypothesis,
                "no finite-scoring output for '" + utf8_encode(ctx.source()) + "'");
  }
  return to_output(*best);
}

DecodedOutput decode(const MixtureModels& models, const MixtureConfig& config,
                     TextView source) {
  SentenceContext ctx(models, config, Text(source));
  return beam_search(ctx).front();
}

Text classifier_argmax(const PositionClassifier& classifier, TextView source) {
  Text out;
  out.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Char best = classifier.distribution_at(source, i).argmax();
    out.push_back(best == kUnknownChar ? source[i] : best);
  }
  return out;
}

}  // namespace mixcsc
