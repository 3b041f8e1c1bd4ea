#include "mixcsc/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mixcsc {

std::size_t ScorerStateHash::operator()(const ScorerState& s) const noexcept {
  // FNV-1a over the raw values.
  std::uint64_t h = 1469598103934665603ULL;
  for (auto v : s.data) {
    h ^= static_cast<std::uint32_t>(v);
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

CharDistribution::CharDistribution(
    std::vector<std::pair<Char, double>> log_probs)
    : entries_(std::move(log_probs)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  const auto dup = std::adjacent_find(
      entries_.begin(), entries_.end(),
      [](const auto& a, const auto& b) { return a.first == b.first; });
  if (dup != entries_.end()) {
    throw Error(ErrorCode::kInvalidConfig,
                "duplicate character in classifier distribution");
  }
}

bool CharDistribution::contains(Char c) const {
  return std::binary_search(
      entries_.begin(), entries_.end(), std::pair<Char, double>{c, 0.0},
      [](const auto& a, const auto& b) { return a.first < b.first; });
}

double CharDistribution::logprob(Char c) const {
  auto find = [this](Char key) -> const std::pair<Char, double>* {
    const auto it = std::lower_bound(
        entries_.begin(), entries_.end(), key,
        [](const auto& e, Char k) { return e.first < k; });
    return it != entries_.end() && it->first == key ? &*it : nullptr;
  };
  if (const auto* e = find(c)) return e->second;
  if (const auto* e = find(kUnknownChar)) return e->second;
  return kNegInf;
}

std::vector<Char> CharDistribution::top_k(std::size_t k) const {
  std::vector<std::pair<Char, double>> sorted;
  sorted.reserve(entries_.size());
  for (const auto& e : entries_) {
    if (e.first != kUnknownChar) sorted.push_back(e);
  }
  const auto by_prob = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  k = std::min(k, sorted.size());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k),
                    sorted.end(), by_prob);
  std::vector<Char> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(sorted[i].first);
  return out;
}

Char CharDistribution::argmax() const {
  const auto top = top_k(1);
  return top.empty() ? kUnknownChar : top.front();
}

double sm_token_logprob(std::span<const CharDistribution> positions,
                        std::size_t end, TextView token_chars) {
  const std::size_t len = token_chars.size();
  if (len == 0 || end < len || end > positions.size()) {
    throw Error(ErrorCode::kSpanOutOfRange,
                "token of length " + std::to_string(len) + " ending at " +
                    std::to_string(end) + " does not fit in " +
                    std::to_string(positions.size()) + " positions");
  }
  const std::size_t begin = end - len;
  double sum = 0.0;
  for (std::size_t j = 0; j < len; ++j) {
    sum += positions[begin + j].logprob(token_chars[j]);
  }
  return sum;
}

double sm_token_logprob(const PositionClassifier& classifier, TextView source,
                        std::size_t end, TextView token_chars) {
  const std::size_t len = token_chars.size();
  if (len == 0 || end < len || end > source.size()) {
    throw Error(ErrorCode::kSpanOutOfRange,
                "token of length " + std::to_string(len) + " ending at " +
                    std::to_string(end) + " does not fit in a sentence of " +
                    std::to_string(source.size()) + " characters");
  }
  const std::size_t begin = end - len;
  double sum = 0.0;
  for (std::size_t j = 0; j < len; ++j) {
    sum += classifier.distribution_at(source, begin + j).logprob(token_chars[j]);
  }
  return sum;
}

double log_sum_exp(std::span<const double> values) {
  double max = kNegInf;
  for (double v : values) max = std::max(max, v);
  if (max == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

}  // namespace mixcsc
