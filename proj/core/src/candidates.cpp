#include <algorithm>
#include <limits>
#include <string>

#include "mixcsc/decoder.hpp"
#include "mixcsc/utf8.hpp"

namespace mixcsc {

CandidateSet::CandidateSet(TextView source,
                           std::vector<std::vector<Char>> per_position,
                           std::size_t max_size)
    : per_position_(std::move(per_position)) {
  if (per_position_.size() != source.size()) {
    throw Error(ErrorCode::kCandidateViolation,
                "candidate set covers " + std::to_string(per_position_.size()) +
                    " positions, source has " + std::to_string(source.size()));
  }
  for (std::size_t i = 0; i < source.size(); ++i) {
    auto& set = per_position_[i];
    if (std::find(set.begin(), set.end(), source[i]) == set.end()) {
      throw Error(ErrorCode::kCandidateViolation,
                  "position " + std::to_string(i) + " lacks source character '" +
                      utf8_encode(source[i]) + "'");
    }
    if (set.size() > max_size) {
      throw Error(ErrorCode::kCandidateViolation,
                  "position " + std::to_string(i) + " has " +
                      std::to_string(set.size()) + " candidates, limit " +
                      std::to_string(max_size));
    }
    auto sorted = set;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorCode::kCandidateViolation,
                  "duplicate candidate at position " + std::to_string(i));
    }
  }
}

CandidateSet CandidateSet::identity(TextView source) {
  std::vector<std::vector<Char>> sets;
  sets.reserve(source.size());
  for (Char c : source) sets.push_back({c});
  return CandidateSet(source, std::move(sets));
}

bool CandidateSet::contains(std::size_t i, Char c) const {
  const auto& set = per_position_.at(i);
  return std::find(set.begin(), set.end(), c) != set.end();
}

std::uint64_t CandidateSet::product_size() const {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t product = 1;
  for (const auto& set : per_position_) {
    if (product > kMax / set.size()) return kMax;
    product *= set.size();
  }
  return product;
}

CandidateSet build_candidates(TextView source, const CandidatePolicy& policy,
                              const SimilarityResources& resources,
                              std::span<const CharDistribution> positions) {
  policy.validate();
  const bool use_classifier = policy.top_k_classifier > 0;
  if ((use_classifier || policy.include_confusion) &&
      positions.size() != source.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "need one classifier distribution per source position");
  }

  std::vector<std::vector<Char>> sets;
  sets.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Char x = source[i];
    std::vector<Char> set{x};
    auto add = [&set, &policy](Char c) {
      if (set.size() < policy.max_size &&
          std::find(set.begin(), set.end(), c) == set.end()) {
        set.push_back(c);
      }
    };
    if (use_classifier) {
      for (Char c : positions[i].top_k(static_cast<std::size_t>(policy.top_k_classifier))) {
        add(c);
      }
    }
    if (policy.include_confusion && set.size() < policy.max_size) {
      auto confusion = resources.confusion_set(x);
      const auto& dist = positions[i];
      std::stable_sort(confusion.begin(), confusion.end(),
                       [&dist](Char a, Char b) {
                         return dist.logprob(a) > dist.logprob(b);
                       });
      for (Char c : confusion) add(c);
    }
    sets.push_back(std::move(set));
  }
  return CandidateSet(source, std::move(sets), policy.max_size);
}

CandidateSet build_candidates(TextView source, const CandidatePolicy& policy,
                              const SimilarityResources& resources,
                              const PositionClassifier& classifier) {
  std::vector<CharDistribution> positions;
  if (policy.top_k_classifier > 0 || policy.include_confusion) {
    positions.reserve(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) {
      positions.push_back(classifier.distribution_at(source, i));
    }
  }
  return build_candidates(source, policy, resources, positions);
}

}  // namespace mixcsc
