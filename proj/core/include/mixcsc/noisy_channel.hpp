#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "mixcsc/distortion.hpp"
#include "mixcsc/scorer.hpp"

namespace mixcsc {

// Reference position classifier:
//
//   p(y | x, i) ∝ prior(y) * p_DM(x_i | y)^(1 / temperature)
//
// normalized over the prior's alphabet plus x_i itself. A source character
// outside the alphabet borrows the kUnknownChar prior.
class NoisyChannelClassifier final : public PositionClassifier {
 public:
  static constexpr double kDefaultPriorK = 0.1;

  // `prior` holds unnormalized non-negative weights; it is normalized here.
  NoisyChannelClassifier(DistortionTable table,
                         std::shared_ptr<const SimilarityResources> resources,
                         std::vector<std::pair<Char, double>> prior,
                         double temperature = 1.0);

  // Add-k smoothed unigram prior over the counted characters plus
  // kUnknownChar: (count + k) / (N + k * |alphabet|).
  static std::vector<std::pair<Char, double>> prior_from_counts(
      std::span<const std::pair<Char, std::uint64_t>> counts,
      double k = kDefaultPriorK);
  static std::vector<std::pair<Char, double>> prior_from_corpus(
      std::span<const Text> corpus, double k = kDefaultPriorK);

  CharDistribution distribution_at(TextView source,
                                   std::size_t i) const override;

  double temperature() const { return temperature_; }
  double log_prior(Char c) const;

 private:
  DistortionTable table_;
  std::shared_ptr<const SimilarityResources> resources_;
  std::vector<std::pair<Char, double>> log_prior_;  // sorted by Char
  double temperature_;
};

}  // namespace mixcsc
