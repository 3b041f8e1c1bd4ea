#include "mixcsc/noisy_channel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace mixcsc {

NoisyChannelClassifier::NoisyChannelClassifier(
    DistortionTable table, std::shared_ptr<const SimilarityResources> resources,
    std::vector<std::pair<Char, double>> prior, double temperature)
    : table_(std::move(table)),
      resources_(std::move(resources)),
      temperature_(temperature) {
  if (!resources_) {
    throw Error(ErrorCode::kInvalidConfig, "classifier needs similarity resources");
  }
  if (!(temperature_ > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "temperature must be > 0");
  }
  std::sort(prior.begin(), prior.end());
  double total = 0.0;
  for (const auto& [c, w] : prior) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidConfig, "prior weights must be finite and >= 0");
    }
    total += w;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "prior has no mass");
  }
  for (std::size_t i = 1; i < prior.size(); ++i) {
    if (prior[i].first == prior[i - 1].first) {
      throw Error(ErrorCode::kInvalidConfig, "duplicate prior character");
    }
  }
  log_prior_.reserve(prior.size());
  for (const auto& [c, w] : prior) {
    log_prior_.emplace_back(c, std::log(w / total));
  }
}

std::vector<std::pair<Char, double>> NoisyChannelClassifier::prior_from_counts(
    std::span<const std::pair<Char, std::uint64_t>> counts, double k) {
  std::map<Char, std::uint64_t> merged;
  for (const auto& [c, n] : counts) merged[c] += n;
  merged.try_emplace(kUnknownChar, 0);
  double total = 0.0;
  for (const auto& [c, n] : merged) total += static_cast<double>(n);
  const double denom = total + k * static_cast<double>(merged.size());
  std::vector<std::pair<Char, double>> out;
  out.reserve(merged.size());
  for (const auto& [c, n] : merged) {
    out.emplace_back(c, (static_cast<double>(n) + k) / denom);
  }
  return out;
}

std::vector<std::pair<Char, double>> NoisyChannelClassifier::prior_from_corpus(
    std::span<const Text> corpus, double k) {
  std::map<Char, std::uint64_t> counts;
  for (const auto& s : corpus) {
    for (Char c : s) ++counts[c];
  }
  std::vector<std::pair<Char, std::uint64_t>> flat(counts.begin(), counts.end());
  return prior_from_counts(flat, k);
}

double NoisyChannelClassifier::log_prior(Char c) const {
  auto find = [this](Char key) {
    return std::lower_bound(
        log_prior_.begin(), log_prior_.end(), key,
        [](const auto& e, Char k) { return e.first < k; });
  };
  if (auto it = find(c); it != log_prior_.end() && it->first == c) {
    return it->second;
  }
  if (auto it = find(kUnknownChar);
      it != log_prior_.end() && it->first == kUnknownChar) {
    return it->second;
  }
  return kNegInf;
}

CharDistribution NoisyChannelClassifier::distribution_at(TextView source,
                                                         std::size_t i) const {
  if (i >= source.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "position " + std::to_string(i) + " in a sentence of " +
                    std::to_string(source.size()) + " characters");
  }
  const Char x = source[i];
  const double inv_t = 1.0 / temperature_;

  std::vector<std::pair<Char, double>> scores;
  scores.reserve(log_prior_.size() + 1);
  bool has_source = false;
  for (const auto& [y, lp] : log_prior_) {
    has_source = has_source || y == x;
    scores.emplace_back(
        y, lp + inv_t * distortion_logprob(x, y, table_, *resources_));
  }
  if (!has_source) {
    scores.emplace_back(x, log_prior(x) + inv_t * table_.log_probability(
                                                      DistortionType::kIdentical));
  }

  std::vector<double> values;
  values.reserve(scores.size());
  for (const auto& e : scores) values.push_back(e.second);
  const double log_z = log_sum_exp(values);
  for (auto& e : scores) e.second -= log_z;
  return CharDistribution(std::move(scores));
}

}  // namespace mixcsc
