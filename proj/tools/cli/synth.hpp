#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mixcsc/distortion.hpp"
#include "mixcsc/types.hpp"

namespace mixcsc::cli {

struct SynthOptions {
  std::uint64_t seed = 42;
  double error_rate = 0.1;
  // Only the four non-identical entries are used, as sampling weights.
  DistortionTable table;
  std::string id_prefix = "synth";
};

struct SynthResult {
  std::vector<CorrectionInstance> corpus;  // reference = clean sentence
  std::uint64_t characters = 0;
  // Characters with a pinyin entry and at least one non-empty relation set.
  std::uint64_t eligible = 0;
  std::uint64_t corrupted = 0;
  std::array<std::uint64_t, kDistortionTypeCount> by_type{};

  // corrupted / eligible (0 when nothing is eligible).
  double achieved_rate() const;
};

// Corrupts each eligible character independently with probability
// error_rate. A corrupted character draws a type among its non-empty
// relation sets (weights from the table) and then a uniform member of that
// set. The Unrelated set is drawn from the corpus's own pinyin-bearing
// characters. Deterministic for a fixed seed on every platform: the engine is
// mt19937_64 and the draws avoid implementation-defined std distributions.
// Throws Error(kInvalidConfig) for an error rate outside [0, 1] and
// Error(kEmptyCorpus) for an empty input.
SynthResult synthesize(std::span<const Text> clean,
                       const SimilarityResources& resources,
                       const SynthOptions& options);

}  // namespace mixcsc::cli
