#include "synth.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <random>
#include <set>

namespace mixcsc::cli {

double SynthResult::achieved_rate() const {
  return eligible == 0 ? 0.0
                       : static_cast<double>(corrupted) /
                             static_cast<double>(eligible);
}

namespace {

constexpr std::array<DistortionType, 4> kCorruptionTypes = {
    DistortionType::kSamePinyin, DistortionType::kSimilarPinyin,
    DistortionType::kSimilarShape, DistortionType::kUnrelated};

// Uniform in [0, 1) from the top 53 bits.
double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform index below n via rejection (no modulo bias).
std::size_t below(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

struct Relations {
  std::array<std::vector<Char>, 4> sets;
  bool eligible = false;
};

}  // namespace

SynthResult synthesize(std::span<const Text> clean,
                       const SimilarityResources& resources,
                       const SynthOptions& options) {
  if (!(options.error_rate >= 0.0 && options.error_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "error rate must lie in [0, 1]");
  }
  if (clean.empty()) throw Error(ErrorCode::kEmptyCorpus, "nothing to corrupt");

  std::set<Char> pool_set;
  for (const auto& line : clean) {
    for (Char c : line) {
      if (!resources.syllables(c).empty()) pool_set.insert(c);
    }
  }
  const std::vector<Char> pool(pool_set.begin(), pool_set.end());

  std::map<Char, Relations> cache;
  auto relations = [&](Char c) -> const Relations& {
    auto [it, fresh] = cache.try_emplace(c);
    if (!fresh) return it->second;
    Relations& r = it->second;
    if (resources.syllables(c).empty()) return r;
    for (std::size_t t = 0; t < 3; ++t) {
      r.sets[t] = resources.related(c, kCorruptionTypes[t]);
    }
    for (Char other : pool) {
      if (classify_pair(c, other, resources) == DistortionType::kUnrelated) {
        r.sets[3].push_back(other);
      }
    }
    r.eligible = std::any_of(r.sets.begin(), r.sets.end(),
                             [](const auto& s) { return !s.empty(); });
    return r;
  };

  std::mt19937_64 rng(options.seed);
  SynthResult result;
  result.corpus.reserve(clean.size());
  const int width = clean.size() < 1000000 ? 6 : 9;
  for (std::size_t line = 0; line < clean.size(); ++line) {
    const Text& ref = clean[line];
    Text src = ref;
    for (std::size_t i = 0; i < src.size(); ++i) {
      ++result.characters;
      const Relations& r = relations(ref[i]);
      if (!r.eligible) continue;
      ++result.eligible;
      if (unit(rng) >= options.error_rate) continue;

      double mass = 0.0;
      for (std::size_t t = 0; t < 4; ++t) {
        if (!r.sets[t].empty()) mass += options.table.probability(kCorruptionTypes[t]);
      }
      double u = unit(rng) * mass;
      std::size_t pick = 4;
      for (std::size_t t = 0; t < 4; ++t) {
        if (r.sets[t].empty()) continue;
        pick = t;  // the last non-empty set absorbs rounding at the top end
        const double w = options.table.probability(kCorruptionTypes[t]);
        if (u < w) break;
        u -= w;
      }
      const auto& set = r.sets[pick];
      src[i] = set[below(rng, set.size())];
      ++result.corrupted;
      ++result.by_type[static_cast<std::size_t>(kCorruptionTypes[pick])];
    }
    char number[32];
    std::snprintf(number, sizeof number, "%0*zu", width, line + 1);
    result.corpus.push_back(CorrectionInstance{options.id_prefix + "-" + number,
                                               std::move(src), ref});
  }
  return result;
}

}  // namespace mixcsc::cli
