#pragma once

#include <memory>

#include "mixcsc/decoder.hpp"
#include "mixcsc/ngram_lm.hpp"
#include "mixcsc/noisy_channel.hpp"

namespace mixcsc::bench {

struct Shipped {
  std::shared_ptr<const SimilarityResources> resources;
  DistortionTable table;
  NGramLM lm;
  std::unique_ptr<NoisyChannelClassifier> classifier;

  Shipped()
      : resources(std::make_shared<const SimilarityResources>(SimilarityResources::load(
            MIXCSC_DATA_DIR "/pinyin.tsv", MIXCSC_DATA_DIR "/shape.tsv",
            MIXCSC_DATA_DIR "/fuzzy.tsv"))),
        lm(NGramLM::load_file(MIXCSC_DATA_DIR "/models/ngram.txt")) {
    const auto counts = lm.unigram_counts();
    classifier = std::make_unique<NoisyChannelClassifier>(
        table, resources, NoisyChannelClassifier::prior_from_counts(counts));
  }

  MixtureModels models() const { return {lm, *classifier, table, *resources}; }
};

inline const Shipped& shipped() {
  static const Shipped s;
  return s;
}

}  // namespace mixcsc::bench
