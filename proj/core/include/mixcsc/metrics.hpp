#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "mixcsc/distortion.hpp"
#include "mixcsc/types.hpp"

namespace mixcsc {

// A ratio with its tallies kept. 0/0 reports 0 and sets undefined().
struct Ratio {
  std::uint64_t numerator = 0;
  std::uint64_t denominator = 0;

  double value() const {
    return denominator == 0 ? 0.0
                            : static_cast<double>(numerator) /
                                  static_cast<double>(denominator);
  }
  bool undefined() const { return denominator == 0; }
};

// 2PR / (P + R), 0 when P + R = 0.
double harmonic_mean(double precision, double recall);

struct PrfScore {
  Ratio precision;
  Ratio recall;
  double f1 = 0.0;

  static PrfScore from_counts(std::uint64_t correct, std::uint64_t predicted,
                              std::uint64_t gold);
};

struct MetricCounts {
  std::uint64_t sentences = 0;
  std::uint64_t sentence_predicted = 0;  // prediction != source
  std::uint64_t sentence_gold = 0;       // reference != source
  std::uint64_t sentence_correct = 0;    // predicted and prediction == reference
  std::uint64_t char_predicted = 0;
  std::uint64_t char_gold = 0;
  std::uint64_t char_correct = 0;
  std::uint64_t gold_negative = 0;           // reference == source
  std::uint64_t gold_negative_modified = 0;  // ... and prediction != source
};

struct TypeTally {
  std::uint64_t predicted = 0;
  std::uint64_t gold = 0;
  std::uint64_t correct = 0;

  PrfScore scores() const { return PrfScore::from_counts(correct, predicted, gold); }
};

// Character-level tallies binned by distortion type. Always holds the four
// non-identical types; Unrelated is the "Others" bin.
using PerTypeReport = std::map<DistortionType, TypeTally>;

struct MetricReport {
  MetricCounts counts;
  PrfScore sentence;
  PrfScore character;
  Ratio fpr;
  std::optional<PerTypeReport> per_type;
};

struct EvalTriple {
  Text source;
  Text reference;
  Text prediction;
};

// Correction-level metrics.
//   Sentence: predicted positive iff prediction != source; gold positive iff
//   reference != source; correct iff predicted positive and prediction ==
//   reference.
//   Character: predicted edit iff prediction[i] != source[i]; gold edit iff
//   reference[i] != source[i]; correct iff both and prediction[i] ==
//   reference[i].
//   FPR: gold-negative sentences that were modified / gold-negative sentences.
// Throws kLengthMismatch when a triple has unequal lengths.
MetricReport evaluate(std::span<const EvalTriple> instances);

// Gold edits are binned by classify_pair(source[i], reference[i]), predicted
// edits by classify_pair(source[i], prediction[i]); correct edits land in
// their gold bin.
PerTypeReport evaluate_by_type(std::span<const EvalTriple> instances,
                               const SimilarityResources& resources);

// Fixed-width table for terminals.
std::string format_report_table(const MetricReport& report);
// Single-line JSON with every ratio, its tallies and undefined flags.
std::string report_json(const MetricReport& report);

}  // namespace mixcsc
