#include "mixcsc/metrics.hpp"

#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>

namespace mixcsc {

double harmonic_mean(double precision, double recall) {
  const double sum = precision + recall;
  return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

PrfScore PrfScore::from_counts(std::uint64_t correct, std::uint64_t predicted,
                               std::uint64_t gold) {
  PrfScore s;
  s.precision = Ratio{correct, predicted};
  s.recall = Ratio{correct, gold};
  s.f1 = harmonic_mean(s.precision.value(), s.recall.value());
  return s;
}

namespace {

void check_lengths(const EvalTriple& t, std::size_t index) {
  if (t.reference.size() != t.source.size() ||
      t.prediction.size() != t.source.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "instance " + std::to_string(index) +
                    ": source, reference and prediction lengths differ");
  }
}

}  // namespace

MetricReport evaluate(std::span<const EvalTriple> instances) {
  MetricCounts c;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const auto& t = instances[k];
    check_lengths(t, k);
    ++c.sentences;
    const bool predicted = t.prediction != t.source;
    const bool gold = t.reference != t.source;
    if (predicted) ++c.sentence_predicted;
    if (gold) ++c.sentence_gold;
    if (predicted && t.prediction == t.reference) ++c.sentence_correct;
    if (!gold) {
      ++c.gold_negative;
      if (predicted) ++c.gold_negative_modified;
    }
    for (std::size_t i = 0; i < t.source.size(); ++i) {
      const bool p = t.prediction[i] != t.source[i];
      const bool g = t.reference[i] != t.source[i];
      if (p) ++c.char_predicted;
      if (g) ++c.char_gold;
      if (p && g && t.prediction[i] == t.reference[i]) ++c.char_correct;
    }
  }
  MetricReport r;
  r.counts = c;
  r.sentence = PrfScore::from_counts(c.sentence_correct, c.sentence_predicted,
                                     c.sentence_gold);
  r.character =
      PrfScore::from_counts(c.char_correct, c.char_predicted, c.char_gold);
  r.fpr = Ratio{c.gold_negative_modified, c.gold_negative};
  return r;
}

PerTypeReport evaluate_by_type(std::span<const EvalTriple> instances,
                               const SimilarityResources& resources) {
  PerTypeReport bins;
  for (auto type : {DistortionType::kSamePinyin, DistortionType::kSimilarPinyin,
                    DistortionType::kSimilarShape, DistortionType::kUnrelated}) {
    bins[type] = TypeTally{};
  }
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const auto& t = instances[k];
    check_lengths(t, k);
    for (std::size_t i = 0; i < t.source.size(); ++i) {
      const Char x = t.source[i];
      if (t.prediction[i] != x) {
        ++bins[classify_pair(x, t.prediction[i], resources)].predicted;
      }
      if (t.reference[i] != x) {
        auto& bin = bins[classify_pair(x, t.reference[i], resources)];
        ++bin.gold;
        if (t.prediction[i] == t.reference[i]) ++bin.correct;
      }
    }
  }
  return bins;
}

std::string format_report_table(const MetricReport& report) {
  std::ostringstream out;
  char line[160];
  auto flag = [](const Ratio& r) { return r.undefined() ? " (undefined: 0/0)" : ""; };
  auto row = [&](const char* level, const PrfScore& s) {
    std::snprintf(line, sizeof line, "%-10s P=%.4f  R=%.4f  F=%.4f", level,
                  s.precision.value(), s.recall.value(), s.f1);
    out << line << "   [" << s.precision.numerator << '/'
        << s.precision.denominator << ", " << s.recall.numerator << '/'
        << s.recall.denominator << ']' << flag(s.precision) << '\n';
  };
  out << "sentences: " << report.counts.sentences << '\n';
  row("sentence", report.sentence);
  row("character", report.character);
  std::snprintf(line, sizeof line, "%-10s %.4f", "FPR", report.fpr.value());
  out << line << "   [" << report.fpr.numerator << '/' << report.fpr.denominator
      << ']' << flag(report.fpr) << '\n';
  if (report.per_type) {
    out << "character-level by error type:\n";
    for (const auto& [type, tally] : *report.per_type) {
      const auto s = tally.scores();
      const std::string name = type == DistortionType::kUnrelated
                                   ? "Others"
                                   : std::string(to_string(type));
      std::snprintf(line, sizeof line,
                    "  %-14s P=%.4f  R=%.4f  F=%.4f   [pred=%llu gold=%llu correct=%llu]",
                    name.c_str(),
                    s.precision.value(), s.recall.value(), s.f1,
                    static_cast<unsigned long long>(tally.predicted),
                    static_cast<unsigned long long>(tally.gold),
                    static_cast<unsigned long long>(tally.correct));
      out << line << '\n';
    }
  }
  return out.str();
}

namespace {

nlohmann::ordered_json ratio_json(const Ratio& r) {
  return {{"value", r.value()},
          {"numerator", r.numerator},
          {"denominator", r.denominator},
          {"undefined", r.undefined()}};
}

nlohmann::ordered_json prf_json(const PrfScore& s) {
  return {{"precision", ratio_json(s.precision)},
          {"recall", ratio_json(s.recall)},
          {"f1", s.f1}};
}

}  // namespace

std::string report_json(const MetricReport& report) {
  const auto& c = report.counts;
  nlohmann::ordered_json j;
  j["sentence"] = prf_json(report.sentence);
  j["character"] = prf_json(report.character);
  j["fpr"] = ratio_json(report.fpr);
  j["counts"] = {{"sentences", c.sentences},
                 {"sentence_predicted", c.sentence_predicted},
                 {"sentence_gold", c.sentence_gold},
                 {"sentence_correct", c.sentence_correct},
                 {"char_predicted", c.char_predicted},
                 {"char_gold", c.char_gold},
                 {"char_correct", c.char_correct},
                 {"gold_negative", c.gold_negative},
                 {"gold_negative_modified", c.gold_negative_modified}};
  if (report.per_type) {
    nlohmann::ordered_json types;
    for (const auto& [type, tally] : *report.per_type) {
      auto entry = prf_json(tally.scores());
      entry["predicted"] = tally.predicted;
      entry["gold"] = tally.gold;
      entry["correct"] = tally.correct;
      types[std::string(to_string(type))] = std::move(entry);
    }
    j["per_type"] = std::move(types);
  }
  return j.dump();
}

}  // namespace mixcsc
