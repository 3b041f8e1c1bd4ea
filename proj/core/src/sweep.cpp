#include "mixcsc/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <tuple>

#include "mixcsc/parallel.hpp"

namespace mixcsc {

CorpusDecode decode_corpus(const MixtureModels& models,
                           const MixtureConfig& config,
                           std::span<const Text> sources, unsigned threads,
                           DecoderKind kind) {
  config.validate();
  CorpusDecode out;
  out.predictions.resize(sources.size());
  out.top1_totals.assign(sources.size(), 0.0);
  parallel_for(sources.size(), threads, [&](std::size_t i) {
    if (kind == DecoderKind::kClassifierArgmax) {
      out.predictions[i] = classifier_argmax(models.classifier, sources[i]);
      return;
    }
    auto best = decode(models, config, sources[i]);
    out.predictions[i] = std::move(best.output);
    out.top1_totals[i] = best.score.total;
  });
  return out;
}

std::vector<EvalTriple> make_triples(std::span<const CorrectionInstance> corpus,
                                     std::span<const Text> predictions) {
  if (predictions.size() != corpus.size()) {
    throw Error(ErrorCode::kInvalidConfig,
                "prediction count differs from corpus size");
  }
  std::vector<EvalTriple> triples;
  triples.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& inst = corpus[i];
    if (!inst.reference) {
      throw Error(ErrorCode::kInvalidConfig,
                  "instance '" + inst.id + "' has no reference");
    }
    EvalTriple t{inst.source, *inst.reference, predictions[i]};
    if (t.reference.size() != t.source.size() ||
        t.prediction.size() != t.source.size()) {
      throw Error(ErrorCode::kLengthMismatch, "instance '" + inst.id + "'");
    }
    triples.push_back(std::move(t));
  }
  return triples;
}

bool config_less(const MixtureConfig& a, const MixtureConfig& b) {
  auto key = [](const MixtureConfig& c) {
    return std::make_tuple(c.alpha, c.beta, c.beam_size, c.dm_enabled,
                           c.fr_enabled, c.candidates.top_k_classifier,
                           c.candidates.include_confusion,
                           c.candidates.max_size);
  };
  return key(a) < key(b);
}

std::vector<SweepCell> sweep(std::span<const CorrectionInstance> corpus,
                             const MixtureModels& models,
                             std::span<const MixtureConfig> grid,
                             unsigned threads) {
  if (grid.empty()) throw Error(ErrorCode::kInvalidConfig, "empty sweep grid");
  std::vector<Text> sources;
  sources.reserve(corpus.size());
  for (const auto& inst : corpus) sources.push_back(inst.source);

  std::vector<MixtureConfig> sorted(grid.begin(), grid.end());
  std::stable_sort(sorted.begin(), sorted.end(), config_less);

  std::vector<SweepCell> cells;
  cells.reserve(sorted.size());
  for (const auto& config : sorted) {
    SweepCell cell;
    cell.config = config;
    try {
      auto decoded = decode_corpus(models, config, sources, threads);
      const auto triples = make_triples(corpus, decoded.predictions);
      MetricReport report = evaluate(triples);
      report.per_type = evaluate_by_type(triples, models.resources);
      cell.report = std::move(report);
      for (double t : decoded.top1_totals) cell.top1_total_sum += t;
      cell.predictions = std::move(decoded.predictions);
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

std::string format_sweep_grid(std::span<const SweepCell> cells, char delimiter) {
  std::ostringstream out;
  const char d = delimiter;
  out << "alpha" << d << "beta" << d << "beam" << d << "dm" << d << "fr" << d
      << "status" << d << "S-P" << d << "S-R" << d << "S-F" << d << "C-P" << d
      << "C-R" << d << "C-F" << d << "FPR" << d << "top1_total" << d << "error"
      << '\n';
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  for (const auto& cell : cells) {
    const auto& c = cell.config;
    out << num(c.alpha) << d << num(c.beta) << d << c.beam_size << d
        << (c.dm_enabled ? "on" : "off") << d << (c.fr_enabled ? "on" : "off")
        << d;
    if (cell.ok()) {
      const auto& r = *cell.report;
      out << "ok" << d << num(r.sentence.precision.value()) << d
          << num(r.sentence.recall.value()) << d << num(r.sentence.f1) << d
          << num(r.character.precision.value()) << d
          << num(r.character.recall.value()) << d << num(r.character.f1) << d
          << num(r.fpr.value()) << d << num(cell.top1_total_sum) << d;
    } else {
      std::string error = cell.error;
      std::replace(error.begin(), error.end(), d, ' ');
      std::replace(error.begin(), error.end(), '\n', ' ');
      out << "failed";
      for (int i = 0; i < 8; ++i) out << d << "NA";
      out << d << error;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace mixcsc
