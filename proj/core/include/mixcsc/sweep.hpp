#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixcsc/decoder.hpp"
#include "mixcsc/metrics.hpp"

namespace mixcsc {

enum class DecoderKind {
  kMixture,           // beam search over the full mixture score
  kClassifierArgmax,  // per-position classifier argmax, no search
};

struct CorpusDecode {
  std::vector<Text> predictions;
  // Total mixture score of each sentence's best output (0 for argmax).
  std::vector<double> top1_totals;
};

// Decodes every source independently on up to `threads` workers; outputs
// keep input order.
CorpusDecode decode_corpus(const MixtureModels& models,
                           const MixtureConfig& config,
                           std::span<const Text> sources, unsigned threads = 1,
                           DecoderKind kind = DecoderKind::kMixture);

// Builds evaluation triples. Throws kLengthMismatch or kInvalidConfig when an
// instance lacks a same-length reference or prediction.
std::vector<EvalTriple> make_triples(std::span<const CorrectionInstance> corpus,
                                     std::span<const Text> predictions);

struct SweepCell {
  MixtureConfig config;
  std::optional<MetricReport> report;  // empty when the cell failed
  std::vector<Text> predictions;
  double top1_total_sum = 0.0;
  std::string error;

  bool ok() const { return report.has_value(); }
};

// Orders configs by (alpha, beta, beam, dm, fr, candidate policy).
bool config_less(const MixtureConfig& a, const MixtureConfig& b);

// One full decode + evaluation (with per-type breakdown) per grid point,
// sorted by config. A failing cell records its error and the sweep goes on.
// Throws kInvalidConfig for an empty grid.
std::vector<SweepCell> sweep(std::span<const CorrectionInstance> corpus,
                             const MixtureModels& models,
                             std::span<const MixtureConfig> grid,
                             unsigned threads = 1);

// Delimiter-separated grid with a header row, one line per cell.
std::string format_sweep_grid(std::span<const SweepCell> cells,
                              char delimiter = '\t');

}  // namespace mixcsc
