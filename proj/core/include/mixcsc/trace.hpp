#pragma once

#include <iosfwd>
#include <string>

#include "mixcsc/decoder.hpp"

namespace mixcsc {

// Writes one JSON object per line for every hypothesis in every traced beam:
//
//   {"sentence": id, "covered": c, "final": bool, "rank": r,
//    "output": text, "tokens": [text...],
//    "lm": x, "dm": x, "sm": x, "total": x,
//    "multiplier": m, "vocab_size": |V|}
//
// "final" marks the ranked list of complete outputs. "multiplier" is the
// faithfulness factor applied by the hypothesis's last extension (1 for the
// empty hypothesis).
class JsonlTraceWriter {
 public:
  JsonlTraceWriter(std::ostream& out, std::size_t vocab_size)
      : out_(out), vocab_size_(vocab_size) {}

  // Sink bound to one sentence id. The writer must outlive the sink.
  TraceSink sink(std::string sentence_id, std::size_t sentence_length);

 private:
  std::ostream& out_;
  std::size_t vocab_size_;
};

// One trace record as a single-line JSON string.
std::string trace_record_json(const std::string& sentence_id,
                              std::size_t covered, bool final_beam,
                              std::size_t rank, const Hypothesis& hyp,
                              std::size_t vocab_size);

}  // namespace mixcsc
