#include "mixcsc/trace.hpp"

#include <nlohmann/json.hpp>
#include <ostream>

#include "mixcsc/utf8.hpp"

namespace mixcsc {

std::string trace_record_json(const std::string& sentence_id,
                              std::size_t covered, bool final_beam,
                              std::size_t rank, const Hypothesis& hyp,
                              std::size_t vocab_size) {
  nlohmann::ordered_json rec;
  rec["sentence"] = sentence_id;
  rec["covered"] = covered;
  rec["final"] = final_beam;
  rec["rank"] = rank;
  rec["output"] = utf8_encode(hyp.output);
  auto tokens = nlohmann::ordered_json::array();
  for (const auto& t : hyp.tokens) tokens.push_back(utf8_encode(t.chars));
  rec["tokens"] = std::move(tokens);
  rec["lm"] = hyp.score.lm;
  rec["dm"] = hyp.score.dm;
  rec["sm"] = hyp.score.sm;
  rec["total"] = hyp.score.total;
  rec["multiplier"] = hyp.last_multiplier;
  rec["vocab_size"] = vocab_size;
  return rec.dump();
}

TraceSink JsonlTraceWriter::sink(std::string sentence_id,
                                 std::size_t sentence_length) {
  return [this, id = std::move(sentence_id), sentence_length](
             std::size_t covered, std::span<const Hypothesis> beam) {
    const bool final_beam = covered == sentence_length;
    for (std::size_t r = 0; r < beam.size(); ++r) {
      out_ << trace_record_json(id, covered, final_beam, r, beam[r], vocab_size_)
           << '\n';
    }
  };
}

}  // namespace mixcsc
