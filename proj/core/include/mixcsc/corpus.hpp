#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mixcsc/types.hpp"

namespace mixcsc {

// Parallel corpus: UTF-8, one record per line, "id TAB source [TAB reference]".
// Lines starting with '#' and blank lines are skipped (nullopt).
// Records are not validated here; callers decide what to do with bad lengths.
std::optional<CorrectionInstance> parse_corpus_line(std::string_view line,
                                                    std::size_t line_number);

std::vector<CorrectionInstance> read_corpus(std::istream& in);
std::vector<CorrectionInstance> read_corpus_file(const std::string& path);

std::string format_corpus_line(const CorrectionInstance& inst);

// Plain-text sentence file: one sentence per line, '#' comments and blank
// lines skipped.
std::vector<Text> read_sentences(std::istream& in);
std::vector<Text> read_sentences_file(const std::string& path);

// Strips a trailing '\r' left by CRLF files.
std::string_view chomp(std::string_view line);

}  // namespace mixcsc
