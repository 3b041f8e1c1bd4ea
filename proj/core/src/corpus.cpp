#include "mixcsc/corpus.hpp"

#include <fstream>
#include <istream>

#include "mixcsc/utf8.hpp"

namespace mixcsc {

std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::optional<CorrectionInstance> parse_corpus_line(std::string_view line,
                                                    std::size_t line_number) {
  line = chomp(line);
  if (line.empty() || line.front() == '#') return std::nullopt;

  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (cols.size() < 2 || cols.size() > 3) {
    throw Error(ErrorCode::kParse,
                "line " + std::to_string(line_number) + ": expected 2 or 3 "
                "TAB-separated columns, found " + std::to_string(cols.size()));
  }
  CorrectionInstance inst;
  inst.id = std::string(cols[0]);
  try {
    inst.source = utf8_decode(cols[1]);
    if (cols.size() == 3) inst.reference = utf8_decode(cols[2]);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse,
                "line " + std::to_string(line_number) + ": " + e.what());
  }
  return inst;
}

std::vector<CorrectionInstance> read_corpus(std::istream& in) {
  std::vector<CorrectionInstance> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (auto inst = parse_corpus_line(line, line_number)) {
      out.push_back(std::move(*inst));
    }
  }
  return out;
}

std::vector<CorrectionInstance> read_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus file " + path);
  return read_corpus(in);
}

std::string format_corpus_line(const CorrectionInstance& inst) {
  std::string line = inst.id + "\t" + utf8_encode(inst.source);
  if (inst.reference) line += "\t" + utf8_encode(*inst.reference);
  return line;
}

std::vector<Text> read_sentences(std::istream& in) {
  std::vector<Text> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto view = chomp(line);
    if (view.empty() || view.front() == '#') continue;
    try {
      out.push_back(utf8_decode(view));
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse,
                  "line " + std::to_string(line_number) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Text> read_sentences_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open sentence file " + path);
  return read_sentences(in);
}

}  // namespace mixcsc
