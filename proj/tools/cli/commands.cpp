#include "commands.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <thread>

#include "mixcsc/corpus.hpp"
#include "mixcsc/decoder.hpp"
#include "mixcsc/metrics.hpp"
#include "mixcsc/ngram_lm.hpp"
#include "mixcsc/noisy_channel.hpp"
#include "mixcsc/parallel.hpp"
#include "mixcsc/sweep.hpp"
#include "mixcsc/trace.hpp"
#include "mixcsc/utf8.hpp"
#include "synth.hpp"

namespace mixcsc::cli {

namespace {

namespace fs = std::filesystem;

const std::string kDataDir = MIXCSC_DEFAULT_DATA_DIR;

std::string default_table() {
  std::string s;
  for (double p : DistortionTable::kDefaultProbabilities) {
    if (!s.empty()) s += ',';
    std::ostringstream os;
    os << p;
    s += os.str();
  }
  return s;
}

std::vector<OptionSpec> resource_options() {
  return {
      {"pinyin", kDataDir + "/pinyin.tsv", "pinyin file (char TAB syl[,syl])"},
      {"shape", kDataDir + "/shape.tsv", "shape-similarity file (char TAB char[,char])"},
      {"fuzzy", kDataDir + "/fuzzy.tsv", "fuzzy initial/final pairs (a TAB b)"},
      {"distortion", default_table(),
       "distortion probabilities: identical,same-pinyin,similar-pinyin,similar-shape,unrelated"},
  };
}

std::vector<OptionSpec> model_options() {
  auto specs = resource_options();
  specs.insert(specs.end(), {
      {"lm", kDataDir + "/models/ngram.txt", "n-gram model written by train-lm"},
      {"prior-corpus", "", "sentence file for the classifier prior (default: LM unigram counts)"},
      {"prior-k", "0.1", "add-k smoothing of the classifier prior"},
      {"temperature", "1.0", "classifier channel temperature"},
      {"alpha", "0.5", "distortion-model weight"},
      {"beta", "0.9", "classifier weight"},
      {"beam", "12", "beam size K"},
      {"dm", "on", "distortion model on/off"},
      {"fr", "on", "faithfulness reward (1 + entropy multiplier) on/off"},
      {"top-k", "8", "classifier top-k candidates per position"},
      {"confusion", "on", "add confusion-set candidates on/off"},
      {"max-candidates", "16", "candidate set size bound per position"},
      {"threads", "0", "decoding workers (0 = hardware concurrency)"},
  });
  return specs;
}

std::vector<OptionSpec> with(std::vector<OptionSpec> base,
                             std::initializer_list<OptionSpec> extra) {
  base.insert(base.end(), extra);
  return base;
}

// Positional argument per subcommand.
std::string positional_key(std::string_view subcommand) {
  if (subcommand == "eval" || subcommand == "sweep" || subcommand == "train-lm") {
    return "corpus";
  }
  return "input";
}

// ---------------------------------------------------------------------------
// IO helpers

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (path == "-") {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw Error(ErrorCode::kIo, "cannot write " + path);
    stream_ = file_.get();
    path_ = path;
  }
  std::ostream& get() { return *stream_; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw Error(ErrorCode::kIo, "failed writing " + path_);
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
  std::string path_ = "<stdout>";
};

class Input {
 public:
  Input(const std::string& path, std::istream& fallback) {
    if (path == "-") {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*file_) throw Error(ErrorCode::kIo, "cannot open " + path);
    stream_ = file_.get();
  }
  std::istream& get() { return *stream_; }

 private:
  std::unique_ptr<std::ifstream> file_;
  std::istream* stream_ = nullptr;
};

std::string required(const RunConfig& cfg, const std::string& key) {
  const auto& v = cfg.str(key);
  if (v.empty()) throw UsageError("missing required " + key);
  return v;
}

void write_comment_header(std::ostream& os, const RunConfig& cfg) {
  for (const auto& line : cfg.to_lines()) os << "# " << line << '\n';
}

unsigned worker_count(const RunConfig& cfg) {
  const auto n = cfg.integer("threads");
  if (n < 0) throw UsageError("threads must be >= 0");
  if (n == 0) return std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(n);
}

MixtureConfig mixture_config(const RunConfig& cfg) {
  MixtureConfig m;
  m.alpha = cfg.real("alpha");
  m.beta = cfg.real("beta");
  const auto beam = cfg.integer("beam");
  if (beam < 1 || beam > 1'000'000) throw UsageError("beam must be in [1, 1e6]");
  m.beam_size = static_cast<int>(beam);
  m.dm_enabled = cfg.flag("dm");
  m.fr_enabled = cfg.flag("fr");
  const auto top_k = cfg.integer("top-k");
  if (top_k < 0 || top_k > 1'000'000) throw UsageError("top-k must be >= 0");
  m.candidates.top_k_classifier = static_cast<int>(top_k);
  m.candidates.include_confusion = cfg.flag("confusion");
  m.candidates.max_size = static_cast<std::size_t>(cfg.u64("max-candidates"));
  m.validate();
  return m;
}

std::shared_ptr<const SimilarityResources> load_resources(const RunConfig& cfg) {
  return std::make_shared<const SimilarityResources>(SimilarityResources::load(
      cfg.str("pinyin"), cfg.str("shape"), cfg.str("fuzzy")));
}

DistortionTable load_table(const RunConfig& cfg) {
  return DistortionTable::parse(cfg.str("distortion"));
}

struct LoadedModels {
  std::shared_ptr<const SimilarityResources> resources;
  DistortionTable table;
  std::optional<NGramLM> lm;
  std::optional<NoisyChannelClassifier> classifier;

  MixtureModels view() const { return {*lm, *classifier, table, *resources}; }
};

std::unique_ptr<LoadedModels> load_models(const RunConfig& cfg) {
  auto m = std::make_unique<LoadedModels>();
  m->resources = load_resources(cfg);
  m->table = load_table(cfg);
  m->lm.emplace(NGramLM::load_file(required(cfg, "lm")));
  const double prior_k = cfg.real("prior-k");
  if (!(prior_k > 0.0)) throw UsageError("prior-k must be > 0");
  std::vector<std::pair<Char, double>> prior;
  if (const auto& path = cfg.str("prior-corpus"); !path.empty()) {
    prior = NoisyChannelClassifier::prior_from_corpus(read_sentences_file(path),
                                                      prior_k);
  } else {
    const auto counts = m->lm->unigram_counts();
    prior = NoisyChannelClassifier::prior_from_counts(counts, prior_k);
  }
  m->classifier.emplace(m->table, m->resources, std::move(prior),
                        cfg.real("temperature"));
  return m;
}

// ---------------------------------------------------------------------------
// correct

int cmd_correct(const RunConfig& cfg, std::istream& in, std::ostream& out,
                std::ostream& err) {
  const auto models_owner = load_models(cfg);
  const MixtureModels models = models_owner->view();
  const MixtureConfig config = mixture_config(cfg);
  const unsigned threads = worker_count(cfg);

  if (const auto& meta = cfg.str("meta"); !meta.empty()) {
    Output m(meta, out);
    m.get() << cfg.to_json() << '\n';
    m.finish();
  }
  std::optional<Output> trace;
  if (const auto& path = cfg.str("trace"); !path.empty()) {
    trace.emplace(path, err);
    trace->get() << nlohmann::ordered_json{{"run_config", nlohmann::ordered_json::parse(cfg.to_json())}}.dump()
                 << '\n';
  }
  Input input(cfg.str("input"), in);
  Output output(cfg.str("output"), out);
  const std::size_t vocab_size = models.lm.vocabulary().size();

  struct Line {
    std::size_t number = 0;
    Text text;
    bool carriage_return = false;
    bool newline = true;
    std::string result;
    std::string trace;
  };
  constexpr std::size_t kChunk = 256;
  std::vector<Line> chunk;
  std::size_t line_number = 0;
  std::uint64_t corrected = 0;

  auto flush = [&] {
    parallel_for(chunk.size(), threads, [&](std::size_t k) {
      Line& line = chunk[k];
      Text best = line.text;
      if (!line.text.empty()) {
        SentenceContext ctx(models, config, line.text);
        std::ostringstream trace_buf;
        JsonlTraceWriter writer(trace_buf, vocab_size);
        const auto ranked =
            trace ? beam_search(ctx, writer.sink(std::to_string(line.number),
                                                 line.text.size()))
                  : beam_search(ctx);
        best = ranked.front().output;
        line.trace = trace_buf.str();
      }
      line.result = utf8_encode(best);
    });
    for (auto& line : chunk) {
      if (line.result != utf8_encode(line.text)) ++corrected;
      output.get() << line.result;
      if (line.carriage_return) output.get() << '\r';
      if (line.newline) output.get() << '\n';
      if (trace) trace->get() << line.trace;
    }
    chunk.clear();
  };

  std::string raw;
  while (std::getline(input.get(), raw)) {
    ++line_number;
    Line line;
    line.number = line_number;
    line.newline = !input.get().eof();
    std::string_view view = raw;
    if (!view.empty() && view.back() == '\r') {
      line.carriage_return = true;
      view.remove_suffix(1);
    }
    try {
      line.text = utf8_decode(view);
    } catch (const Error& e) {
      throw Error(e.code(), "input line " + std::to_string(line_number) + ": " +
                                e.what());
    }
    chunk.push_back(std::move(line));
    if (chunk.size() == kChunk) flush();
  }
  flush();
  output.finish();
  if (trace) trace->finish();
  err << "correct: " << line_number << " lines, " << corrected << " changed\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval / sweep shared corpus handling

struct EvalCorpus {
  std::vector<CorrectionInstance> kept;
  std::vector<std::string> skipped_ids;
};

EvalCorpus load_eval_corpus(const RunConfig& cfg, std::istream& in,
                            std::ostream& err) {
  const std::string path = required(cfg, "corpus");
  Input input(path, in);
  auto corpus = read_corpus(input.get());
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, path + " has no records");
  EvalCorpus result;
  for (auto& inst : corpus) {
    if (!inst.reference) {
      throw Error(ErrorCode::kParse, path + ": record '" + inst.id +
                                         "' has no reference column");
    }
    try {
      validate_instance(inst);
    } catch (const Error& e) {
      err << "skipping " << inst.id << ": " << e.what() << '\n';
      result.skipped_ids.push_back(inst.id);
      continue;
    }
    result.kept.push_back(std::move(inst));
  }
  return result;
}

nlohmann::ordered_json skipped_json(const std::vector<std::string>& ids) {
  return {{"count", ids.size()}, {"ids", ids}};
}

std::string summary_line(const MetricReport& r) {
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "S-P=%.3f S-R=%.3f S-F=%.3f C-P=%.3f C-R=%.3f C-F=%.3f FPR=%.3f",
                r.sentence.precision.value(), r.sentence.recall.value(),
                r.sentence.f1, r.character.precision.value(),
                r.character.recall.value(), r.character.f1, r.fpr.value());
  return buf;
}

nlohmann::ordered_json config_json(const RunConfig& cfg) {
  return nlohmann::ordered_json::parse(cfg.to_json());
}

// ---------------------------------------------------------------------------
// eval

int cmd_eval(const RunConfig& cfg, std::istream& in, std::ostream& out,
             std::ostream& err) {
  auto corpus = load_eval_corpus(cfg, in, err);
  const auto& decoder = cfg.str("decoder");
  if (decoder != "mixture" && decoder != "classifier") {
    throw UsageError("decoder must be mixture or classifier");
  }

  std::vector<Text> predictions;
  std::shared_ptr<const SimilarityResources> resources;
  if (const auto& path = cfg.str("predictions"); !path.empty()) {
    resources = load_resources(cfg);
    std::map<std::string, Text> by_id;
    for (auto& p : read_corpus_file(path)) by_id[p.id] = std::move(p.source);
    std::vector<CorrectionInstance> kept;
    for (auto& inst : corpus.kept) {
      auto it = by_id.find(inst.id);
      if (it == by_id.end()) {
        throw Error(ErrorCode::kParse, path + ": no prediction for '" + inst.id + "'");
      }
      if (it->second.size() != inst.source.size()) {
        err << "skipping " << inst.id
            << ": LengthMismatch: prediction length differs from source\n";
        corpus.skipped_ids.push_back(inst.id);
        continue;
      }
      predictions.push_back(it->second);
      kept.push_back(std::move(inst));
    }
    corpus.kept = std::move(kept);
  } else {
    const auto models_owner = load_models(cfg);
    resources = models_owner->resources;
    std::vector<Text> sources;
    for (const auto& inst : corpus.kept) sources.push_back(inst.source);
    const auto kind = decoder == "classifier" ? DecoderKind::kClassifierArgmax
                                              : DecoderKind::kMixture;
    predictions = decode_corpus(models_owner->view(), mixture_config(cfg),
                                sources, worker_count(cfg), kind)
                      .predictions;
  }

  const auto triples = make_triples(corpus.kept, predictions);
  MetricReport report = evaluate(triples);
  report.per_type = evaluate_by_type(triples, *resources);

  out << summary_line(report) << '\n' << format_report_table(report);
  out << "skipped: " << corpus.skipped_ids.size() << '\n';

  if (const auto& dir = cfg.str("out-dir"); !dir.empty()) {
    fs::create_directories(dir);
    Output txt((fs::path(dir) / "report.txt").string(), out);
    write_comment_header(txt.get(), cfg);
    txt.get() << summary_line(report) << '\n' << format_report_table(report)
              << "skipped: " << corpus.skipped_ids.size() << '\n';
    txt.finish();

    Output jsonl((fs::path(dir) / "report.jsonl").string(), out);
    jsonl.get() << nlohmann::ordered_json{{"run_config", config_json(cfg)}}.dump()
                << '\n';
    nlohmann::ordered_json rec;
    rec["report"] = nlohmann::ordered_json::parse(report_json(report));
    rec["skipped"] = skipped_json(corpus.skipped_ids);
    jsonl.get() << rec.dump() << '\n';
    jsonl.finish();

    Output preds((fs::path(dir) / "predictions.tsv").string(), out);
    write_comment_header(preds.get(), cfg);
    for (std::size_t i = 0; i < corpus.kept.size(); ++i) {
      preds.get() << corpus.kept[i].id << '\t' << utf8_encode(predictions[i])
                  << '\n';
    }
    preds.finish();
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const RunConfig& cfg, std::istream& in, std::ostream& out,
              std::ostream& err) {
  const auto corpus = load_eval_corpus(cfg, in, err);
  const auto alphas = cfg.reals("alphas");
  const auto betas = cfg.reals("betas");
  const auto beams = cfg.integers("beams");
  const auto models_owner = load_models(cfg);
  const MixtureConfig base = mixture_config(cfg);

  std::vector<MixtureConfig> grid;
  for (double a : alphas) {
    for (double b : betas) {
      for (auto k : beams) {
        MixtureConfig c = base;
        c.alpha = a;
        c.beta = b;
        c.beam_size = static_cast<int>(std::clamp<std::int64_t>(k, -1, 1'000'000));
        grid.push_back(c);
      }
    }
  }
  const auto cells = sweep(corpus.kept, models_owner->view(), grid, worker_count(cfg));
  const std::string table = format_sweep_grid(cells);
  out << table;
  std::size_t failed = 0;
  for (const auto& c : cells) failed += c.ok() ? 0 : 1;
  err << "sweep: " << cells.size() << " cells, " << failed << " failed, "
      << corpus.skipped_ids.size() << " records skipped\n";

  if (const auto& dir = cfg.str("out-dir"); !dir.empty()) {
    fs::create_directories(dir);
    Output grid_file((fs::path(dir) / "grid.tsv").string(), out);
    write_comment_header(grid_file.get(), cfg);
    grid_file.get() << table;
    grid_file.finish();

    Output cells_file((fs::path(dir) / "cells.jsonl").string(), out);
    cells_file.get()
        << nlohmann::ordered_json{{"run_config", config_json(cfg)},
                                  {"skipped", skipped_json(corpus.skipped_ids)}}
               .dump()
        << '\n';
    for (const auto& cell : cells) {
      nlohmann::ordered_json j;
      j["alpha"] = cell.config.alpha;
      j["beta"] = cell.config.beta;
      j["beam"] = cell.config.beam_size;
      j["dm"] = cell.config.dm_enabled;
      j["fr"] = cell.config.fr_enabled;
      j["status"] = cell.ok() ? "ok" : "failed";
      if (cell.ok()) {
        j["top1_total"] = cell.top1_total_sum;
        j["report"] = nlohmann::ordered_json::parse(report_json(*cell.report));
      } else {
        j["error"] = cell.error;
      }
      cells_file.get() << j.dump() << '\n';
    }
    cells_file.finish();
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const RunConfig& cfg, std::istream& in, std::ostream& out,
              std::ostream& err) {
  Input input(cfg.str("input"), in);
  const auto clean = read_sentences(input.get());
  const auto resources = load_resources(cfg);
  SynthOptions options;
  options.seed = cfg.u64("seed");
  options.error_rate = cfg.real("error-rate");
  options.table = load_table(cfg);
  options.id_prefix = cfg.str("id-prefix");
  const auto result = synthesize(clean, *resources, options);

  char stats[200];
  std::snprintf(stats, sizeof stats,
                "characters=%llu eligible=%llu corrupted=%llu achieved_rate=%.6f",
                static_cast<unsigned long long>(result.characters),
                static_cast<unsigned long long>(result.eligible),
                static_cast<unsigned long long>(result.corrupted),
                result.achieved_rate());
  Output output(cfg.str("output"), out);
  write_comment_header(output.get(), cfg);
  output.get() << "# " << stats << '\n';
  for (const auto& inst : result.corpus) {
    output.get() << format_corpus_line(inst) << '\n';
  }
  output.finish();
  err << "synth: " << stats << " (target " << options.error_rate << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train-lm

int cmd_train_lm(const RunConfig& cfg, std::istream& in, std::ostream& out,
                 std::ostream& err) {
  Input input(required(cfg, "corpus"), in);
  const auto corpus = read_sentences(input.get());
  const auto order = cfg.integer("order");
  if (order < 1 || order > 16) throw UsageError("order must be in [1, 16]");

  std::vector<Text> tokens;
  if (const auto& path = cfg.str("tokens"); !path.empty()) {
    tokens = read_sentences_file(path);
  }
  const auto auto_tokens = cfg.u64("auto-tokens");
  if (auto_tokens > 0) {
    for (auto& t : NGramLM::frequent_bigrams(corpus, auto_tokens)) {
      if (std::find(tokens.begin(), tokens.end(), t) == tokens.end()) {
        tokens.push_back(std::move(t));
      }
    }
  }
  auto lm = NGramLM::train(corpus, static_cast<int>(order), cfg.real("k"), tokens);
  lm.set_metadata(cfg.to_lines());
  Output output(required(cfg, "output"), out);
  lm.save(output.get());
  output.finish();
  err << "train-lm: " << corpus.size() << " sentences, alphabet "
      << lm.alphabet().size() << ", vocabulary " << lm.vocabulary().size()
      << ", training perplexity " << lm.perplexity(corpus) << '\n';
  return kExitOk;
}

int dispatch(const RunConfig& cfg, std::istream& in, std::ostream& out,
             std::ostream& err) {
  const auto& sub = cfg.subcommand();
  if (sub == "correct") return cmd_correct(cfg, in, out, err);
  if (sub == "eval") return cmd_eval(cfg, in, out, err);
  if (sub == "sweep") return cmd_sweep(cfg, in, out, err);
  if (sub == "synth") return cmd_synth(cfg, in, out, err);
  if (sub == "train-lm") return cmd_train_lm(cfg, in, out, err);
  throw UsageError("unknown subcommand " + sub);
}

std::string describe(std::string_view sub) {
  if (sub == "correct") return "correct sentences with the mixture beam search";
  if (sub == "eval") return "score predictions (or decode) against a reference corpus";
  if (sub == "sweep") return "evaluate a grid of alpha/beta/K settings";
  if (sub == "synth") return "corrupt clean sentences into a parallel corpus";
  if (sub == "train-lm") return "train and save a character n-gram LM";
  return "";
}

}  // namespace

std::vector<OptionSpec> options_for(std::string_view subcommand) {
  if (subcommand == "correct") {
    return with(model_options(),
                {{"input", "-", "input text, one sentence per line (- = stdin)"},
                 {"output", "-", "corrected text (- = stdout)"},
                 {"trace", "", "write JSONL beam traces to this file"},
                 {"meta", "", "write the resolved run config (JSON) to this file"}});
  }
  if (subcommand == "eval") {
    return with(model_options(),
                {{"corpus", "", "parallel corpus: id TAB source TAB reference"},
                 {"predictions", "", "score these predictions (id TAB text) instead of decoding"},
                 {"decoder", "mixture", "mixture or classifier (per-position argmax)"},
                 {"out-dir", "", "write report.txt, report.jsonl, predictions.tsv here"}});
  }
  if (subcommand == "sweep") {
    return with(model_options(),
                {{"corpus", "", "parallel corpus: id TAB source TAB reference"},
                 {"alphas", "0.5", "comma-separated alpha values"},
                 {"betas", "0.9", "comma-separated beta values"},
                 {"beams", "12", "comma-separated beam sizes"},
                 {"out-dir", "", "write grid.tsv and cells.jsonl here"}});
  }
  if (subcommand == "synth") {
    return with(resource_options(),
                {{"input", "-", "clean sentences, one per line (- = stdin)"},
                 {"output", "-", "corrupted parallel corpus (- = stdout)"},
                 {"seed", "42", "random seed (64-bit)"},
                 {"error-rate", "0.1", "per-character corruption probability"},
                 {"id-prefix", "synth", "record id prefix"}});
  }
  if (subcommand == "train-lm") {
    return {{"corpus", "", "training sentences, one per line"},
            {"output", "", "model file to write"},
            {"order", "3", "n-gram order"},
            {"k", "0.1", "add-k smoothing constant"},
            {"tokens", "", "file of multi-character tokens, one per line"},
            {"auto-tokens", "0", "add the N most frequent bigrams as tokens"}};
  }
  return {};
}

int run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"Mixture beam-search spelling correction", "mixcsc"};
  app.set_version_flag("--version", MIXCSC_VERSION_STRING);
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key=value config file (env MIXCSC_CONFIG)");

  struct Bound {
    CLI::App* app;
    std::vector<OptionSpec> specs;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
  };
  std::vector<std::unique_ptr<Bound>> bound;
  for (auto name : kSubcommands) {
    auto b = std::make_unique<Bound>();
    b->app = app.add_subcommand(std::string(name), describe(name));
    b->specs = options_for(name);
    const std::string pos = positional_key(name);
    for (const auto& spec : b->specs) {
      std::string flag = "--" + spec.key;
      if (spec.key == pos) flag += "," + spec.key;
      std::string help = spec.help;
      if (!spec.default_value.empty()) help += " [" + spec.default_value + "]";
      b->options[spec.key] = b->app->add_option(flag, b->values[spec.key], help);
    }
    bound.push_back(std::move(b));
  }

  std::vector<const char*> argv{"mixcsc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    const Bound* chosen = nullptr;
    for (const auto& b : bound) {
      if (b->app->parsed()) chosen = b.get();
    }
    std::map<std::string, std::string> flags;
    for (const auto& [key, opt] : chosen->options) {
      if (opt->count() > 0) flags[key] = chosen->values.at(key);
    }
    if (config_path.empty() && env) {
      if (auto v = env("MIXCSC_CONFIG")) config_path = *v;
    }
    const auto file_values = config_path.empty()
                                 ? std::map<std::string, std::string>{}
                                 : read_config_file(config_path);
    const auto cfg = resolve_config(chosen->app->get_name(), chosen->specs,
                                    flags, env, file_values);
    return dispatch(cfg, in, out, err);
  } catch (const UsageError& e) {
    err << "mixcsc: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "mixcsc: " << e.what() << '\n';
    return e.code() == ErrorCode::kInvalidConfig ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    err << "mixcsc: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace mixcsc::cli
