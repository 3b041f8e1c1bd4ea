#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "mixcsc/corpus.hpp"
#include "mixcsc/ngram_lm.hpp"
#include "mixcsc/noisy_channel.hpp"
#include "mixcsc/utf8.hpp"
#include "stubs.hpp"

using namespace mixcsc;
using mixcsc::testing::dist_from_probs;
using mixcsc::testing::StubClassifier;

namespace {

double exp_sum(const std::vector<double>& lp) {
  double s = 0;
  for (double v : lp) s += std::exp(v);
  return s;
}

double exp_sum(const CharDistribution& d) {
  double s = 0;
  for (const auto& [c, v] : d.entries()) s += std::exp(v);
  return s;
}

std::vector<Text> fixture_corpus() {
  return {utf8_decode("我们明天去学校"), utf8_decode("他们明天去医院"),
          utf8_decode("我们今天去公园"), utf8_decode("妈妈今天去医院看病")};
}

// Every reachable state up to `depth` steps along the given sentences.
std::vector<ScorerState> sample_states(const GenerativeScorer& lm,
                                       const std::vector<Text>& corpus) {
  std::vector<ScorerState> states{lm.initial_state()};
  for (const auto& s : corpus) {
    auto st = lm.initial_state();
    for (Char c : s) {
      auto id = lm.find_token(Text(1, c));
      st = lm.step(st, id ? *id : lm.unknown_token());
      states.push_back(st);
    }
  }
  return states;
}

}  // namespace

TEST_CASE("ngram add-k values") {
  const std::vector<Text> ab{U"ab", U"ab"};
  auto lm = NGramLM::train(ab, 2, 0.1);
  CHECK(lm.alphabet().size() == 3);  // a, b, UNK
  CHECK(lm.conditional(U"a", U'b') == doctest::Approx(2.1 / 2.3).epsilon(1e-12));
  CHECK(lm.conditional(U"a", U'b') == doctest::Approx(0.913043).epsilon(1e-6));

  const std::vector<Text> a{U"a"};
  auto uni = NGramLM::train(a, 1, 0.1);
  CHECK(uni.alphabet().size() == 2);  // a, UNK
  CHECK(uni.conditional(U"", U'a') == doctest::Approx(1.1 / 1.2).epsilon(1e-12));
}

TEST_CASE("ngram rejects bad input") {
  const std::vector<Text> empty;
  try {
    NGramLM::train(empty);
    FAIL("expected EmptyCorpus");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyCorpus);
  }
  const std::vector<Text> ok{U"ab"};
  CHECK_THROWS_AS(NGramLM::train(ok, 0, 0.1), Error);
  CHECK_THROWS_AS(NGramLM::train(ok, 2, 0.0), Error);
  const std::vector<Text> bad_tok{U"xz"};
  CHECK_THROWS_AS(NGramLM::train(ok, 2, 0.1, bad_tok), Error);
}

TEST_CASE("ngram distributions normalize, with and without multi-char tokens") {
  const auto corpus = fixture_corpus();
  const std::vector<Text> multi{utf8_decode("我们"), utf8_decode("明天"),
                                utf8_decode("医院")};
  for (bool with_multi : {false, true}) {
    auto lm = with_multi ? NGramLM::train(corpus, 3, 0.1, multi)
                         : NGramLM::train(corpus, 3, 0.1);
    for (const auto& st : sample_states(lm, corpus)) {
      const auto d = lm.distribution(st);
      CHECK(d.size() == lm.vocabulary().size());
      CHECK(exp_sum(d) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("multi-char token probability is the renormalized product") {
  const std::vector<Text> corpus{U"abab", U"abba"};
  const std::vector<Text> multi{U"ab"};
  auto lm = NGramLM::train(corpus, 2, 0.1, multi);
  const auto st = lm.initial_state();
  const auto d = lm.distribution(st);
  const double pa = lm.conditional(U"", U'a');
  const double pab = pa * lm.conditional(U"a", U'b');
  const double z = 1.0 + pab;
  CHECK(std::exp(d[*lm.find_token(U"a")]) == doctest::Approx(pa / z).epsilon(1e-12));
  CHECK(std::exp(d[*lm.find_token(U"ab")]) == doctest::Approx(pab / z).epsilon(1e-12));
}

TEST_CASE("single-token vocabulary and symmetric counts") {
  testing::StubLM one({U"x"}, [](const ScorerState&) { return std::vector<double>{0.0}; });
  CHECK(one.distribution(one.initial_state())[0] == 0.0);

  const std::vector<Text> corpus{U"ab", U"ac"};
  auto lm = NGramLM::train(corpus, 2, 1e-9);
  const auto st = lm.step(lm.initial_state(), *lm.find_token(U"a"));
  const auto d = lm.distribution(st);
  CHECK(d[*lm.find_token(U"b")] == doctest::Approx(d[*lm.find_token(U"c")]).epsilon(1e-12));
}

TEST_CASE("ngram step is deterministic and unknown characters map to UNK") {
  const auto corpus = fixture_corpus();
  auto lm = NGramLM::train(corpus);
  auto s1 = lm.step(lm.initial_state(), 3);
  auto s2 = lm.step(lm.initial_state(), 3);
  CHECK(s1 == s2);
  CHECK(lm.distribution(s1) == lm.distribution(s2));
  CHECK_FALSE(lm.find_token(U"Z"));
  CHECK(lm.vocabulary()[static_cast<std::size_t>(lm.unknown_token())].chars ==
        Text(1, kUnknownChar));
}

TEST_CASE("perplexity is finite and falls as k shrinks") {
  const auto corpus = read_sentences_file(MIXCSC_DATA_DIR "/corpus/train.txt");
  double prev = INFINITY;
  for (double k : {1.0, 0.3, 0.1, 0.01}) {
    const double ppl = NGramLM::train(corpus, 3, k).perplexity(corpus);
    CHECK(std::isfinite(ppl));
    CHECK(ppl < prev);
    prev = ppl;
  }
}

TEST_CASE("ngram save/load is bit-exact") {
  const auto corpus = fixture_corpus();
  const std::vector<Text> multi{utf8_decode("我们")};
  auto lm = NGramLM::train(corpus, 3, 0.1, multi);
  lm.set_metadata({"trained-by=test", "note=two lines"});
  std::ostringstream a;
  lm.save(a);
  std::istringstream in(a.str());
  auto back = NGramLM::load(in);
  std::ostringstream b;
  back.save(b);
  CHECK(a.str() == b.str());
  CHECK(back.metadata() == lm.metadata());
  for (const auto& st : sample_states(lm, corpus)) {
    const auto d1 = lm.distribution(st);
    const auto d2 = back.distribution(st);
    REQUIRE(d1.size() == d2.size());
    for (std::size_t i = 0; i < d1.size(); ++i) CHECK(std::abs(d1[i] - d2[i]) <= 1e-12);
  }
}

TEST_CASE("ngram load rejects damaged files") {
  std::istringstream wrong_tag("other\tv1\n");
  CHECK_THROWS_AS(NGramLM::load(wrong_tag), Error);
  std::istringstream wrong_version(
      "mixcsc-ngram\tv9\torder=2\tk=0.1\talphabet=ab\xEF\xBF\xBD\ttokens=0\tmeta=0\n");
  CHECK_THROWS_AS(NGramLM::load(wrong_version), Error);
  std::istringstream short_ctx(
      "mixcsc-ngram\tv1\torder=2\tk=0.1\talphabet=ab\xEF\xBF\xBD\ttokens=0\tmeta=0\n"
      "ab\ta\t1\n");
  CHECK_THROWS_AS(NGramLM::load(short_ctx), Error);
}

TEST_CASE("noisy channel classifier ratio and normalization") {
  auto res = std::make_shared<const SimilarityResources>();
  const std::vector<std::pair<Char, double>> prior{{U'水', 1.0}, {U'火', 1.0}};
  NoisyChannelClassifier cls(DistortionTable{}, res, prior, 1.0);
  const Text src = utf8_decode("水");
  const auto d = cls.distribution_at(src, 0);
  CHECK(std::exp(d.logprob(U'水') - d.logprob(U'火')) ==
        doctest::Approx(0.962 / 0.003).epsilon(1e-12));
  CHECK(exp_sum(d) == doctest::Approx(1.0).epsilon(1e-9));

  try {
    cls.distribution_at(src, 1);
    FAIL("expected IndexOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIndexOutOfRange);
  }
}

TEST_CASE("high temperature tends to the prior") {
  auto res = std::make_shared<const SimilarityResources>();
  const std::vector<std::pair<Char, double>> prior{{U'a', 3.0}, {U'b', 1.0}};
  NoisyChannelClassifier cls(DistortionTable{}, res, prior, 1e9);
  const auto d = cls.distribution_at(U"a", 0);
  CHECK(std::exp(d.logprob(U'a')) == doctest::Approx(0.75).epsilon(1e-6));
  CHECK(std::exp(d.logprob(U'b')) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("classifier contract on shipped data") {
  const auto corpus = read_sentences_file(MIXCSC_DATA_DIR "/corpus/train.txt");
  auto res = std::make_shared<const SimilarityResources>(SimilarityResources::load(
      MIXCSC_DATA_DIR "/pinyin.tsv", MIXCSC_DATA_DIR "/shape.tsv",
      MIXCSC_DATA_DIR "/fuzzy.tsv"));
  NoisyChannelClassifier cls(DistortionTable{}, res,
                             NoisyChannelClassifier::prior_from_corpus(corpus));
  const Text src = utf8_decode("他昨天在电嬴院取千。Z");
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto d = cls.distribution_at(src, i);
    CHECK(exp_sum(d) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(d.contains(src[i]));
    CHECK(d.entries().size() == cls.distribution_at(src, i).entries().size());
  }
}

TEST_CASE("sm_token_logprob") {
  StubClassifier cls({dist_from_probs({{U'a', 0.5}, {U'b', 0.5}}),
                      dist_from_probs({{U'a', 0.75}, {U'b', 0.25}})});
  const Text src = U"ab";
  CHECK(sm_token_logprob(cls, src, 1, U"a") == std::log(0.5));
  CHECK(sm_token_logprob(cls, src, 2, U"ab") == doctest::Approx(std::log(0.125)).epsilon(1e-12));
  CHECK(sm_token_logprob(cls, src, 2, U"ab") ==
        sm_token_logprob(cls, src, 1, U"a") + sm_token_logprob(cls, src, 2, U"b"));
  try {
    sm_token_logprob(cls, src, 1, U"ab");
    FAIL("expected SpanOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSpanOutOfRange);
  }
  CHECK_THROWS_AS(sm_token_logprob(cls, src, 3, U"b"), Error);
}

TEST_CASE("char distribution helpers") {
  const auto d = dist_from_probs({{U'c', 0.2}, {U'a', 0.4}, {U'b', 0.2}, {kUnknownChar, 0.2}});
  CHECK(d.argmax() == U'a');
  CHECK(d.top_k(3) == std::vector<Char>{U'a', U'b', U'c'});  // UNK never proposed
  CHECK(d.logprob(U'z') == std::log(0.2));                    // falls back to UNK
  const auto no_unk = dist_from_probs({{U'a', 1.0}});
  CHECK(no_unk.logprob(U'z') == kNegInf);
  CHECK(log_sum_exp(std::vector<double>{}) == kNegInf);
  CHECK(log_sum_exp(std::vector<double>{std::log(0.25), std::log(0.75)}) ==
        doctest::Approx(0.0).epsilon(1e-15));
}
