#include <cmath>
#include <fstream>
#include <random>

#include <gtest/gtest.h>
#include <json.hpp>

#include "test_support.hpp"
#include "transart/metrics.hpp"
#include "transart/mock_backend.hpp"

namespace transart::metrics {
namespace {

using test::fixture;

std::string error_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return "<no error>";
}

std::vector<std::string> lines(const std::string& name) {
  std::ifstream in(fixture(name));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

nlohmann::json oracle() {
  std::ifstream in(fixture("mt_oracle.json"));
  return nlohmann::json::parse(in);
}

Corpus corpus_of(const std::vector<std::string>& texts) {
  Corpus c;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    Sample s;
    s.id = std::to_string(i);
    s.text = texts[i];
    s.language = "en";
    c.samples.push_back(s);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Tokenizer and diversity

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("The cat, sat."), (TokenList{"the", "cat", ",", "sat", "."}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("이 동물들은"), (TokenList{"이", "동물들은"}));
  EXPECT_EQ(tokenize("  \"Is it?\"  "), (TokenList{"\"", "is", "it", "?", "\""}));
  EXPECT_EQ(tokenize("café's"), (TokenList{"café's"}));
  // NFC: decomposed e + combining acute equals the precomposed form.
  EXPECT_EQ(tokenize("Cafe\xCC\x81"), tokenize("CAFÉ"));
}

TEST(Tokenize, NoEmptyOrWhitespaceTokens) {
  const std::vector<std::string> pieces = {"a", "B", ",", "...", "\t", " ", "\xE3\x80\x80", "?!", "x.y", "\xC2\xA0",
                                           "동물", "(z)"};
  std::mt19937 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    for (int k = 0; k < static_cast<int>(rng() % 12); ++k) text += pieces[rng() % pieces.size()];
    for (const auto& tok : tokenize(text)) {
      EXPECT_FALSE(tok.empty());
      for (char32_t c : unicode::to_u32(tok)) EXPECT_FALSE(unicode::is_space(c)) << text;
      EXPECT_EQ(tok, unicode::lower(tok));
    }
  }
}

TEST(Ttr, HandCounts) {
  EXPECT_DOUBLE_EQ(ttr({"a", "a", "a", "a"}), 0.25);
  EXPECT_DOUBLE_EQ(ttr({"the", "cat", "sat", "on", "the", "mat"}), 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(ttr({"x", "y", "z"}), 1.0);
  EXPECT_EQ(error_kind([] { ttr({}); }), "EmptyInput");
}

TEST(Ttr, DuplicateMakesItStrictlyLessThanOne) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 20;
    TokenList distinct;
    for (std::size_t i = 0; i < n; ++i) distinct.push_back("w" + std::to_string(i));
    EXPECT_DOUBLE_EQ(ttr(distinct), 1.0);
    TokenList dup = distinct;
    dup.push_back(distinct[rng() % n]);
    EXPECT_LT(ttr(dup), 1.0);
    const TokenList same(n, "w");
    EXPECT_DOUBLE_EQ(ttr(same), 1.0 / static_cast<double>(n));
  }
}

TEST(LexicalDensity, HandCounts) {
  const std::unordered_set<std::string> stop = {"the", "on"};
  EXPECT_DOUBLE_EQ(lexical_density(TokenList{"the", "cat", "sat", "on", "the", "mat"}, stop), 0.5);
  EXPECT_DOUBLE_EQ(lexical_density(TokenList{"the", "on"}, stop), 0.0);
  EXPECT_DOUBLE_EQ(lexical_density(TokenList{"cat", "mat"}, stop), 1.0);
  EXPECT_DOUBLE_EQ(lexical_density(TokenList{"cat", "?"}, stop), 0.5);
  EXPECT_EQ(error_kind([&] { lexical_density(TokenList{}, stop); }), "EmptyInput");
}

TEST(LexicalDensity, ShippedStoplist) {
  const auto& stop = default_stoplist();
  EXPECT_GE(stop.size(), 250u);
  EXPECT_LE(stop.size(), 350u);
  for (const char* w : {"the", "a", "on", "is", "are", "of", "and", "it", "to", "what", "which"}) {
    EXPECT_EQ(stop.count(w), 1u) << w;
  }
  for (const char* w : {"dog", "big", "see", "car", "red"}) EXPECT_EQ(stop.count(w), 0u) << w;
  // The data file and the compiled-in list agree.
  std::size_t n = 0;
  for (const auto& w : lines("../../data/stoplist_en.txt")) {
    if (w.empty()) continue;
    ++n;
    EXPECT_EQ(stop.count(w), 1u) << w;
  }
  EXPECT_EQ(n, stop.size());
}

TEST(CorpusDiversity, MacroMean) {
  const auto r = corpus_diversity(corpus_of({"x y", "z z"}));
  EXPECT_DOUBLE_EQ(r.ttr, 0.75);
  EXPECT_EQ(r.n_sentences, 2u);
  EXPECT_EQ(r.aggregation, "macro");

  const auto single = corpus_diversity(corpus_of({"The cat sat on the mat"}));
  EXPECT_DOUBLE_EQ(single.ttr, 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(single.ld, 0.5);
}

TEST(CorpusDiversity, SkipsEmptySentences) {
  const auto r = corpus_diversity(corpus_of({"x y", "   ", "z z"}));
  EXPECT_DOUBLE_EQ(r.ttr, 0.75);
  EXPECT_EQ(r.skipped_empty, 1u);
  EXPECT_EQ(error_kind([] { corpus_diversity(Corpus{}); }), "EmptyCorpus");
}

TEST(CorpusDiversity, HandCountedSimplification) {
  // 12 tokens each; the simplified variant merges "large"/"huge" into "big".
  const std::string human = "Are the large dogs and the huge cats the same species?";
  const std::string simple = "are the big dogs and the big cats the same kind?";
  EXPECT_DOUBLE_EQ(ttr(tokenize(human)), 10.0 / 12.0);
  EXPECT_DOUBLE_EQ(ttr(tokenize(simple)), 9.0 / 12.0);
  // Content words ("same" is on the stoplist): large dogs huge cats species / big dogs big cats kind.
  EXPECT_DOUBLE_EQ(lexical_density(tokenize(human), default_stoplist()), 5.0 / 12.0);
  EXPECT_DOUBLE_EQ(lexical_density(tokenize(simple), default_stoplist()), 5.0 / 12.0);
}

TEST(CorpusDiversity, TwentySentenceMockFixtureOrdering) {
  Corpus human = load_corpus(fixture("human_en.jsonl"));
  human.samples.resize(20);
  MockBackend mock = MockBackend::from_file(fixture("dict_en.json"));
  const Corpus mt = roundtrip(human, "de", mock);
  std::size_t lower = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    const double h = ttr(tokenize(human.samples[i].text));
    const double m = ttr(tokenize(mt.samples[i].text));
    EXPECT_LE(m, h) << human.samples[i].text;
    lower += m < h;
  }
  EXPECT_GT(lower, 0u);
  EXPECT_LT(corpus_diversity(mt).ttr, corpus_diversity(human).ttr);
}

// ---------------------------------------------------------------------------
// BLEU / chrF

TEST(MtMetrics, Tokenize13a) {
  EXPECT_EQ(tokenize_13a("Hello, world!"), "Hello , world !");
  EXPECT_EQ(tokenize_13a("It costs $3.50, ok?"), "It costs $ 3.50 , ok ?");
  EXPECT_EQ(tokenize_13a("a&amp;b"), "a & b");
  EXPECT_EQ(tokenize_13a("end."), "end .");
  EXPECT_EQ(tokenize_13a("1,000 people"), "1,000 people");
}

TEST(MtMetrics, FixtureMatchesOracle) {
  const auto hyps = lines("mt_hyp.txt");
  const auto refs = lines("mt_ref.txt");
  ASSERT_EQ(hyps.size(), 10u);
  const auto o = oracle();
  EXPECT_NEAR(bleu(hyps, refs).value, o["corpus"]["bleu"].get<double>(), 0.01);
  EXPECT_NEAR(chrf(hyps, refs).value, o["corpus"]["chrf"].get<double>(), 0.01);
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const std::vector<std::string> h = {hyps[i]};
    const std::vector<std::string> r = {refs[i]};
    EXPECT_NEAR(bleu(h, r).value, o["pairs"][i]["bleu"].get<double>(), 0.01) << i;
    EXPECT_NEAR(chrf(h, r).value, o["pairs"][i]["chrf"].get<double>(), 0.01) << i;
  }
}

TEST(MtMetrics, IdenticalIsExactly100) {
  const auto refs = lines("mt_ref.txt");
  EXPECT_EQ(bleu(refs, refs).value, 100.0);
  EXPECT_EQ(chrf(refs, refs).value, 100.0);
  std::mt19937 rng(21);
  const std::vector<std::string> words = {"the", "dog", "Runs", "fast", ",", "über", "a.", "3.5", "isn't", "?"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> xs;
    for (int k = 0; k < 1 + static_cast<int>(rng() % 4); ++k) {
      std::string s;
      for (int w = 0; w < 1 + static_cast<int>(rng() % 12); ++w) s += (w ? " " : "") + words[rng() % words.size()];
      xs.push_back(s);
    }
    EXPECT_EQ(bleu(xs, xs).value, 100.0);
    EXPECT_EQ(chrf(xs, xs).value, 100.0);
  }
}

TEST(MtMetrics, ShortInputsFollowOracleExceptIdentity) {
  // Below four tokens there are no 4-grams; the oracle scores a non-identical
  // pair 0 and we keep that, but identical input is 100.
  const std::vector<std::string> x = {"a b c"};
  const std::vector<std::string> y = {"a b d"};
  EXPECT_EQ(bleu(x, x).value, 100.0);
  EXPECT_EQ(bleu(x, y).value, 0.0);
}

TEST(MtMetrics, DisjointIsZero) {
  const std::vector<std::string> h = {"aaaa"};
  const std::vector<std::string> r = {"zzzz"};
  const auto o = oracle();
  EXPECT_EQ(chrf(h, r).value, 0.0);
  EXPECT_NEAR(bleu(h, r).value, o["disjoint"]["bleu"].get<double>(), 0.01);
}

TEST(MtMetrics, ValuesInRange) {
  std::mt19937 rng(4);
  const std::vector<std::string> words = {"a", "b", "c", "dd", "e.", "f,", "g"};
  for (int trial = 0; trial < 200; ++trial) {
    auto sentence = [&] {
      std::string s;
      for (int w = 0; w < 1 + static_cast<int>(rng() % 8); ++w) s += (w ? " " : "") + words[rng() % words.size()];
      return s;
    };
    const std::vector<std::string> h = {sentence(), sentence()};
    const std::vector<std::string> r = {sentence(), sentence()};
    for (double v : {bleu(h, r).value, chrf(h, r).value}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 100.0);
    }
  }
}

TEST(MtMetrics, SignaturesAndErrors) {
  const std::vector<std::string> one = {"x"};
  const std::vector<std::string> two = {"x", "y"};
  const std::vector<std::string> none;
  EXPECT_EQ(bleu(one, one).signature, kBleuSignature);
  EXPECT_NE(bleu(one, one).signature.find("tok:13a|smooth:exp"), std::string::npos);
  EXPECT_EQ(chrf(one, one).signature, kChrfSignature);
  EXPECT_EQ(error_kind([&] { bleu(one, two); }), "LengthMismatch");
  EXPECT_EQ(error_kind([&] { chrf(two, one); }), "LengthMismatch");
  EXPECT_EQ(error_kind([&] { bleu(none, none); }), "EmptyInput");
}

// ---------------------------------------------------------------------------
// Grouped accuracy

Corpus gold_corpus() {
  Corpus c = corpus_of({"q1", "q2", "q3", "q4"});
  const char* answers[] = {"yes", "No", "left", "dog"};
  for (int i = 0; i < 4; ++i) c.samples[i].answer = answers[i];
  return c;
}

TEST(GroupAccuracy, AllCorrect) {
  const auto r = group_accuracy({{"0", "yes"}, {"1", " no "}, {"2", "LEFT"}, {"3", "dog"}}, gold_corpus());
  ASSERT_EQ(r.groups.size(), 1u);
  EXPECT_DOUBLE_EQ(r.groups.at("all").accuracy(), 1.0);
  EXPECT_DOUBLE_EQ(r.overall.accuracy(), 1.0);
}

TEST(GroupAccuracy, PerGroup) {
  const auto r = group_accuracy({{"0", "yes"}, {"1", "yes"}, {"2", "left"}, {"3", "dog"}}, gold_corpus(),
                                {{"0", "g1"}, {"1", "g1"}, {"2", "g2"}, {"3", "g2"}});
  EXPECT_DOUBLE_EQ(r.groups.at("g1").accuracy(), 0.5);
  EXPECT_DOUBLE_EQ(r.groups.at("g2").accuracy(), 1.0);
  EXPECT_DOUBLE_EQ(r.overall.accuracy(), 0.75);
}

TEST(GroupAccuracy, MissingPredictions) {
  const std::map<std::string, std::string> preds = {{"0", "yes"}, {"1", "no"}, {"2", "left"}};
  try {
    group_accuracy(preds, gold_corpus());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), "MissingPrediction");
    EXPECT_STREQ(e.what(), "3");
  }
  EXPECT_DOUBLE_EQ(group_accuracy(preds, gold_corpus(), {}, true).overall.accuracy(), 0.75);
  EXPECT_EQ(error_kind([&] { group_accuracy(preds, gold_corpus(), {{"0", "g"}}, true); }), "MissingGroup");
}

// ---------------------------------------------------------------------------
// Paired t-test. Oracle values from scipy.stats.ttest_rel, frozen.

TEST(TTest, OracleD123) {
  const std::vector<double> a = {1, 2, 3};
  const std::vector<double> b = {0, 0, 0};
  const auto r = paired_t_test(a, b);
  EXPECT_NEAR(r.t, 3.464101615137755, 1e-3);
  EXPECT_NEAR(r.p_two_sided, 0.07417990022744853, 1e-3);
  EXPECT_EQ(r.df, 2);
  EXPECT_EQ(r.direction, "a>b");
  EXPECT_FALSE(r.significant);
  // Tighter than the published tolerance; the CDF is analytic.
  EXPECT_NEAR(r.t, 3.464101615137755, 1e-12);
  EXPECT_NEAR(r.p_two_sided, 0.07417990022744853, 1e-12);
}

TEST(TTest, OracleAccuracies) {
  const std::vector<double> a = {0.51, 0.48, 0.55, 0.60, 0.47};
  const std::vector<double> b = {0.50, 0.49, 0.50, 0.52, 0.45};
  const auto r = paired_t_test(a, b);
  EXPECT_NEAR(r.t, 1.8973665961010275, 1e-9);
  EXPECT_NEAR(r.p_two_sided, 0.1306351137536606, 1e-9);
  EXPECT_EQ(r.df, 4);
}

TEST(TTest, Antisymmetry) {
  std::mt19937 rng(17);
  std::normal_distribution<double> nd(0.5, 0.1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 30;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = nd(rng);
      b[i] = nd(rng);
    }
    const auto ab = paired_t_test(a, b);
    const auto ba = paired_t_test(b, a);
    EXPECT_EQ(ab.t, -ba.t);
    EXPECT_EQ(ab.p_two_sided, ba.p_two_sided);
    EXPECT_EQ(ab.df, static_cast<int>(n) - 1);
    EXPECT_GT(ab.p_two_sided, 0.0);
    EXPECT_LE(ab.p_two_sided, 1.0);
  }
}

TEST(TTest, Errors) {
  const std::vector<double> a = {0.5, 0.6, 0.7};
  EXPECT_EQ(error_kind([&] { paired_t_test(a, a); }), "DegenerateZeroVariance");
  const std::vector<double> shifted = {1.5, 1.75, 2.0};
  const std::vector<double> base = {0.5, 0.75, 1.0};
  EXPECT_EQ(error_kind([&] { paired_t_test(shifted, base); }), "DegenerateZeroVariance");
  const std::vector<double> two = {1, 2};
  EXPECT_EQ(error_kind([&] { paired_t_test(a, two); }), "LengthMismatch");
  const std::vector<double> one = {1};
  EXPECT_EQ(error_kind([&] { paired_t_test(one, one); }), "TooFewSamples");
}

}  // namespace
}  // namespace transart::metrics
