// Copyright 2026 The sagetok Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sagetok/unigram_trainer.h"

#include <cmath>
#include <set>

#include "gtest/gtest.h"
#include "oracles.h"
#include "sagetok/bpe_trainer.h"
#include "sagetok/encoder.h"
#include "sagetok/utf8.h"
#include "test_util.h"

namespace sagetok {
namespace {

using testing::kM;

std::set<std::string> TokenSet(const Vocabulary& v) {
  return {v.tokens().begin(), v.tokens().end()};
}

TEST(InitSubstringVocabTest, RepeatedWord) {
  const Vocabulary v = InitSubstringVocab(testing::Corpus({"aa aa"}), 16, 2);
  EXPECT_EQ((std::set<std::string>{kM, "a", kM + "a", "aa", kM + "aa"}), TokenSet(v));
  EXPECT_EQ(2, v.AlphabetSize());
}

TEST(InitSubstringVocabTest, LengthCap) {
  const Vocabulary v = InitSubstringVocab(testing::Corpus({"ab ab ab"}), 2, 2);
  EXPECT_EQ((std::set<std::string>{kM, "a", "b", kM + "a", "ab"}), TokenSet(v));
}

TEST(InitSubstringVocabTest, NothingRepeats) {
  const Vocabulary v = InitSubstringVocab(testing::Corpus({"ab cd ef"}), 16, 2);
  EXPECT_EQ((std::set<std::string>{kM, "a", "b", "c", "d", "e", "f"}), TokenSet(v));
}

TEST(InitSubstringVocabTest, MatchesEnumeration) {
  const auto lines = testing::RandomLines(11, 20, {"a", "b", "c", "\xC3\xA9"});
  const Vocabulary v = InitSubstringVocab(testing::Corpus(lines), 4, 3);
  std::set<std::string> expect;
  for (const auto& c : oracle::Alphabet(lines)) expect.insert(c);
  for (const auto& [s, n] : oracle::Substrings(lines, 4)) {
    if (n >= 3) expect.insert(s);
  }
  EXPECT_EQ(expect, TokenSet(v));
  EXPECT_THROW(InitSubstringVocab(RawCorpus{}, 4, 2), Error);
  EXPECT_THROW(InitSubstringVocab(testing::Corpus(lines), 0, 2), Error);
}

SentenceStore StoreOf(const std::vector<std::vector<TokenId>>& sentences) {
  SentenceStore store;
  for (const auto& ids : sentences) {
    EncodedSentence e;
    e.ids = ids;
    e.word_starts = {0};
    store.encoded.push_back(e);
    store.source.emplace_back();
  }
  store.nll.assign(sentences.size(), 0.0);
  return store;
}

TEST(CorpusLogLikTest, Examples) {
  const std::vector<double> one{1.0};
  EXPECT_DOUBLE_EQ(0.0, CorpusLogLik(StoreOf({{0}}), one));
  const std::vector<double> half{0.5, 0.5};
  EXPECT_NEAR(2 * std::log(0.5), CorpusLogLik(StoreOf({{0, 1}}), half), 1e-12);
  const std::vector<double> zero{1.0, 0.0};
  EXPECT_THROW(CorpusLogLik(StoreOf({{1}}), zero), Error);
  EXPECT_THROW(CorpusLogLik(StoreOf({{kUnkId}}), one), Error);
}

TEST(CorpusLogLikTest, MatchesDirectSum) {
  const auto lines = testing::SyllableLines(5, 20);
  const RawCorpus corpus = testing::Corpus(lines);
  const Vocabulary v = TrainBpe(corpus, 40).vocab;
  const SentenceStore store = EncodeCorpus(corpus, CompiledVocab::Compile(v));
  const auto probs = FitUnigramProbs(store, std::vector<bool>(v.size(), true));
  double sum = 0.0;
  for (double p : probs) {
    EXPECT_GT(p, 0.0);
    sum += p;
  }
  EXPECT_NEAR(1.0, sum, 1e-12);
  long double direct = 0;
  for (const auto& e : store.encoded) {
    for (TokenId id : e.ids) direct += std::log(static_cast<long double>(probs[id]));
  }
  EXPECT_NEAR(static_cast<double>(direct), CorpusLogLik(store, probs), 1e-12);
}

TEST(FitUnigramProbsTest, PseudoCountAndInactive) {
  // Token 2 is active but unused; token 3 is inactive.
  const SentenceStore store = StoreOf({{0, 1, 1}});
  const auto p = FitUnigramProbs(store, {true, true, true, false});
  const double total = 3 + kZeroCountPseudo;
  EXPECT_DOUBLE_EQ(1 / total, p[0]);
  EXPECT_DOUBLE_EQ(2 / total, p[1]);
  EXPECT_DOUBLE_EQ(kZeroCountPseudo / total, p[2]);
  EXPECT_EQ(0.0, p[3]);
}

TEST(TrainUnigramTest, TargetEqualsSizeIsNoOp) {
  const RawCorpus corpus = testing::Corpus({"aa aa ab"});
  const Vocabulary init = InitSubstringVocab(corpus, 16, 2);
  const UnigramResult r = TrainUnigram(corpus, init.size(), 1);
  EXPECT_EQ(init, r.model.vocab);
  EXPECT_TRUE(r.batches.empty());
}

TEST(TrainUnigramTest, Errors) {
  const RawCorpus corpus = testing::Corpus({"aa aa ab"});
  EXPECT_THROW(TrainUnigram(corpus, 2, 1), Error);
  EXPECT_THROW(TrainUnigram(corpus, 4, 0), Error);
}

TEST(TrainUnigramTest, MatchesExhaustiveOracle) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto lines = testing::SyllableLines(seed, 12 + seed * 3, 12, 5);
    const RawCorpus corpus = testing::Corpus(lines);
    const Vocabulary init = TrainBpe(corpus, 40 + seed * 3).vocab;
    ASSERT_LE(init.size(), 60);
    const std::size_t target = init.AlphabetSize() + 4;
    const auto expect = oracle::UnigramExhaustive(lines, init.tokens(), target);

    UnigramOptions opts;
    opts.threads = 1;
    const UnigramResult r = TrainUnigramFrom(corpus, init, target, 1, opts);
    ASSERT_EQ(expect.size(), r.batches.size()) << seed;
    for (std::size_t i = 0; i < expect.size(); ++i) {
      ASSERT_EQ(1, r.batches[i].size());
      EXPECT_EQ(expect[i].token, r.batches[i][0]) << "seed " << seed << " step " << i;
    }
    EXPECT_EQ(target, r.model.vocab.size());
  }
}

TEST(TrainUnigramTest, KeepsAlphabetAndHitsTarget) {
  const RawCorpus corpus = testing::Corpus(testing::SyllableLines(9, 80));
  UnigramOptions opts;
  opts.max_len = 6;
  const UnigramResult r = TrainUnigram(corpus, 40, 7, opts);
  EXPECT_EQ(40, r.model.vocab.size());
  for (const auto& c : CorpusAlphabet(corpus)) EXPECT_TRUE(r.model.vocab.Contains(c)) << c;
  for (const auto& batch : r.batches) {
    EXPECT_LE(batch.size(), 7);
    for (const auto& t : batch) EXPECT_GT(utf8::CharCount(t), 1) << t;
  }
  double sum = 0;
  for (double p : r.model.probs) sum += p;
  EXPECT_NEAR(1.0, sum, 1e-9);
}

}  // namespace
}  // namespace sagetok
