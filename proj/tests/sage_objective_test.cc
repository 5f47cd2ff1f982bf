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

#include "sagetok/sage_objective.h"

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "oracles.h"
#include "sagetok/bpe_trainer.h"
#include "sagetok/encoder.h"
#include "sagetok/utf8.h"
#include "test_util.h"

namespace sagetok {
namespace {

using testing::kM;

SkipGramTable RandomTable(std::size_t rows, int dim, std::uint64_t seed, float scale = 0.5f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(-scale, scale);
  SkipGramTable t;
  t.rows = rows;
  t.dim = dim;
  t.window = 2;
  t.target.resize(rows * dim);
  t.context.resize(rows * dim);
  for (auto& x : t.target) x = u(rng);
  for (auto& x : t.context) x = u(rng);
  return t;
}

SkipGramTable ZeroTable(std::size_t rows, int dim) {
  SkipGramTable t;
  t.rows = rows;
  t.dim = dim;
  t.target.assign(rows * dim, 0.0f);
  t.context.assign(rows * dim, 0.0f);
  return t;
}

TEST(SentenceNllTest, Examples) {
  const SkipGramTable zero = ZeroTable(3, 4);
  const std::vector<TokenId> one{1};
  EXPECT_EQ(0.0, SentenceNll(one, zero, 5));
  const std::vector<TokenId> three{0, 1, 2};
  EXPECT_NEAR(4 * std::log(2.0), SentenceNll(three, zero, 1), 1e-15);
  const std::vector<TokenId> bad{0, 3};
  EXPECT_THROW(SentenceNll(bad, zero, 1), Error);
}

TEST(SentenceNllTest, MatchesDoubleLoop) {
  const SkipGramTable t = RandomTable(9, 6, 1);
  const std::vector<int> ids{3, 1, 4, 1, 5, 8};
  const std::vector<TokenId> span(ids.begin(), ids.end());
  EXPECT_NEAR(oracle::SentenceNll(ids, t.target, t.context, 6, 2), SentenceNll(span, t, 2),
              1e-12);
}

TEST(SentenceNllTest, StableForLargeDots) {
  SkipGramTable t = ZeroTable(2, 1);
  t.target = {100.0f, -100.0f};
  t.context = {100.0f, 100.0f};
  const std::vector<TokenId> ids{0, 1};
  const double nll = SentenceNll(ids, t, 1);
  EXPECT_TRUE(std::isfinite(nll));
  EXPECT_NEAR(NegLogSigmoid(1e4) + NegLogSigmoid(-1e4), nll, 1e-9);
  EXPECT_NEAR(1e4, NegLogSigmoid(-1e4), 1e-9);
}

TEST(CorpusNllTest, AdditivityAndOracle) {
  EXPECT_EQ(0.0, CorpusNll(SentenceStore{}, SkipGramTable{}, 2));

  const auto lines = testing::SyllableLines(6, 100);
  const RawCorpus corpus = testing::Corpus(lines);
  const Vocabulary v = TrainBpe(corpus, 50).vocab;
  const SentenceStore store = EncodeCorpus(corpus, CompiledVocab::Compile(v));
  SkipGramTable t = RandomTable(v.size(), 5, 2);
  t.vocab_hash = store.vocab_hash;
  long double expect = 0;
  for (const auto& e : store.encoded) {
    expect += oracle::SentenceNll({e.ids.begin(), e.ids.end()}, t.target, t.context, 5, 3);
  }
  EXPECT_NEAR(static_cast<double>(expect), CorpusNll(store, t, 3), 1e-9);

  SentenceStore twice;
  twice.vocab_hash = store.vocab_hash;
  twice.encoded = {store.encoded[0], store.encoded[0]};
  EXPECT_EQ(2 * SentenceNll(store.encoded[0].ids, t, 3), CorpusNll(twice, t, 3));

  t.vocab_hash ^= 1;
  EXPECT_THROW(CorpusNll(store, t, 3), Error);
}

struct Fixture {
  std::vector<std::string> lines;
  Vocabulary vocab;
  CompiledVocab cv;
  SentenceStore store;
  TokenIndex index;
  SkipGramTable table;
};

Fixture Make(std::vector<std::string> lines, const std::vector<std::string>& tokens,
             SkipGramTable table, int window) {
  Fixture f;
  f.lines = std::move(lines);
  for (const auto& t : tokens) {
    f.vocab.Add(t, utf8::CharCount(t) == 1 ? Provenance::kAlphabet : Provenance::kMerged);
  }
  f.cv = CompiledVocab::Compile(f.vocab);
  f.store = EncodeCorpus(testing::Corpus(f.lines), f.cv);
  f.index = BuildIndex(f.store, f.vocab.size());
  f.table = std::move(table);
  f.table.vocab_hash = f.store.vocab_hash;
  RescoreStore(f.store, NllScorer(f.table, window));
  return f;
}

// Full-corpus rescore with `token` removed, through the independent encoder.
double OracleLoss(const Fixture& f, TokenId token, int window) {
  const auto& tokens = f.vocab.tokens();
  std::vector<bool> active(tokens.size(), true);
  const auto before = oracle::EncodeLines(f.lines, tokens, active);
  active[token] = false;
  const auto after = oracle::EncodeLines(f.lines, tokens, active);
  double loss = 0;
  for (std::size_t s = 0; s < f.lines.size(); ++s) {
    loss += oracle::SentenceNll(after[s], f.table.target, f.table.context, f.table.dim, window) -
            oracle::SentenceNll(before[s], f.table.target, f.table.context, f.table.dim, window);
  }
  return loss;
}

TEST(AblationLossTest, EmptyPostings) {
  const Fixture f = Make({"ab ab"}, {kM, "a", "b", "ba", kM + "a"}, ZeroTable(5, 3), 2);
  const AblationLoss l = ComputeAblationLoss(3, f.store, f.index, f.vocab, f.table, f.cv, 2);
  EXPECT_EQ(0.0, l.loss);
  EXPECT_EQ(0, l.affected_sentences);
  EXPECT_THROW(ComputeAblationLoss(1, f.store, f.index, f.vocab, f.table, f.cv, 2), Error);
}

TEST(AblationLossTest, SplitWordMatchesFullRescore) {
  const std::vector<std::string> tokens{kM, "c", "d", "e", "h", "i", "l", "n", "s", "t", "u",
                                        kM + "inc", kM + "includ", "es", kM + "th", kM + "the"};
  const std::vector<std::string> lines{"the includ includes", "includ the", "the the",
                                       "this is", "includes the includ"};
  const Fixture f = Make(lines, tokens, RandomTable(tokens.size(), 8, 3), 3);
  const TokenId includ = *f.vocab.Find(kM + "includ");
  std::vector<TokenId> ids;
  std::string unk;
  std::vector<bool> active(tokens.size(), true);
  active[includ] = false;
  EncodeWord(kM + "includ", CompiledVocab::Compile(f.vocab, active), ids, unk);
  EXPECT_EQ(4, ids.size());

  for (TokenId t = 0; t < static_cast<TokenId>(tokens.size()); ++t) {
    if (f.vocab.IsSingleChar(t)) continue;
    const AblationLoss l = ComputeAblationLoss(t, f.store, f.index, f.vocab, f.table, f.cv, 3);
    EXPECT_NEAR(OracleLoss(f, t, 3), l.loss, 1e-10) << f.vocab.token(t);
    EXPECT_EQ(f.index.Postings(t).size(), l.affected_sentences);
  }
}

TEST(AblationLossTest, ZeroEmbeddingsCountPairs) {
  const auto lines = testing::SyllableLines(8, 40);
  const RawCorpus corpus = testing::Corpus(lines);
  const Vocabulary v = TrainBpe(corpus, 60).vocab;
  const Fixture f = Make(lines, v.tokens(), ZeroTable(v.size(), 4), 2);
  for (TokenId t = 0; t < static_cast<TokenId>(v.size()); ++t) {
    if (v.IsSingleChar(t)) continue;
    std::vector<bool> active(v.size(), true);
    const auto before = oracle::EncodeLines(lines, v.tokens(), active);
    active[t] = false;
    const auto after = oracle::EncodeLines(lines, v.tokens(), active);
    std::int64_t diff = 0;
    for (std::size_t s = 0; s < lines.size(); ++s) {
      diff += oracle::PairCount(after[s].size(), 2) - oracle::PairCount(before[s].size(), 2);
    }
    const AblationLoss l = ComputeAblationLoss(t, f.store, f.index, f.vocab, f.table, f.cv, 2);
    EXPECT_NEAR(std::log(2.0) * diff, l.loss, 1e-9) << v.token(t);
  }
  EXPECT_NEAR(std::log(2.0) * [&] {
    std::int64_t pairs = 0;
    for (const auto& e : f.store.encoded) pairs += oracle::PairCount(e.ids.size(), 2);
    return pairs;
  }(), CorpusNll(f.store, f.table, 2), 1e-8);
}

TEST(AblationLossTest, IsPure) {
  const auto lines = testing::SyllableLines(9, 60);
  const Vocabulary v = TrainBpe(testing::Corpus(lines), 55).vocab;
  const Fixture f = Make(lines, v.tokens(), RandomTable(v.size(), 6, 4), 2);
  const auto encoded = f.store.encoded;
  const auto nll = f.store.nll;
  const TokenIndex index = f.index;
  const SkipGramTable table = f.table;
  for (TokenId t = 0; t < static_cast<TokenId>(v.size()); ++t) {
    if (!v.IsSingleChar(t)) ComputeAblationLoss(t, f.store, f.index, f.vocab, f.table, f.cv, 2);
  }
  EXPECT_EQ(encoded, f.store.encoded);
  EXPECT_EQ(nll, f.store.nll);
  EXPECT_EQ(index, f.index);
  EXPECT_EQ(table, f.table);
}

}  // namespace
}  // namespace sagetok
