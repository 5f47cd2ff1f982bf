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

#include "sagetok/analysis.h"

#include <set>
#include <sstream>

#include "gtest/gtest.h"
#include "json.hpp"
#include "oracles.h"
#include "sagetok/bpe_trainer.h"
#include "sagetok/encoder.h"
#include "sagetok/utf8.h"
#include "test_util.h"

namespace sagetok {
namespace {

using testing::kM;

Vocabulary MakeVocab(const std::vector<std::string>& tokens) {
  Vocabulary v;
  for (const auto& t : tokens) {
    v.Add(t, utf8::CharCount(t) == 1 ? Provenance::kAlphabet : Provenance::kMerged);
  }
  return v;
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

TEST(HistogramTest, Basics) {
  Histogram h;
  h.Add(1, 3);
  h.Add(4);
  Histogram g;
  g.Add(4, 2);
  h.Merge(g);
  EXPECT_EQ(6, h.total);
  EXPECT_EQ(3, h.buckets.at(4));
  EXPECT_DOUBLE_EQ((3 + 12) / 6.0, h.Mean());
  EXPECT_DOUBLE_EQ(0.5, h.Fraction(2, 100));
  EXPECT_EQ(0.0, Histogram{}.Mean());
}

TEST(TokenLengthTest, ExcludesMarker) {
  EXPECT_EQ(1, TokenLength(kM + "a"));
  EXPECT_EQ(0, TokenLength(kM));
  EXPECT_EQ(2, TokenLength("\xC3\xA9t"));
  EXPECT_TRUE(IsWordInitial(kM + "ab"));
  EXPECT_FALSE(IsWordInitial("ab"));
  const Histogram h = TokenLengthHist(MakeVocab({kM + "a", "ab", kM + "abc"}));
  EXPECT_EQ((std::map<std::int64_t, std::int64_t>{{1, 1}, {2, 1}, {3, 1}}), h.buckets);
  const Histogram alpha = TokenLengthHist(MakeVocab({"a", "b", "c"}));
  EXPECT_EQ((std::map<std::int64_t, std::int64_t>{{1, 3}}), alpha.buckets);
}

TEST(FertilityTest, Examples) {
  const Vocabulary v = MakeVocab({kM, "a", "b", kM + "a", kM + "ab", kM + "abb"});
  const Histogram whole = FertilityHist(testing::Corpus({"abb ab a", "a"}),
                                        CompiledVocab::Compile(v), 1);
  EXPECT_EQ((std::map<std::int64_t, std::int64_t>{{1, 4}}), whole.buckets);

  const Vocabulary small = MakeVocab({kM, "a", "b", kM + "a"});
  const Histogram split =
      FertilityHist(testing::Corpus({"abb", "abb a"}), CompiledVocab::Compile(small), 1);
  EXPECT_EQ((std::map<std::int64_t, std::int64_t>{{1, 1}, {3, 2}}), split.buckets);
  EXPECT_EQ(3, split.total);  // occurrences, not types
}

TEST(TokenStatsTest, SmallExample) {
  const Vocabulary v = MakeVocab({"A", "B", "C"});
  const TokenStatsTable t = TokenStats(StoreOf({{0, 1, 0}}), v, 1, 1);
  ASSERT_EQ(2, t.rows.size());  // C is absent
  EXPECT_EQ("A", t.rows[0].token);
  EXPECT_EQ(2, t.rows[0].frequency);
  EXPECT_EQ(1, t.rows[0].distinct_neighbors);
  EXPECT_DOUBLE_EQ(0.5, t.rows[0].ratio);
  EXPECT_EQ(1, t.rows[1].frequency);
  EXPECT_EQ(1, t.rows[1].distinct_neighbors);
  EXPECT_DOUBLE_EQ(1.0, t.rows[1].ratio);
  EXPECT_DOUBLE_EQ(0.75, t.MeanRatio());
}

TEST(TokenStatsTest, UnkExcluded) {
  const Vocabulary v = MakeVocab({"A", "B"});
  const TokenStatsTable t = TokenStats(StoreOf({{0, kUnkId, 1}, {kUnkId}}), v, 1, 1);
  EXPECT_EQ(2, t.unk_count);
  ASSERT_EQ(2, t.rows.size());
  EXPECT_EQ(0, t.rows[0].distinct_neighbors);
  EXPECT_EQ(0, t.rows[1].distinct_neighbors);
}

TEST(TokenStatsTest, MatchesBruteForcePairScan) {
  const auto lines = testing::SyllableLines(31, 400);
  const RawCorpus corpus = testing::Corpus(lines);
  const Vocabulary v = TrainBpe(corpus, 90).vocab;
  const SentenceStore store = EncodeCorpus(corpus, CompiledVocab::Compile(v));
  std::vector<std::vector<int>> sentences;
  std::map<int, std::int64_t> freq;
  for (const auto& e : store.encoded) {
    sentences.emplace_back(e.ids.begin(), e.ids.end());
    for (TokenId id : e.ids) ++freq[id];
  }
  ASSERT_LE(store.TokenCount(), 10000);
  for (int w : {1, 2, 5}) {
    const auto neighbors = oracle::Neighbors(sentences, w);
    for (int threads : {1, 3}) {
      const TokenStatsTable t = TokenStats(store, v, w, threads);
      ASSERT_EQ(freq.size(), t.rows.size());
      for (const auto& row : t.rows) {
        EXPECT_EQ(freq.at(row.id), row.frequency);
        const auto it = neighbors.find(row.id);
        const std::int64_t n = it == neighbors.end() ? 0 : it->second.size();
        EXPECT_EQ(n, row.distinct_neighbors) << row.token << " w=" << w;
        EXPECT_EQ(IsWordInitial(row.token), row.word_initial);
      }
    }
  }
}

TEST(FrequencyDiffTest, IdenticalAndConstructed) {
  const RawCorpus corpus = testing::Corpus({"kings rings sings"});
  const std::vector<std::string> alphabet{kM, "g", "i", "k", "n", "r", "s"};
  auto with = alphabet;
  with.push_back("ing");
  with.push_back("ings");
  auto without = alphabet;
  without.push_back("ing");
  const TokenStatsTable a = TokenStats(corpus, MakeVocab(with), 2, 1);
  const TokenStatsTable b = TokenStats(corpus, MakeVocab(without), 2, 1);

  const FrequencyDiff same = ComputeFrequencyDiff(a, a, 10);
  EXPECT_TRUE(same.more_in_a.empty());
  EXPECT_TRUE(same.more_in_b.empty());

  const FrequencyDiff d = ComputeFrequencyDiff(a, b, 10);
  ASSERT_EQ(1, d.more_in_a.size());
  EXPECT_EQ("ings", d.more_in_a[0].token);
  EXPECT_EQ(3, d.more_in_a[0].freq_a);
  EXPECT_EQ(0, d.more_in_a[0].freq_b);
  ASSERT_EQ(2, d.more_in_b.size());
  std::set<std::string> b_side{d.more_in_b[0].token, d.more_in_b[1].token};
  EXPECT_EQ((std::set<std::string>{"ing", "s"}), b_side);
  EXPECT_EQ(1u, ComputeFrequencyDiff(a, b, 1).more_in_b.size());
}

TEST(VocabDiffTest, Examples) {
  const Vocabulary a = MakeVocab({kM + "a", kM + "b"});
  const Vocabulary b = MakeVocab({kM + "a", "bc"});
  const VocabDiff d = ComputeVocabDiff(a, b);
  EXPECT_EQ(1, d.intersection);
  EXPECT_EQ((std::vector<std::string>{kM + "b"}), d.a_only.tokens);
  EXPECT_EQ((std::vector<std::string>{"bc"}), d.b_only.tokens);
  EXPECT_DOUBLE_EQ(1.0, d.a_only.word_initial_fraction);
  EXPECT_DOUBLE_EQ(0.0, d.b_only.word_initial_fraction);
  EXPECT_DOUBLE_EQ(1.0, d.b_only.length_2_3_fraction);

  const VocabDiff same = ComputeVocabDiff(a, a);
  EXPECT_TRUE(same.a_only.tokens.empty());
  EXPECT_TRUE(same.b_only.tokens.empty());
  EXPECT_EQ(2, same.intersection);
  const auto j = nlohmann::json::parse(VocabDiffJson(d));
  EXPECT_EQ(1, j["intersection"].get<int>());
}

TEST(EfficiencyTest, ConsistentWithFertilityAndStats) {
  const Vocabulary one = MakeVocab({kM, "a", kM + "a"});
  const Efficiency e1 = ComputeEfficiency(testing::Corpus({"a"}), CompiledVocab::Compile(one), 1);
  EXPECT_EQ(1, e1.tokens);
  EXPECT_EQ(1, e1.words);
  EXPECT_DOUBLE_EQ(1.0, e1.tokens_per_word);

  const auto lines = testing::SyllableLines(32, 300);
  std::vector<std::string> with_unk = lines;
  with_unk.push_back("ka\xC2\xA4ro z");
  const RawCorpus corpus = testing::Corpus(with_unk);
  const Vocabulary v = TrainBpe(testing::Corpus(lines), 80).vocab;
  const AnalysisReport r = Analyze(v, corpus, {5, 2}, 2);
  std::int64_t mass = 0;
  for (const auto& [k, c] : r.fertility.buckets) mass += k * c;
  EXPECT_EQ(r.efficiency.tokens, mass);
  EXPECT_EQ(r.efficiency.words, r.fertility.total);
  EXPECT_EQ(2, r.efficiency.unk);
  ASSERT_EQ(2, r.stats.size());
  for (const auto& t : r.stats) {
    std::int64_t sum = t.unk_count;
    for (const auto& row : t.rows) sum += row.frequency;
    EXPECT_EQ(r.efficiency.tokens, sum);
  }
  EXPECT_EQ(TokenLengthHist(v), r.token_length);
  const auto summary = nlohmann::json::parse(AnalysisSummaryJson(r));
  EXPECT_TRUE(summary.contains("efficiency"));

  const AnalysisReport again = Analyze(v, corpus, {5, 2}, 1);
  EXPECT_EQ(r.fertility, again.fertility);
  EXPECT_EQ(r.stats[0].MeanRatio(), again.stats[0].MeanRatio());
}

TEST(CsvTest, QuotesFields) {
  EXPECT_EQ("abc", CsvField("abc"));
  EXPECT_EQ("\"a,b\"", CsvField("a,b"));
  EXPECT_EQ("\"say \"\"hi\"\"\"", CsvField("say \"hi\""));
  Histogram h;
  h.Add(2, 5);
  std::ostringstream out;
  WriteHistogramCsv(out, h, "length");
  EXPECT_NE(std::string::npos, out.str().find("length,count"));
  EXPECT_NE(std::string::npos, out.str().find("2,5"));
}

}  // namespace
}  // namespace sagetok
