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

#include "sagetok/encoder.h"

#include <random>
#include <set>

#include "gtest/gtest.h"
#include "oracles.h"
#include "sagetok/utf8.h"
#include "sagetok/vocabulary.h"
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

std::vector<std::string> Segment(const std::string& word, const Vocabulary& v) {
  std::vector<TokenId> ids;
  std::string unk;
  EncodeWord(word, CompiledVocab::Compile(v), ids, unk);
  std::vector<std::string> out;
  for (TokenId id : ids) out.push_back(id == kUnkId ? "<unk>" : v.token(id));
  return out;
}

// Random vocabulary over a small alphabet, alphabet included.
std::vector<std::string> RandomTokens(std::mt19937_64& rng,
                                      const std::vector<std::string>& alphabet,
                                      std::size_t extra, std::size_t max_len) {
  std::set<std::string> seen(alphabet.begin(), alphabet.end());
  std::vector<std::string> tokens(alphabet.begin(), alphabet.end());
  for (std::size_t tries = 0; tokens.size() < alphabet.size() + extra && tries < 10000;
       ++tries) {
    std::string t = rng() % 2 ? kM : "";
    const std::size_t len = 1 + rng() % max_len;
    for (std::size_t i = 0; i < len; ++i) t += alphabet[rng() % alphabet.size()];
    if (seen.insert(t).second) tokens.push_back(t);
  }
  return tokens;
}

TEST(CompiledVocabTest, LongestPrefix) {
  const Vocabulary v = MakeVocab({kM, "a", "b", kM + "a", kM + "ab"});
  const CompiledVocab cv = CompiledVocab::Compile(v);
  const auto m = cv.LongestPrefix(kM + "abb");
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(kM + "ab", v.token(m->id));
  EXPECT_EQ((kM + "ab").size(), m->length);
  EXPECT_FALSE(cv.LongestPrefix("").has_value());
  EXPECT_FALSE(cv.LongestPrefix("zz").has_value());
  EXPECT_EQ(5, cv.token_count());
}

TEST(CompiledVocabTest, ExclusionSkipsTokens) {
  const Vocabulary v = MakeVocab({kM, "a", "b", kM + "a", kM + "ab"});
  const CompiledVocab cv = CompiledVocab::Compile(v);
  const std::vector<TokenId> excluded{4};
  const auto m = cv.LongestPrefix(kM + "abb", excluded);
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(kM + "a", v.token(m->id));
}

TEST(CompiledVocabTest, ActiveMaskKeepsIdSpace) {
  const Vocabulary v = MakeVocab({kM, "a", "b", kM + "a", kM + "ab"});
  const CompiledVocab cv = CompiledVocab::Compile(v, {true, true, true, true, false});
  EXPECT_EQ(5, cv.id_space());
  EXPECT_EQ(4, cv.token_count());
  EXPECT_FALSE(cv.Contains(4));
  EXPECT_TRUE(cv.Contains(3));
  EXPECT_EQ(3, cv.LongestPrefix(kM + "ab")->id);
  EXPECT_EQ(v.Hash(), cv.vocab_hash());
}

TEST(CompiledVocabTest, RejectsDuplicateRawTokens) {
  const std::vector<std::string> dup{"a", "b", "a"};
  EXPECT_THROW(CompiledVocab::Compile(dup), Error);
  const std::vector<std::string> empty{"a", ""};
  EXPECT_THROW(CompiledVocab::Compile(empty), Error);
}

TEST(CompiledVocabTest, MatchesNaiveScanOnRandomVocabularies) {
  std::mt19937_64 rng(2024);
  const std::vector<std::string> alphabet{kM, "a", "b", "c", "\xC3\xA9"};
  for (int trial = 0; trial < 1000; ++trial) {
    const auto tokens = RandomTokens(rng, alphabet, 1 + rng() % 30, 5);
    std::vector<bool> active(tokens.size(), true);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (rng() % 5 == 0) active[i] = false;
    }
    const Vocabulary v = MakeVocab(tokens);
    const CompiledVocab cv = CompiledVocab::Compile(v, active);
    std::string query = rng() % 2 ? kM : "";
    const std::size_t len = rng() % 8;
    for (std::size_t i = 0; i < len; ++i) query += alphabet[rng() % alphabet.size()];

    int best = -1;
    std::size_t best_len = 0;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (active[t] && tokens[t].size() > best_len && query.starts_with(tokens[t])) {
        best = static_cast<int>(t);
        best_len = tokens[t].size();
      }
    }
    const auto m = cv.LongestPrefix(query);
    if (best < 0) {
      EXPECT_FALSE(m.has_value()) << query;
    } else {
      ASSERT_TRUE(m.has_value()) << query;
      EXPECT_EQ(best, m->id) << query;
      EXPECT_EQ(best_len, m->length);
    }
  }
}

TEST(EncoderTest, GreedyLongestMatch) {
  const Vocabulary v = MakeVocab({kM, "d", "e", "g", "n", "o", "p", "s", "u", kM + "pseud",
                                  "ogene", "og", "ene"});
  EXPECT_EQ((std::vector<std::string>{kM + "pseud", "ogene"}), Segment(kM + "pseudogene", v));
}

TEST(EncoderTest, CharactersOnlyVocabulary) {
  const Vocabulary v = MakeVocab({kM, "a", "b"});
  EXPECT_EQ((std::vector<std::string>{kM, "a", "b", "b"}), Segment(kM + "abb", v));
}

TEST(EncoderTest, UnknownCharacterKeepsSource) {
  const Vocabulary v = MakeVocab({kM, "x", "y", kM + "x"});
  std::vector<TokenId> ids;
  std::string unk;
  EncodeWord(kM + "x\xC2\xA4y", CompiledVocab::Compile(v), ids, unk);
  ASSERT_EQ(3, ids.size());
  EXPECT_EQ(3, ids[0]);
  EXPECT_EQ(kUnkId, ids[1]);
  EXPECT_EQ(2, ids[2]);
  EXPECT_EQ("\xC2\xA4", unk);
}

TEST(EncoderTest, EmptyWordAndCorpus) {
  const Vocabulary v = MakeVocab({kM, "a"});
  EXPECT_TRUE(Segment("", v).empty());
  const SentenceStore store = EncodeCorpus(RawCorpus{}, CompiledVocab::Compile(v));
  EXPECT_EQ(0, store.size());
}

TEST(EncoderTest, MatchesNaiveEncoderAndRoundTrips) {
  std::mt19937_64 rng(99);
  const std::vector<std::string> alphabet{"a", "b", "c", "\xC3\xA9"};
  std::vector<std::string> with_marker = alphabet;
  with_marker.push_back(kM);
  for (int trial = 0; trial < 200; ++trial) {
    const auto tokens = RandomTokens(rng, with_marker, 1 + rng() % 25, 4);
    std::vector<bool> active(tokens.size(), true);
    const Vocabulary v = MakeVocab(tokens);
    const CompiledVocab cv = CompiledVocab::Compile(v);
    // Lines may carry characters outside the alphabet.
    const auto lines = testing::RandomLines(trial, 5, {"a", "b", "c", "\xC3\xA9", "\xE2\x82\xAC"});
    for (const auto& line : lines) {
      const EncodedSentence e = EncodeSentence(Pretokenize(line), cv);
      const auto expect = oracle::EncodeLine(line, tokens, active);
      ASSERT_EQ(expect, std::vector<int>(e.ids.begin(), e.ids.end())) << line;
      EXPECT_EQ(line, DecodeLine(e, v));
    }
  }
}

TEST(EncoderTest, GreedyDominance) {
  // No emitted token can be extended to a longer active token at its place.
  std::mt19937_64 rng(5);
  const std::vector<std::string> alphabet{kM, "a", "b", "c"};
  for (int trial = 0; trial < 100; ++trial) {
    const auto tokens = RandomTokens(rng, alphabet, 20, 4);
    const Vocabulary v = MakeVocab(tokens);
    const CompiledVocab cv = CompiledVocab::Compile(v);
    for (const auto& line : testing::RandomLines(trial, 4, {"a", "b", "c"})) {
      for (const auto& word : Pretokenize(line).words) {
        std::vector<TokenId> ids;
        std::string unk;
        EncodeWord(word, cv, ids, unk);
        std::size_t pos = 0;
        for (TokenId id : ids) {
          const std::string& tok = v.token(id);
          for (const auto& other : tokens) {
            if (other.size() > tok.size()) {
              EXPECT_NE(0, word.compare(pos, other.size(), other));
            }
          }
          pos += tok.size();
        }
      }
    }
  }
}

TEST(EncoderTest, ReencodeExcludingMatchesFreshEncode) {
  std::mt19937_64 rng(8);
  const std::vector<std::string> alphabet{kM, "a", "b", "c"};
  for (int trial = 0; trial < 100; ++trial) {
    const auto tokens = RandomTokens(rng, alphabet, 15, 4);
    const Vocabulary v = MakeVocab(tokens);
    const CompiledVocab cv = CompiledVocab::Compile(v);
    std::vector<TokenId> excluded;
    std::vector<bool> active(tokens.size(), true);
    for (std::size_t t = alphabet.size(); t < tokens.size(); ++t) {
      if (rng() % 3 == 0) {
        excluded.push_back(static_cast<TokenId>(t));
        active[t] = false;
      }
    }
    const CompiledVocab without = CompiledVocab::Compile(v, active);
    for (const auto& line : testing::RandomLines(trial, 4, {"a", "b", "c", "d"})) {
      const auto p = Pretokenize(line);
      const EncodedSentence before = EncodeSentence(p, cv);
      EXPECT_EQ(EncodeSentence(p, without), ReencodeExcluding(p, before, cv, excluded));
    }
  }
}

TEST(EncoderTest, ParallelEncodingIsDeterministic) {
  const auto lines = testing::SyllableLines(1, 500);
  const RawCorpus corpus = testing::Corpus(lines);
  const Vocabulary v = MakeVocab(
      {kM, "a", "b", "e", "i", "k", "l", "m", "n", "o", "r", "s", "t", "u", kM + "ka", "ro"});
  const CompiledVocab cv = CompiledVocab::Compile(v);
  EXPECT_EQ(EncodeCorpus(corpus, cv, 1).encoded, EncodeCorpus(corpus, cv, 4).encoded);
}

}  // namespace
}  // namespace sagetok
