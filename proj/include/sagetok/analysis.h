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

#ifndef SAGETOK_ANALYSIS_H_
#define SAGETOK_ANALYSIS_H_

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sagetok/corpus.h"
#include "sagetok/encoder.h"
#include "sagetok/parallel.h"
#include "sagetok/vocabulary.h"

namespace sagetok {

struct Histogram {
  std::map<std::int64_t, std::int64_t> buckets;
  std::int64_t total = 0;

  void Add(std::int64_t key, std::int64_t count = 1);
  void Merge(const Histogram& other);
  double Mean() const;
  // Share of the total mass with lo <= key <= hi.
  double Fraction(std::int64_t lo, std::int64_t hi) const;

  bool operator==(const Histogram&) const = default;
};

// Characters in `token`, not counting a leading boundary marker.
std::size_t TokenLength(std::string_view token);
bool IsWordInitial(std::string_view token);

// Keyed by TokenLength.
Histogram TokenLengthHist(const Vocabulary& vocab);

// Keyed by the number of tokens each word occurrence is split into.
Histogram FertilityHist(const SentenceStore& store);
Histogram FertilityHist(const RawCorpus& corpus, const CompiledVocab& cv,
                        int threads = DefaultThreads());

struct TokenStatRow {
  TokenId id = -1;
  std::string token;
  std::int64_t frequency = 0;
  std::int64_t distinct_neighbors = 0;
  double ratio = 0.0;  // distinct_neighbors / frequency
  bool word_initial = false;
};

struct TokenStatsTable {
  int window = 0;
  std::vector<TokenStatRow> rows;  // tokens with frequency > 0, by id
  std::int64_t unk_count = 0;      // UNK occurrences, not in `rows`

  // Unweighted mean of ratio over rows.
  double MeanRatio() const;
};

// Neighbors of a token are the distinct ids at distance 1..window from any
// of its occurrences within a sentence, in either direction. A token may be
// its own neighbor. UNK positions are neither counted nor neighbors.
TokenStatsTable TokenStats(const SentenceStore& store, const Vocabulary& vocab,
                           int window, int threads = DefaultThreads());
TokenStatsTable TokenStats(const RawCorpus& corpus, const Vocabulary& vocab,
                           int window, int threads = DefaultThreads());

struct FrequencyDiffEntry {
  std::string token;
  std::int64_t freq_a = 0;
  std::int64_t freq_b = 0;
};

struct FrequencyDiff {
  std::vector<FrequencyDiffEntry> more_in_a;  // by freq_a - freq_b, descending
  std::vector<FrequencyDiffEntry> more_in_b;  // by freq_b - freq_a, descending
};

// Tokens whose frequency differs between the two tables (matched by
// string), at most `top_n` per side. Ties are byte-ordered.
FrequencyDiff ComputeFrequencyDiff(const TokenStatsTable& a, const TokenStatsTable& b,
                                   std::size_t top_n);

struct ExclusiveSide {
  std::vector<std::string> tokens;  // in source vocabulary order
  double word_initial_fraction = 0.0;
  Histogram lengths;
  double length_2_3_fraction = 0.0;
  double length_5_plus_fraction = 0.0;
};

struct VocabDiff {
  std::size_t size_a = 0;
  std::size_t size_b = 0;
  std::size_t intersection = 0;
  ExclusiveSide a_only;
  ExclusiveSide b_only;
};

VocabDiff ComputeVocabDiff(const Vocabulary& a, const Vocabulary& b);

struct Efficiency {
  std::int64_t tokens = 0;
  std::int64_t words = 0;
  std::int64_t unk = 0;
  double tokens_per_word = 0.0;
};

Efficiency ComputeEfficiency(const SentenceStore& store);
Efficiency ComputeEfficiency(const RawCorpus& corpus, const CompiledVocab& cv,
                             int threads = DefaultThreads());

struct AnalysisReport {
  Histogram token_length;
  Histogram fertility;
  Efficiency efficiency;
  std::vector<TokenStatsTable> stats;  // one per window
};

// One encoding pass of `corpus` under `vocab`, then every statistic above.
AnalysisReport Analyze(const Vocabulary& vocab, const RawCorpus& corpus,
                       const std::vector<int>& windows = {5, 2},
                       int threads = DefaultThreads());

// RFC 4180 quoting when needed.
std::string CsvField(std::string_view s);

void WriteHistogramCsv(std::ostream& out, const Histogram& hist, std::string_view key_name);
// token,id,frequency,distinct_neighbors,ratio,word_initial
void WriteTokenStatsCsv(std::ostream& out, const TokenStatsTable& table);
// side,token,freq_a,freq_b
void WriteFrequencyDiffCsv(std::ostream& out, const FrequencyDiff& diff);

// JSON summaries (means, fractions, totals, histograms).
std::string AnalysisSummaryJson(const AnalysisReport& report);
std::string VocabDiffJson(const VocabDiff& diff);

}  // namespace sagetok

#endif  // SAGETOK_ANALYSIS_H_
