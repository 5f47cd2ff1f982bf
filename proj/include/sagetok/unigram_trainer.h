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

#ifndef SAGETOK_UNIGRAM_TRAINER_H_
#define SAGETOK_UNIGRAM_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sagetok/corpus.h"
#include "sagetok/parallel.h"
#include "sagetok/vocabulary.h"

namespace sagetok {

// Unigram probabilities indexed by token id.
struct UnigramModel {
  Vocabulary vocab;
  std::vector<double> probs;
};

// Pseudo-count given to tokens the current tokenization never emits, so
// every probability stays positive. Such tokens have zero ablation loss and
// are pruned first.
inline constexpr double kZeroCountPseudo = 0.5;

// Every substring of a marker-prefixed word of at most `max_len` characters
// that occurs at least `min_count` times (occurrences weighted by word
// frequency), plus the full alphabet. Order: alphabet byte-sorted, then
// substrings by descending count, ties byte-sorted.
Vocabulary InitSubstringVocab(const RawCorpus& corpus, std::size_t max_len = 16,
                              std::int64_t min_count = 2);

// Maximum-likelihood count(t) / total over the store (zero-count tokens get
// kZeroCountPseudo before normalizing). Ids outside `active` get 0.
std::vector<double> FitUnigramProbs(const SentenceStore& store,
                                    const std::vector<bool>& active);

// Sum over sentences and tokens of log probs[id]. Throws kData on a token
// with zero probability (including UNK).
double CorpusLogLik(const SentenceStore& store, std::span<const double> probs);

// -sum log probs[id] of one sentence.
SentenceScorer UnigramScorer(std::span<const double> probs);

struct UnigramOptions {
  std::size_t max_len = 16;
  std::int64_t min_count = 2;
  int threads = DefaultThreads();
  // Called with the tokens pruned in each batch.
  std::function<void(std::size_t iteration, const std::vector<std::string>&)> on_batch;
};

struct UnigramResult {
  UnigramModel model;
  std::vector<std::vector<std::string>> batches;
};

// Top-down pruning from the substring vocabulary. Each iteration scores
// every multi-character token by the increase in corpus negative
// log-likelihood its removal would cause (greedy re-encoding, probabilities
// held fixed), drops the min(batch, |V| - target) cheapest (ties: lower
// frequency, then byte order), re-encodes and refits.
UnigramResult TrainUnigram(const RawCorpus& corpus, std::size_t target_size,
                           std::size_t batch, const UnigramOptions& options = {});

// Same loop from a caller-supplied initial vocabulary.
UnigramResult TrainUnigramFrom(const RawCorpus& corpus, const Vocabulary& initial,
                               std::size_t target_size, std::size_t batch,
                               const UnigramOptions& options = {});

// TSV "token<TAB>log-prob".
void WriteLogProbFile(const std::filesystem::path& path, const UnigramModel& model);

}  // namespace sagetok

#endif  // SAGETOK_UNIGRAM_TRAINER_H_
