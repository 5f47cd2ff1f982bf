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

#ifndef SAGETOK_BPE_TRAINER_H_
#define SAGETOK_BPE_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sagetok/corpus.h"
#include "sagetok/vocabulary.h"

namespace sagetok {

struct MergeRecord {
  std::string left;
  std::string right;
  std::string result;  // left + right
  std::int64_t count = 0;

  bool operator==(const MergeRecord&) const = default;
};

struct BpeResult {
  Vocabulary vocab;
  std::vector<MergeRecord> merges;
  // Set when no pair reached kMinMergeCount before target_size.
  bool stopped_early = false;
};

inline constexpr std::int64_t kMinMergeCount = 2;

// Word types of the pretokenized corpus (marker-prefixed) with counts.
std::map<std::string, std::int64_t> CountWords(const RawCorpus& corpus);

// Distinct characters of the pretokenized corpus, byte-wise sorted.
std::vector<std::string> CorpusAlphabet(const RawCorpus& corpus);

// Bottom-up merges over word-type counts until the vocabulary reaches
// `target_size`. Ties between equally frequent pairs go to the
// lexicographically smaller (left, right). Vocabulary order: sorted alphabet,
// then merges in the order they were made.
BpeResult TrainBpe(const RawCorpus& corpus, std::size_t target_size);

// Symbolized word types: each word is a sequence of token strings.
using WordSymbols = std::map<std::vector<std::string>, std::int64_t>;

// One step over `words`: finds the most frequent adjacent pair (same
// tie-break), replaces every occurrence left to right and returns the
// record. Throws kData if no adjacent pair exists.
MergeRecord MergeStep(WordSymbols& words);

// Merge log TSV: "left<TAB>right<TAB>count" per line.
void WriteMergeLog(const std::filesystem::path& path,
                   const std::vector<MergeRecord>& merges);

}  // namespace sagetok

#endif  // SAGETOK_BPE_TRAINER_H_
