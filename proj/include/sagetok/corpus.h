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

#ifndef SAGETOK_CORPUS_H_
#define SAGETOK_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sagetok/common.h"

namespace sagetok {

class CompiledVocab;
class Vocabulary;

struct NormalizationPolicy {
  bool lowercase = false;  // ASCII only
  bool collapse_whitespace = true;
};

// One sentence per line, whitespace-normalized, no empty lines.
struct RawCorpus {
  std::vector<std::string> lines;

  std::size_t size() const { return lines.size(); }
  bool empty() const { return lines.empty(); }
  std::uint64_t Hash() const;
};

std::string NormalizeLine(std::string_view line, const NormalizationPolicy& policy);

// Reads a UTF-8 file. Throws kData on an unreadable file, invalid UTF-8
// (naming the line) or when no non-empty line remains.
RawCorpus LoadCorpus(const std::filesystem::path& path,
                     const NormalizationPolicy& policy = {});

// Same normalization and validation as LoadCorpus, for in-memory text.
RawCorpus CorpusFromLines(std::span<const std::string> lines,
                          const NormalizationPolicy& policy = {});

struct PretokenizedSentence {
  std::vector<std::string> words;  // each begins with kBoundaryMarker

  bool operator==(const PretokenizedSentence&) const = default;
};

PretokenizedSentence Pretokenize(std::string_view line);

// Inverse of Pretokenize: strips one marker per word and joins with spaces.
std::string JoinWords(const PretokenizedSentence& sentence);

// Token ids of one sentence. word_starts[j] is the index in `ids` of the
// first token of word j. UNK ids are paired, in order, with the source
// characters concatenated in `unk_chars`.
struct EncodedSentence {
  std::vector<TokenId> ids;
  std::vector<std::uint32_t> word_starts;
  std::string unk_chars;

  bool operator==(const EncodedSentence&) const = default;
};

// The corpus under the current vocabulary, with one cached negative
// log-likelihood per sentence.
struct SentenceStore {
  std::vector<PretokenizedSentence> source;
  std::vector<EncodedSentence> encoded;
  std::vector<double> nll;
  std::uint64_t vocab_hash = 0;

  std::size_t size() const { return encoded.size(); }
  std::size_t TokenCount() const;
  // Sum of cached values in sentence order.
  double CachedTotal() const;
};

// Concatenated token strings, UNKs replaced by their source characters.
std::vector<std::string> DecodeWords(const EncodedSentence& sentence,
                                     const Vocabulary& vocab);
std::string DecodeLine(const EncodedSentence& sentence, const Vocabulary& vocab);

// Inverted index over a SentenceStore. `frequency` counts occurrences.
struct TokenIndex {
  std::vector<std::vector<SentenceId>> postings;
  std::vector<std::int64_t> frequency;

  bool operator==(const TokenIndex&) const = default;
  std::span<const SentenceId> Postings(TokenId id) const {
    return static_cast<std::size_t>(id) < postings.size()
               ? std::span<const SentenceId>(postings[id])
               : std::span<const SentenceId>();
  }
};

// `id_space` is the number of token ids the store may reference.
TokenIndex BuildIndex(const SentenceStore& store, std::size_t id_space);

using SentenceScorer = std::function<double(std::span<const TokenId>)>;

struct RetokenizeResult {
  double delta = 0.0;                 // new total minus old total
  std::vector<SentenceId> affected;   // re-encoded sentences, ascending
};

// Re-encodes only sentences that contain a token in `removed`, using `cv`
// (which must no longer contain them), and refreshes their postings,
// frequencies and cached scores. Throws kInvariant when a removed token is a
// single character or still present in `cv`.
RetokenizeResult RetokenizeSentences(SentenceStore& store, TokenIndex& index,
                                     std::span<const TokenId> removed,
                                     const Vocabulary& vocab,
                                     const CompiledVocab& cv,
                                     const SentenceScorer& scorer);

// Score change from removing `token`: re-encodes (without it) only the
// sentences in its postings and sums scorer(new) - cached over them in
// ascending sentence order. The store is not modified.
double ScoreRemoval(TokenId token, const SentenceStore& store,
                    const TokenIndex& index, const CompiledVocab& cv,
                    const SentenceScorer& scorer);

// Recomputes every cached score. Returns the total.
double RescoreStore(SentenceStore& store, const SentenceScorer& scorer,
                    int threads = 1);

}  // namespace sagetok

#endif  // SAGETOK_CORPUS_H_
