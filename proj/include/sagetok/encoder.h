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

#ifndef SAGETOK_ENCODER_H_
#define SAGETOK_ENCODER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sagetok/common.h"
#include "sagetok/corpus.h"
#include "sagetok/vocabulary.h"

namespace sagetok {

// Byte trie over a vocabulary answering longest-prefix queries. Ids are the
// ids of the source vocabulary, so a trie compiled from an active subset
// still speaks the full id space.
class CompiledVocab {
 public:
  struct Match {
    TokenId id;
    std::size_t length;  // bytes
  };

  CompiledVocab() = default;

  // Compiles every token of `vocab`.
  static CompiledVocab Compile(const Vocabulary& vocab);
  // Compiles the tokens with active[id] set.
  static CompiledVocab Compile(const Vocabulary& vocab, const std::vector<bool>& active);
  // Compiles a raw token list (ids = positions). Throws kInvariant on
  // duplicates or empty tokens.
  static CompiledVocab Compile(std::span<const std::string> tokens);

  // Longest token that prefixes `text`, skipping ids listed in `excluded`.
  std::optional<Match> LongestPrefix(std::string_view text,
                                     std::span<const TokenId> excluded = {}) const;

  bool Contains(TokenId id) const {
    return static_cast<std::size_t>(id) < contains_.size() && contains_[id];
  }
  std::size_t token_count() const { return token_count_; }
  std::size_t id_space() const { return contains_.size(); }
  std::uint64_t vocab_hash() const { return vocab_hash_; }

 private:
  struct Node {
    TokenId token = -1;
    std::uint32_t first_edge = 0;
    std::uint32_t edge_count = 0;
  };

  void Build(std::span<const std::string> tokens, const std::vector<bool>& active);

  std::vector<Node> nodes_;
  std::vector<unsigned char> edge_label_;
  std::vector<std::uint32_t> edge_target_;
  std::vector<bool> contains_;
  std::size_t token_count_ = 0;
  std::uint64_t vocab_hash_ = 0;
};

// Greedy left-to-right longest match. Appends ids; characters nothing covers
// become kUnkId and their bytes are appended to `unk_chars`.
void EncodeWord(std::string_view word, const CompiledVocab& cv,
                std::vector<TokenId>& ids, std::string& unk_chars,
                std::span<const TokenId> excluded = {});

EncodedSentence EncodeSentence(const PretokenizedSentence& sentence,
                               const CompiledVocab& cv,
                               std::span<const TokenId> excluded = {});

// Pretokenizes and encodes every line. Cached scores are zero-filled.
SentenceStore EncodeCorpus(const RawCorpus& corpus, const CompiledVocab& cv,
                           int threads = 1);

// Re-encodes the already pretokenized sentences of `store` under `cv`.
void ReencodeStore(SentenceStore& store, const CompiledVocab& cv, int threads = 1);

// Re-encodes `sentence` with `excluded` removed, touching only words that
// contain one of them. Other words keep their ids.
EncodedSentence ReencodeExcluding(const PretokenizedSentence& source,
                                  const EncodedSentence& sentence,
                                  const CompiledVocab& cv,
                                  std::span<const TokenId> excluded);

}  // namespace sagetok

#endif  // SAGETOK_ENCODER_H_
