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

#ifndef SAGETOK_EMBEDDINGS_H_
#define SAGETOK_EMBEDDINGS_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "sagetok/common.h"
#include "sagetok/corpus.h"
#include "sagetok/vocabulary.h"

namespace sagetok {

struct EmbedConfig {
  int dim = 50;
  int window = 5;
  int negatives = 15;
  int epochs = 5;
  double initial_lr = 0.025;
  double final_lr = 0.025 * 1e-4;
  std::uint64_t seed = 1;
  // 1 = serial and bit-reproducible; more threads train lock-free
  // ("hogwild") and are not reproducible.
  int threads = 1;

  void Validate() const;
};

// Target and context embeddings, one row per id of the vocabulary they
// were built for.
struct SkipGramTable {
  std::size_t rows = 0;
  int dim = 0;
  int window = 0;
  std::uint64_t vocab_hash = 0;
  std::vector<float> target;   // rows x dim, row-major
  std::vector<float> context;  // rows x dim, row-major

  std::span<const float> Target(TokenId id) const {
    return {target.data() + static_cast<std::size_t>(id) * dim,
            static_cast<std::size_t>(dim)};
  }
  std::span<const float> Context(TokenId id) const {
    return {context.data() + static_cast<std::size_t>(id) * dim,
            static_cast<std::size_t>(dim)};
  }

  bool operator==(const SkipGramTable&) const = default;
};

// Target rows uniform in [-0.5/dim, 0.5/dim], context rows zero.
SkipGramTable InitTables(std::size_t vocab_size, const EmbedConfig& cfg);

// Skipgram with negative sampling over `store` (tokenized under an id space
// of `vocab_size` ids). Positive pairs are every (target, context) within
// cfg.window inside a sentence; negatives are drawn from unigram^0.75 of the
// store's token counts. UNK positions are skipped.
SkipGramTable TrainEmbeddings(const SentenceStore& store, std::size_t vocab_size,
                              const EmbedConfig& cfg);

// Rows follow `new_vocab` order; each row is copied from the same token in
// `old_vocab`. Throws kInvariant if a token of `new_vocab` is missing.
SkipGramTable RemapTables(const SkipGramTable& table, const Vocabulary& old_vocab,
                          const Vocabulary& new_vocab);

// Binary dump: "SGTB", u32 version, u64 vocab hash, u64 rows, u32 dim,
// u32 window, then target then context as row-major float32.
std::string SerializeTable(const SkipGramTable& table);
SkipGramTable DeserializeTable(std::string_view bytes);
void WriteTableFile(const std::filesystem::path& path, const SkipGramTable& table);
SkipGramTable ReadTableFile(const std::filesystem::path& path);

}  // namespace sagetok

#endif  // SAGETOK_EMBEDDINGS_H_
