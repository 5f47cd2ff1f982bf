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

#ifndef SAGETOK_SAGE_TRAINER_H_
#define SAGETOK_SAGE_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sagetok/corpus.h"
#include "sagetok/embeddings.h"
#include "sagetok/encoder.h"
#include "sagetok/parallel.h"
#include "sagetok/vocabulary.h"

namespace sagetok {

enum class BaseTrainer { kBpe, kUnigram, kExternal };

std::string_view BaseTrainerName(BaseTrainer b);
BaseTrainer ParseBaseTrainer(std::string_view name);

struct SageConfig {
  std::size_t final_size = 16000;          // V
  double overshoot = 1.25;                 // n
  std::size_t prune_batch = 100;           // k
  std::size_t recalc_period = 10;          // m
  std::size_t candidate_set_size = 1500;   // M
  std::size_t embed_period = 4;            // l; 0 = never retrain
  int window = 5;                          // objective window
  EmbedConfig embed;
  BaseTrainer base = BaseTrainer::kBpe;
  std::filesystem::path initial_vocab;     // for BaseTrainer::kExternal
  int threads = DefaultThreads();          // candidate scoring

  // ceil(n * V).
  std::size_t InitialSize() const;

  // Throws kConfig listing every violated constraint.
  void Validate() const;

  // Fingerprint of everything that affects the result. Thread counts and
  // paths are excluded.
  std::uint64_t Hash() const;
};

struct PruneEvent {
  std::size_t iteration = 0;
  bool full_recalc = false;
  bool forced_recalc = false;   // bottom set ran short before the period ended
  bool retrained = false;
  std::size_t evaluations = 0;  // ablation losses computed this iteration
  std::vector<std::string> tokens;
  std::vector<double> losses;
  std::vector<std::int64_t> frequencies;
  std::size_t vocab_size = 0;   // after pruning
  double total_nll = 0.0;       // after pruning, cache-maintained

  bool operator==(const PruneEvent&) const = default;
};

struct BottomEntry {
  TokenId id = -1;
  double loss = 0.0;
  bool operator==(const BottomEntry&) const = default;
};

// Ids live in the space of `vocab`, which still holds pruned tokens (with
// active[id] false) until the next embedding retrain compacts it.
struct PruneState {
  std::size_t iteration = 0;
  Vocabulary initial;
  Vocabulary vocab;
  std::vector<bool> active;
  std::size_t active_count = 0;
  CompiledVocab cv;
  SentenceStore store;
  TokenIndex index;
  SkipGramTable table;
  std::vector<BottomEntry> bottom;  // ascending by (loss, frequency, token)
  std::vector<PruneEvent> events;
  std::size_t retrain_count = 0;
  double total_nll = 0.0;
  std::uint64_t config_hash = 0;
  std::uint64_t corpus_hash = 0;

  // The surviving tokens in id order.
  Vocabulary ActiveVocab() const;
};

// Vocabulary of size InitialSize() from the configured base trainer, or the
// external file.
Vocabulary BuildBaseVocab(const RawCorpus& corpus, const SageConfig& cfg);

// Encodes the corpus under `base`, indexes it, trains the first embedding
// table and caches sentence scores. Throws kConfig if `base` has fewer than
// V tokens, fewer single characters than V allows, or misses a corpus
// character.
PruneState InitState(const RawCorpus& corpus, const SageConfig& cfg,
                     const Vocabulary& base);
PruneState InitState(const RawCorpus& corpus, const SageConfig& cfg);

// One pass of the pruning loop. Requires active_count > V.
void PruneIteration(PruneState& state, const SageConfig& cfg);

struct SageHooks {
  std::function<void(const PruneEvent&)> on_event;
  std::filesystem::path checkpoint_path;  // empty = no checkpoints
  std::size_t checkpoint_every = 0;       // iterations; 0 = only at the end
  std::optional<std::size_t> stop_after;  // stop once state.iteration reaches it
};

struct SageResult {
  Vocabulary vocab;
  Vocabulary initial;
  std::vector<PruneEvent> events;
  bool completed = false;
};

// Runs PruneIteration until the vocabulary has V tokens (or stop_after).
SageResult RunSage(PruneState& state, const SageConfig& cfg, const SageHooks& hooks = {});
SageResult TrainSage(const RawCorpus& corpus, const SageConfig& cfg,
                     const SageHooks& hooks = {});
// Continues from a checkpoint. Throws kConfig if it was written for another
// configuration or corpus.
SageResult ResumeSage(const RawCorpus& corpus, const SageConfig& cfg,
                      const std::filesystem::path& checkpoint,
                      const SageHooks& hooks = {});

// CBOR document with the id-space vocabulary, active mask, bottom set,
// events, counters, hashes and the embedding table.
void SaveCheckpoint(const std::filesystem::path& path, const PruneState& state);
// Restores the state; the store and index are rebuilt from `corpus`.
PruneState LoadCheckpoint(const std::filesystem::path& path, const RawCorpus& corpus,
                          const SageConfig& cfg);

std::string EventToJson(const PruneEvent& event);
PruneEvent EventFromJson(std::string_view line);
void WriteEventLog(const std::filesystem::path& path, std::span<const PruneEvent> events);
std::vector<PruneEvent> ReadEventLog(const std::filesystem::path& path);

// Applies the pruning batches of `events` to `initial`.
Vocabulary ReplayEvents(const Vocabulary& initial, std::span<const PruneEvent> events);

}  // namespace sagetok

#endif  // SAGETOK_SAGE_TRAINER_H_
