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

#include "sagetok/sage_trainer.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <unordered_set>

#include "json.hpp"
#include "sagetok/bpe_trainer.h"
#include "sagetok/sage_objective.h"
#include "sagetok/unigram_trainer.h"

namespace sagetok {
namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view kCheckpointFormat = "sagetok-checkpoint";
constexpr int kCheckpointVersion = 1;

std::uint64_t RetrainSeed(std::uint64_t seed, std::size_t retrain) {
  Fingerprint fp;
  fp.UpdateU64(seed);
  fp.UpdateU64(retrain);
  return fp.value();
}

SkipGramTable Retrain(const PruneState& state, const SageConfig& cfg) {
  EmbedConfig ecfg = cfg.embed;
  ecfg.seed = RetrainSeed(cfg.embed.seed, state.retrain_count);
  return TrainEmbeddings(state.store, state.vocab.size(), ecfg);
}

// Drops inactive ids and renumbers the store, index and bottom set.
void Compact(PruneState& state) {
  std::vector<TokenId> remap(state.vocab.size(), -1);
  TokenId next = 0;
  for (std::size_t id = 0; id < remap.size(); ++id) {
    if (state.active[id]) remap[id] = next++;
  }
  Vocabulary compact = state.vocab.Subset(state.active);
  for (auto& s : state.store.encoded) {
    for (TokenId& id : s.ids) {
      if (id == kUnkId) continue;
      if (remap[id] < 0) ThrowInvariant("store references a pruned token");
      id = remap[id];
    }
  }
  TokenIndex index;
  index.postings.resize(compact.size());
  index.frequency.resize(compact.size());
  for (std::size_t id = 0; id < remap.size(); ++id) {
    if (remap[id] < 0) continue;
    index.postings[remap[id]] = std::move(state.index.postings[id]);
    index.frequency[remap[id]] = state.index.frequency[id];
  }
  for (auto& b : state.bottom) b.id = remap[b.id];
  state.index = std::move(index);
  state.vocab = std::move(compact);
  state.active.assign(state.vocab.size(), true);
  state.cv = CompiledVocab::Compile(state.vocab, state.active);
  state.store.vocab_hash = state.cv.vocab_hash();
}

void SortEntries(std::vector<BottomEntry>& entries, const PruneState& state) {
  std::sort(entries.begin(), entries.end(),
            [&](const BottomEntry& a, const BottomEntry& b) {
              if (a.loss != b.loss) return a.loss < b.loss;
              const auto fa = state.index.frequency[a.id];
              const auto fb = state.index.frequency[b.id];
              if (fa != fb) return fa < fb;
              return state.vocab.token(a.id) < state.vocab.token(b.id);
            });
}

ojson EventJson(const PruneEvent& e) {
  ojson pruned = ojson::array();
  for (std::size_t i = 0; i < e.tokens.size(); ++i) {
    pruned.push_back(ojson{{"token", e.tokens[i]},
                           {"loss", e.losses[i]},
                           {"frequency", e.frequencies[i]}});
  }
  return ojson{{"iteration", e.iteration},
               {"full_recalc", e.full_recalc},
               {"forced_recalc", e.forced_recalc},
               {"retrained", e.retrained},
               {"evaluations", e.evaluations},
               {"pruned", std::move(pruned)},
               {"vocab_size", e.vocab_size},
               {"total_nll", e.total_nll}};
}

PruneEvent EventFrom(const ojson& j) {
  PruneEvent e;
  e.iteration = j.at("iteration").get<std::size_t>();
  e.full_recalc = j.at("full_recalc").get<bool>();
  e.forced_recalc = j.at("forced_recalc").get<bool>();
  e.retrained = j.at("retrained").get<bool>();
  e.evaluations = j.at("evaluations").get<std::size_t>();
  for (const auto& p : j.at("pruned")) {
    e.tokens.push_back(p.at("token").get<std::string>());
    e.losses.push_back(p.at("loss").get<double>());
    e.frequencies.push_back(p.at("frequency").get<std::int64_t>());
  }
  e.vocab_size = j.at("vocab_size").get<std::size_t>();
  e.total_nll = j.at("total_nll").get<double>();
  return e;
}

ojson VocabJson(const Vocabulary& v) {
  ojson tokens = ojson::array();
  ojson prov = ojson::array();
  for (std::size_t id = 0; id < v.size(); ++id) {
    tokens.push_back(v.token(static_cast<TokenId>(id)));
    prov.push_back(static_cast<int>(v.provenance(static_cast<TokenId>(id))));
  }
  return ojson{{"tokens", std::move(tokens)}, {"provenance", std::move(prov)}};
}

Vocabulary VocabFrom(const ojson& j) {
  const auto& tokens = j.at("tokens");
  const auto& prov = j.at("provenance");
  if (tokens.size() != prov.size()) ThrowData("checkpoint vocabulary is inconsistent");
  Vocabulary v;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const int p = prov[i].get<int>();
    if (p < 0 || p > static_cast<int>(Provenance::kSurvivor)) {
      ThrowData("checkpoint has an unknown provenance code");
    }
    v.Add(tokens[i].get<std::string>(), static_cast<Provenance>(p));
  }
  return v;
}

}  // namespace

std::string_view BaseTrainerName(BaseTrainer b) {
  switch (b) {
    case BaseTrainer::kBpe:
      return "bpe";
    case BaseTrainer::kUnigram:
      return "unigram";
    case BaseTrainer::kExternal:
      return "external";
  }
  return "unknown";
}

BaseTrainer ParseBaseTrainer(std::string_view name) {
  if (name == "bpe") return BaseTrainer::kBpe;
  if (name == "unigram") return BaseTrainer::kUnigram;
  if (name == "external") return BaseTrainer::kExternal;
  ThrowConfig("unknown base trainer '" + std::string(name) + "'");
}

std::size_t SageConfig::InitialSize() const {
  return static_cast<std::size_t>(std::ceil(overshoot * static_cast<double>(final_size)));
}

void SageConfig::Validate() const {
  std::vector<std::string> problems;
  if (final_size < 1) problems.push_back("final size V must be >= 1");
  if (!(overshoot >= 1.0) || !std::isfinite(overshoot)) {
    problems.push_back("overshoot n must be a finite number >= 1");
  }
  if (prune_batch < 1) problems.push_back("prune batch k must be >= 1");
  if (recalc_period < 1) problems.push_back("recalc period m must be >= 1");
  if (candidate_set_size < prune_batch) {
    problems.push_back("candidate set size M must be >= k");
  }
  if (window < 1) problems.push_back("window must be >= 1");
  if (threads < 1) problems.push_back("threads must be >= 1");
  if (base == BaseTrainer::kExternal && initial_vocab.empty()) {
    problems.push_back("external base trainer needs an initial vocabulary file");
  }
  try {
    embed.Validate();
  } catch (const Error& e) {
    problems.push_back(e.what());
  }
  if (problems.empty()) return;
  std::string msg = "invalid configuration: ";
  for (std::size_t i = 0; i < problems.size(); ++i) {
    if (i > 0) msg += "; ";
    msg += problems[i];
  }
  ThrowConfig(msg);
}

std::uint64_t SageConfig::Hash() const {
  Fingerprint fp;
  fp.UpdateU64(final_size);
  fp.UpdateU64(std::bit_cast<std::uint64_t>(overshoot));
  fp.UpdateU64(prune_batch);
  fp.UpdateU64(recalc_period);
  fp.UpdateU64(candidate_set_size);
  fp.UpdateU64(embed_period);
  fp.UpdateU64(static_cast<std::uint64_t>(window));
  fp.UpdateU64(static_cast<std::uint64_t>(embed.dim));
  fp.UpdateU64(static_cast<std::uint64_t>(embed.window));
  fp.UpdateU64(static_cast<std::uint64_t>(embed.negatives));
  fp.UpdateU64(static_cast<std::uint64_t>(embed.epochs));
  fp.UpdateU64(std::bit_cast<std::uint64_t>(embed.initial_lr));
  fp.UpdateU64(std::bit_cast<std::uint64_t>(embed.final_lr));
  fp.UpdateU64(embed.seed);
  fp.Update(BaseTrainerName(base));
  return fp.value();
}

Vocabulary PruneState::ActiveVocab() const {
  return vocab.Subset(active, Provenance::kSurvivor);
}

Vocabulary BuildBaseVocab(const RawCorpus& corpus, const SageConfig& cfg) {
  switch (cfg.base) {
    case BaseTrainer::kBpe:
      return TrainBpe(corpus, cfg.InitialSize()).vocab;
    case BaseTrainer::kUnigram: {
      UnigramOptions opts;
      opts.threads = cfg.threads;
      return TrainUnigram(corpus, cfg.InitialSize(), cfg.prune_batch, opts).model.vocab;
    }
    case BaseTrainer::kExternal:
      return ReadVocabFile(cfg.initial_vocab);
  }
  ThrowInvariant("unknown base trainer");
}

PruneState InitState(const RawCorpus& corpus, const SageConfig& cfg) {
  cfg.Validate();
  if (corpus.empty()) ThrowData("cannot train on an empty corpus");
  return InitState(corpus, cfg, BuildBaseVocab(corpus, cfg));
}

PruneState InitState(const RawCorpus& corpus, const SageConfig& cfg,
                     const Vocabulary& base) {
  cfg.Validate();
  if (corpus.empty()) ThrowData("cannot train on an empty corpus");
  if (base.size() < cfg.final_size) {
    ThrowConfig("base vocabulary has " + std::to_string(base.size()) +
                " tokens, fewer than the target size " + std::to_string(cfg.final_size));
  }
  if (base.AlphabetSize() > cfg.final_size) {
    ThrowConfig("target size " + std::to_string(cfg.final_size) +
                " is below the alphabet size " + std::to_string(base.AlphabetSize()));
  }
  for (const auto& c : CorpusAlphabet(corpus)) {
    if (!base.Contains(c)) {
      ThrowConfig("base vocabulary lacks corpus character '" + c + "'");
    }
  }

  PruneState state;
  state.initial = base;
  state.vocab = base;
  state.active.assign(base.size(), true);
  state.active_count = base.size();
  state.cv = CompiledVocab::Compile(state.vocab, state.active);
  state.store = EncodeCorpus(corpus, state.cv, cfg.threads);
  state.index = BuildIndex(state.store, state.vocab.size());
  state.table = Retrain(state, cfg);
  state.total_nll = RescoreStore(state.store, NllScorer(state.table, cfg.window),
                                 cfg.threads);
  state.config_hash = cfg.Hash();
  state.corpus_hash = corpus.Hash();
  return state;
}

void PruneIteration(PruneState& state, const SageConfig& cfg) {
  if (state.active_count <= cfg.final_size) {
    ThrowInvariant("vocabulary is already at the target size");
  }
  PruneEvent ev;
  ev.iteration = state.iteration;
  const std::size_t i = state.iteration;

  if (cfg.embed_period > 0 && i > 0 && i % (cfg.embed_period * cfg.recalc_period) == 0) {
    Compact(state);
    ++state.retrain_count;
    state.table = Retrain(state, cfg);
    state.total_nll = RescoreStore(state.store, NllScorer(state.table, cfg.window),
                                   cfg.threads);
    ev.retrained = true;
  }

  const std::size_t needed =
      std::min(cfg.prune_batch, state.active_count - cfg.final_size);
  bool full = i % cfg.recalc_period == 0;
  if (!full && state.bottom.size() < needed) {
    full = true;
    ev.forced_recalc = true;
  }
  ev.full_recalc = full;

  std::vector<BottomEntry> entries;
  if (full) {
    for (std::size_t id = 0; id < state.vocab.size(); ++id) {
      if (state.active[id] && !state.vocab.IsSingleChar(static_cast<TokenId>(id))) {
        entries.push_back({static_cast<TokenId>(id), 0.0});
      }
    }
  } else {
    entries = state.bottom;
  }
  if (entries.size() < needed) {
    ThrowInvariant("not enough multi-character tokens left to reach the target size");
  }
  ParallelFor(entries.size(), cfg.threads, [&](std::size_t b, std::size_t e, int) {
    for (std::size_t j = b; j < e; ++j) {
      entries[j].loss = ComputeAblationLoss(entries[j].id, state.store, state.index,
                                            state.vocab, state.table, state.cv,
                                            cfg.window)
                            .loss;
    }
  });
  ev.evaluations = entries.size();
  SortEntries(entries, state);
  if (full && entries.size() > cfg.candidate_set_size) {
    entries.resize(cfg.candidate_set_size);
  }

  std::vector<TokenId> pruned;
  for (std::size_t j = 0; j < needed; ++j) {
    const TokenId t = entries[j].id;
    pruned.push_back(t);
    ev.tokens.push_back(state.vocab.token(t));
    ev.losses.push_back(entries[j].loss);
    ev.frequencies.push_back(state.index.frequency[t]);
    state.active[t] = false;
  }
  state.bottom.assign(entries.begin() + static_cast<std::ptrdiff_t>(needed), entries.end());
  state.active_count -= needed;
  state.cv = CompiledVocab::Compile(state.vocab, state.active);
  state.total_nll += RetokenizeSentences(state.store, state.index, pruned, state.vocab,
                                         state.cv, NllScorer(state.table, cfg.window))
                         .delta;
  ev.vocab_size = state.active_count;
  ev.total_nll = state.total_nll;
  state.events.push_back(std::move(ev));
  ++state.iteration;
}

SageResult RunSage(PruneState& state, const SageConfig& cfg, const SageHooks& hooks) {
  while (state.active_count > cfg.final_size) {
    if (hooks.stop_after && state.iteration >= *hooks.stop_after) break;
    PruneIteration(state, cfg);
    if (hooks.on_event) hooks.on_event(state.events.back());
    if (!hooks.checkpoint_path.empty() && hooks.checkpoint_every > 0 &&
        state.iteration % hooks.checkpoint_every == 0) {
      SaveCheckpoint(hooks.checkpoint_path, state);
    }
  }
  if (!hooks.checkpoint_path.empty()) SaveCheckpoint(hooks.checkpoint_path, state);
  SageResult result;
  result.vocab = state.ActiveVocab();
  result.initial = state.initial;
  result.events = state.events;
  result.completed = state.active_count == cfg.final_size;
  return result;
}

SageResult TrainSage(const RawCorpus& corpus, const SageConfig& cfg,
                     const SageHooks& hooks) {
  PruneState state = InitState(corpus, cfg);
  return RunSage(state, cfg, hooks);
}

SageResult ResumeSage(const RawCorpus& corpus, const SageConfig& cfg,
                      const std::filesystem::path& checkpoint, const SageHooks& hooks) {
  PruneState state = LoadCheckpoint(checkpoint, corpus, cfg);
  return RunSage(state, cfg, hooks);
}

void SaveCheckpoint(const std::filesystem::path& path, const PruneState& state) {
  ojson events = ojson::array();
  for (const auto& e : state.events) events.push_back(EventJson(e));
  ojson bottom = ojson::array();
  for (const auto& b : state.bottom) bottom.push_back(ojson::array({b.id, b.loss}));
  ojson active = ojson::array();
  for (bool a : state.active) active.push_back(a);
  const std::string table = SerializeTable(state.table);
  ojson doc{{"format", kCheckpointFormat},
            {"version", kCheckpointVersion},
            {"tool_version", kVersion},
            {"config_hash", state.config_hash},
            {"corpus_hash", state.corpus_hash},
            {"iteration", state.iteration},
            {"retrain_count", state.retrain_count},
            {"total_nll", state.total_nll},
            {"initial", VocabJson(state.initial)},
            {"vocab", VocabJson(state.vocab)},
            {"active", std::move(active)},
            {"bottom", std::move(bottom)},
            {"events", std::move(events)},
            {"table", ojson::binary(std::vector<std::uint8_t>(table.begin(), table.end()))}};
  const std::vector<std::uint8_t> bytes = ojson::to_cbor(doc);

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) ThrowData("cannot write checkpoint " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) ThrowData("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

PruneState LoadCheckpoint(const std::filesystem::path& path, const RawCorpus& corpus,
                          const SageConfig& cfg) {
  cfg.Validate();
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowData("cannot read checkpoint " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  ojson doc;
  try {
    doc = ojson::from_cbor(bytes);
  } catch (const nlohmann::json::exception& e) {
    ThrowData("malformed checkpoint " + path.string() + ": " + e.what());
  }

  PruneState state;
  try {
    if (doc.at("format").get<std::string>() != kCheckpointFormat ||
        doc.at("version").get<int>() != kCheckpointVersion) {
      ThrowData("unsupported checkpoint format in " + path.string());
    }
    state.config_hash = doc.at("config_hash").get<std::uint64_t>();
    state.corpus_hash = doc.at("corpus_hash").get<std::uint64_t>();
    if (state.config_hash != cfg.Hash()) {
      ThrowConfig("checkpoint was written with a different configuration");
    }
    if (state.corpus_hash != corpus.Hash()) {
      ThrowConfig("checkpoint was written for a different corpus");
    }
    state.iteration = doc.at("iteration").get<std::size_t>();
    state.retrain_count = doc.at("retrain_count").get<std::size_t>();
    state.total_nll = doc.at("total_nll").get<double>();
    state.initial = VocabFrom(doc.at("initial"));
    state.vocab = VocabFrom(doc.at("vocab"));
    for (const auto& a : doc.at("active")) state.active.push_back(a.get<bool>());
    if (state.active.size() != state.vocab.size()) {
      ThrowData("checkpoint active mask does not match its vocabulary");
    }
    state.active_count = static_cast<std::size_t>(
        std::count(state.active.begin(), state.active.end(), true));
    for (const auto& b : doc.at("bottom")) {
      const TokenId id = b.at(0).get<TokenId>();
      if (id < 0 || static_cast<std::size_t>(id) >= state.vocab.size() ||
          !state.active[id]) {
        ThrowData("checkpoint bottom set references an inactive token");
      }
      state.bottom.push_back({id, b.at(1).get<double>()});
    }
    for (const auto& e : doc.at("events")) state.events.push_back(EventFrom(e));
    const auto& blob = doc.at("table").get_binary();
    state.table = DeserializeTable(
        std::string_view(reinterpret_cast<const char*>(blob.data()), blob.size()));
  } catch (const nlohmann::json::exception& e) {
    ThrowData("malformed checkpoint " + path.string() + ": " + e.what());
  }
  if (state.table.vocab_hash != state.vocab.Hash() ||
      state.table.rows != state.vocab.size()) {
    ThrowData("checkpoint embedding table does not match its vocabulary");
  }

  // Greedy segmentation of a word never changes when a token it does not
  // use is removed, so a fresh encode equals the incrementally maintained
  // store.
  state.cv = CompiledVocab::Compile(state.vocab, state.active);
  state.store = EncodeCorpus(corpus, state.cv, cfg.threads);
  state.index = BuildIndex(state.store, state.vocab.size());
  RescoreStore(state.store, NllScorer(state.table, cfg.window), cfg.threads);
  return state;
}

std::string EventToJson(const PruneEvent& event) { return EventJson(event).dump(); }

PruneEvent EventFromJson(std::string_view line) {
  try {
    return EventFrom(ojson::parse(line));
  } catch (const nlohmann::json::exception& e) {
    ThrowData(std::string("malformed event: ") + e.what());
  }
}

void WriteEventLog(const std::filesystem::path& path, std::span<const PruneEvent> events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) ThrowData("cannot write " + path.string());
  for (const auto& e : events) out << EventToJson(e) << '\n';
  if (!out) ThrowData("write failed: " + path.string());
}

std::vector<PruneEvent> ReadEventLog(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowData("cannot read " + path.string());
  std::vector<PruneEvent> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = ojson::parse(line, nullptr, false);
    if (j.is_discarded()) ThrowData("malformed event line in " + path.string());
    // Metadata records carry no iteration.
    if (!j.contains("iteration")) continue;
    events.push_back(EventFrom(j));
  }
  return events;
}

Vocabulary ReplayEvents(const Vocabulary& initial, std::span<const PruneEvent> events) {
  std::vector<bool> keep(initial.size(), true);
  for (const auto& e : events) {
    for (const auto& t : e.tokens) {
      const auto id = initial.Find(t);
      if (!id) ThrowData("event prunes unknown token '" + t + "'");
      if (initial.IsSingleChar(*id)) {
        ThrowData("event prunes single-character token '" + t + "'");
      }
      if (!keep[*id]) ThrowData("event prunes '" + t + "' twice");
      keep[*id] = false;
    }
  }
  return initial.Subset(keep, Provenance::kSurvivor);
}

}  // namespace sagetok
