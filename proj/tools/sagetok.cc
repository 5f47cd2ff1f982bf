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

// sagetok: train, apply and compare subword vocabularies.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal
// invariant violation.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sagetok/analysis.h"
#include "sagetok/bpe_trainer.h"
#include "sagetok/common.h"
#include "sagetok/corpus.h"
#include "sagetok/encoder.h"
#include "sagetok/sage_trainer.h"
#include "sagetok/unigram_trainer.h"
#include "sagetok/utf8.h"
#include "sagetok/vocabulary.h"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace sagetok {
namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitInvariant = 4;

void Progress(const ojson& record) { std::cerr << record.dump() << '\n' << std::flush; }

// Metadata shared by every output of one run. `run` mirrors all parameters;
// the config hash leaves out output paths and thread counts.
struct RunMeta {
  ojson run;
  std::uint64_t corpus_hash = 0;
  std::uint64_t seed = 0;

  std::uint64_t ConfigHash() const {
    ojson core = run;
    core.erase("outputs");
    core.erase("threads");
    Fingerprint fp;
    fp.Update(core.dump());
    return fp.value();
  }

  ojson Json() const {
    return ojson{{"tool", "sagetok"},
                 {"version", kVersion},
                 {"config_hash", HexDigest(ConfigHash())},
                 {"corpus_hash", HexDigest(corpus_hash)},
                 {"seed", seed},
                 {"config", run}};
  }
};

void WriteSidecar(const fs::path& path, const RunMeta& meta) {
  fs::path side = path;
  side += ".meta.json";
  std::ofstream out(side, std::ios::binary);
  if (!out) ThrowData("cannot write " + side.string());
  out << meta.Json().dump(2) << '\n';
}

void CheckReadable(const fs::path& path, std::string_view what) {
  if (!fs::is_regular_file(path)) {
    ThrowConfig(std::string(what) + " '" + path.string() + "' does not exist");
  }
}

NormalizationPolicy Policy(bool lowercase) {
  NormalizationPolicy p;
  p.lowercase = lowercase;
  return p;
}

// ---------------------------------------------------------------- train-bpe

struct BpeArgs {
  std::string corpus;
  std::size_t vocab_size = 16000;
  std::string out;
  std::string merges;
  bool lowercase = false;
};

int RunTrainBpe(const BpeArgs& a) {
  CheckReadable(a.corpus, "corpus");
  const std::string merges = a.merges.empty() ? a.out + ".merges.tsv" : a.merges;
  RunMeta meta;
  meta.run = ojson{{"command", "train-bpe"},
                   {"corpus", a.corpus},
                   {"vocab_size", a.vocab_size},
                   {"lowercase", a.lowercase},
                   {"outputs", {{"vocab", a.out}, {"merges", merges}}}};
  const RawCorpus corpus = LoadCorpus(a.corpus, Policy(a.lowercase));
  meta.corpus_hash = corpus.Hash();
  Progress({{"event", "start"}, {"command", "train-bpe"}, {"lines", corpus.size()}});
  const BpeResult result = TrainBpe(corpus, a.vocab_size);
  WriteVocabFile(a.out, result.vocab);
  WriteSidecar(a.out, meta);
  WriteMergeLog(merges, result.merges);
  WriteSidecar(merges, meta);
  Progress({{"event", "done"},
            {"vocab_size", result.vocab.size()},
            {"merges", result.merges.size()},
            {"stopped_early", result.stopped_early}});
  return 0;
}

// ------------------------------------------------------------ train-unigram

struct UnigramArgs {
  std::string corpus;
  std::size_t vocab_size = 16000;
  std::size_t batch = 100;
  std::size_t max_len = 16;
  std::int64_t min_count = 2;
  std::string out;
  std::string logprobs;
  bool lowercase = false;
  int threads = DefaultThreads();
};

int RunTrainUnigram(const UnigramArgs& a) {
  CheckReadable(a.corpus, "corpus");
  if (a.batch < 1) ThrowConfig("--batch must be >= 1");
  if (a.max_len < 1) ThrowConfig("--max-len must be >= 1");
  if (a.threads < 1) ThrowConfig("--threads must be >= 1");
  RunMeta meta;
  meta.run = ojson{{"command", "train-unigram"},
                   {"corpus", a.corpus},
                   {"vocab_size", a.vocab_size},
                   {"batch", a.batch},
                   {"max_len", a.max_len},
                   {"min_count", a.min_count},
                   {"lowercase", a.lowercase},
                   {"threads", a.threads},
                   {"outputs", {{"vocab", a.out}, {"logprobs", a.logprobs}}}};
  const RawCorpus corpus = LoadCorpus(a.corpus, Policy(a.lowercase));
  meta.corpus_hash = corpus.Hash();
  UnigramOptions opts;
  opts.max_len = a.max_len;
  opts.min_count = a.min_count;
  opts.threads = a.threads;
  opts.on_batch = [](std::size_t i, const std::vector<std::string>& pruned) {
    Progress({{"event", "iteration"}, {"iteration", i}, {"pruned", pruned.size()}});
  };
  Progress({{"event", "start"}, {"command", "train-unigram"}, {"lines", corpus.size()}});
  const UnigramResult result = TrainUnigram(corpus, a.vocab_size, a.batch, opts);
  WriteVocabFile(a.out, result.model.vocab);
  WriteSidecar(a.out, meta);
  if (!a.logprobs.empty()) {
    WriteLogProbFile(a.logprobs, result.model);
    WriteSidecar(a.logprobs, meta);
  }
  Progress({{"event", "done"}, {"vocab_size", result.model.vocab.size()}});
  return 0;
}

// --------------------------------------------------------------- train-sage

struct SageArgs {
  std::string corpus;
  std::string out;
  std::string events;
  std::string initial_out;
  std::string initial_vocab;
  std::string base = "bpe";
  std::string config;
  std::size_t initial_size = 0;
  SageConfig cfg;
  std::string checkpoint;
  std::size_t checkpoint_every = 0;
  std::string resume;
  std::size_t stop_after = 0;
  bool deterministic = false;
  bool lowercase = false;
  bool dump_config = false;
};

ojson SageRunJson(const SageArgs& a, const SageConfig& c) {
  return ojson{{"command", "train-sage"},
               {"corpus", a.corpus},
               {"lowercase", a.lowercase},
               {"final_size", c.final_size},
               {"overshoot", c.overshoot},
               {"initial_size", c.InitialSize()},
               {"prune_batch", c.prune_batch},
               {"recalc_period", c.recalc_period},
               {"candidate_set_size", c.candidate_set_size},
               {"embed_period", c.embed_period},
               {"window", c.window},
               {"embed",
                {{"dim", c.embed.dim},
                 {"window", c.embed.window},
                 {"negatives", c.embed.negatives},
                 {"epochs", c.embed.epochs},
                 {"initial_lr", c.embed.initial_lr},
                 {"final_lr", c.embed.final_lr},
                 {"seed", c.embed.seed}}},
               {"base", BaseTrainerName(c.base)},
               {"initial_vocab", a.initial_vocab},
               {"deterministic", a.deterministic},
               {"threads", {{"scoring", c.threads}, {"embed", c.embed.threads}}},
               {"outputs",
                {{"vocab", a.out},
                 {"events", a.events},
                 {"initial", a.initial_out},
                 {"checkpoint", a.checkpoint}}}};
}

int RunTrainSage(SageArgs a) {
  SageConfig& cfg = a.cfg;
  if (a.initial_size > 0) {
    cfg.overshoot = static_cast<double>(a.initial_size) / static_cast<double>(cfg.final_size);
  }
  cfg.base = a.initial_vocab.empty() ? ParseBaseTrainer(a.base) : BaseTrainer::kExternal;
  cfg.initial_vocab = a.initial_vocab;
  if (a.deterministic) {
    cfg.embed.threads = 1;
  } else {
    cfg.embed.threads = cfg.threads;
  }
  if (a.events.empty() && !a.out.empty()) a.events = a.out + ".events.jsonl";
  if (a.dump_config) {
    std::cout << SageRunJson(a, cfg).dump(2) << '\n';
    return 0;
  }

  std::vector<std::string> problems;
  if (a.corpus.empty()) problems.push_back("--corpus is required");
  if (a.out.empty()) problems.push_back("--out is required");
  if (!a.corpus.empty() && !fs::is_regular_file(a.corpus)) {
    problems.push_back("corpus '" + a.corpus + "' does not exist");
  }
  if (!a.initial_vocab.empty() && !fs::is_regular_file(a.initial_vocab)) {
    problems.push_back("initial vocabulary '" + a.initial_vocab + "' does not exist");
  }
  if (!a.resume.empty() && !fs::is_regular_file(a.resume)) {
    problems.push_back("checkpoint '" + a.resume + "' does not exist");
  }
  try {
    cfg.Validate();
  } catch (const Error& e) {
    problems.push_back(e.what());
  }
  if (!problems.empty()) {
    std::string msg;
    for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
    ThrowConfig(msg);
  }

  RunMeta meta;
  meta.run = SageRunJson(a, cfg);
  meta.seed = cfg.embed.seed;
  const RawCorpus corpus = LoadCorpus(a.corpus, Policy(a.lowercase));
  meta.corpus_hash = corpus.Hash();

  SageHooks hooks;
  hooks.checkpoint_path = a.checkpoint.empty() ? a.resume : a.checkpoint;
  hooks.checkpoint_every = a.checkpoint_every;
  if (a.stop_after > 0) hooks.stop_after = a.stop_after;
  hooks.on_event = [](const PruneEvent& e) {
    Progress({{"event", "iteration"},
              {"iteration", e.iteration},
              {"vocab_size", e.vocab_size},
              {"total_nll", e.total_nll},
              {"full_recalc", e.full_recalc},
              {"retrained", e.retrained},
              {"evaluations", e.evaluations}});
  };

  Progress({{"event", "start"}, {"command", "train-sage"}, {"lines", corpus.size()},
            {"resume", !a.resume.empty()}});
  PruneState state = a.resume.empty() ? InitState(corpus, cfg)
                                      : LoadCheckpoint(a.resume, corpus, cfg);
  Progress({{"event", "initialized"},
            {"iteration", state.iteration},
            {"vocab_size", state.active_count},
            {"total_nll", state.total_nll}});
  const SageResult result = RunSage(state, cfg, hooks);

  if (!a.initial_out.empty()) {
    WriteVocabFile(a.initial_out, result.initial);
    WriteSidecar(a.initial_out, meta);
  }
  {
    std::ofstream ev(a.events, std::ios::binary);
    if (!ev) ThrowData("cannot write " + a.events);
    ev << ojson{{"meta", meta.Json()}}.dump() << '\n';
    for (const auto& e : result.events) ev << EventToJson(e) << '\n';
    if (!ev) ThrowData("write failed: " + a.events);
  }
  if (result.completed) {
    WriteVocabFile(a.out, result.vocab);
    WriteSidecar(a.out, meta);
  }
  Progress({{"event", result.completed ? "done" : "stopped"},
            {"iteration", state.iteration},
            {"vocab_size", state.active_count}});
  return 0;
}

// ------------------------------------------------------------------- encode

struct EncodeArgs {
  std::string vocab;
  std::string in;
  std::string out;
  std::string format = "tokens";
  bool lowercase = false;
  int threads = DefaultThreads();
};

int RunEncode(const EncodeArgs& a) {
  CheckReadable(a.vocab, "vocabulary");
  CheckReadable(a.in, "input");
  const Vocabulary vocab = ReadVocabFile(a.vocab);
  const CompiledVocab cv = CompiledVocab::Compile(vocab);
  const RawCorpus corpus = LoadCorpus(a.in, Policy(a.lowercase));
  const SentenceStore store = EncodeCorpus(corpus, cv, a.threads);

  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out, std::ios::binary);
    if (!file) ThrowData("cannot write " + a.out);
  }
  std::ostream& out = a.out.empty() ? std::cout : file;
  const bool ids = a.format == "ids";
  for (const auto& s : store.encoded) {
    std::size_t unk_pos = 0;
    for (std::size_t i = 0; i < s.ids.size(); ++i) {
      if (i > 0) out << ' ';
      const TokenId id = s.ids[i];
      if (ids) {
        out << (id == kUnkId ? -1 : id);
      } else if (id == kUnkId) {
        const std::size_t len =
            utf8::FirstCharLength(std::string_view(s.unk_chars).substr(unk_pos));
        out << s.unk_chars.substr(unk_pos, len);
        unk_pos += len;
      } else {
        out << vocab.token(id);
      }
    }
    out << '\n';
  }
  if (!a.out.empty()) {
    RunMeta meta;
    meta.run = ojson{{"command", "encode"},
                     {"vocab", a.vocab},
                     {"vocab_hash", HexDigest(vocab.Hash())},
                     {"input", a.in},
                     {"format", a.format},
                     {"lowercase", a.lowercase},
                     {"unk", "ids format writes -1, tokens format writes the raw character"},
                     {"outputs", {{"encoded", a.out}}}};
    meta.corpus_hash = corpus.Hash();
    WriteSidecar(a.out, meta);
  }
  return 0;
}

// ------------------------------------------------------------------ analyze

struct AnalyzeArgs {
  std::string vocab;
  std::string corpus;
  std::string out_dir;
  std::vector<int> windows = {5, 2};
  bool lowercase = false;
  int threads = DefaultThreads();
};

std::string CsvMeta(const RunMeta& meta) {
  std::string s = "# tool: sagetok\n";
  s += "# version: " + std::string(kVersion) + "\n";
  s += "# config_hash: " + HexDigest(meta.ConfigHash()) + "\n";
  s += "# corpus_hash: " + HexDigest(meta.corpus_hash) + "\n";
  s += "# seed: " + std::to_string(meta.seed) + "\n";
  s += "# config: " + meta.run.dump() + "\n";
  return s;
}

int RunAnalyze(const AnalyzeArgs& a) {
  CheckReadable(a.vocab, "vocabulary");
  CheckReadable(a.corpus, "corpus");
  for (int w : a.windows) {
    if (w < 1) ThrowConfig("--windows entries must be >= 1");
  }
  const Vocabulary vocab = ReadVocabFile(a.vocab);
  const RawCorpus corpus = LoadCorpus(a.corpus, Policy(a.lowercase));
  RunMeta meta;
  meta.run = ojson{{"command", "analyze"},
                   {"vocab", a.vocab},
                   {"vocab_hash", HexDigest(vocab.Hash())},
                   {"corpus", a.corpus},
                   {"windows", a.windows},
                   {"lowercase", a.lowercase},
                   {"threads", a.threads},
                   {"outputs", {{"dir", a.out_dir}}}};
  meta.corpus_hash = corpus.Hash();
  const AnalysisReport report = Analyze(vocab, corpus, a.windows, a.threads);

  ojson summary = ojson::parse(AnalysisSummaryJson(report));
  ojson doc{{"meta", meta.Json()}};
  for (auto& [k, v] : summary.items()) doc[k] = v;
  if (a.out_dir.empty()) {
    std::cout << doc.dump(2) << '\n';
    return 0;
  }
  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) ThrowData("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("summary.json");
    f << doc.dump(2) << '\n';
  }
  {
    auto f = open("token_length.csv");
    f << CsvMeta(meta);
    WriteHistogramCsv(f, report.token_length, "length");
  }
  {
    auto f = open("fertility.csv");
    f << CsvMeta(meta);
    WriteHistogramCsv(f, report.fertility, "subwords_per_word");
  }
  for (const auto& t : report.stats) {
    auto f = open("token_stats_w" + std::to_string(t.window) + ".csv");
    f << CsvMeta(meta);
    WriteTokenStatsCsv(f, t);
  }
  return 0;
}

// --------------------------------------------------------------------- diff

struct DiffArgs {
  std::string a;
  std::string b;
  std::string corpus;
  std::string out;
  std::size_t top = 20;
  int window = 5;
  bool lowercase = false;
  int threads = DefaultThreads();
};

ojson FreqEntries(const std::vector<FrequencyDiffEntry>& entries) {
  ojson arr = ojson::array();
  for (const auto& e : entries) {
    arr.push_back({{"token", e.token}, {"freq_a", e.freq_a}, {"freq_b", e.freq_b}});
  }
  return arr;
}

int RunDiff(const DiffArgs& a) {
  CheckReadable(a.a, "vocabulary --a");
  CheckReadable(a.b, "vocabulary --b");
  if (!a.corpus.empty()) CheckReadable(a.corpus, "corpus");
  const Vocabulary va = ReadVocabFile(a.a);
  const Vocabulary vb = ReadVocabFile(a.b);
  RunMeta meta;
  meta.run = ojson{{"command", "diff"},
                   {"a", a.a},
                   {"b", a.b},
                   {"a_hash", HexDigest(va.Hash())},
                   {"b_hash", HexDigest(vb.Hash())},
                   {"corpus", a.corpus},
                   {"top", a.top},
                   {"window", a.window},
                   {"lowercase", a.lowercase},
                   {"threads", a.threads},
                   {"outputs", {{"report", a.out}}}};
  ojson doc{{"meta", ojson()}};
  ojson vd = ojson::parse(VocabDiffJson(ComputeVocabDiff(va, vb)));
  for (auto& [k, v] : vd.items()) doc[k] = v;
  if (!a.corpus.empty()) {
    const RawCorpus corpus = LoadCorpus(a.corpus, Policy(a.lowercase));
    meta.corpus_hash = corpus.Hash();
    const auto sa = TokenStats(corpus, va, a.window, a.threads);
    const auto sb = TokenStats(corpus, vb, a.window, a.threads);
    const FrequencyDiff fd = ComputeFrequencyDiff(sa, sb, a.top);
    doc["frequency_diff"] = {{"more_in_a", FreqEntries(fd.more_in_a)},
                             {"more_in_b", FreqEntries(fd.more_in_b)}};
  }
  doc["meta"] = meta.Json();
  if (a.out.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) ThrowData("cannot write " + a.out);
    f << doc.dump(2) << '\n';
  }
  return 0;
}

// Fills options of `sub` that were not given on the command line from a
// TOML/INI file. CLI11 only reads config files for the top-level app.
void ApplyConfigFile(CLI::App& sub, const std::string& path) {
  for (const auto& item : CLI::ConfigTOML().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty() && item.parents != std::vector<std::string>{sub.get_name()}) {
      throw CLI::ConfigError::Extras(item.fullname());
    }
    std::string name = item.name;
    std::replace(name.begin(), name.end(), '_', '-');
    CLI::Option* opt = sub.get_option_no_throw("--" + name);
    if (opt == nullptr || name == "config") throw CLI::ConfigError::Extras(item.fullname());
    if (opt->count() > 0) continue;  // flags win
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

int Main(int argc, char** argv) {
  CLI::App app{"sagetok: context-aware subword vocabularies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  BpeArgs bpe;
  auto* c_bpe = app.add_subcommand("train-bpe", "Train a BPE vocabulary");
  c_bpe->add_option("--corpus", bpe.corpus, "Training corpus, one sentence per line")
      ->required();
  c_bpe->add_option("--vocab-size", bpe.vocab_size, "Target vocabulary size")
      ->capture_default_str();
  c_bpe->add_option("--out", bpe.out, "Output vocabulary file")->required();
  c_bpe->add_option("--merges", bpe.merges, "Merge log TSV (default: OUT.merges.tsv)");
  c_bpe->add_flag("--lowercase", bpe.lowercase, "Lowercase ASCII letters");

  UnigramArgs uni;
  auto* c_uni = app.add_subcommand("train-unigram", "Train a unigram-pruned vocabulary");
  c_uni->add_option("--corpus", uni.corpus, "Training corpus")->required();
  c_uni->add_option("--vocab-size", uni.vocab_size, "Target vocabulary size")
      ->capture_default_str();
  c_uni->add_option("--batch", uni.batch, "Tokens pruned per iteration")
      ->capture_default_str();
  c_uni->add_option("--max-len", uni.max_len, "Longest seed substring, in characters")
      ->capture_default_str();
  c_uni->add_option("--min-count", uni.min_count, "Minimum seed substring count")
      ->capture_default_str();
  c_uni->add_option("--out", uni.out, "Output vocabulary file")->required();
  c_uni->add_option("--logprobs", uni.logprobs, "Optional token<TAB>log-prob TSV");
  c_uni->add_option("--threads", uni.threads, "Worker threads")->capture_default_str();
  c_uni->add_flag("--lowercase", uni.lowercase, "Lowercase ASCII letters");

  SageArgs sage;
  auto* c_sage = app.add_subcommand("train-sage", "Train a SaGe vocabulary");
  c_sage->add_option("--config", sage.config, "TOML or INI file with option values")
      ->check(CLI::ExistingFile);
  c_sage->add_option("--corpus", sage.corpus, "Training corpus");
  c_sage->add_option("--out", sage.out, "Output vocabulary file");
  c_sage->add_option("--events", sage.events, "Event log (default: OUT.events.jsonl)");
  c_sage->add_option("--initial-out", sage.initial_out, "Also write the initial vocabulary");
  c_sage->add_option("--vocab-size", sage.cfg.final_size, "Final size V")
      ->capture_default_str();
  c_sage->add_option("--overshoot", sage.cfg.overshoot, "Initial size factor n")
      ->capture_default_str();
  c_sage->add_option("--initial-size", sage.initial_size,
                     "Initial size; overrides --overshoot");
  c_sage->add_option("--prune-batch", sage.cfg.prune_batch, "Tokens pruned per iteration k")
      ->capture_default_str();
  c_sage->add_option("--candidates", sage.cfg.candidate_set_size, "Bottom set size M")
      ->capture_default_str();
  c_sage->add_option("--recalc-period", sage.cfg.recalc_period,
                     "Full loss recalculation every m iterations")
      ->capture_default_str();
  c_sage->add_option("--embed-period", sage.cfg.embed_period,
                     "Retrain embeddings every l recalculations (0 = never)")
      ->capture_default_str();
  c_sage->add_option("--window", sage.cfg.window, "Objective context window")
      ->capture_default_str();
  c_sage->add_option("--embed-dim", sage.cfg.embed.dim, "Embedding dimension")
      ->capture_default_str();
  c_sage->add_option("--embed-window", sage.cfg.embed.window, "Embedding training window")
      ->capture_default_str();
  c_sage->add_option("--negatives", sage.cfg.embed.negatives, "Negative samples")
      ->capture_default_str();
  c_sage->add_option("--epochs", sage.cfg.embed.epochs, "Embedding epochs")
      ->capture_default_str();
  c_sage->add_option("--seed", sage.cfg.embed.seed, "Random seed")->capture_default_str();
  c_sage->add_option("--base", sage.base, "Base trainer for the initial vocabulary")
      ->check(CLI::IsMember({"bpe", "unigram"}))
      ->capture_default_str();
  c_sage->add_option("--initial-vocab", sage.initial_vocab,
                     "Initial vocabulary file; skips base training");
  c_sage->add_option("--checkpoint", sage.checkpoint, "Checkpoint file to write");
  c_sage->add_option("--checkpoint-every", sage.checkpoint_every,
                     "Iterations between checkpoints (0 = only at the end)");
  c_sage->add_option("--resume", sage.resume, "Continue from this checkpoint");
  c_sage->add_option("--stop-after", sage.stop_after,
                     "Stop once this many iterations have run (0 = run to the end)");
  c_sage->add_option("--threads", sage.cfg.threads, "Worker threads")->capture_default_str();
  c_sage->add_flag("--deterministic", sage.deterministic,
                   "Serial embedding training for bit-identical reruns");
  c_sage->add_flag("--lowercase", sage.lowercase, "Lowercase ASCII letters");
  c_sage->add_flag("--dump-config", sage.dump_config,
                   "Print the resolved configuration and exit");

  EncodeArgs enc;
  auto* c_enc = app.add_subcommand("encode", "Segment text with a vocabulary");
  c_enc->add_option("--vocab", enc.vocab, "Vocabulary file")->required();
  c_enc->add_option("--in", enc.in, "Input text")->required();
  c_enc->add_option("--out", enc.out, "Output file (default: stdout)");
  c_enc->add_option("--format", enc.format, "tokens or ids")
      ->check(CLI::IsMember({"tokens", "ids"}))
      ->capture_default_str();
  c_enc->add_option("--threads", enc.threads, "Worker threads")->capture_default_str();
  c_enc->add_flag("--lowercase", enc.lowercase, "Lowercase ASCII letters");

  AnalyzeArgs ana;
  auto* c_ana = app.add_subcommand("analyze", "Vocabulary and tokenization statistics");
  c_ana->add_option("--vocab", ana.vocab, "Vocabulary file")->required();
  c_ana->add_option("--corpus", ana.corpus, "Corpus to tokenize")->required();
  c_ana->add_option("--out-dir", ana.out_dir, "Directory for CSV and JSON reports");
  c_ana->add_option("--windows", ana.windows, "Neighbor windows")->capture_default_str();
  c_ana->add_option("--threads", ana.threads, "Worker threads")->capture_default_str();
  c_ana->add_flag("--lowercase", ana.lowercase, "Lowercase ASCII letters");

  DiffArgs dif;
  auto* c_dif = app.add_subcommand("diff", "Compare two vocabularies");
  c_dif->add_option("--a", dif.a, "First vocabulary")->required();
  c_dif->add_option("--b", dif.b, "Second vocabulary")->required();
  c_dif->add_option("--corpus", dif.corpus, "Corpus for token frequency differences");
  c_dif->add_option("--out", dif.out, "Output JSON (default: stdout)");
  c_dif->add_option("--top", dif.top, "Tokens per side in the frequency diff")
      ->capture_default_str();
  c_dif->add_option("--window", dif.window, "Neighbor window for token stats")
      ->capture_default_str();
  c_dif->add_option("--threads", dif.threads, "Worker threads")->capture_default_str();
  c_dif->add_flag("--lowercase", dif.lowercase, "Lowercase ASCII letters");

  try {
    app.parse(argc, argv);
    if (*c_sage && !sage.config.empty()) ApplyConfigFile(*c_sage, sage.config);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*c_bpe) return RunTrainBpe(bpe);
    if (*c_uni) return RunTrainUnigram(uni);
    if (*c_sage) return RunTrainSage(sage);
    if (*c_enc) return RunEncode(enc);
    if (*c_ana) return RunAnalyze(ana);
    if (*c_dif) return RunDiff(dif);
  } catch (const Error& e) {
    std::cerr << "sagetok: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::kConfig:
        return kExitConfig;
      case ErrorKind::kData:
        return kExitData;
      case ErrorKind::kInvariant:
        return kExitInvariant;
    }
  } catch (const fs::filesystem_error& e) {
    std::cerr << "sagetok: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "sagetok: internal error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return kExitInvariant;
}

}  // namespace
}  // namespace sagetok

int main(int argc, char** argv) { return sagetok::Main(argc, argv); }
