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

#include "sagetok/unigram_trainer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <unordered_map>

#include "sagetok/bpe_trainer.h"
#include "sagetok/encoder.h"
#include "sagetok/utf8.h"

namespace sagetok {

Vocabulary InitSubstringVocab(const RawCorpus& corpus, std::size_t max_len,
                              std::int64_t min_count) {
  if (corpus.empty()) ThrowData("cannot seed substrings from an empty corpus");
  if (max_len < 1) ThrowConfig("max substring length must be >= 1");
  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& [word, freq] : CountWords(corpus)) {
    const auto chars = utf8::SplitChars(word);
    for (std::size_t b = 0; b < chars.size(); ++b) {
      std::size_t bytes = 0;
      for (std::size_t len = 1; len <= max_len && b + len <= chars.size(); ++len) {
        bytes += chars[b + len - 1].size();
        if (len == 1) continue;
        counts[std::string(chars[b].data(), bytes)] += freq;
      }
    }
  }
  Vocabulary vocab;
  for (const auto& c : CorpusAlphabet(corpus)) vocab.Add(c, Provenance::kAlphabet);
  std::vector<std::pair<std::string, std::int64_t>> kept;
  for (auto& [s, c] : counts) {
    if (c >= min_count) kept.emplace_back(s, c);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  for (auto& [s, c] : kept) vocab.Add(std::move(s), Provenance::kSubstring);
  return vocab;
}

std::vector<double> FitUnigramProbs(const SentenceStore& store,
                                    const std::vector<bool>& active) {
  std::vector<double> counts(active.size(), 0.0);
  for (const auto& s : store.encoded) {
    for (TokenId id : s.ids) {
      if (id != kUnkId) counts[id] += 1.0;
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (!active[i]) {
      counts[i] = 0.0;
      continue;
    }
    if (counts[i] == 0.0) counts[i] = kZeroCountPseudo;
    total += counts[i];
  }
  if (total > 0) {
    for (double& c : counts) c /= total;
  }
  return counts;
}

double CorpusLogLik(const SentenceStore& store, std::span<const double> probs) {
  double ll = 0.0;
  for (const auto& s : store.encoded) {
    for (TokenId id : s.ids) {
      if (id == kUnkId || static_cast<std::size_t>(id) >= probs.size() ||
          !(probs[id] > 0.0)) {
        ThrowData("token with zero probability in unigram likelihood");
      }
      ll += std::log(probs[id]);
    }
  }
  return ll;
}

SentenceScorer UnigramScorer(std::span<const double> probs) {
  return [probs](std::span<const TokenId> ids) {
    double nll = 0.0;
    for (TokenId id : ids) {
      if (id == kUnkId || static_cast<std::size_t>(id) >= probs.size() ||
          !(probs[id] > 0.0)) {
        ThrowData("token with zero probability in unigram likelihood");
      }
      nll -= std::log(probs[id]);
    }
    return nll;
  };
}

UnigramResult TrainUnigram(const RawCorpus& corpus, std::size_t target_size,
                           std::size_t batch, const UnigramOptions& options) {
  return TrainUnigramFrom(
      corpus, InitSubstringVocab(corpus, options.max_len, options.min_count),
      target_size, batch, options);
}

UnigramResult TrainUnigramFrom(const RawCorpus& corpus, const Vocabulary& initial,
                               std::size_t target_size, std::size_t batch,
                               const UnigramOptions& options) {
  if (corpus.empty()) ThrowData("cannot train on an empty corpus");
  if (batch < 1) ThrowConfig("pruning batch must be >= 1");
  const std::size_t alphabet = initial.AlphabetSize();
  if (target_size < alphabet) {
    ThrowConfig("vocabulary size " + std::to_string(target_size) +
                " is below the alphabet size " + std::to_string(alphabet));
  }
  for (const auto& c : CorpusAlphabet(corpus)) {
    if (!initial.Contains(c)) {
      ThrowConfig("initial vocabulary lacks corpus character '" + c + "'");
    }
  }

  UnigramResult result;
  std::vector<bool> active(initial.size(), true);
  std::size_t active_count = initial.size();
  CompiledVocab cv = CompiledVocab::Compile(initial, active);
  SentenceStore store = EncodeCorpus(corpus, cv, options.threads);
  TokenIndex index = BuildIndex(store, initial.size());
  std::vector<double> probs = FitUnigramProbs(store, active);
  RescoreStore(store, UnigramScorer(probs), options.threads);

  std::size_t iteration = 0;
  while (active_count > target_size) {
    std::vector<TokenId> candidates;
    for (std::size_t id = 0; id < initial.size(); ++id) {
      if (active[id] && !initial.IsSingleChar(static_cast<TokenId>(id))) {
        candidates.push_back(static_cast<TokenId>(id));
      }
    }
    const std::size_t needed = std::min(batch, active_count - target_size);
    if (candidates.size() < needed) {
      ThrowInvariant("not enough multi-character tokens left to reach target size");
    }
    std::vector<double> loss(candidates.size());
    const SentenceScorer scorer = UnigramScorer(probs);
    ParallelFor(candidates.size(), options.threads,
                [&](std::size_t b, std::size_t e, int) {
                  for (std::size_t i = b; i < e; ++i) {
                    loss[i] = ScoreRemoval(candidates[i], store, index, cv, scorer);
                  }
                });
    std::vector<std::size_t> order(candidates.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (loss[a] != loss[b]) return loss[a] < loss[b];
      const auto fa = index.frequency[candidates[a]];
      const auto fb = index.frequency[candidates[b]];
      if (fa != fb) return fa < fb;
      return initial.token(candidates[a]) < initial.token(candidates[b]);
    });

    std::vector<TokenId> pruned;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < needed; ++i) {
      const TokenId t = candidates[order[i]];
      pruned.push_back(t);
      names.push_back(initial.token(t));
      active[t] = false;
    }
    active_count -= needed;
    cv = CompiledVocab::Compile(initial, active);
    RetokenizeSentences(store, index, pruned, initial, cv, scorer);
    probs = FitUnigramProbs(store, active);
    RescoreStore(store, UnigramScorer(probs), options.threads);
    if (options.on_batch) options.on_batch(iteration, names);
    result.batches.push_back(std::move(names));
    ++iteration;
  }

  result.model.vocab = initial.Subset(active);
  for (std::size_t id = 0; id < initial.size(); ++id) {
    if (active[id]) result.model.probs.push_back(probs[id]);
  }
  return result;
}

void WriteLogProbFile(const std::filesystem::path& path, const UnigramModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) ThrowData("cannot write " + path.string());
  out << std::setprecision(17);
  for (std::size_t id = 0; id < model.vocab.size(); ++id) {
    out << model.vocab.token(static_cast<TokenId>(id)) << '\t'
        << std::log(model.probs[id]) << '\n';
  }
}

}  // namespace sagetok
