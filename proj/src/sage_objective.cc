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

#include "sagetok/sage_objective.h"

#include <algorithm>
#include <string>

namespace sagetok {

double SentenceNll(std::span<const TokenId> ids, const SkipGramTable& table,
                   int window) {
  const auto n = static_cast<std::ptrdiff_t>(ids.size());
  for (TokenId id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= table.rows) {
      ThrowInvariant("token id " + std::to_string(id) + " outside embedding table");
    }
  }
  const std::size_t dim = static_cast<std::size_t>(table.dim);
  double nll = 0.0;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const float* t = table.target.data() + static_cast<std::size_t>(ids[i]) * dim;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - window);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + window);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      if (j == i) continue;
      const float* c = table.context.data() + static_cast<std::size_t>(ids[j]) * dim;
      double dot = 0.0;
      for (std::size_t d = 0; d < dim; ++d) dot += static_cast<double>(t[d]) * c[d];
      nll += NegLogSigmoid(dot);
    }
  }
  return nll;
}

double CorpusNll(const SentenceStore& store, const SkipGramTable& table, int window) {
  if (store.vocab_hash != table.vocab_hash) {
    ThrowInvariant("store and embedding table were built for different vocabularies");
  }
  double total = 0.0;
  for (const auto& s : store.encoded) total += SentenceNll(s.ids, table, window);
  return total;
}

SentenceScorer NllScorer(const SkipGramTable& table, int window) {
  return [&table, window](std::span<const TokenId> ids) {
    return SentenceNll(ids, table, window);
  };
}

AblationLoss ComputeAblationLoss(TokenId token, const SentenceStore& store,
                                 const TokenIndex& index, const Vocabulary& vocab,
                                 const SkipGramTable& table, const CompiledVocab& cv,
                                 int window) {
  if (token < 0 || static_cast<std::size_t>(token) >= vocab.size()) {
    ThrowInvariant("token id " + std::to_string(token) + " out of range");
  }
  if (vocab.IsSingleChar(token)) {
    ThrowInvariant("single-character token '" + vocab.token(token) +
                   "' cannot be ablated");
  }
  AblationLoss out;
  out.token = token;
  const auto postings = index.Postings(token);
  out.affected_sentences = postings.size();
  if (postings.empty()) return out;
  if (table.rows < cv.id_space()) {
    ThrowInvariant("embedding table lacks rows for surviving tokens");
  }
  out.loss = ScoreRemoval(token, store, index, cv, NllScorer(table, window));
  return out;
}

}  // namespace sagetok
