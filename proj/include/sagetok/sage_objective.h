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

#ifndef SAGETOK_SAGE_OBJECTIVE_H_
#define SAGETOK_SAGE_OBJECTIVE_H_

#include <cmath>
#include <span>

#include "sagetok/corpus.h"
#include "sagetok/embeddings.h"
#include "sagetok/encoder.h"
#include "sagetok/vocabulary.h"

namespace sagetok {

// -log(sigmoid(x)) = log(1 + exp(-x)), stable for large |x|.
inline double NegLogSigmoid(double x) {
  return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

// Skipgram negative log-likelihood of one sentence: for every position t and
// every other position c at most `window` tokens away (windows clipped at the
// sentence ends), adds -log sigmoid(target[t] . context[c]). No negative
// samples. Throws kInvariant on ids outside the table (including UNK).
double SentenceNll(std::span<const TokenId> ids, const SkipGramTable& table,
                   int window);

// Sum of SentenceNll over the store in sentence order. Throws kInvariant if
// the store and table were built for different vocabularies.
double CorpusNll(const SentenceStore& store, const SkipGramTable& table, int window);

// Scorer bound to a table, for RetokenizeSentences / RescoreStore.
SentenceScorer NllScorer(const SkipGramTable& table, int window);

struct AblationLoss {
  TokenId token = -1;
  double loss = 0.0;  // NLL(vocab without token) - NLL(vocab)
  std::size_t affected_sentences = 0;
};

// Change in corpus NLL if `token` were removed, computed on its postings
// only. `cv` is the current encoder; the store, index and table are left
// untouched. Throws kInvariant for single-character tokens or when the table
// does not cover the encoder's id space.
AblationLoss ComputeAblationLoss(TokenId token, const SentenceStore& store,
                                 const TokenIndex& index, const Vocabulary& vocab,
                                 const SkipGramTable& table, const CompiledVocab& cv,
                                 int window);

}  // namespace sagetok

#endif  // SAGETOK_SAGE_OBJECTIVE_H_
