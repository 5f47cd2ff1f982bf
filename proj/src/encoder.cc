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

#include "sagetok/encoder.h"

#include <algorithm>
#include <map>

#include "sagetok/parallel.h"
#include "sagetok/utf8.h"

namespace sagetok {
namespace {

bool IsExcluded(TokenId id, std::span<const TokenId> excluded) {
  return std::find(excluded.begin(), excluded.end(), id) != excluded.end();
}

}  // namespace

CompiledVocab CompiledVocab::Compile(const Vocabulary& vocab) {
  CompiledVocab cv;
  cv.Build(vocab.tokens(), std::vector<bool>(vocab.size(), true));
  cv.vocab_hash_ = vocab.Hash();
  return cv;
}

CompiledVocab CompiledVocab::Compile(const Vocabulary& vocab,
                                     const std::vector<bool>& active) {
  if (active.size() != vocab.size()) {
    ThrowInvariant("active mask size does not match vocabulary");
  }
  CompiledVocab cv;
  cv.Build(vocab.tokens(), active);
  cv.vocab_hash_ = vocab.Hash();
  return cv;
}

CompiledVocab CompiledVocab::Compile(std::span<const std::string> tokens) {
  CompiledVocab cv;
  cv.Build(tokens, std::vector<bool>(tokens.size(), true));
  Fingerprint fp;
  fp.UpdateU64(tokens.size());
  for (const auto& t : tokens) {
    fp.Update(t);
    fp.Update(std::string_view("\n", 1));
  }
  cv.vocab_hash_ = fp.value();
  return cv;
}

void CompiledVocab::Build(std::span<const std::string> tokens,
                          const std::vector<bool>& active) {
  // Pointer trie first, then flattened so each node's edges are contiguous
  // and sorted by label.
  struct TmpNode {
    TokenId token = -1;
    std::map<unsigned char, std::uint32_t> children;
  };
  std::vector<TmpNode> tmp(1);
  contains_.assign(tokens.size(), false);
  token_count_ = 0;
  for (std::size_t id = 0; id < tokens.size(); ++id) {
    if (!active[id]) continue;
    const std::string& t = tokens[id];
    if (t.empty()) ThrowInvariant("empty token in vocabulary");
    std::uint32_t node = 0;
    for (unsigned char c : t) {
      auto it = tmp[node].children.find(c);
      if (it == tmp[node].children.end()) {
        const auto next = static_cast<std::uint32_t>(tmp.size());
        tmp[node].children.emplace(c, next);
        tmp.emplace_back();
        node = next;
      } else {
        node = it->second;
      }
    }
    if (tmp[node].token != -1) ThrowInvariant("duplicate token '" + t + "'");
    tmp[node].token = static_cast<TokenId>(id);
    contains_[id] = true;
    ++token_count_;
  }

  nodes_.assign(tmp.size(), Node{});
  edge_label_.clear();
  edge_target_.clear();
  for (std::size_t i = 0; i < tmp.size(); ++i) {
    nodes_[i].token = tmp[i].token;
    nodes_[i].first_edge = static_cast<std::uint32_t>(edge_label_.size());
    nodes_[i].edge_count = static_cast<std::uint32_t>(tmp[i].children.size());
    for (const auto& [label, target] : tmp[i].children) {
      edge_label_.push_back(label);
      edge_target_.push_back(target);
    }
  }
}

std::optional<CompiledVocab::Match> CompiledVocab::LongestPrefix(
    std::string_view text, std::span<const TokenId> excluded) const {
  std::optional<Match> best;
  if (nodes_.empty()) return best;
  std::uint32_t node = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const Node& n = nodes_[node];
    const auto c = static_cast<unsigned char>(text[i]);
    const auto* first = edge_label_.data() + n.first_edge;
    const auto* last = first + n.edge_count;
    const auto* it = std::lower_bound(first, last, c);
    if (it == last || *it != c) break;
    node = edge_target_[n.first_edge + (it - first)];
    const TokenId tok = nodes_[node].token;
    if (tok >= 0 && (excluded.empty() || !IsExcluded(tok, excluded))) {
      best = Match{tok, i + 1};
    }
  }
  return best;
}

void EncodeWord(std::string_view word, const CompiledVocab& cv,
                std::vector<TokenId>& ids, std::string& unk_chars,
                std::span<const TokenId> excluded) {
  std::size_t pos = 0;
  while (pos < word.size()) {
    const std::string_view rest = word.substr(pos);
    // A match always ends on a character boundary because every token is
    // valid UTF-8.
    if (auto m = cv.LongestPrefix(rest, excluded)) {
      ids.push_back(m->id);
      pos += m->length;
    } else {
      const std::size_t n = utf8::FirstCharLength(rest);
      ids.push_back(kUnkId);
      unk_chars.append(rest.substr(0, n));
      pos += n;
    }
  }
}

EncodedSentence EncodeSentence(const PretokenizedSentence& sentence,
                               const CompiledVocab& cv,
                               std::span<const TokenId> excluded) {
  EncodedSentence out;
  out.word_starts.reserve(sentence.words.size());
  out.ids.reserve(sentence.words.size() * 2);
  for (const auto& w : sentence.words) {
    out.word_starts.push_back(static_cast<std::uint32_t>(out.ids.size()));
    EncodeWord(w, cv, out.ids, out.unk_chars, excluded);
  }
  return out;
}

SentenceStore EncodeCorpus(const RawCorpus& corpus, const CompiledVocab& cv,
                           int threads) {
  SentenceStore store;
  store.source.resize(corpus.size());
  store.encoded.resize(corpus.size());
  store.nll.assign(corpus.size(), 0.0);
  store.vocab_hash = cv.vocab_hash();
  ParallelFor(corpus.size(), threads, [&](std::size_t b, std::size_t e, int) {
    for (std::size_t i = b; i < e; ++i) {
      store.source[i] = Pretokenize(corpus.lines[i]);
      store.encoded[i] = EncodeSentence(store.source[i], cv);
    }
  });
  return store;
}

void ReencodeStore(SentenceStore& store, const CompiledVocab& cv, int threads) {
  store.vocab_hash = cv.vocab_hash();
  ParallelFor(store.size(), threads, [&](std::size_t b, std::size_t e, int) {
    for (std::size_t i = b; i < e; ++i) {
      store.encoded[i] = EncodeSentence(store.source[i], cv);
    }
  });
}

EncodedSentence ReencodeExcluding(const PretokenizedSentence& source,
                                  const EncodedSentence& sentence,
                                  const CompiledVocab& cv,
                                  std::span<const TokenId> excluded) {
  EncodedSentence out;
  out.word_starts.reserve(sentence.word_starts.size());
  out.ids.reserve(sentence.ids.size() + 8);
  std::size_t unk_pos = 0;  // byte offset into sentence.unk_chars
  const std::size_t words = sentence.word_starts.size();
  for (std::size_t w = 0; w < words; ++w) {
    const std::size_t begin = sentence.word_starts[w];
    const std::size_t end = w + 1 < words ? sentence.word_starts[w + 1]
                                          : sentence.ids.size();
    out.word_starts.push_back(static_cast<std::uint32_t>(out.ids.size()));
    bool hit = false;
    std::size_t unk_bytes = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const TokenId id = sentence.ids[i];
      if (id == kUnkId) {
        unk_bytes += utf8::FirstCharLength(
            std::string_view(sentence.unk_chars).substr(unk_pos + unk_bytes));
      } else if (IsExcluded(id, excluded)) {
        hit = true;
      }
    }
    if (hit) {
      EncodeWord(source.words[w], cv, out.ids, out.unk_chars, excluded);
    } else {
      out.ids.insert(out.ids.end(), sentence.ids.begin() + begin,
                     sentence.ids.begin() + end);
      out.unk_chars.append(sentence.unk_chars, unk_pos, unk_bytes);
    }
    unk_pos += unk_bytes;
  }
  return out;
}

}  // namespace sagetok
