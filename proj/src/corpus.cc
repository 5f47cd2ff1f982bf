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

#include "sagetok/corpus.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <utility>

#include "sagetok/encoder.h"
#include "sagetok/parallel.h"
#include "sagetok/utf8.h"
#include "sagetok/vocabulary.h"

namespace sagetok {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

void SortedErase(std::vector<SentenceId>& v, std::span<const SentenceId> drop) {
  // Both sorted.
  std::vector<SentenceId> out;
  out.reserve(v.size());
  std::set_difference(v.begin(), v.end(), drop.begin(), drop.end(),
                      std::back_inserter(out));
  v.swap(out);
}

void SortedInsert(std::vector<SentenceId>& v, std::span<const SentenceId> add) {
  std::vector<SentenceId> out;
  out.reserve(v.size() + add.size());
  std::set_union(v.begin(), v.end(), add.begin(), add.end(),
                 std::back_inserter(out));
  v.swap(out);
}

// Distinct non-UNK ids of a sentence, ascending.
std::vector<TokenId> DistinctIds(std::span<const TokenId> ids) {
  std::vector<TokenId> out;
  out.reserve(ids.size());
  for (TokenId id : ids) {
    if (id != kUnkId) out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::uint64_t RawCorpus::Hash() const {
  Fingerprint fp;
  fp.UpdateU64(lines.size());
  for (const auto& l : lines) {
    fp.Update(l);
    fp.Update(std::string_view("\n", 1));
  }
  return fp.value();
}

std::string NormalizeLine(std::string_view line, const NormalizationPolicy& policy) {
  std::string out;
  out.reserve(line.size());
  if (policy.collapse_whitespace) {
    bool pending_space = false;
    for (char c : line) {
      if (IsSpace(c)) {
        pending_space = !out.empty();
        continue;
      }
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  } else {
    out.assign(line);
  }
  if (policy.lowercase) {
    for (char& c : out) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
  }
  return out;
}

namespace {

void AppendLine(RawCorpus& corpus, std::string_view raw, std::size_t lineno,
                const NormalizationPolicy& policy) {
  if (!utf8::IsValid(raw)) {
    ThrowData("invalid UTF-8 on line " + std::to_string(lineno));
  }
  std::string line = NormalizeLine(raw, policy);
  if (!line.empty()) corpus.lines.push_back(std::move(line));
}

}  // namespace

RawCorpus LoadCorpus(const std::filesystem::path& path,
                     const NormalizationPolicy& policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowData("cannot read corpus " + path.string());
  RawCorpus corpus;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    try {
      AppendLine(corpus, raw, lineno, policy);
    } catch (const Error& e) {
      ThrowData(path.string() + ": " + e.what());
    }
  }
  if (in.bad()) ThrowData("read error on " + path.string());
  if (corpus.empty()) ThrowData("corpus " + path.string() + " has no non-empty lines");
  return corpus;
}

RawCorpus CorpusFromLines(std::span<const std::string> lines,
                          const NormalizationPolicy& policy) {
  RawCorpus corpus;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    AppendLine(corpus, lines[i], i + 1, policy);
  }
  if (corpus.empty()) ThrowData("corpus has no non-empty lines");
  return corpus;
}

PretokenizedSentence Pretokenize(std::string_view line) {
  PretokenizedSentence out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    std::size_t end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    if (end > pos) {
      std::string word(kBoundaryMarker);
      word.append(line.substr(pos, end - pos));
      out.words.push_back(std::move(word));
    }
    pos = end + 1;
  }
  return out;
}

std::string JoinWords(const PretokenizedSentence& sentence) {
  std::string out;
  for (const auto& w : sentence.words) {
    if (!out.empty()) out.push_back(' ');
    out.append(w, kBoundaryMarker.size());
  }
  return out;
}

std::size_t SentenceStore::TokenCount() const {
  std::size_t n = 0;
  for (const auto& s : encoded) n += s.ids.size();
  return n;
}

double SentenceStore::CachedTotal() const {
  double total = 0.0;
  for (double v : nll) total += v;
  return total;
}

std::vector<std::string> DecodeWords(const EncodedSentence& sentence,
                                     const Vocabulary& vocab) {
  std::vector<std::string> words;
  words.reserve(sentence.word_starts.size());
  std::size_t unk_pos = 0;
  const std::string_view unks(sentence.unk_chars);
  for (std::size_t w = 0; w < sentence.word_starts.size(); ++w) {
    const std::size_t begin = sentence.word_starts[w];
    const std::size_t end = w + 1 < sentence.word_starts.size()
                                ? sentence.word_starts[w + 1]
                                : sentence.ids.size();
    std::string word;
    for (std::size_t i = begin; i < end; ++i) {
      const TokenId id = sentence.ids[i];
      if (id == kUnkId) {
        const std::size_t n = utf8::FirstCharLength(unks.substr(unk_pos));
        word.append(unks.substr(unk_pos, n));
        unk_pos += n;
      } else {
        word.append(vocab.token(id));
      }
    }
    words.push_back(std::move(word));
  }
  return words;
}

std::string DecodeLine(const EncodedSentence& sentence, const Vocabulary& vocab) {
  PretokenizedSentence p;
  p.words = DecodeWords(sentence, vocab);
  return JoinWords(p);
}

TokenIndex BuildIndex(const SentenceStore& store, std::size_t id_space) {
  TokenIndex index;
  index.postings.resize(id_space);
  index.frequency.assign(id_space, 0);
  for (std::size_t s = 0; s < store.size(); ++s) {
    const auto& ids = store.encoded[s].ids;
    for (TokenId id : ids) {
      if (id == kUnkId) continue;
      if (static_cast<std::size_t>(id) >= id_space) {
        ThrowInvariant("token id " + std::to_string(id) + " outside id space");
      }
      ++index.frequency[id];
      auto& p = index.postings[id];
      if (p.empty() || p.back() != s) p.push_back(static_cast<SentenceId>(s));
    }
  }
  return index;
}

RetokenizeResult RetokenizeSentences(SentenceStore& store, TokenIndex& index,
                                     std::span<const TokenId> removed,
                                     const Vocabulary& vocab,
                                     const CompiledVocab& cv,
                                     const SentenceScorer& scorer) {
  RetokenizeResult result;
  for (TokenId t : removed) {
    if (t < 0 || static_cast<std::size_t>(t) >= vocab.size()) {
      ThrowInvariant("removed token id " + std::to_string(t) + " out of range");
    }
    if (vocab.IsSingleChar(t)) {
      ThrowInvariant("cannot remove single-character token '" + vocab.token(t) + "'");
    }
    if (cv.Contains(t)) {
      ThrowInvariant("encoder still contains removed token '" + vocab.token(t) + "'");
    }
  }

  std::vector<SentenceId> affected;
  for (TokenId t : removed) {
    const auto p = index.Postings(t);
    affected.insert(affected.end(), p.begin(), p.end());
  }
  std::sort(affected.begin(), affected.end());
  affected.erase(std::unique(affected.begin(), affected.end()), affected.end());

  // token -> sentences gaining / losing it
  std::vector<std::pair<TokenId, SentenceId>> gained;
  std::vector<std::pair<TokenId, SentenceId>> lost;
  for (SentenceId s : affected) {
    EncodedSentence fresh =
        ReencodeExcluding(store.source[s], store.encoded[s], cv, removed);
    const auto before = DistinctIds(store.encoded[s].ids);
    const auto after = DistinctIds(fresh.ids);
    for (TokenId id : store.encoded[s].ids) {
      if (id != kUnkId) --index.frequency[id];
    }
    for (TokenId id : fresh.ids) {
      if (id != kUnkId) ++index.frequency[id];
    }
    std::vector<TokenId> diff;
    std::set_difference(before.begin(), before.end(), after.begin(), after.end(),
                        std::back_inserter(diff));
    for (TokenId id : diff) lost.emplace_back(id, s);
    diff.clear();
    std::set_difference(after.begin(), after.end(), before.begin(), before.end(),
                        std::back_inserter(diff));
    for (TokenId id : diff) gained.emplace_back(id, s);

    const double score = scorer(fresh.ids);
    result.delta += score - store.nll[s];
    store.nll[s] = score;
    store.encoded[s] = std::move(fresh);
  }

  auto apply = [&](std::vector<std::pair<TokenId, SentenceId>>& edits, bool add) {
    std::sort(edits.begin(), edits.end());
    std::size_t i = 0;
    std::vector<SentenceId> batch;
    while (i < edits.size()) {
      const TokenId id = edits[i].first;
      batch.clear();
      for (; i < edits.size() && edits[i].first == id; ++i) {
        batch.push_back(edits[i].second);
      }
      if (add) {
        SortedInsert(index.postings[id], batch);
      } else {
        SortedErase(index.postings[id], batch);
      }
    }
  };
  apply(lost, false);
  apply(gained, true);

  result.affected = std::move(affected);
  return result;
}

double ScoreRemoval(TokenId token, const SentenceStore& store,
                    const TokenIndex& index, const CompiledVocab& cv,
                    const SentenceScorer& scorer) {
  const TokenId excluded[] = {token};
  double delta = 0.0;
  for (SentenceId s : index.Postings(token)) {
    const EncodedSentence fresh =
        ReencodeExcluding(store.source[s], store.encoded[s], cv, excluded);
    delta += scorer(fresh.ids) - store.nll[s];
  }
  return delta;
}

double RescoreStore(SentenceStore& store, const SentenceScorer& scorer, int threads) {
  store.nll.resize(store.size());
  ParallelFor(store.size(), threads, [&](std::size_t b, std::size_t e, int) {
    for (std::size_t i = b; i < e; ++i) store.nll[i] = scorer(store.encoded[i].ids);
  });
  return store.CachedTotal();
}

}  // namespace sagetok
