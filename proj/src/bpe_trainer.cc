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

#include "sagetok/bpe_trainer.h"

#include <algorithm>
#include <fstream>
#include <optional>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "sagetok/utf8.h"

namespace sagetok {
namespace {

using PairKey = std::uint64_t;

PairKey MakeKey(std::uint32_t l, std::uint32_t r) {
  return (static_cast<PairKey>(l) << 32) | r;
}
std::uint32_t KeyLeft(PairKey k) { return static_cast<std::uint32_t>(k >> 32); }
std::uint32_t KeyRight(PairKey k) { return static_cast<std::uint32_t>(k); }

struct Word {
  std::vector<std::uint32_t> syms;
  std::int64_t count = 0;
};

// Incremental pair statistics over symbolized word types.
class PairTable {
 public:
  explicit PairTable(const std::vector<std::string>* symbols) : symbols_(symbols) {}

  struct Entry {
    std::int64_t count;
    PairKey key;
  };

  void Add(PairKey k, std::int64_t delta, std::uint32_t word) {
    auto& c = counts_[k];
    c += delta;
    if (delta > 0) where_[k].push_back(word);
    touched_.insert(k);
  }

  void Remove(PairKey k, std::int64_t delta) {
    auto it = counts_.find(k);
    it->second -= delta;
    touched_.insert(k);
  }

  // Pushes fresh heap entries for every pair whose count changed.
  void Flush() {
    for (PairKey k : touched_) {
      auto it = counts_.find(k);
      if (it == counts_.end()) continue;
      if (it->second <= 0) {
        counts_.erase(it);
        where_.erase(k);
      } else {
        heap_.push(Entry{it->second, k});
      }
    }
    touched_.clear();
  }

  // Best live pair, or nullopt when no pair is left.
  std::optional<Entry> Top() {
    while (!heap_.empty()) {
      const Entry e = heap_.top();
      auto it = counts_.find(e.key);
      if (it != counts_.end() && it->second == e.count) return e;
      heap_.pop();
    }
    return std::nullopt;
  }

  void Pop() { heap_.pop(); }

  std::vector<std::uint32_t> TakeWords(PairKey k) {
    auto it = where_.find(k);
    if (it == where_.end()) return {};
    std::vector<std::uint32_t> out = std::move(it->second);
    where_.erase(it);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  struct Less {
    const std::vector<std::string>* symbols;
    // priority_queue puts the greatest first: higher count, then the
    // lexicographically smaller (left, right).
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.count != b.count) return a.count < b.count;
      const auto& s = *symbols;
      const int cl = s[KeyLeft(a.key)].compare(s[KeyLeft(b.key)]);
      if (cl != 0) return cl > 0;
      return s[KeyRight(a.key)].compare(s[KeyRight(b.key)]) > 0;
    }
  };

  const std::vector<std::string>* symbols_;
  std::unordered_map<PairKey, std::int64_t> counts_;
  std::unordered_map<PairKey, std::vector<std::uint32_t>> where_;
  std::unordered_set<PairKey> touched_;
  std::priority_queue<Entry, std::vector<Entry>, Less> heap_{Less{symbols_}};
};

}  // namespace

std::map<std::string, std::int64_t> CountWords(const RawCorpus& corpus) {
  std::map<std::string, std::int64_t> counts;
  for (const auto& line : corpus.lines) {
    for (auto& w : Pretokenize(line).words) ++counts[std::move(w)];
  }
  return counts;
}

std::vector<std::string> CorpusAlphabet(const RawCorpus& corpus) {
  std::set<std::string> chars;
  chars.emplace(kBoundaryMarker);
  for (const auto& line : corpus.lines) {
    for (auto c : utf8::SplitChars(line)) {
      if (c != " ") chars.emplace(c);
    }
  }
  return {chars.begin(), chars.end()};
}

BpeResult TrainBpe(const RawCorpus& corpus, std::size_t target_size) {
  if (corpus.empty()) ThrowData("cannot train BPE on an empty corpus");
  const auto alphabet = CorpusAlphabet(corpus);
  if (target_size < alphabet.size()) {
    ThrowConfig("vocabulary size " + std::to_string(target_size) +
                " is below the corpus alphabet size " +
                std::to_string(alphabet.size()));
  }

  BpeResult result;
  std::vector<std::string> symbols;
  std::unordered_map<std::string, std::uint32_t> symbol_id;
  for (const auto& c : alphabet) {
    symbol_id.emplace(c, static_cast<std::uint32_t>(symbols.size()));
    symbols.push_back(c);
    result.vocab.Add(c, Provenance::kAlphabet);
  }

  std::vector<Word> words;
  for (const auto& [text, count] : CountWords(corpus)) {
    Word w;
    w.count = count;
    for (auto c : utf8::SplitChars(text)) w.syms.push_back(symbol_id.at(std::string(c)));
    words.push_back(std::move(w));
  }

  PairTable pairs(&symbols);
  for (std::uint32_t wi = 0; wi < words.size(); ++wi) {
    const auto& s = words[wi].syms;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      pairs.Add(MakeKey(s[i], s[i + 1]), words[wi].count, wi);
    }
  }
  pairs.Flush();

  while (result.vocab.size() < target_size) {
    const auto top = pairs.Top();
    if (!top || top->count < kMinMergeCount) {
      result.stopped_early = true;
      break;
    }
    pairs.Pop();
    const std::uint32_t left = KeyLeft(top->key);
    const std::uint32_t right = KeyRight(top->key);
    std::string merged_str = symbols[left] + symbols[right];
    result.merges.push_back(
        MergeRecord{symbols[left], symbols[right], merged_str, top->count});
    // Different pairs can spell the same string ("ab"+"c", "a"+"bc"); they
    // then share one symbol and the vocabulary does not grow.
    std::uint32_t merged;
    if (const auto it = symbol_id.find(merged_str); it != symbol_id.end()) {
      merged = it->second;
    } else {
      merged = static_cast<std::uint32_t>(symbols.size());
      symbol_id.emplace(merged_str, merged);
      symbols.push_back(merged_str);
      result.vocab.Add(merged_str, Provenance::kMerged);
    }

    for (std::uint32_t wi : pairs.TakeWords(top->key)) {
      Word& w = words[wi];
      auto& s = w.syms;
      bool present = false;
      for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (s[i] == left && s[i + 1] == right) {
          present = true;
          break;
        }
      }
      if (!present) continue;
      for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        pairs.Remove(MakeKey(s[i], s[i + 1]), w.count);
      }
      std::vector<std::uint32_t> next;
      next.reserve(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (i + 1 < s.size() && s[i] == left && s[i + 1] == right) {
          next.push_back(merged);
          ++i;
        } else {
          next.push_back(s[i]);
        }
      }
      s.swap(next);
      for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        pairs.Add(MakeKey(s[i], s[i + 1]), w.count, wi);
      }
    }
    pairs.Flush();
  }
  return result;
}

MergeRecord MergeStep(WordSymbols& words) {
  std::map<std::pair<std::string, std::string>, std::int64_t> counts;
  for (const auto& [syms, count] : words) {
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      counts[{syms[i], syms[i + 1]}] += count;
    }
  }
  if (counts.empty()) ThrowData("no adjacent pair to merge");
  // std::map iterates in (left, right) order, so the first maximum wins ties.
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  const auto& [l, r] = best->first;
  MergeRecord rec{l, r, l + r, best->second};

  WordSymbols next;
  for (const auto& [syms, count] : words) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < syms.size(); ++i) {
      if (i + 1 < syms.size() && syms[i] == l && syms[i + 1] == r) {
        out.push_back(rec.result);
        ++i;
      } else {
        out.push_back(syms[i]);
      }
    }
    next[std::move(out)] += count;
  }
  words.swap(next);
  return rec;
}

void WriteMergeLog(const std::filesystem::path& path,
                   const std::vector<MergeRecord>& merges) {
  std::ofstream out(path, std::ios::binary);
  if (!out) ThrowData("cannot write " + path.string());
  for (const auto& m : merges) {
    out << m.left << '\t' << m.right << '\t' << m.count << '\n';
  }
}

}  // namespace sagetok
