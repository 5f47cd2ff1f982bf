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

#include "sagetok/analysis.h"

#include <algorithm>
#include <iomanip>
#include <iterator>
#include <limits>

#include "json.hpp"
#include "sagetok/utf8.h"

namespace sagetok {
namespace {

using ojson = nlohmann::ordered_json;

constexpr std::size_t kPairChunk = std::size_t{1} << 22;

// Sorted, deduplicated union of two sorted, deduplicated vectors.
std::vector<std::uint64_t> SortedUnion(const std::vector<std::uint64_t>& a,
                                       const std::vector<std::uint64_t>& b) {
  std::vector<std::uint64_t> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void Flush(std::vector<std::uint64_t>& pending, std::vector<std::uint64_t>& acc) {
  std::sort(pending.begin(), pending.end());
  pending.erase(std::unique(pending.begin(), pending.end()), pending.end());
  acc = SortedUnion(acc, pending);
  pending.clear();
}

ojson HistJson(const Histogram& h) {
  ojson buckets = ojson::object();
  for (const auto& [k, c] : h.buckets) buckets[std::to_string(k)] = c;
  return ojson{{"total", h.total}, {"mean", h.Mean()}, {"buckets", std::move(buckets)}};
}

ojson SideJson(const ExclusiveSide& s) {
  return ojson{{"count", s.tokens.size()},
               {"word_initial_fraction", s.word_initial_fraction},
               {"length_2_3_fraction", s.length_2_3_fraction},
               {"length_5_plus_fraction", s.length_5_plus_fraction},
               {"lengths", HistJson(s.lengths)},
               {"tokens", s.tokens}};
}

void FillSide(ExclusiveSide& side) {
  std::size_t initial = 0;
  for (const auto& t : side.tokens) {
    if (IsWordInitial(t)) ++initial;
    side.lengths.Add(static_cast<std::int64_t>(TokenLength(t)));
  }
  if (side.tokens.empty()) return;
  side.word_initial_fraction =
      static_cast<double>(initial) / static_cast<double>(side.tokens.size());
  side.length_2_3_fraction = side.lengths.Fraction(2, 3);
  side.length_5_plus_fraction =
      side.lengths.Fraction(5, std::numeric_limits<std::int64_t>::max());
}

}  // namespace

void Histogram::Add(std::int64_t key, std::int64_t count) {
  buckets[key] += count;
  total += count;
}

void Histogram::Merge(const Histogram& other) {
  for (const auto& [k, c] : other.buckets) Add(k, c);
}

double Histogram::Mean() const {
  if (total == 0) return 0.0;
  double sum = 0.0;
  for (const auto& [k, c] : buckets) sum += static_cast<double>(k) * static_cast<double>(c);
  return sum / static_cast<double>(total);
}

double Histogram::Fraction(std::int64_t lo, std::int64_t hi) const {
  if (total == 0) return 0.0;
  std::int64_t in = 0;
  for (auto it = buckets.lower_bound(lo); it != buckets.end() && it->first <= hi; ++it) {
    in += it->second;
  }
  return static_cast<double>(in) / static_cast<double>(total);
}

std::size_t TokenLength(std::string_view token) {
  if (token.starts_with(kBoundaryMarker)) token.remove_prefix(kBoundaryMarker.size());
  return utf8::CharCount(token);
}

bool IsWordInitial(std::string_view token) { return token.starts_with(kBoundaryMarker); }

Histogram TokenLengthHist(const Vocabulary& vocab) {
  Histogram h;
  for (const auto& t : vocab.tokens()) h.Add(static_cast<std::int64_t>(TokenLength(t)));
  return h;
}

Histogram FertilityHist(const SentenceStore& store) {
  Histogram h;
  for (const auto& s : store.encoded) {
    const std::size_t words = s.word_starts.size();
    for (std::size_t w = 0; w < words; ++w) {
      const std::size_t end = w + 1 < words ? s.word_starts[w + 1] : s.ids.size();
      h.Add(static_cast<std::int64_t>(end - s.word_starts[w]));
    }
  }
  return h;
}

Histogram FertilityHist(const RawCorpus& corpus, const CompiledVocab& cv, int threads) {
  return FertilityHist(EncodeCorpus(corpus, cv, threads));
}

double TokenStatsTable::MeanRatio() const {
  if (rows.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : rows) sum += r.ratio;
  return sum / static_cast<double>(rows.size());
}

TokenStatsTable TokenStats(const SentenceStore& store, const Vocabulary& vocab,
                           int window, int threads) {
  if (window < 1) ThrowConfig("neighbor window must be >= 1");
  const std::size_t n = store.size();
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max<std::size_t>(n, 1))));
  std::vector<std::vector<std::uint64_t>> pairs(threads);
  std::vector<std::vector<std::int64_t>> freq(threads,
                                              std::vector<std::int64_t>(vocab.size(), 0));
  std::vector<std::int64_t> unk(threads, 0);

  ParallelFor(n, threads, [&](std::size_t begin, std::size_t end, int worker) {
    auto& acc = pairs[worker];
    auto& f = freq[worker];
    std::vector<std::uint64_t> pending;
    for (std::size_t s = begin; s < end; ++s) {
      const auto& ids = store.encoded[s].ids;
      const auto len = static_cast<std::ptrdiff_t>(ids.size());
      for (std::ptrdiff_t i = 0; i < len; ++i) {
        const TokenId a = ids[i];
        if (a == kUnkId) {
          ++unk[worker];
          continue;
        }
        if (static_cast<std::size_t>(a) >= vocab.size()) {
          ThrowInvariant("store references a token outside the vocabulary");
        }
        ++f[a];
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - window);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, i + window);
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
          if (j == i || ids[j] == kUnkId) continue;
          pending.push_back((static_cast<std::uint64_t>(a) << 32) |
                            static_cast<std::uint32_t>(ids[j]));
        }
      }
      if (pending.size() >= kPairChunk) Flush(pending, acc);
    }
    Flush(pending, acc);
  });

  std::vector<std::uint64_t> all;
  for (auto& p : pairs) {
    all = SortedUnion(all, p);
    p.clear();
    p.shrink_to_fit();
  }
  std::vector<std::int64_t> neighbors(vocab.size(), 0);
  for (std::uint64_t key : all) ++neighbors[key >> 32];

  TokenStatsTable table;
  table.window = window;
  for (std::int64_t u : unk) table.unk_count += u;
  for (std::size_t id = 0; id < vocab.size(); ++id) {
    std::int64_t total = 0;
    for (const auto& f : freq) total += f[id];
    if (total == 0) continue;
    TokenStatRow row;
    row.id = static_cast<TokenId>(id);
    row.token = vocab.token(row.id);
    row.frequency = total;
    row.distinct_neighbors = neighbors[id];
    row.ratio = static_cast<double>(neighbors[id]) / static_cast<double>(total);
    row.word_initial = IsWordInitial(row.token);
    table.rows.push_back(std::move(row));
  }
  return table;
}

TokenStatsTable TokenStats(const RawCorpus& corpus, const Vocabulary& vocab, int window,
                           int threads) {
  return TokenStats(EncodeCorpus(corpus, CompiledVocab::Compile(vocab), threads), vocab,
                    window, threads);
}

FrequencyDiff ComputeFrequencyDiff(const TokenStatsTable& a, const TokenStatsTable& b,
                                   std::size_t top_n) {
  std::map<std::string, FrequencyDiffEntry> merged;
  for (const auto& r : a.rows) {
    auto& e = merged[r.token];
    e.token = r.token;
    e.freq_a = r.frequency;
  }
  for (const auto& r : b.rows) {
    auto& e = merged[r.token];
    e.token = r.token;
    e.freq_b = r.frequency;
  }
  FrequencyDiff diff;
  for (auto& [t, e] : merged) {
    if (e.freq_a > e.freq_b) diff.more_in_a.push_back(e);
    if (e.freq_b > e.freq_a) diff.more_in_b.push_back(e);
  }
  auto by_gap = [](bool a_side) {
    return [a_side](const FrequencyDiffEntry& x, const FrequencyDiffEntry& y) {
      const auto gx = a_side ? x.freq_a - x.freq_b : x.freq_b - x.freq_a;
      const auto gy = a_side ? y.freq_a - y.freq_b : y.freq_b - y.freq_a;
      if (gx != gy) return gx > gy;
      return x.token < y.token;
    };
  };
  std::stable_sort(diff.more_in_a.begin(), diff.more_in_a.end(), by_gap(true));
  std::stable_sort(diff.more_in_b.begin(), diff.more_in_b.end(), by_gap(false));
  if (diff.more_in_a.size() > top_n) diff.more_in_a.resize(top_n);
  if (diff.more_in_b.size() > top_n) diff.more_in_b.resize(top_n);
  return diff;
}

VocabDiff ComputeVocabDiff(const Vocabulary& a, const Vocabulary& b) {
  VocabDiff diff;
  diff.size_a = a.size();
  diff.size_b = b.size();
  for (const auto& t : a.tokens()) {
    if (b.Contains(t)) {
      ++diff.intersection;
    } else {
      diff.a_only.tokens.push_back(t);
    }
  }
  for (const auto& t : b.tokens()) {
    if (!a.Contains(t)) diff.b_only.tokens.push_back(t);
  }
  FillSide(diff.a_only);
  FillSide(diff.b_only);
  return diff;
}

Efficiency ComputeEfficiency(const SentenceStore& store) {
  Efficiency e;
  for (const auto& s : store.encoded) {
    e.tokens += static_cast<std::int64_t>(s.ids.size());
    e.words += static_cast<std::int64_t>(s.word_starts.size());
    e.unk += std::count(s.ids.begin(), s.ids.end(), kUnkId);
  }
  if (e.words > 0) {
    e.tokens_per_word = static_cast<double>(e.tokens) / static_cast<double>(e.words);
  }
  return e;
}

Efficiency ComputeEfficiency(const RawCorpus& corpus, const CompiledVocab& cv,
                             int threads) {
  return ComputeEfficiency(EncodeCorpus(corpus, cv, threads));
}

AnalysisReport Analyze(const Vocabulary& vocab, const RawCorpus& corpus,
                       const std::vector<int>& windows, int threads) {
  const SentenceStore store = EncodeCorpus(corpus, CompiledVocab::Compile(vocab), threads);
  AnalysisReport report;
  report.token_length = TokenLengthHist(vocab);
  report.fertility = FertilityHist(store);
  report.efficiency = ComputeEfficiency(store);
  for (int w : windows) report.stats.push_back(TokenStats(store, vocab, w, threads));
  return report;
}

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void WriteHistogramCsv(std::ostream& out, const Histogram& hist, std::string_view key_name) {
  out << key_name << ",count,fraction\n";
  out << std::setprecision(17);
  for (const auto& [k, c] : hist.buckets) {
    out << k << ',' << c << ','
        << (hist.total ? static_cast<double>(c) / static_cast<double>(hist.total) : 0.0)
        << '\n';
  }
}

void WriteTokenStatsCsv(std::ostream& out, const TokenStatsTable& table) {
  out << "token,id,frequency,distinct_neighbors,ratio,word_initial\n";
  out << std::setprecision(17);
  for (const auto& r : table.rows) {
    out << CsvField(r.token) << ',' << r.id << ',' << r.frequency << ','
        << r.distinct_neighbors << ',' << r.ratio << ',' << (r.word_initial ? 1 : 0)
        << '\n';
  }
}

void WriteFrequencyDiffCsv(std::ostream& out, const FrequencyDiff& diff) {
  out << "side,token,freq_a,freq_b\n";
  for (const auto& e : diff.more_in_a) {
    out << "a," << CsvField(e.token) << ',' << e.freq_a << ',' << e.freq_b << '\n';
  }
  for (const auto& e : diff.more_in_b) {
    out << "b," << CsvField(e.token) << ',' << e.freq_a << ',' << e.freq_b << '\n';
  }
}

std::string AnalysisSummaryJson(const AnalysisReport& report) {
  ojson stats = ojson::array();
  for (const auto& t : report.stats) {
    stats.push_back(ojson{{"window", t.window},
                          {"tokens", t.rows.size()},
                          {"mean_neighbor_frequency_ratio", t.MeanRatio()},
                          {"unk_occurrences", t.unk_count}});
  }
  ojson doc{
      {"conventions",
       {{"token_length", "characters, boundary marker excluded"},
        {"fertility", "word occurrences"},
        {"neighbors", "distinct ids within window, both directions, UNK excluded"}}},
      {"token_length", HistJson(report.token_length)},
      {"fertility", HistJson(report.fertility)},
      {"efficiency",
       {{"tokens", report.efficiency.tokens},
        {"words", report.efficiency.words},
        {"unk", report.efficiency.unk},
        {"tokens_per_word", report.efficiency.tokens_per_word}}},
      {"token_stats", std::move(stats)}};
  return doc.dump(2);
}

std::string VocabDiffJson(const VocabDiff& diff) {
  ojson doc{{"size_a", diff.size_a},
            {"size_b", diff.size_b},
            {"intersection", diff.intersection},
            {"a_only", SideJson(diff.a_only)},
            {"b_only", SideJson(diff.b_only)}};
  return doc.dump(2);
}

}  // namespace sagetok
