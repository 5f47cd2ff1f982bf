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

#include "sagetok/vocabulary.h"

#include <algorithm>
#include <fstream>

#include "sagetok/utf8.h"

namespace sagetok {

std::string_view ProvenanceName(Provenance p) {
  switch (p) {
    case Provenance::kAlphabet:
      return "alphabet";
    case Provenance::kMerged:
      return "merged";
    case Provenance::kSubstring:
      return "substring";
    case Provenance::kSurvivor:
      return "survivor";
  }
  return "unknown";
}

TokenId Vocabulary::Add(std::string token, Provenance provenance) {
  if (token.empty()) ThrowInvariant("empty token");
  if (id_of_.find(std::string_view(token)) != id_of_.end()) {
    ThrowInvariant("duplicate token '" + token + "'");
  }
  const auto id = static_cast<TokenId>(tokens_.size());
  const bool single = utf8::FirstCharLength(token) == token.size();
  id_of_.emplace(token, id);
  tokens_.push_back(std::move(token));
  provenance_.push_back(provenance);
  single_char_.push_back(single);
  return id;
}

std::optional<TokenId> Vocabulary::Find(std::string_view token) const {
  const auto it = id_of_.find(token);
  if (it == id_of_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::AlphabetSize() const {
  return static_cast<std::size_t>(
      std::count(single_char_.begin(), single_char_.end(), true));
}

std::uint64_t Vocabulary::Hash() const {
  Fingerprint fp;
  fp.UpdateU64(tokens_.size());
  for (const auto& t : tokens_) {
    fp.Update(t);
    fp.Update(std::string_view("\n", 1));
  }
  return fp.value();
}

Vocabulary Vocabulary::Subset(const std::vector<bool>& keep,
                              std::optional<Provenance> survivor) const {
  Vocabulary out;
  for (std::size_t id = 0; id < tokens_.size(); ++id) {
    if (!keep[id]) continue;
    Provenance p = provenance_[id];
    if (survivor && !single_char_[id]) p = *survivor;
    out.Add(tokens_[id], p);
  }
  return out;
}

void WriteVocabFile(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) ThrowData("cannot write " + path.string());
  for (const auto& t : vocab.tokens()) out << t << '\n';
  if (!out) ThrowData("write failed: " + path.string());
}

Vocabulary ReadVocabFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowData("cannot read vocabulary " + path.string());
  Vocabulary vocab;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!utf8::IsValid(line)) {
      ThrowData(path.string() + ":" + std::to_string(lineno) + ": invalid UTF-8");
    }
    if (vocab.Contains(line)) {
      ThrowData(path.string() + ":" + std::to_string(lineno) +
                ": duplicate token '" + line + "'");
    }
    const bool single = utf8::FirstCharLength(line) == line.size();
    vocab.Add(line, single ? Provenance::kAlphabet : Provenance::kMerged);
  }
  if (vocab.empty()) ThrowData("empty vocabulary " + path.string());
  return vocab;
}

}  // namespace sagetok
