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

#ifndef SAGETOK_VOCABULARY_H_
#define SAGETOK_VOCABULARY_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sagetok/common.h"

namespace sagetok {

enum class Provenance : std::uint8_t {
  kAlphabet,   // single character observed in the training corpus
  kMerged,     // produced by a BPE merge (or read from a vocabulary file)
  kSubstring,  // frequent substring seeded by the unigram trainer
  kSurvivor,   // multi-character token that survived top-down pruning
};

std::string_view ProvenanceName(Provenance p);

// Ordered set of subword tokens. Ids are dense and follow insertion order.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Appends `token`; throws kInvariant if it is already present or empty.
  TokenId Add(std::string token, Provenance provenance);

  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

  const std::string& token(TokenId id) const { return tokens_[id]; }
  Provenance provenance(TokenId id) const { return provenance_[id]; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // True if the token is exactly one UTF-8 character.
  bool IsSingleChar(TokenId id) const { return single_char_[id]; }

  std::optional<TokenId> Find(std::string_view token) const;
  bool Contains(std::string_view token) const { return Find(token).has_value(); }

  // Number of single-character tokens.
  std::size_t AlphabetSize() const;

  // Fingerprint of the ordered token list.
  std::uint64_t Hash() const;

  // Tokens with keep[id] set, in the original order. Multi-character tokens
  // are relabelled with `survivor` when it is given.
  Vocabulary Subset(const std::vector<bool>& keep,
                    std::optional<Provenance> survivor = std::nullopt) const;

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_;
  }

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::vector<std::string> tokens_;
  std::vector<Provenance> provenance_;
  std::vector<bool> single_char_;
  std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>> id_of_;
};

// One token per line, file order = vocabulary order. Single-character tokens
// read back as kAlphabet, everything else as kMerged.
void WriteVocabFile(const std::filesystem::path& path, const Vocabulary& vocab);
Vocabulary ReadVocabFile(const std::filesystem::path& path);

}  // namespace sagetok

#endif  // SAGETOK_VOCABULARY_H_
