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

#ifndef SAGETOK_COMMON_H_
#define SAGETOK_COMMON_H_

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sagetok {

using TokenId = std::int32_t;
using SentenceId = std::uint32_t;

// Emitted for characters that no vocabulary token covers. Never a valid
// vocabulary index.
inline constexpr TokenId kUnkId = std::numeric_limits<TokenId>::max();

// U+2581 LOWER ONE EIGHTH BLOCK, prefixed to every word.
inline constexpr std::string_view kBoundaryMarker = "\xE2\x96\x81";

inline constexpr std::string_view kVersion = "0.3.0";

enum class ErrorKind {
  kConfig,     // bad arguments or configuration
  kData,       // unreadable or malformed input
  kInvariant,  // internal consistency violation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void ThrowConfig(const std::string& msg) {
  throw Error(ErrorKind::kConfig, msg);
}
[[noreturn]] inline void ThrowData(const std::string& msg) {
  throw Error(ErrorKind::kData, msg);
}
[[noreturn]] inline void ThrowInvariant(const std::string& msg) {
  throw Error(ErrorKind::kInvariant, msg);
}

// 64-bit FNV-1a, used for vocabulary / corpus / config fingerprints.
class Fingerprint {
 public:
  void Update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
  }
  void UpdateU64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h_ ^= (v >> (8 * i)) & 0xff;
      h_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string HexDigest(std::uint64_t v);

}  // namespace sagetok

#endif  // SAGETOK_COMMON_H_
