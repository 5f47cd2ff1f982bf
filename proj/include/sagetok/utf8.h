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

#ifndef SAGETOK_UTF8_H_
#define SAGETOK_UTF8_H_

#include <cstddef>
#include <string_view>
#include <vector>

namespace sagetok::utf8 {

// Byte length of the sequence introduced by `lead`, or 0 if `lead` cannot
// start a sequence.
inline std::size_t SequenceLength(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  if ((lead & 0xF8) == 0xF0) return 4;
  return 0;
}

// Strict validation: rejects overlongs, surrogates and code points above
// U+10FFFF.
bool IsValid(std::string_view s);

// Length in bytes of the first character of `s`. `s` must be valid and
// non-empty.
inline std::size_t FirstCharLength(std::string_view s) {
  const std::size_t n = SequenceLength(static_cast<unsigned char>(s[0]));
  return n == 0 || n > s.size() ? 1 : n;
}

std::size_t CharCount(std::string_view s);

// Views into `s`, one per character.
std::vector<std::string_view> SplitChars(std::string_view s);

}  // namespace sagetok::utf8

#endif  // SAGETOK_UTF8_H_
