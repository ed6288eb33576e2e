// Copyright 2026 The radcmp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RADCMP_TEXT_H_
#define RADCMP_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace radcmp::text {

// A casefolded word together with its byte offsets in the source text.
struct Token {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;
};

bool IsValidUtf8(std::string_view s);

// ASCII letters and digits, plus every byte of a multi-byte UTF-8 sequence.
inline bool IsWordByte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline bool IsSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

inline bool IsPunct(unsigned char c) {
  return c < 0x80 && c > ' ' && c != 0x7f && !IsWordByte(c);
}

// Lowercases ASCII letters; other bytes pass through unchanged.
std::string Casefold(std::string_view s);

std::string_view Trim(std::string_view s);

// Splits on runs of non-word bytes and casefolds each piece.
std::vector<Token> WordTokens(std::string_view s);

// The fixed negation cue list: "no", "not", "without".
bool IsNegationCue(std::string_view casefolded_token);

// Fixed-point formatting ("%.*f").
std::string FormatFixed(double value, int decimals);

}  // namespace radcmp::text

#endif  // RADCMP_TEXT_H_
