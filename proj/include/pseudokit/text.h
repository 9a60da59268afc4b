// Copyright 2026 The Pseudokit Authors.
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

// UTF-8 helpers. All public offsets in pseudokit count Unicode scalar values
// (code points), never bytes.

#ifndef PSEUDOKIT_TEXT_H_
#define PSEUDOKIT_TEXT_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pseudokit {

// Throws Error on malformed UTF-8 (overlongs, surrogates, truncation).
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);
void utf8_append(std::string& out, char32_t cp);

// Number of code points in a valid UTF-8 string.
std::size_t utf8_length(std::string_view s);

// Byte offset of every code point boundary: result[i] is the byte offset of
// code point i, result.back() == s.size().
std::vector<std::size_t> utf8_boundaries(std::string_view s);

// Code-point substring [start, end).
std::string utf8_substr(std::string_view s, std::size_t start, std::size_t end);

// Simple one-to-one case folding (ASCII, Latin-1, Latin Extended-A, Greek,
// Cyrillic). Length in code points is preserved.
char32_t fold_case(char32_t cp);
std::u32string fold_case(std::u32string_view s);
std::string fold_case(std::string_view s);

bool is_word_char(char32_t cp);

// True if [start, end) of `text` is not glued to neighbouring word
// characters. The check only applies on an edge whose own character is a word
// character, mirroring the regex \b assertion.
bool at_word_boundary(std::u32string_view text, std::size_t start,
                      std::size_t end);

// Every occurrence of `needle` in `haystack` (overlapping allowed) that sits
// on word boundaries. Returns code-point start offsets.
std::vector<std::size_t> find_word_occurrences(std::u32string_view haystack,
                                               std::u32string_view needle);

bool contains_word(std::u32string_view haystack, std::u32string_view needle);

std::string_view trim(std::string_view s);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view s);

}  // namespace pseudokit

#endif  // PSEUDOKIT_TEXT_H_
