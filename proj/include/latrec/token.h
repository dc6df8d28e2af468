// latrec/token.h

// Copyright 2026 The latrec Authors.
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

#ifndef LATREC_TOKEN_H_
#define LATREC_TOKEN_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace latrec {

// A token is any non-empty UTF-8 string without TAB or newline. Word, ASR BPE
// and PLM BPE tokens all share this representation; which space a lattice
// lives in is a property of the lattice, not of the type.
using Token = std::string;
using TokenSeq = std::vector<Token>;

inline constexpr std::string_view kEpsilon = "<eps>";
inline constexpr std::string_view kDefaultTerminal = "</s>";
// U+2581 LOWER ONE EIGHTH BLOCK, the SentencePiece word marker.
inline constexpr std::string_view kDefaultMarker = "▁";

// Empty string if `text` is a legal token, otherwise the reason it is not.
std::string check_token(std::string_view text);

// How sub-word tokens are glued back into words. A token starting with
// `marker` opens a new word; any other token continues the current one.
// `terminal` ends the sentence and never contributes to a word.
struct BoundaryConvention {
  std::string marker{kDefaultMarker};
  Token terminal{kDefaultTerminal};

  bool starts_word(std::string_view token) const {
    return token.starts_with(marker);
  }
  bool is_terminal(std::string_view token) const { return token == terminal; }
};

// Assembles words from a token sequence. Throws SegmentationError (node -1)
// if the first non-terminal token does not start a word.
std::vector<std::string> assemble_words(std::span<const Token> tokens,
                                        const BoundaryConvention &conv);

// Display text for a token sequence. Marker-carrying sequences are assembled
// into words; sequences with no marked token are taken to be words already.
// The terminal is dropped either way.
std::string tokens_to_text(std::span<const Token> tokens, const BoundaryConvention &conv);

// Splits on runs of ASCII whitespace.
std::vector<std::string> split_words(std::string_view text);

std::string join(std::span<const std::string> parts, std::string_view sep = " ");

}  // namespace latrec

#endif  // LATREC_TOKEN_H_
