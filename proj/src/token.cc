// latrec/token.cc

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

#include "latrec/token.h"

#include "latrec/error.h"

namespace latrec {

std::string check_token(std::string_view text) {
  if (text.empty()) return "empty token";
  if (text == kEpsilon) return "epsilon label";
  for (char c : text)
    if (c == '\t' || c == '\n' || c == '\r') return "token contains TAB or newline";
  return {};
}

std::vector<std::string> assemble_words(std::span<const Token> tokens,
                                        const BoundaryConvention &conv) {
  std::vector<std::string> words;
  bool after_terminal = true;
  for (const Token &tok : tokens) {
    if (conv.is_terminal(tok)) {
      after_terminal = true;
      continue;
    }
    if (conv.starts_word(tok)) {
      words.emplace_back(tok.substr(conv.marker.size()));
    } else if (after_terminal || words.empty()) {
      throw SegmentationError(-1, "token '" + tok + "' does not start a word");
    } else {
      words.back() += tok;
    }
    after_terminal = false;
  }
  return words;
}

std::string tokens_to_text(std::span<const Token> tokens, const BoundaryConvention &conv) {
  bool marked = false;
  for (const Token &t : tokens)
    if (!conv.is_terminal(t) && conv.starts_word(t)) marked = true;
  if (marked) return join(assemble_words(tokens, conv));
  std::vector<std::string> words;
  for (const Token &t : tokens)
    if (!conv.is_terminal(t)) words.push_back(t);
  return join(words);
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string join(std::span<const std::string> parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace latrec
