// latrec/retokenize.h

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

#ifndef LATREC_RETOKENIZE_H_
#define LATREC_RETOKENIZE_H_

#include <filesystem>
#include <string>
#include <vector>

#include "latrec/lattice.h"
#include "latrec/token.h"

namespace latrec {

// Splits one word into sub-word tokens. The first token must start with the
// convention's marker and no other token may, so that joining the pieces and
// dropping the marker restores the word.
class WordTokenizer {
 public:
  virtual ~WordTokenizer() = default;
  virtual TokenSeq split(const std::string &word) const = 0;
  virtual const BoundaryConvention &convention() const = 0;
};

// split(w) = { marker + w }.
class IdentityTokenizer : public WordTokenizer {
 public:
  explicit IdentityTokenizer(BoundaryConvention conv = {}) : conv_(std::move(conv)) {}
  TokenSeq split(const std::string &word) const override { return {conv_.marker + word}; }
  const BoundaryConvention &convention() const override { return conv_; }

 private:
  BoundaryConvention conv_;
};

// Greedy longest-match-first tokenizer over a fixed vocabulary. Word-initial
// entries carry the marker. Where no entry matches, a single UTF-8 code point
// is emitted so that every word can be split.
class VocabTokenizer : public WordTokenizer {
 public:
  VocabTokenizer(std::vector<Token> vocab, BoundaryConvention conv = {});
  // One token per line; blank and '#' lines skipped.
  static VocabTokenizer from_file(const std::filesystem::path &path,
                                  BoundaryConvention conv = {});

  TokenSeq split(const std::string &word) const override;
  const BoundaryConvention &convention() const override { return conv_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  const std::vector<Token> &vocabulary() const { return vocab_; }

 private:
  std::vector<Token> vocab_;  // sorted
  std::size_t max_len_ = 0;
  BoundaryConvention conv_;
};

// BPE lattice to word lattice. Word arcs connect word-boundary nodes; a word
// arc's score is the sum of its sub-token arc scores; duplicate
// (src, dst, word) arcs keep the max. Terminal arcs are copied unchanged.
// Throws SegmentationError when a path starts a word with a non-initial token.
Lattice bpe_to_word(const Lattice &lat, const BoundaryConvention &conv);

// As bpe_to_word, and also returns for each output arc the input arc ids it
// was built from (the best-scoring run when duplicates collapsed).
struct WordLattice {
  Lattice lattice;
  std::vector<std::vector<std::size_t>> provenance;  // parallel to lattice.arcs()
};
WordLattice bpe_to_word_with_provenance(const Lattice &lat, const BoundaryConvention &conv);

// Word lattice to sub-word lattice: every word arc becomes a chain of the
// tokenizer's pieces. The word's score goes on the first piece, 0.0 on the
// rest. Terminal arcs are copied. Throws TokenizerError on an empty split.
Lattice word_to_plm_bpe(const Lattice &lat, const WordTokenizer &tok);

// Words of a path, terminal dropped.
std::vector<std::string> path_words(const LatticePath &path, const BoundaryConvention &conv);

}  // namespace latrec

#endif  // LATREC_RETOKENIZE_H_
