// latrec/simulate.h

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

#ifndef LATREC_SIMULATE_H_
#define LATREC_SIMULATE_H_

// Desk-scale ASR output generator. A token-synchronous beam search runs over
// a pluggable emission model; with a merge context k, partial hypotheses
// that agree on their last k-1 tokens are merged, the lower-scoring one
// surviving only as a lattice arc.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "latrec/lattice.h"
#include "latrec/nbest.h"
#include "latrec/scoring.h"
#include "latrec/token.h"

namespace latrec {

// (token, natural-log probability) pairs sorted by token. Tokens with zero
// probability are omitted.
using LogProbs = std::vector<std::pair<Token, double>>;

class EmissionModel {
 public:
  virtual ~EmissionModel() = default;
  virtual LogProbs next_logprobs(std::span<const Token> history) const = 0;
  // Every token the model can emit, terminal included; sorted.
  virtual const std::vector<Token> &vocabulary() const = 0;
  virtual const Token &terminal() const { return terminal_; }

 private:
  Token terminal_{kDefaultTerminal};
};

class UniformModel : public EmissionModel {
 public:
  // The terminal is added to `vocab` if missing.
  explicit UniformModel(std::vector<Token> vocab);
  LogProbs next_logprobs(std::span<const Token> history) const override;
  const std::vector<Token> &vocabulary() const override { return vocab_; }

 private:
  std::vector<Token> vocab_;
};

// First-order Markov model given by an explicit table. The empty history
// uses the row for "<s>".
class BigramModel : public EmissionModel {
 public:
  using Table = std::map<Token, std::map<Token, double>>;  // prev -> next -> prob

  // Rows must be normalized; rows for unseen previous tokens fall back to
  // the "<s>" row.
  explicit BigramModel(Table table);
  static BigramModel random(std::span<const Token> vocab, std::uint64_t seed);

  LogProbs next_logprobs(std::span<const Token> history) const override;
  const std::vector<Token> &vocabulary() const override { return vocab_; }

 private:
  std::map<Token, LogProbs> rows_;
  std::vector<Token> vocab_;
};

// Noisy channel around a reference token sequence. At position i < |ref|
// the reference token gets 1 - rho_i and the token's confusables share
// rho_i; from position |ref| on, the terminal has probability 1. The
// per-position noise rho_i is drawn uniformly from [0, 2 rho] (capped below
// 1), so rho is the mean noise level.
class NoisyChannelModel : public EmissionModel {
 public:
  using Confusions = std::map<Token, std::vector<Token>>;

  NoisyChannelModel(TokenSeq reference, const Confusions &confusions, double rho,
                    std::uint64_t seed);

  LogProbs next_logprobs(std::span<const Token> history) const override;
  const std::vector<Token> &vocabulary() const override { return vocab_; }
  const TokenSeq &reference() const { return reference_; }
  std::span<const double> noise() const { return noise_; }

 private:
  TokenSeq reference_;
  std::vector<double> noise_;
  std::vector<LogProbs> rows_;  // one per reference position
  LogProbs final_row_;
  std::vector<Token> vocab_;
};

// Any emission model seen as a correction-model scorer. Tokens the model
// cannot emit get `floor_logprob` so that interpolated scores stay finite.
class EmissionScorer : public Scorer {
 public:
  explicit EmissionScorer(const EmissionModel &model, double floor_logprob = -13.815510557964274)
      : model_(model), floor_(floor_logprob) {}
  Session start(const EncoderInput &) override { return {"emission"}; }
  std::vector<double> next_logprobs(const Session &, std::span<const Token> history,
                                    std::span<const Token> candidates) override;

 private:
  const EmissionModel &model_;
  double floor_;
};

struct BeamConfig {
  std::size_t beam_width = 10;
  std::optional<std::size_t> merge_context_k;  // none: plain beam search
  std::size_t max_len = 64;
  // Also merge into nodes created at earlier steps (never creating cycles).
  bool merge_across_steps = false;

  void validate() const;
};

// Identity of a lattice node during merged search.
struct MergeState {
  std::size_t step = 0;
  TokenSeq context;  // last min(step, k-1) tokens
  auto operator<=>(const MergeState &) const = default;
};

// Token-synchronous beam search. Each step expands every active hypothesis,
// ranks all extensions by (score, tokens) and keeps the best beam_width;
// extensions ending in the terminal are complete. Up to beam_width complete
// hypotheses are returned, their tokens ending in the terminal. Throws
// NoHypothesisError if none completes within max_len tokens.
NBestList beam_search(const EmissionModel &model, const BeamConfig &cfg,
                      const std::string &utt_id = "utt",
                      const BoundaryConvention &conv = {});

struct MergedSearch {
  NBestList nbest;
  Lattice lattice;
};

// Beam search with path merging. Requires cfg.merge_context_k.
MergedSearch merged_beam_search(const EmissionModel &model, const BeamConfig &cfg,
                                const std::string &utt_id = "utt",
                                const BoundaryConvention &conv = {});

// Small synthetic language: words made of syllables, each word split into
// ASR sub-word tokens one syllable per token, a word-level bigram sentence
// generator, and a confusion table over ASR tokens. A second, coarser
// vocabulary stands in for a PLM tokenizer.
class ToyLexicon {
 public:
  explicit ToyLexicon(std::uint64_t seed, std::size_t num_words = 40);

  const std::vector<std::string> &words() const { return words_; }
  TokenSeq asr_tokens(const std::string &word) const;
  TokenSeq asr_tokens(std::span<const std::string> words) const;
  const std::vector<Token> &asr_vocabulary() const { return asr_vocab_; }  // terminal included
  const std::vector<Token> &plm_vocabulary() const { return plm_vocab_; }
  const NoisyChannelModel::Confusions &confusions() const { return confusions_; }

  // A sentence of 3 to 8 words from the word bigram generator.
  std::vector<std::string> sample_sentence(std::mt19937_64 &rng) const;

 private:
  std::vector<std::string> words_;
  std::map<std::string, TokenSeq> splits_;
  std::vector<Token> asr_vocab_;
  std::vector<Token> plm_vocab_;
  NoisyChannelModel::Confusions confusions_;
  std::vector<std::vector<double>> word_bigram_;  // row 0 = sentence start
};

struct ToyCatalogue {
  std::vector<std::string> reference_words;
  TokenSeq reference_tokens;  // ASR tokens, no terminal
  std::unique_ptr<BigramModel> bigram;
  std::unique_ptr<NoisyChannelModel> noisy;
  std::unique_ptr<UniformModel> uniform;
};

// Deterministic in (lexicon, seed, rho).
ToyCatalogue make_toy_models(const ToyLexicon &lexicon, std::uint64_t seed, double rho = 0.3);
ToyCatalogue make_toy_models(std::uint64_t seed, double rho = 0.3);

struct SimUtterance {
  std::string id;
  std::vector<std::string> reference;
  NBestList nbest;
  Lattice lattice;
};

struct SimOptions {
  std::uint64_t seed = 1;
  std::size_t utts = 100;
  double rho = 0.3;
  BeamConfig beam{10, 4, 64, false};
};

// Utterance i uses reference and channel seeds derived from (seed, i).
SimUtterance simulate_utterance(const ToyLexicon &lexicon, const SimOptions &opts,
                                std::size_t index);
std::vector<SimUtterance> simulate_corpus(const ToyLexicon &lexicon, const SimOptions &opts);

// Seed of utterance `index` in a corpus seeded with `seed`.
std::uint64_t utterance_seed(std::uint64_t seed, std::size_t index);
std::string utterance_id(std::size_t index);

}  // namespace latrec

#endif  // LATREC_SIMULATE_H_
