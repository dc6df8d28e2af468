// latrec/scoring.h

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

#ifndef LATREC_SCORING_H_
#define LATREC_SCORING_H_

#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "latrec/nbest.h"
#include "latrec/token.h"

namespace latrec {

inline constexpr std::string_view kDefaultPrefix = "text correction:";
inline constexpr std::string_view kDefaultSeparator = "</s>";

// Encoder-side text for the correction model: the task prefix followed by
// the first n hypotheses, each closed by the separator token.
struct EncoderInput {
  std::string text;
  std::size_t n_used = 0;
  std::string prefix;
  std::string separator;

  bool operator==(const EncoderInput &) const = default;
};

// "prefix h1 sep h2 sep ... hn sep" with single spaces. Uses all hypotheses
// when the list holds fewer than n.
EncoderInput build_encoder_input(const NBestList &nbest, std::size_t n,
                                 std::string prefix = std::string(kDefaultPrefix),
                                 std::string separator = std::string(kDefaultSeparator));

struct Session {
  std::string id;
};

// Correction model seen as an incremental sequence scorer.
//
// next_logprobs() returns one value per candidate, aligned with
// `candidates`. Values are natural-log scores; normalized scorers return
// values <= 0 but callers must not rely on it.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual Session start(const EncoderInput &enc) = 0;
  virtual std::vector<double> next_logprobs(const Session &session,
                                            std::span<const Token> history,
                                            std::span<const Token> candidates) = 0;
  // Defaults to starting a session and summing next_logprobs().
  virtual double score_sequence(const EncoderInput &enc, std::span<const Token> target);
  virtual void end(const Session &) {}
};

// Sums next_logprobs() over `target` within an existing session.
double sum_next_logprobs(Scorer &scorer, const Session &session,
                         std::span<const Token> target);

// Add-alpha smoothed n-gram model over whitespace tokens. Contexts that were
// never seen back off to shorter contexts, and to the uniform distribution
// over the vocabulary when even the one-token context is unseen. The encoder
// input is ignored.
class NgramScorer : public Scorer {
 public:
  struct Options {
    int order = 3;
    double alpha = 1.0;
    Token bos = "<s>";
    Token eos{kDefaultTerminal};
  };

  // Vocabulary = training tokens + eos + extra_vocab.
  static NgramScorer train(std::span<const TokenSeq> sentences, Options opts,
                           std::span<const Token> extra_vocab = {});
  static NgramScorer train(std::span<const TokenSeq> sentences) {
    return train(sentences, Options{});
  }
  // One whitespace-tokenized sentence per line; '#' lines skipped.
  static NgramScorer train_file(const std::filesystem::path &path, Options opts);

  double logprob(std::span<const Token> history, const Token &token) const;
  std::vector<double> logprobs(std::span<const Token> history,
                               std::span<const Token> candidates) const;

  const std::vector<Token> &vocabulary() const { return vocab_; }
  const Options &options() const { return opts_; }

  Session start(const EncoderInput &) override { return {"ngram"}; }
  std::vector<double> next_logprobs(const Session &, std::span<const Token> history,
                                    std::span<const Token> candidates) override {
    return logprobs(history, candidates);
  }

 private:
  struct ContextStats {
    std::uint64_t total = 0;
    std::unordered_map<Token, std::uint64_t> next;
  };

  NgramScorer() = default;
  const ContextStats *find_context(std::span<const Token> padded, std::size_t len) const;

  Options opts_;
  std::vector<Token> vocab_;  // sorted
  std::unordered_map<std::string, ContextStats> contexts_;
};

}  // namespace latrec

#endif  // LATREC_SCORING_H_
