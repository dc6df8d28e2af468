// latrec/scoring.cc

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

#include "latrec/scoring.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "latrec/error.h"

namespace latrec {

EncoderInput build_encoder_input(const NBestList &nbest, std::size_t n,
                                 std::string prefix, std::string separator) {
  if (n == 0) throw ValidationError("n must be at least 1");
  EncoderInput enc;
  enc.n_used = std::min(n, nbest.size());
  std::vector<std::string> pieces;
  if (!prefix.empty()) pieces.push_back(prefix);
  for (std::size_t i = 0; i < enc.n_used; ++i) {
    if (!nbest[i].text.empty()) pieces.push_back(nbest[i].text);
    pieces.push_back(separator);
  }
  enc.text = join(pieces);
  enc.prefix = std::move(prefix);
  enc.separator = std::move(separator);
  return enc;
}

double sum_next_logprobs(Scorer &scorer, const Session &session,
                         std::span<const Token> target) {
  double total = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    std::vector<double> lp = scorer.next_logprobs(session, target.first(i), target.subspan(i, 1));
    if (lp.size() != 1) throw ProtocolError("scorer returned a wrong number of log-probs");
    total += lp[0];
  }
  return total;
}

double Scorer::score_sequence(const EncoderInput &enc, std::span<const Token> target) {
  Session s = start(enc);
  double total = sum_next_logprobs(*this, s, target);
  end(s);
  return total;
}

namespace {

// Context key: tokens joined by U+001F, which check_token never rejects but
// tokenizers never produce.
std::string context_key(std::span<const Token> ctx) {
  std::string key;
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (i) key += '\x1f';
    key += ctx[i];
  }
  return key;
}

}  // namespace

NgramScorer NgramScorer::train(std::span<const TokenSeq> sentences, Options opts,
                               std::span<const Token> extra_vocab) {
  if (opts.order < 1) throw ValidationError("n-gram order must be at least 1");
  if (!(opts.alpha > 0.0)) throw ValidationError("smoothing alpha must be positive");
  NgramScorer m;
  m.opts_ = opts;
  std::set<Token> vocab(extra_vocab.begin(), extra_vocab.end());
  vocab.insert(opts.eos);
  const std::size_t ctx_len = static_cast<std::size_t>(opts.order - 1);
  for (const TokenSeq &sent : sentences) {
    TokenSeq padded(ctx_len, opts.bos);
    padded.insert(padded.end(), sent.begin(), sent.end());
    padded.push_back(opts.eos);
    for (std::size_t i = ctx_len; i < padded.size(); ++i) {
      vocab.insert(padded[i]);
      for (std::size_t len = ctx_len == 0 ? 0 : 1; len <= ctx_len; ++len) {
        ContextStats &st =
            m.contexts_[context_key(std::span<const Token>(padded).subspan(i - len, len))];
        ++st.total;
        ++st.next[padded[i]];
      }
    }
  }
  vocab.erase(opts.bos);
  m.vocab_.assign(vocab.begin(), vocab.end());
  return m;
}

NgramScorer NgramScorer::train_file(const std::filesystem::path &path, Options opts) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open training text '" + path.string() + "'");
  std::vector<TokenSeq> sentences;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] == '#') continue;
    TokenSeq toks = split_words(line);
    if (!toks.empty()) sentences.push_back(std::move(toks));
  }
  if (sentences.empty()) throw ValidationError("training text '" + path.string() + "' is empty");
  return train(sentences, std::move(opts));
}

const NgramScorer::ContextStats *NgramScorer::find_context(std::span<const Token> padded,
                                                           std::size_t len) const {
  auto it = contexts_.find(context_key(padded.last(len)));
  return it == contexts_.end() || it->second.total == 0 ? nullptr : &it->second;
}

std::vector<double> NgramScorer::logprobs(std::span<const Token> history,
                                          std::span<const Token> candidates) const {
  const std::size_t ctx_len = static_cast<std::size_t>(opts_.order - 1);
  TokenSeq padded(ctx_len, opts_.bos);
  std::size_t keep = std::min(history.size(), ctx_len);
  padded.insert(padded.end(), history.end() - keep, history.end());

  const double v = static_cast<double>(vocab_.size());
  const ContextStats *st = nullptr;
  // A unigram model conditions on the empty context; higher orders stop at
  // one token and fall back to uniform.
  const std::size_t min_len = ctx_len == 0 ? 0 : 1;
  for (std::size_t len = ctx_len; !st; --len) {
    st = find_context(padded, len);
    if (len == min_len) break;
  }

  std::vector<double> out;
  out.reserve(candidates.size());
  for (const Token &c : candidates) {
    if (!st) {
      out.push_back(-std::log(v));
      continue;
    }
    auto it = st->next.find(c);
    double count = it == st->next.end() ? 0.0 : static_cast<double>(it->second);
    out.push_back(std::log((count + opts_.alpha) /
                           (static_cast<double>(st->total) + opts_.alpha * v)));
  }
  return out;
}

double NgramScorer::logprob(std::span<const Token> history, const Token &token) const {
  return logprobs(history, std::span<const Token>(&token, 1))[0];
}

}  // namespace latrec
