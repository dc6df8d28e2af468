// latrec/simulate.cc

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

#include "latrec/simulate.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "beam_impl.h"
#include "latrec/error.h"

namespace latrec {

namespace {

// Portable draws: the standard distributions are implementation-defined,
// and corpora must be identical across toolchains.
double unit(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
std::size_t below(std::mt19937_64 &rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

std::vector<Token> with_terminal(std::vector<Token> vocab, const Token &terminal) {
  vocab.push_back(terminal);
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  return vocab;
}

LogProbs to_logprobs(const std::map<Token, double> &probs) {
  LogProbs out;
  for (const auto &[tok, p] : probs)
    if (p > 0.0) out.emplace_back(tok, std::log(p));
  return out;
}

}  // namespace

UniformModel::UniformModel(std::vector<Token> vocab)
    : vocab_(with_terminal(std::move(vocab), terminal())) {}

LogProbs UniformModel::next_logprobs(std::span<const Token>) const {
  const double lp = -std::log(static_cast<double>(vocab_.size()));
  LogProbs out;
  for (const Token &t : vocab_) out.emplace_back(t, lp);
  return out;
}

BigramModel::BigramModel(Table table) {
  if (!table.count("<s>")) throw ValidationError("bigram table needs a '<s>' row");
  std::set<Token> vocab;
  for (const auto &[prev, row] : table) {
    double total = 0.0;
    for (const auto &[tok, p] : row) {
      if (p < 0.0) throw ValidationError("negative probability in bigram table");
      total += p;
      vocab.insert(tok);
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw ValidationError("bigram row '" + prev + "' does not sum to 1");
    rows_[prev] = to_logprobs(row);
  }
  vocab_ = with_terminal({vocab.begin(), vocab.end()}, terminal());
}

BigramModel BigramModel::random(std::span<const Token> vocab, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Token> next = with_terminal({vocab.begin(), vocab.end()}, Token(kDefaultTerminal));
  std::vector<Token> prevs{"<s>"};
  for (const Token &t : vocab)
    if (t != kDefaultTerminal) prevs.push_back(t);
  Table table;
  for (const Token &p : prevs) {
    std::vector<double> w(next.size());
    double total = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i)
      if (next[i] != kDefaultTerminal) total += (w[i] = 0.05 + unit(rng) * unit(rng) * 4.0);
    // The terminal gets a fixed share so that searches finish whatever the
    // vocabulary size.
    const double stop = 0.1 + 0.3 * unit(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      double p_i = next[i] == kDefaultTerminal ? stop : (1.0 - stop) * w[i] / total;
      if (i + 1 == next.size()) p_i = 1.0 - acc;
      table[p][next[i]] = p_i;
      acc += p_i;
    }
  }
  return BigramModel(std::move(table));
}

LogProbs BigramModel::next_logprobs(std::span<const Token> history) const {
  auto it = history.empty() ? rows_.end() : rows_.find(history.back());
  if (it == rows_.end()) it = rows_.find("<s>");
  return it->second;
}

NoisyChannelModel::NoisyChannelModel(TokenSeq reference, const Confusions &confusions,
                                     double rho, std::uint64_t seed)
    : reference_(std::move(reference)) {
  if (!(rho >= 0.0 && rho < 1.0)) throw ValidationError("noise level rho must be in [0, 1)");
  std::mt19937_64 rng(seed);
  std::set<Token> vocab{terminal()};
  for (const Token &ref : reference_) {
    double r = std::min(2.0 * rho * unit(rng), 0.95);
    std::map<Token, double> probs;
    auto it = confusions.find(ref);
    std::vector<Token> alts;
    if (it != confusions.end())
      for (const Token &t : it->second)
        if (t != ref) alts.push_back(t);
    if (alts.empty()) r = 0.0;
    probs[ref] = 1.0 - r;
    for (const Token &t : alts) probs[t] += r / static_cast<double>(alts.size());
    for (const auto &[t, p] : probs) vocab.insert(t);
    noise_.push_back(r);
    rows_.push_back(to_logprobs(probs));
  }
  final_row_ = {{terminal(), 0.0}};
  vocab_.assign(vocab.begin(), vocab.end());
}

LogProbs NoisyChannelModel::next_logprobs(std::span<const Token> history) const {
  return history.size() < rows_.size() ? rows_[history.size()] : final_row_;
}

std::vector<double> EmissionScorer::next_logprobs(const Session &, std::span<const Token> history,
                                                  std::span<const Token> candidates) {
  LogProbs row = model_.next_logprobs(history);
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const Token &c : candidates) {
    auto it = std::lower_bound(row.begin(), row.end(), c,
                               [](const auto &e, const Token &t) { return e.first < t; });
    out.push_back(it != row.end() && it->first == c ? it->second : floor_);
  }
  return out;
}

void BeamConfig::validate() const {
  if (beam_width < 1) throw ValidationError("beam width must be at least 1");
  if (max_len < 1) throw ValidationError("max_len must be at least 1");
  if (merge_context_k && *merge_context_k < 2)
    throw ValidationError("merge context k must be at least 2");
}

NBestList beam_search(const EmissionModel &model, const BeamConfig &cfg,
                      const std::string &utt_id, const BoundaryConvention &conv) {
  cfg.validate();
  auto expand = [&](const TokenSeq &h) { return model.next_logprobs(h); };
  std::vector<internal::BeamEntry> done =
      internal::token_beam_search(expand, cfg.beam_width, cfg.max_len, model.terminal());
  std::vector<Hypothesis> hyps;
  for (internal::BeamEntry &e : done) hyps.push_back(make_hypothesis(std::move(e.history), e.score, conv));
  return NBestList(utt_id, std::move(hyps));
}

namespace {

// True if `to` can reach `from` over `arcs`, i.e. adding from->to would
// close a cycle.
bool reaches(const std::vector<Arc> &arcs, NodeId from, NodeId to) {
  if (from == to) return true;
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const Arc &a : arcs) adj[a.src].push_back(a.dst);
  std::vector<NodeId> stack{to};
  std::set<NodeId> seen{to};
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (NodeId w : adj[v]) {
      if (w == from) return true;
      if (seen.insert(w).second) stack.push_back(w);
    }
  }
  return false;
}

}  // namespace

MergedSearch merged_beam_search(const EmissionModel &model, const BeamConfig &cfg,
                                const std::string &utt_id, const BoundaryConvention &conv) {
  cfg.validate();
  if (!cfg.merge_context_k) throw ValidationError("merged search needs a merge context k");
  const std::size_t ctx_len = *cfg.merge_context_k - 1;
  const Token &terminal = model.terminal();

  struct Active {
    TokenSeq history;
    double score;
    NodeId node;
  };
  struct Cand {
    TokenSeq history;
    double score;
    double logprob;
    NodeId parent;
  };
  auto cand_before = [](const Cand &a, const Cand &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.history < b.history;
  };

  std::vector<Arc> arcs;
  NodeId num_nodes = 1;  // node 0 is the start
  std::vector<Active> active{{{}, 0.0, 0}};
  std::vector<Cand> finished;
  std::map<TokenSeq, NodeId> any_step;  // context -> most recent node, across steps

  for (std::size_t step = 0; step < cfg.max_len && !active.empty(); ++step) {
    std::vector<Cand> cands;
    for (const Active &a : active) {
      for (const auto &[tok, lp] : model.next_logprobs(a.history)) {
        Cand c{a.history, a.score + lp, lp, a.node};
        c.history.push_back(tok);
        cands.push_back(std::move(c));
      }
    }
    std::sort(cands.begin(), cands.end(), cand_before);

    std::map<MergeState, NodeId> this_step;
    std::vector<Active> next;
    std::size_t used = 0;
    for (Cand &c : cands) {
      if (used >= cfg.beam_width) break;
      if (c.history.back() == terminal) {
        finished.push_back(std::move(c));
        ++used;
        continue;
      }
      MergeState state{step + 1, TokenSeq(c.history.end() - std::min(ctx_len, c.history.size()),
                                          c.history.end())};
      if (auto it = this_step.find(state); it != this_step.end()) {
        // A better hypothesis already holds this state: keep only the arc.
        arcs.push_back({c.parent, it->second, c.history.back(), c.logprob});
        continue;
      }
      if (cfg.merge_across_steps) {
        auto it = any_step.find(state.context);
        if (it != any_step.end() && !reaches(arcs, c.parent, it->second)) {
          arcs.push_back({c.parent, it->second, c.history.back(), c.logprob});
          continue;
        }
      }
      NodeId node = num_nodes++;
      arcs.push_back({c.parent, node, c.history.back(), c.logprob});
      this_step.emplace(state, node);
      if (cfg.merge_across_steps) any_step[state.context] = node;
      next.push_back({std::move(c.history), c.score, node});
      ++used;
    }
    active = std::move(next);
  }
  if (finished.empty())
    throw NoHypothesisError("no hypothesis completed within " + std::to_string(cfg.max_len) +
                            " tokens");
  std::sort(finished.begin(), finished.end(), cand_before);
  if (finished.size() > cfg.beam_width) finished.resize(cfg.beam_width);

  const NodeId end = num_nodes++;
  std::vector<Hypothesis> hyps;
  for (Cand &c : finished) {
    arcs.push_back({c.parent, end, terminal, c.logprob});
    hyps.push_back(make_hypothesis(std::move(c.history), c.score, conv));
  }
  return {NBestList(utt_id, std::move(hyps)), trim(Lattice(num_nodes, 0, end, std::move(arcs)))};
}

// --- toy lexicon -----------------------------------------------------------

ToyLexicon::ToyLexicon(std::uint64_t seed, std::size_t num_words) {
  static const std::string kConsonants = "bdfgklmnprstvz";
  static const std::string kVowels = "aeiou";
  const std::string marker(kDefaultMarker);
  std::mt19937_64 rng(seed);
  auto syllable = [&] {
    return std::string{kConsonants[below(rng, kConsonants.size())], kVowels[below(rng, kVowels.size())]};
  };
  std::set<std::string> seen;
  while (words_.size() < num_words) {
    double u = unit(rng);
    std::size_t n = u < 0.3 ? 1 : (u < 0.8 ? 2 : 3);
    std::vector<std::string> syl;
    for (std::size_t i = 0; i < n; ++i) syl.push_back(syllable());
    std::string word;
    for (const auto &s : syl) word += s;
    if (!seen.insert(word).second) continue;
    TokenSeq split{marker + syl[0]};
    split.insert(split.end(), syl.begin() + 1, syl.end());
    splits_[word] = split;
    words_.push_back(word);
  }

  std::set<Token> asr, initial, inner;
  for (const auto &[w, split] : splits_)
    for (const Token &t : split) {
      asr.insert(t);
      (t.starts_with(marker) ? initial : inner).insert(t);
    }
  asr_vocab_ = with_terminal({asr.begin(), asr.end()}, Token(kDefaultTerminal));

  // Confusable tokens share the boundary class and, preferably, the vowel.
  for (const std::set<Token> *cls : {&initial, &inner}) {
    std::vector<Token> pool(cls->begin(), cls->end());
    for (const Token &t : pool) {
      std::vector<Token> similar, other;
      for (const Token &u : pool) {
        if (u == t) continue;
        (u.back() == t.back() ? similar : other).push_back(u);
      }
      std::vector<Token> &src = similar.empty() ? other : similar;
      std::size_t want = 1 + below(rng, 3);
      std::vector<Token> picked;
      while (picked.size() < want && !src.empty()) {
        std::size_t i = below(rng, src.size());
        picked.push_back(src[i]);
        src.erase(src.begin() + static_cast<std::ptrdiff_t>(i));
      }
      std::sort(picked.begin(), picked.end());
      if (!picked.empty()) confusions_[t] = picked;
    }
  }

  // PLM vocabulary: whole words for every other word, word-initial letters,
  // and letter bigrams, so that splits differ from the ASR ones.
  std::set<Token> plm;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    const std::string &w = words_[i];
    if (i % 2 == 0) plm.insert(marker + w);
    plm.insert(marker + w.substr(0, 1));
    for (std::size_t j = 0; j + 2 <= w.size(); j += 2) plm.insert(w.substr(j, 2));
  }
  for (char c : kConsonants + kVowels) plm.insert(std::string(1, c));
  plm_vocab_.assign(plm.begin(), plm.end());

  // Word bigram: each row favors a handful of successors.
  const std::size_t n = words_.size();
  word_bigram_.assign(n + 1, std::vector<double>(n, 0.02));
  for (auto &row : word_bigram_) {
    for (int k = 0; k < 4; ++k) row[below(rng, n)] += 1.0 + 3.0 * unit(rng);
    double total = 0.0;
    for (double x : row) total += x;
    for (double &x : row) x /= total;
  }
}

TokenSeq ToyLexicon::asr_tokens(const std::string &word) const {
  auto it = splits_.find(word);
  if (it == splits_.end()) throw ValidationError("word '" + word + "' is not in the lexicon");
  return it->second;
}

TokenSeq ToyLexicon::asr_tokens(std::span<const std::string> words) const {
  TokenSeq out;
  for (const std::string &w : words) {
    TokenSeq t = asr_tokens(w);
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

std::vector<std::string> ToyLexicon::sample_sentence(std::mt19937_64 &rng) const {
  std::size_t len = 3 + below(rng, 6);
  std::vector<std::string> out;
  std::size_t row = 0;
  for (std::size_t i = 0; i < len; ++i) {
    double u = unit(rng), acc = 0.0;
    std::size_t pick = words_.size() - 1;
    for (std::size_t j = 0; j < words_.size(); ++j) {
      acc += word_bigram_[row][j];
      if (u < acc) {
        pick = j;
        break;
      }
    }
    out.push_back(words_[pick]);
    row = pick + 1;
  }
  return out;
}

ToyCatalogue make_toy_models(const ToyLexicon &lexicon, std::uint64_t seed, double rho) {
  std::mt19937_64 rng(seed);
  ToyCatalogue cat;
  cat.reference_words = lexicon.sample_sentence(rng);
  cat.reference_tokens = lexicon.asr_tokens(cat.reference_words);
  std::uint64_t bigram_seed = rng(), channel_seed = rng();
  std::vector<Token> vocab;
  for (const Token &t : lexicon.asr_vocabulary())
    if (t != kDefaultTerminal) vocab.push_back(t);
  cat.bigram = std::make_unique<BigramModel>(BigramModel::random(vocab, bigram_seed));
  cat.noisy = std::make_unique<NoisyChannelModel>(cat.reference_tokens, lexicon.confusions(), rho,
                                                  channel_seed);
  cat.uniform = std::make_unique<UniformModel>(vocab);
  return cat;
}

ToyCatalogue make_toy_models(std::uint64_t seed, double rho) {
  return make_toy_models(ToyLexicon(seed), seed, rho);
}

std::uint64_t utterance_seed(std::uint64_t seed, std::size_t index) {
  // splitmix64 of (seed, index)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(index) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::string utterance_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "utt%05zu", index);
  return buf;
}

SimUtterance simulate_utterance(const ToyLexicon &lexicon, const SimOptions &opts,
                                std::size_t index) {
  ToyCatalogue cat = make_toy_models(lexicon, utterance_seed(opts.seed, index), opts.rho);
  std::string id = utterance_id(index);
  MergedSearch run = merged_beam_search(*cat.noisy, opts.beam, id);
  return {id, cat.reference_words, std::move(run.nbest), std::move(run.lattice)};
}

std::vector<SimUtterance> simulate_corpus(const ToyLexicon &lexicon, const SimOptions &opts) {
  std::vector<SimUtterance> out;
  for (std::size_t i = 0; i < opts.utts; ++i) out.push_back(simulate_utterance(lexicon, opts, i));
  return out;
}

}  // namespace latrec
