// tests/simulate_test.cc

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

#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>

#include "latrec/error.h"
#include "latrec/metrics.h"
#include "latrec/retokenize.h"
#include "latrec/simulate.h"
#include "support.h"

using namespace latrec;

namespace {

// Probability one on "▁go" then "▁on" then the terminal.
class ScriptModel : public EmissionModel {
 public:
  LogProbs next_logprobs(std::span<const Token> history) const override {
    static const TokenSeq kScript{"▁go", "▁on", "</s>"};
    return {{kScript[std::min(history.size(), kScript.size() - 1)], 0.0}};
  }
  const std::vector<Token> &vocabulary() const override { return vocab_; }

 private:
  std::vector<Token> vocab_{"</s>", "▁go", "▁on"};
};

double sum_prob(const LogProbs &lp) {
  double s = 0.0;
  for (const auto &[t, x] : lp) s += std::exp(x);
  return s;
}

}  // namespace

TEST_CASE("beam_search: deterministic model gives one hypothesis with score 0") {
  ScriptModel m;
  NBestList nb = beam_search(m, BeamConfig{10, std::nullopt, 8, false});
  REQUIRE(nb.size() == 1);
  CHECK(nb[0].asr_score == 0.0);
  CHECK(nb[0].text == "go on");
}

TEST_CASE("beam_search: uniform model, beam 2, max_len 2") {
  UniformModel m({"a", "b"});
  NBestList nb = beam_search(m, BeamConfig{2, std::nullopt, 2, false});
  REQUIRE(nb.size() == 2);
  // Exhaustive expansion: completions of length L (before the terminal)
  // score (L + 1) log(1/3); the two shortest are L = 0 and L = 1, and the
  // byte-order tie rule picks "a" over "b" at length 1.
  const double l3 = std::log(1.0 / 3.0);
  CHECK(nb[0].tokens == TokenSeq{"</s>"});
  CHECK(nb[0].asr_score == doctest::Approx(l3).epsilon(1e-12));
  CHECK(nb[1].tokens == TokenSeq{"a", "</s>"});
  CHECK(nb[1].asr_score == doctest::Approx(2 * l3).epsilon(1e-12));
}

TEST_CASE("beam_search: bigram 1-best equals exhaustive argmax") {
  const std::vector<Token> vocab{"x", "y", "z"};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    BigramModel m = BigramModel::random(vocab, seed);
    for (std::size_t max_len = 1; max_len <= 4; ++max_len) {
      // All sequences of at most max_len tokens whose last token is the terminal.
      double best = -INFINITY;
      TokenSeq best_seq;
      std::function<void(TokenSeq &, double)> go = [&](TokenSeq &h, double s) {
        for (const auto &[t, lp] : m.next_logprobs(h)) {
          h.push_back(t);
          if (t == "</s>") {
            if (s + lp > best || (s + lp == best && h < best_seq)) {
              best = s + lp;
              best_seq = h;
            }
          } else if (h.size() < max_len) {
            go(h, s + lp);
          }
          h.pop_back();
        }
      };
      TokenSeq h;
      go(h, 0.0);
      NBestList nb = beam_search(m, BeamConfig{64, std::nullopt, max_len, false});
      CHECK(nb[0].tokens == best_seq);
      CHECK(nb[0].asr_score == doctest::Approx(best).epsilon(1e-12));
    }
  }
}

TEST_CASE("beam_search: no completion raises") {
  ScriptModel m;
  CHECK_THROWS_AS(beam_search(m, BeamConfig{4, std::nullopt, 2, false}), NoHypothesisError);
}

TEST_CASE("models are normalized") {
  const std::vector<Token> vocab{"x", "y", "z"};
  BigramModel b = BigramModel::random(vocab, 3);
  UniformModel u(vocab);
  ToyCatalogue cat = make_toy_models(5, 0.3);
  std::vector<TokenSeq> hs{{}, {"x"}, {"z", "y"}, {"q"}};
  for (const TokenSeq &h : hs) {
    CHECK(sum_prob(b.next_logprobs(h)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sum_prob(u.next_logprobs(h)) == doctest::Approx(1.0).epsilon(1e-9));
  }
  TokenSeq h;
  for (std::size_t i = 0; i <= cat.reference_tokens.size() + 1; ++i) {
    CHECK(sum_prob(cat.noisy->next_logprobs(h)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sum_prob(cat.bigram->next_logprobs(h)) == doctest::Approx(1.0).epsilon(1e-9));
    h.push_back(i < cat.reference_tokens.size() ? cat.reference_tokens[i] : "</s>");
  }
}

TEST_CASE("bigram table rows must be normalized") {
  BigramModel::Table t{{"<s>", {{"a", 0.5}, {"</s>", 0.4}}}};
  CHECK_THROWS_AS(BigramModel{t}, ValidationError);
}

TEST_CASE("merged search: k=2 merges 'a b' and 'c b'") {
  BigramModel m({{"<s>", {{"a", 0.5}, {"c", 0.4}, {"</s>", 0.1}}},
                 {"a", {{"b", 0.9}, {"</s>", 0.1}}},
                 {"c", {{"b", 0.9}, {"</s>", 0.1}}},
                 {"b", {{"</s>", 1.0}}}});
  MergedSearch r = merged_beam_search(m, BeamConfig{2, 2, 4, false});
  CHECK(validate_lattice(r.lattice).ok());
  CHECK(accepts(r.lattice, TokenSeq{"a", "b", "</s>"}));
  CHECK(accepts(r.lattice, TokenSeq{"c", "b", "</s>"}));
  // One node after "b" shared by both prefixes.
  std::set<NodeId> after_b;
  for (const Arc &a : r.lattice.arcs())
    if (a.label == "b") after_b.insert(a.dst);
  CHECK(after_b.size() == 1);
  // The merged loser gave up its beam slot, so it is not in the n-best.
  for (const Hypothesis &h : r.nbest.hyps()) CHECK(h.tokens != TokenSeq{"c", "b", "</s>"});
  CHECK(r.nbest.size() == 2);
  CHECK(r.nbest[1].tokens == TokenSeq{"a", "</s>"});
  // The merged path keeps its own score.
  for (const LatticePath &p : enumerate_paths(r.lattice).paths)
    if (p.tokens == TokenSeq{"c", "b", "</s>"})
      CHECK(p.score == doctest::Approx(std::log(0.4) + std::log(0.9)).epsilon(1e-12));
  CHECK(r.nbest[0].tokens == TokenSeq{"a", "b", "</s>"});
}

TEST_CASE("merged search: no merges gives the union of the n-best paths") {
  // Every step emits a distinct token per hypothesis, so no two contexts agree.
  BigramModel m({{"<s>", {{"a", 0.6}, {"b", 0.4}}},
                 {"a", {{"c", 0.7}, {"d", 0.3}}},
                 {"b", {{"e", 0.5}, {"f", 0.5}}},
                 {"c", {{"</s>", 1.0}}}, {"d", {{"</s>", 1.0}}},
                 {"e", {{"</s>", 1.0}}}, {"f", {{"</s>", 1.0}}}});
  MergedSearch r = merged_beam_search(m, BeamConfig{4, 2, 6, false});
  std::set<TokenSeq> lat, nb;
  for (const LatticePath &p : enumerate_paths(r.lattice).paths) lat.insert(p.tokens);
  for (const Hypothesis &h : r.nbest.hyps()) nb.insert(h.tokens);
  CHECK(lat == nb);
  CHECK(nb.size() == 4);
}

TEST_CASE("merged search: lattice is a superset of the n-best with matching scores") {
  ToyLexicon lex(17);
  for (std::uint64_t s = 0; s < 30; ++s) {
    ToyCatalogue cat = make_toy_models(lex, s, 0.4);
    for (const EmissionModel *m : {static_cast<const EmissionModel *>(cat.noisy.get()),
                                   static_cast<const EmissionModel *>(cat.bigram.get())}) {
      MergedSearch r = merged_beam_search(*m, BeamConfig{6, 3, 40, false});
      REQUIRE(validate_lattice(r.lattice).ok());
      PathList paths = enumerate_paths(r.lattice, 2000);
      CHECK(r.nbest[0].asr_score == doctest::Approx(paths.paths[0].score).epsilon(1e-9));
      for (const Hypothesis &h : r.nbest.hyps()) CHECK(accepts(r.lattice, h.tokens));
    }
  }
}

TEST_CASE("merged search across steps stays acyclic") {
  UniformModel m({"a", "b"});
  for (std::size_t k = 2; k <= 4; ++k) {
    MergedSearch r = merged_beam_search(m, BeamConfig{5, k, 6, true});
    CHECK(validate_lattice(r.lattice).ok());
    for (const Hypothesis &h : r.nbest.hyps()) CHECK(accepts(r.lattice, h.tokens));
  }
}

TEST_CASE("k >= max_len + 1 reproduces the plain search") {
  ToyLexicon lex(4);
  for (std::uint64_t s = 0; s < 10; ++s) {
    ToyCatalogue cat = make_toy_models(lex, s);
    BeamConfig plain{10, std::nullopt, 30, false};
    BeamConfig merged{10, 31, 30, false};
    NBestList a = beam_search(*cat.bigram, plain);
    NBestList b = merged_beam_search(*cat.bigram, merged).nbest;
    CHECK(a == b);
  }
}

TEST_CASE("noisy channel with rho 0 decodes the reference") {
  ToyLexicon lex(8);
  for (std::uint64_t s = 0; s < 10; ++s) {
    ToyCatalogue cat = make_toy_models(lex, s, 0.0);
    NBestList nb = beam_search(*cat.noisy, BeamConfig{});
    TokenSeq want = cat.reference_tokens;
    want.push_back("</s>");
    CHECK(nb[0].tokens == want);
    CHECK(nb[0].asr_score == 0.0);
    CHECK(nb[0].text == join(cat.reference_words));
  }
}

TEST_CASE("toy models are deterministic in the seed") {
  ToyCatalogue a = make_toy_models(42), b = make_toy_models(42), c = make_toy_models(43);
  CHECK(a.reference_words == b.reference_words);
  CHECK(a.noisy->noise().size() == b.noisy->noise().size());
  TokenSeq h;
  for (const Token &t : a.reference_tokens) {
    CHECK(a.noisy->next_logprobs(h) == b.noisy->next_logprobs(h));
    CHECK(a.bigram->next_logprobs(h) == b.bigram->next_logprobs(h));
    h.push_back(t);
  }
  CHECK(ToyLexicon(42).words() == ToyLexicon(42).words());
  CHECK(ToyLexicon(42).words() != ToyLexicon(43).words());
  (void)c;
}

TEST_CASE("simulated corpus at rho 0.3 has errors that the 10-best can fix") {
  ToyLexicon lex(1);
  SimOptions opts;
  opts.utts = 100;
  WerStats one, ten;
  for (const SimUtterance &u : simulate_corpus(lex, opts)) {
    one += wer(u.reference, split_words(u.nbest[0].text));
    ten += oracle_wer_nbest(u.reference, u.nbest.top(10)).stats;
  }
  CHECK(one.wer() > 0.0);
  CHECK(ten.wer() < one.wer());
}

TEST_CASE("simulation is reproducible") {
  ToyLexicon lex(2);
  SimOptions opts;
  opts.seed = 2;
  SimUtterance a = simulate_utterance(lex, opts, 7), b = simulate_utterance(lex, opts, 7);
  CHECK(a.nbest == b.nbest);
  CHECK(a.lattice == b.lattice);
  CHECK(utterance_id(7) == "utt00007");
}
