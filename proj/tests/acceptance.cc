// tests/acceptance.cc

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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>

#include "latrec/decode.h"
#include "latrec/error.h"
#include "latrec/metrics.h"
#include "latrec/retokenize.h"
#include "latrec/simulate.h"
#include "support.h"

using namespace latrec;
namespace lt = latrec::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(bool ok, const std::string &name, const std::string &detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char *f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// --- oracle dominance ---------------------------------------------------------

void oracle_dominance() {
  auto t0 = Clock::now();
  const std::size_t kUtts = 200;
  ToyLexicon lex(1);
  SimOptions opts;
  opts.seed = 1;
  opts.utts = kUtts;
  opts.rho = 0.3;
  opts.beam = BeamConfig{10, 4, 64, false};
  std::size_t chain_ok = 0, strict = 0;
  WerStats one, five, ten, lat;
  for (std::size_t i = 0; i < kUtts; ++i) {
    SimUtterance u = simulate_utterance(lex, opts, i);
    WerStats e1 = wer(u.reference, split_words(u.nbest[0].text));
    WerStats e5 = oracle_wer_nbest(u.reference, u.nbest.top(5)).stats;
    WerStats e10 = oracle_wer_nbest(u.reference, u.nbest.top(10)).stats;
    WerStats el = oracle_wer_lattice(u.reference, u.lattice).stats;
    if (el.edits() <= e10.edits() && e10.edits() <= e5.edits() && e5.edits() <= e1.edits())
      ++chain_ok;
    if (el.edits() < e10.edits()) ++strict;
    one += e1;
    five += e5;
    ten += e10;
    lat += el;
  }
  const double secs = seconds_since(t0);
  const double rate = static_cast<double>(strict) / kUtts;
  report(chain_ok == kUtts && rate >= 0.10 && secs < 60.0, "oracle dominance",
         fmt("utts=%zu chain_holds=%zu strict_lattice<10best=%.1f%% (need >=10%%) "
             "WER 1best=%.4f 5best=%.4f 10best=%.4f lattice=%.4f time=%.1fs (<60s)",
             kUtts, chain_ok, 100 * rate, one.wer(), five.wer(), ten.wer(), lat.wer(), secs));
}

// --- lattice decoding exactness ------------------------------------------------

void lattice_exactness() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  const std::vector<Token> vocab{"a", "b", "c", "d", "e"};
  const std::vector<double> lambdas{0.0, 0.25, 0.5, 0.75, 1.0};
  const EncoderInput enc{"text correction: a b </s>", 1, "text correction:", "</s>"};
  std::size_t lattices = 0, checks = 0, matched = 0, max_paths = 0;
  double worst = 0.0;
  while (lattices < 200) {
    int n = 4 + static_cast<int>(lt::pick(rng, 11));
    Lattice lat = lt::random_dag(rng, n, vocab, 0.15 + 0.3 * lt::uniform01(rng));
    if (count_paths(lat) > 10000) continue;
    ++lattices;
    lt::HashScorer scorer(vocab, lattices);
    std::vector<lt::RefPath> paths = lt::brute_paths(lat);
    max_paths = std::max(max_paths, paths.size());
    std::vector<double> ec(paths.size());
    for (std::size_t p = 0; p < paths.size(); ++p) ec[p] = scorer.score_sequence(enc, paths[p].tokens);
    for (double lam : lambdas) {
      double best = -INFINITY;
      const TokenSeq *best_seq = nullptr;
      for (std::size_t p = 0; p < paths.size(); ++p) {
        double c = (1 - lam) * paths[p].score + lam * ec[p];
        if (c > best || (c == best && paths[p].tokens < *best_seq)) {
          best = c;
          best_seq = &paths[p].tokens;
        }
      }
      DecodeResult r = decode_lattice(scorer, enc, lat, InterpWeight(lam), kUnboundedBeam);
      ++checks;
      const double diff = std::abs(r.combined - best);
      worst = std::max(worst, diff);
      if (r.tokens == *best_seq && diff <= 1e-9) ++matched;
    }
  }
  const double secs = seconds_since(t0);
  report(matched == checks && secs < 120.0, "lattice decode exactness",
         fmt("lattices=%zu (max %zu paths) lambdas=5 matched=%zu/%zu max_score_diff=%.3g "
             "time=%.1fs (<120s)",
             lattices, max_paths, matched, checks, worst, secs));
}

// --- interpolation endpoints -----------------------------------------------------

void interpolation_endpoints() {
  ToyLexicon lex(3);
  SimOptions opts;
  opts.seed = 3;
  std::mt19937_64 rng(3);
  std::vector<Token> vocab = lex.asr_vocabulary();
  std::size_t rank1 = 0, invariant = 0;
  const std::size_t kTrials = 100;
  for (std::size_t t = 0; t < kTrials; ++t) {
    SimUtterance u = simulate_utterance(lex, opts, t);
    EncoderInput enc = build_encoder_input(u.nbest, 10);
    lt::HashScorer scorer(vocab, t);
    DecodeResult r0 = rescore_nbest(scorer, enc, u.nbest, InterpWeight(0.0)).best;
    if (r0.tokens == u.nbest[0].tokens && r0.text == u.nbest[0].text) ++rank1;

    DecodeResult r1 = rescore_nbest(scorer, enc, u.nbest, InterpWeight(1.0)).best;
    std::vector<Hypothesis> shaken = u.nbest.hyps();
    for (Hypothesis &h : shaken) h.asr_score = -50.0 * lt::uniform01(rng);
    NBestList perturbed(u.id, shaken);
    DecodeResult p1 = rescore_nbest(scorer, enc, perturbed, InterpWeight(1.0)).best;
    if (p1.tokens == r1.tokens && p1.ec_score == r1.ec_score) ++invariant;
  }
  report(rank1 == kTrials && invariant == kTrials, "interpolation endpoints",
         fmt("trials=%zu lambda0_rank1=%zu/%zu lambda1_invariant_to_asr=%zu/%zu", kTrials, rank1,
             kTrials, invariant, kTrials));
}

// --- k-degeneracy -------------------------------------------------------------

void k_degeneracy() {
  ToyLexicon lex(4);
  std::size_t same = 0;
  const std::size_t kRuns = 100;
  for (std::size_t s = 0; s < kRuns; ++s) {
    ToyCatalogue cat = make_toy_models(lex, 1000 + s, 0.3);
    const EmissionModel &m = s % 2 ? static_cast<const EmissionModel &>(*cat.bigram)
                                   : static_cast<const EmissionModel &>(*cat.noisy);
    const std::size_t max_len = 30;
    NBestList plain = beam_search(m, BeamConfig{10, std::nullopt, max_len, false});
    NBestList merged = merged_beam_search(m, BeamConfig{10, max_len + 1 + s % 3, max_len, false}).nbest;
    bool eq = plain.size() == merged.size();
    for (std::size_t i = 0; eq && i < plain.size(); ++i)
      eq = plain[i].text == merged[i].text && plain[i].tokens == merged[i].tokens &&
           std::memcmp(&plain[i].asr_score, &merged[i].asr_score, sizeof(double)) == 0;
    if (eq) ++same;
  }
  report(same == kRuns, "k-degeneracy", fmt("runs=%zu bit_identical=%zu", kRuns, same));
}

// --- retokenization conservation ------------------------------------------------

struct WordView {
  std::set<Words> sequences;
  double max_score = -INFINITY;
};

WordView view(const Lattice &lat, const BoundaryConvention &conv, bool word_labels) {
  WordView v;
  for (const lt::RefPath &p : lt::brute_paths(lat)) {
    Words words;
    for (const Token &t : p.tokens) {
      if (t == conv.terminal) continue;
      if (word_labels) {
        words.push_back(t);
      } else if (t.starts_with(conv.marker)) {
        words.push_back(t.substr(conv.marker.size()));
      } else {
        words.back() += t;
      }
    }
    v.sequences.insert(words);
    v.max_score = std::max(v.max_score, p.score);
  }
  return v;
}

void retokenization_conservation() {
  std::mt19937_64 rng(77);
  BoundaryConvention conv;
  VocabTokenizer tok({"▁ka", "▁k", "▁n", "ni", "ght", "ro", "t", "s", "▁s", "a", "mo", "▁mo", "g", "h",
                      "i", "k", "m", "n", "o", "r"},
                     conv);
  std::size_t ok = 0;
  double drift = 0.0;
  std::size_t max_paths = 0;
  const std::size_t kLattices = 100;
  for (std::size_t t = 0; t < kLattices; ++t) {
    Lattice bpe = lt::random_bpe_lattice(rng, 3 + static_cast<int>(t % 6), conv);
    Lattice word = bpe_to_word(bpe, conv);
    Lattice plm = word_to_plm_bpe(word, tok);
    WordView a = view(bpe, conv, false), b = view(word, conv, true), c = view(plm, conv, false);
    max_paths = std::max(max_paths, count_paths(bpe) > 0 ? static_cast<std::size_t>(count_paths(bpe)) : 0);
    double d = std::max(std::abs(a.max_score - b.max_score), std::abs(a.max_score - c.max_score));
    drift = std::max(drift, d);
    if (a.sequences == b.sequences && a.sequences == c.sequences && d <= 1e-9 &&
        validate_lattice(word).ok() && validate_lattice(plm).ok())
      ++ok;
  }
  report(ok == kLattices, "retokenization conservation",
         fmt("lattices=%zu (max %zu paths) preserved=%zu max_score_drift=%.3g", kLattices, max_paths,
             ok, drift));
}

// --- lattice oracle -------------------------------------------------------------

void lattice_oracle() {
  std::mt19937_64 rng(99);
  BoundaryConvention conv;
  std::size_t lattices = 0, exact = 0;
  while (lattices < 200) {
    Lattice lat = lattices % 2
                      ? lt::random_bpe_lattice(rng, 2 + static_cast<int>(lt::pick(rng, 6)), conv)
                      : lt::random_dag(rng, 3 + static_cast<int>(lt::pick(rng, 7)),
                                       {"▁ka", "▁t", "▁ni", "ght", "s", "</s>"}, 0.3);
    if (!validate_lattice(lat).ok() || count_paths(lat) > 500) continue;
    std::vector<lt::RefPath> paths = lt::brute_paths(lat);
    // Paths must segment into words; skip the rare random DAG that does not.
    bool segmentable = true;
    std::vector<Words> hyps;
    for (const auto &p : paths) {
      Words words;
      bool boundary = true;
      for (const Token &t : p.tokens) {
        if (t == conv.terminal) {
          boundary = true;
        } else if (t.starts_with(conv.marker)) {
          words.push_back(t.substr(conv.marker.size()));
          boundary = false;
        } else if (boundary) {
          segmentable = false;
        } else {
          words.back() += t;
        }
      }
      hyps.push_back(words);
    }
    if (!segmentable) continue;
    ++lattices;
    Words ref;
    if (lt::uniform01(rng) < 0.5) {
      ref = hyps[lt::pick(rng, hyps.size())];
      if (!ref.empty() && lt::uniform01(rng) < 0.7) ref[lt::pick(rng, ref.size())] = "zz";
    }
    static const std::vector<std::string> kWords{"ka", "t", "kaght", "nis", "ni", "zz", "moro"};
    while (ref.size() < 1 + lt::pick(rng, 6)) ref.push_back(kWords[lt::pick(rng, kWords.size())]);
    std::size_t best = SIZE_MAX;
    for (const Words &h : hyps) best = std::min(best, lt::edit_distance(ref, h));
    LatticeOracle o = oracle_wer_lattice(ref, lat, conv);
    if (o.stats.edits() == best && wer(ref, path_words(o.witness, conv)) == o.stats) ++exact;
  }
  report(exact == lattices, "lattice oracle DP",
         fmt("lattices=%zu (<=500 paths) exact=%zu", lattices, exact));
}

// --- lambda sweep ----------------------------------------------------------------

// Correction scorer that knows each utterance's reference through its own
// noisy channel, with less noise than the recognizer simulation.
class CorpusChannelScorer : public Scorer {
 public:
  CorpusChannelScorer(const std::map<std::string, const EmissionModel *> &by_text)
      : by_text_(by_text) {}
  Session start(const EncoderInput &enc) override {
    if (!by_text_.count(enc.text)) throw ValidationError("unknown encoder input");
    return {enc.text};
  }
  std::vector<double> next_logprobs(const Session &s, std::span<const Token> history,
                                    std::span<const Token> candidates) override {
    EmissionScorer inner(*by_text_.at(s.id));
    return inner.next_logprobs(s, history, candidates);
  }

 private:
  const std::map<std::string, const EmissionModel *> &by_text_;
};

void lambda_sweep() {
  auto t0 = Clock::now();
  ToyLexicon lex(5);
  SimOptions opts;
  opts.seed = 5;
  opts.rho = 0.3;
  const std::size_t kUtts = 200;
  std::vector<CorpusItem> items;
  std::vector<Words> refs;
  std::vector<std::unique_ptr<NoisyChannelModel>> ec_models;
  std::map<std::string, const EmissionModel *> by_text;
  std::size_t collisions = 0;
  for (std::size_t i = 0; i < kUtts; ++i) {
    SimUtterance u = simulate_utterance(lex, opts, i);
    ToyCatalogue cat = make_toy_models(lex, utterance_seed(opts.seed, i), opts.rho);
    ec_models.push_back(std::make_unique<NoisyChannelModel>(
        cat.reference_tokens, lex.confusions(), 0.1, utterance_seed(opts.seed + 7919, i)));
    CorpusItem item{u.id, build_encoder_input(u.nbest, 10), u.nbest, u.lattice};
    if (!by_text.emplace(item.enc.text, ec_models.back().get()).second) ++collisions;
    items.push_back(std::move(item));
    refs.push_back(u.reference);
  }
  std::string detail;
  bool ok = collisions == 0;
  for (DecodeMode mode : {DecodeMode::kNBest, DecodeMode::kLattice}) {
    DecodeOptions dopts;
    dopts.mode = mode;
    dopts.lattice_beam = 1;
    ScorerFactory factory = [&] { return std::make_unique<CorpusChannelScorer>(by_text); };
    SweepResult r = sweep_lambda(items, refs, dopts, factory, 0.05, 1);
    double interior = INFINITY, at_best = 0.0;
    for (std::size_t g = 1; g + 1 < r.rows.size(); ++g)
      if (r.rows[g].stats.wer() < interior) {
        interior = r.rows[g].stats.wer();
        at_best = r.rows[g].lambda;
      }
    const double w0 = r.rows.front().stats.wer(), w1 = r.rows.back().stats.wer();
    ok = ok && r.rows.size() == 21 && interior <= w0 && interior <= w1;
    detail += fmt("%s: points=%zu WER(0)=%.4f WER(1)=%.4f best_interior=%.4f@%.2f; ",
                  std::string(to_string(mode)).c_str(), r.rows.size(), w0, w1, interior, at_best);
  }
  detail += fmt("time=%.1fs", seconds_since(t0));
  report(ok, "lambda sweep shape", detail);
}

// --- WER engine ---------------------------------------------------------------------

void wer_engine() {
  std::mt19937_64 rng(31337);
  const std::size_t kPairs = 10000;
  std::size_t exact = 0;
  for (std::size_t t = 0; t < kPairs; ++t) {
    auto draw = [&](std::size_t min_len) {
      Words w(min_len + lt::pick(rng, 15));
      for (auto &x : w) x = std::string(1, static_cast<char>('a' + lt::pick(rng, 5)));
      return w;
    };
    Words ref = draw(1), hyp = draw(0);
    WerStats s = wer(ref, hyp);
    if (s.edits() == lt::edit_distance(ref, hyp) && s.ref_len == ref.size() &&
        s.ref_len - s.dels + s.ins == hyp.size())
      ++exact;
  }
  report(exact == kPairs, "WER engine", fmt("pairs=%zu exact=%zu", kPairs, exact));
}

}  // namespace

int main() {
  oracle_dominance();
  lattice_exactness();
  interpolation_endpoints();
  k_degeneracy();
  retokenization_conservation();
  lattice_oracle();
  lambda_sweep();
  wer_engine();
  std::printf("%s: %d failure(s)\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
