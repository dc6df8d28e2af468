// latrec/decode.cc

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

#include "latrec/decode.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>
#include <thread>

#include "beam_impl.h"
#include "latrec/error.h"

namespace latrec {

std::string_view to_string(DecodeMode mode) {
  switch (mode) {
    case DecodeMode::kUnconstrained: return "unconstrained";
    case DecodeMode::kNBest: return "nbest";
    case DecodeMode::kLattice: return "lattice";
  }
  return "?";
}

DecodeMode parse_decode_mode(std::string_view name) {
  if (name == "unconstrained") return DecodeMode::kUnconstrained;
  if (name == "nbest") return DecodeMode::kNBest;
  if (name == "lattice") return DecodeMode::kLattice;
  throw ValidationError("unknown decode mode '" + std::string(name) + "'");
}

InterpWeight::InterpWeight(double lambda) : lambda_(lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw ValidationError("interpolation weight must be in [0, 1]");
}

DecodeResult decode_unconstrained(Scorer &scorer, const EncoderInput &enc,
                                  std::span<const Token> vocab, std::size_t beam,
                                  std::size_t max_len, const BoundaryConvention &conv) {
  if (std::find(vocab.begin(), vocab.end(), conv.terminal) == vocab.end())
    throw ValidationError("decoding vocabulary lacks the terminal '" + conv.terminal + "'");
  Session session = scorer.start(enc);
  auto expand = [&](const TokenSeq &history) {
    std::vector<double> lp = scorer.next_logprobs(session, history, vocab);
    if (lp.size() != vocab.size()) throw ProtocolError("scorer returned a wrong number of log-probs");
    std::vector<std::pair<Token, double>> out;
    out.reserve(vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i) out.emplace_back(vocab[i], lp[i]);
    return out;
  };
  std::vector<internal::BeamEntry> done =
      internal::token_beam_search(expand, beam, max_len, conv.terminal);
  scorer.end(session);
  DecodeResult r;
  r.tokens = std::move(done.front().history);
  r.text = tokens_to_text(r.tokens, conv);
  r.ec_score = r.combined = done.front().score;
  r.mode = DecodeMode::kUnconstrained;
  return r;
}

RescoreResult rescore_nbest(Scorer &scorer, const EncoderInput &enc, const NBestList &nbest,
                            InterpWeight lambda, const RescoreOptions &opts) {
  RescoreResult out;
  std::size_t best = 0;
  for (std::size_t i = 0; i < nbest.size(); ++i) {
    ScoredCandidate c;
    c.rank = i + 1;
    c.tokens = hypothesis_tokens(nbest[i]);
    c.asr_score = nbest[i].asr_score;
    c.ec_score = scorer.score_sequence(enc, c.tokens);
    if (opts.length_normalize && !c.tokens.empty())
      c.ec_score /= static_cast<double>(c.tokens.size());
    c.combined = lambda.asr() * c.asr_score + lambda.ec() * c.ec_score;
    out.candidates.push_back(std::move(c));
    const ScoredCandidate &cur = out.candidates.back(), &top = out.candidates[best];
    if (cur.combined > top.combined || (cur.combined == top.combined && cur.tokens < top.tokens))
      best = i;
  }
  const ScoredCandidate &w = out.candidates[best];
  out.best = {w.tokens, nbest[best].text, w.ec_score, w.asr_score, w.combined, DecodeMode::kNBest};
  return out;
}

bool NodeBeam::heap_less(const Entry &a, const Entry &b) {
  if (a.hyp.score != b.hyp.score) return a.hyp.score > b.hyp.score;
  return a.seq > b.seq;
}

bool NodeBeam::offer(PartialHyp hyp) {
  if (heap_.size() >= capacity_) {
    if (!(heap_.front().hyp.score < hyp.score)) return false;
    std::pop_heap(heap_.begin(), heap_.end(), heap_less);
    heap_.pop_back();
  }
  heap_.push_back({std::move(hyp), next_seq_++});
  std::push_heap(heap_.begin(), heap_.end(), heap_less);
  return true;
}

std::vector<PartialHyp> NodeBeam::sorted() const {
  std::vector<PartialHyp> out;
  out.reserve(heap_.size());
  for (const Entry &e : heap_) out.push_back(e.hyp);
  std::sort(out.begin(), out.end(), [](const PartialHyp &a, const PartialHyp &b) {
    if (a.score != b.score) return a.score > b.score;
    return a.history < b.history;
  });
  return out;
}

DecodeResult decode_lattice(Scorer &scorer, const EncoderInput &enc, const Lattice &lat,
                            InterpWeight lambda, std::size_t b, const BoundaryConvention &conv) {
  if (b == 0) throw ValidationError("lattice beam b must be at least 1");
  std::vector<NodeId> order = topo_order(lat);
  std::vector<NodeBeam> beams(lat.num_nodes(), NodeBeam(b));
  beams[lat.start()].offer(PartialHyp{});
  Session session = scorer.start(enc);

  for (NodeId v : order) {
    if (v == lat.end() || beams[v].empty()) continue;
    std::span<const Arc> out = lat.out_arcs(v);
    if (out.empty()) continue;
    std::vector<Token> labels;
    for (const Arc &a : out) labels.push_back(a.label);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

    std::vector<PartialHyp> hyps = beams[v].sorted();
    beams[v] = NodeBeam(b);
    // One scorer query per partial hypothesis, shared by all out-arcs.
    std::vector<std::vector<double>> lps;
    lps.reserve(hyps.size());
    for (const PartialHyp &n : hyps) {
      lps.push_back(scorer.next_logprobs(session, n.history, labels));
      if (lps.back().size() != labels.size())
        throw ProtocolError("scorer returned a wrong number of log-probs");
    }
    for (const Arc &a : out) {
      std::size_t li = static_cast<std::size_t>(
          std::lower_bound(labels.begin(), labels.end(), a.label) - labels.begin());
      for (std::size_t h = 0; h < hyps.size(); ++h) {
        const PartialHyp &n = hyps[h];
        const double lp = lps[h][li];
        PartialHyp next{n.history, n.score + lambda.ec() * lp + lambda.asr() * a.score,
                        n.ec_score + lp, n.asr_score + a.score};
        next.history.push_back(a.label);
        beams[a.dst].offer(std::move(next));
      }
    }
  }
  scorer.end(session);

  std::vector<PartialHyp> final = beams[lat.end()].sorted();
  if (final.empty()) throw NoHypothesisError("no hypothesis reached the end node");
  PartialHyp &best = final.front();
  DecodeResult r;
  r.text = tokens_to_text(best.history, conv);
  r.tokens = std::move(best.history);
  r.ec_score = best.ec_score;
  r.asr_score = best.asr_score;
  r.combined = best.score;
  r.mode = DecodeMode::kLattice;
  return r;
}

DecodeResult decode_item(Scorer &scorer, const CorpusItem &item, const DecodeOptions &opts) {
  switch (opts.mode) {
    case DecodeMode::kUnconstrained: {
      std::vector<Token> vocab = opts.vocab;
      std::size_t longest = 0;
      if (vocab.empty()) {
        std::set<Token> v{opts.conv.terminal};
        for (const Hypothesis &h : item.nbest.hyps()) {
          TokenSeq t = hypothesis_tokens(h);
          v.insert(t.begin(), t.end());
        }
        vocab.assign(v.begin(), v.end());
      }
      for (const Hypothesis &h : item.nbest.hyps())
        longest = std::max(longest, hypothesis_tokens(h).size());
      std::size_t max_len = opts.max_len ? opts.max_len : 2 * longest + 8;
      return decode_unconstrained(scorer, item.enc, vocab, opts.beam, max_len, opts.conv);
    }
    case DecodeMode::kNBest:
      return rescore_nbest(scorer, item.enc, item.nbest, InterpWeight(opts.lambda), opts.rescore)
          .best;
    case DecodeMode::kLattice:
      if (!item.lattice) throw ValidationError("utterance '" + item.id + "' has no lattice");
      return decode_lattice(scorer, item.enc, *item.lattice, InterpWeight(opts.lambda),
                            opts.lattice_beam, opts.conv);
  }
  throw ValidationError("bad decode mode");
}

void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t, std::size_t)> &fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t w) {
    for (std::size_t i = w; i < n; i += jobs) {
      try {
        fn(w, i);
      } catch (...) {
        errors[i] = std::current_exception();
        return;
      }
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < jobs; ++w) threads.emplace_back(work, w);
    for (std::thread &t : threads) t.join();
  }
  for (const std::exception_ptr &e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

std::vector<std::unique_ptr<Scorer>> make_scorers(const ScorerFactory &factory, std::size_t n) {
  std::vector<std::unique_ptr<Scorer>> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(factory());
    if (!out.back()) throw ValidationError("scorer factory returned null");
  }
  return out;
}

class BorrowedScorer : public Scorer {
 public:
  explicit BorrowedScorer(Scorer &inner) : inner_(inner) {}
  Session start(const EncoderInput &enc) override { return inner_.start(enc); }
  std::vector<double> next_logprobs(const Session &s, std::span<const Token> history,
                                    std::span<const Token> candidates) override {
    return inner_.next_logprobs(s, history, candidates);
  }
  double score_sequence(const EncoderInput &enc, std::span<const Token> target) override {
    return inner_.score_sequence(enc, target);
  }
  void end(const Session &s) override { inner_.end(s); }

 private:
  Scorer &inner_;
};

}  // namespace

std::vector<DecodeResult> decode_corpus(std::span<const CorpusItem> items,
                                        const DecodeOptions &opts,
                                        const ScorerFactory &factory, std::size_t jobs) {
  jobs = std::max<std::size_t>(1, std::min(jobs, items.size()));
  auto scorers = make_scorers(factory, jobs);
  std::vector<DecodeResult> results(items.size());
  parallel_for(items.size(), jobs, [&](std::size_t w, std::size_t i) {
    results[i] = decode_item(*scorers[w], items[i], opts);
  });
  return results;
}

std::vector<double> lambda_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw ValidationError("grid step must be in (0, 1]");
  const double n = std::round(1.0 / step);
  if (std::abs(n * step - 1.0) > 1e-9)
    throw ValidationError("grid step must divide 1 evenly");
  std::vector<double> grid;
  for (int i = 0; i <= static_cast<int>(n); ++i) grid.push_back(i / n);
  return grid;
}

SweepResult sweep_lambda(std::span<const CorpusItem> items, std::span<const Words> refs,
                         const DecodeOptions &base, const ScorerFactory &factory,
                         double grid_step, std::size_t jobs) {
  if (base.mode == DecodeMode::kUnconstrained)
    throw ValidationError("the lambda sweep needs a constrained decoding mode");
  if (refs.size() != items.size()) throw ValidationError("one reference per utterance required");
  std::vector<double> grid = lambda_grid(grid_step);
  jobs = std::max<std::size_t>(1, std::min(jobs, items.size()));
  auto scorers = make_scorers(factory, jobs);

  std::vector<std::vector<WerStats>> per_item(items.size());
  parallel_for(items.size(), jobs, [&](std::size_t w, std::size_t i) {
    if (refs[i].empty()) throw EmptyReferenceError(i);
    DecodeOptions opts = base;
    for (double lambda : grid) {
      opts.lambda = lambda;
      DecodeResult r = decode_item(*scorers[w], items[i], opts);
      per_item[i].push_back(wer(refs[i], split_words(r.text)));
    }
  });

  SweepResult out;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    SweepRow row{grid[g], {}};
    for (const auto &stats : per_item) row.stats += stats[g];
    out.rows.push_back(row);
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < out.rows.size(); ++g)
    if (out.rows[g].stats.edits() < out.rows[best].stats.edits()) best = g;
  out.best_lambda = out.rows.empty() ? 0.0 : out.rows[best].lambda;
  return out;
}

SweepResult sweep_lambda(std::span<const CorpusItem> items, std::span<const Words> refs,
                         const DecodeOptions &base, Scorer &scorer, double grid_step) {
  return sweep_lambda(
      items, refs, base, [&] { return std::make_unique<BorrowedScorer>(scorer); }, grid_step, 1);
}

}  // namespace latrec
