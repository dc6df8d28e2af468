// latrec/decode.h

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

#ifndef LATREC_DECODE_H_
#define LATREC_DECODE_H_

// Correction-model decoding: free beam search, rescoring restricted to an
// N-best list, and search restricted to the paths of a lattice. The two
// constrained modes maximize
//
//   (1 - lambda) * asr_score(y) + lambda * ec_score(y)
//
// where asr_score comes from the input files and ec_score from a Scorer.

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latrec/lattice.h"
#include "latrec/metrics.h"
#include "latrec/nbest.h"
#include "latrec/scoring.h"
#include "latrec/token.h"

namespace latrec {

enum class DecodeMode { kUnconstrained, kNBest, kLattice };

std::string_view to_string(DecodeMode mode);
DecodeMode parse_decode_mode(std::string_view name);  // ValidationError on unknown

// Weight of the correction model; the ASR score gets 1 - lambda.
class InterpWeight {
 public:
  explicit InterpWeight(double lambda);
  double value() const { return lambda_; }
  double ec() const { return lambda_; }
  double asr() const { return 1.0 - lambda_; }

 private:
  double lambda_;
};

struct DecodeResult {
  TokenSeq tokens;
  std::string text;
  double ec_score = 0.0;
  double asr_score = 0.0;  // 0 in unconstrained mode
  double combined = 0.0;   // equals ec_score in unconstrained mode
  DecodeMode mode = DecodeMode::kUnconstrained;
};

// Beam search over `vocab` (which must contain the terminal). Throws
// NoHypothesisError if nothing ends within max_len tokens.
DecodeResult decode_unconstrained(Scorer &scorer, const EncoderInput &enc,
                                  std::span<const Token> vocab, std::size_t beam,
                                  std::size_t max_len, const BoundaryConvention &conv = {});

struct RescoreOptions {
  // Divide the correction score by the token count. Off by default.
  bool length_normalize = false;
};

struct ScoredCandidate {
  std::size_t rank = 0;  // 1-based N-best rank
  TokenSeq tokens;
  double asr_score = 0.0;
  double ec_score = 0.0;
  double combined = 0.0;
};

struct RescoreResult {
  DecodeResult best;
  std::vector<ScoredCandidate> candidates;  // N-best order
};

// Scores every hypothesis with hypothesis_tokens() and returns the argmax,
// ties going to the lexicographically smaller token sequence.
RescoreResult rescore_nbest(Scorer &scorer, const EncoderInput &enc, const NBestList &nbest,
                            InterpWeight lambda, const RescoreOptions &opts = {});

inline constexpr std::size_t kUnboundedBeam = std::numeric_limits<std::size_t>::max();

// Partial hypothesis of the lattice search.
struct PartialHyp {
  TokenSeq history;
  double score = 0.0;
  double ec_score = 0.0;
  double asr_score = 0.0;
};

// Bounded per-node beam. A full beam admits a newcomer only if it beats the
// current minimum, which is then evicted; among equal minima the oldest
// entry goes first.
class NodeBeam {
 public:
  explicit NodeBeam(std::size_t capacity) : capacity_(capacity) {}

  // Returns true if the hypothesis was admitted.
  bool offer(PartialHyp hyp);
  std::size_t size() const { return heap_.size(); }
  bool empty() const { return heap_.empty(); }
  double min_score() const { return heap_.front().hyp.score; }
  // Best first, ties by history.
  std::vector<PartialHyp> sorted() const;

 private:
  struct Entry {
    PartialHyp hyp;
    std::uint64_t seq;
  };
  // Min-heap on (score, seq).
  static bool heap_less(const Entry &a, const Entry &b);

  std::size_t capacity_;
  std::uint64_t next_seq_ = 0;
  std::vector<Entry> heap_;
};

// Lattice-constrained search. Nodes are visited in topological order; each
// partial hypothesis at a node queries the scorer once with its history and
// reads off the log-probs of the node's out-arc labels; extensions compete
// for the per-node beams of width b. kUnboundedBeam makes the search exact.
DecodeResult decode_lattice(Scorer &scorer, const EncoderInput &enc, const Lattice &lat,
                            InterpWeight lambda, std::size_t b,
                            const BoundaryConvention &conv = {});

// Corpus-level driver used by the CLI and the sweep.
struct DecodeOptions {
  DecodeMode mode = DecodeMode::kNBest;
  double lambda = 0.5;
  std::size_t lattice_beam = 1;      // b of the lattice search
  std::size_t beam = 10;             // unconstrained beam
  std::size_t max_len = 0;           // unconstrained; 0 = 2 * longest hypothesis + 8
  std::vector<Token> vocab;          // unconstrained; empty = N-best tokens + terminal
  RescoreOptions rescore;
  BoundaryConvention conv;
};

struct CorpusItem {
  std::string id;
  EncoderInput enc;
  NBestList nbest;
  std::optional<Lattice> lattice;  // required in lattice mode
};

DecodeResult decode_item(Scorer &scorer, const CorpusItem &item, const DecodeOptions &opts);

using ScorerFactory = std::function<std::unique_ptr<Scorer>()>;

// Utterance-parallel decoding; each of the `jobs` workers owns one scorer
// from `factory`. Results are in input order.
std::vector<DecodeResult> decode_corpus(std::span<const CorpusItem> items,
                                        const DecodeOptions &opts,
                                        const ScorerFactory &factory, std::size_t jobs = 1);

// lambda in {0, step, 2 step, ..., 1}; 1/step must be an integer.
std::vector<double> lambda_grid(double step);

struct SweepRow {
  double lambda = 0.0;
  WerStats stats;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double best_lambda = 0.0;  // lowest WER, ties to the smaller lambda
};

// Corpus WER of the constrained decoder at every grid point. `refs` is
// parallel to `items`.
SweepResult sweep_lambda(std::span<const CorpusItem> items, std::span<const Words> refs,
                         const DecodeOptions &base, const ScorerFactory &factory,
                         double grid_step = 0.05, std::size_t jobs = 1);
SweepResult sweep_lambda(std::span<const CorpusItem> items, std::span<const Words> refs,
                         const DecodeOptions &base, Scorer &scorer, double grid_step = 0.05);

// Runs fn(worker, index) for index in [0, n) on `jobs` threads; index i is
// handled by worker i % jobs. The first exception is rethrown.
void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t, std::size_t)> &fn);

}  // namespace latrec

#endif  // LATREC_DECODE_H_
