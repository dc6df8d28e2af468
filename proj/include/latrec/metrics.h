// latrec/metrics.h

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

#ifndef LATREC_METRICS_H_
#define LATREC_METRICS_H_

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "latrec/lattice.h"
#include "latrec/nbest.h"
#include "latrec/token.h"

namespace latrec {

using Words = std::vector<std::string>;

enum class EditOp { kMatch, kSubstitute, kInsert, kDelete };

struct AlignedPair {
  EditOp op;
  std::ptrdiff_t ref_index;  // -1 for insertions
  std::ptrdiff_t hyp_index;  // -1 for deletions
};

struct Alignment {
  std::vector<AlignedPair> ops;
  std::size_t cost() const;
};

// Minimum-cost alignment with unit costs. Among optimal alignments the
// backtrace prefers match, then substitution, then deletion, then insertion.
Alignment align(std::span<const std::string> ref, std::span<const std::string> hyp);

struct WerStats {
  std::size_t subs = 0;
  std::size_t ins = 0;
  std::size_t dels = 0;
  std::size_t ref_len = 0;

  std::size_t edits() const { return subs + ins + dels; }
  double wer() const {
    return ref_len ? static_cast<double>(edits()) / static_cast<double>(ref_len) : 0.0;
  }
  WerStats &operator+=(const WerStats &o) {
    subs += o.subs;
    ins += o.ins;
    dels += o.dels;
    ref_len += o.ref_len;
    return *this;
  }
  bool operator==(const WerStats &) const = default;
};

// Throws EmptyReferenceError for an empty reference.
WerStats wer(std::span<const std::string> ref, std::span<const std::string> hyp);

struct NBestOracle {
  WerStats stats;
  std::size_t rank = 1;  // 1-based rank of the best hypothesis
};

// Best hypothesis by edit count; ties go to the better-ranked one.
NBestOracle oracle_wer_nbest(std::span<const std::string> ref, const NBestList &nbest);

struct LatticeOracle {
  WerStats stats;
  LatticePath witness;
};

// Minimum word edit distance over all paths of `lat`, by dynamic programming
// over (word-lattice node, reference position) states. The witness is a path
// of the input lattice whose words achieve the reported cost.
LatticeOracle oracle_wer_lattice(std::span<const std::string> ref, const Lattice &lat,
                                 const BoundaryConvention &conv = {});

// Indices of pairs whose WER is at most `threshold`; pairs above it are
// dropped. An empty reference raises EmptyReferenceError naming its index.
std::vector<std::size_t> filter_pairs(std::span<const std::pair<Words, Words>> pairs,
                                      double threshold = 0.25);

struct UttStats {
  std::string id;
  WerStats stats;
};

struct CorpusReport {
  WerStats total;  // pooled edits over pooled reference length
  std::vector<UttStats> rows;
};

CorpusReport corpus_report(std::vector<UttStats> rows);

// id, subs, ins, dels, ref_len, wer; last row is "TOTAL".
void write_report_tsv(std::ostream &os, const CorpusReport &report,
                      std::span<const std::string> header = {});
// Same content, column-aligned for terminals.
std::string format_report_table(const CorpusReport &report);

}  // namespace latrec

#endif  // LATREC_METRICS_H_
