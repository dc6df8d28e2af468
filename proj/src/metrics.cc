// latrec/metrics.cc

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

#include "latrec/metrics.h"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "latrec/error.h"
#include "latrec/io.h"
#include "latrec/retokenize.h"

namespace latrec {

std::size_t Alignment::cost() const {
  return static_cast<std::size_t>(std::count_if(
      ops.begin(), ops.end(), [](const AlignedPair &p) { return p.op != EditOp::kMatch; }));
}

Alignment align(std::span<const std::string> ref, std::span<const std::string> hyp) {
  const std::size_t r = ref.size(), h = hyp.size(), w = h + 1;
  std::vector<std::size_t> d((r + 1) * w);
  for (std::size_t i = 0; i <= r; ++i) d[i * w] = i;
  for (std::size_t j = 0; j <= h; ++j) d[j] = j;
  for (std::size_t i = 1; i <= r; ++i)
    for (std::size_t j = 1; j <= h; ++j)
      d[i * w + j] = std::min({d[(i - 1) * w + j - 1] + (ref[i - 1] == hyp[j - 1] ? 0u : 1u),
                               d[(i - 1) * w + j] + 1, d[i * w + j - 1] + 1});

  Alignment a;
  std::size_t i = r, j = h;
  while (i > 0 || j > 0) {
    const std::size_t here = d[i * w + j];
    auto ri = static_cast<std::ptrdiff_t>(i) - 1, hj = static_cast<std::ptrdiff_t>(j) - 1;
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && d[(i - 1) * w + j - 1] == here) {
      a.ops.push_back({EditOp::kMatch, ri, hj});
      --i, --j;
    } else if (i > 0 && j > 0 && d[(i - 1) * w + j - 1] + 1 == here) {
      a.ops.push_back({EditOp::kSubstitute, ri, hj});
      --i, --j;
    } else if (i > 0 && d[(i - 1) * w + j] + 1 == here) {
      a.ops.push_back({EditOp::kDelete, ri, -1});
      --i;
    } else {
      a.ops.push_back({EditOp::kInsert, -1, hj});
      --j;
    }
  }
  std::reverse(a.ops.begin(), a.ops.end());
  return a;
}

WerStats wer(std::span<const std::string> ref, std::span<const std::string> hyp) {
  if (ref.empty()) throw EmptyReferenceError(0);
  WerStats s;
  s.ref_len = ref.size();
  for (const AlignedPair &p : align(ref, hyp).ops) {
    switch (p.op) {
      case EditOp::kMatch: break;
      case EditOp::kSubstitute: ++s.subs; break;
      case EditOp::kInsert: ++s.ins; break;
      case EditOp::kDelete: ++s.dels; break;
    }
  }
  return s;
}

NBestOracle oracle_wer_nbest(std::span<const std::string> ref, const NBestList &nbest) {
  if (ref.empty()) throw EmptyReferenceError(0);
  NBestOracle best;
  bool have = false;
  for (std::size_t i = 0; i < nbest.size(); ++i) {
    WerStats s = wer(ref, split_words(nbest[i].text));
    if (!have || s.edits() < best.stats.edits()) {
      best = {s, i + 1};
      have = true;
    }
  }
  return best;
}

LatticeOracle oracle_wer_lattice(std::span<const std::string> ref, const Lattice &lat,
                                 const BoundaryConvention &conv) {
  if (ref.empty()) throw EmptyReferenceError(0);
  // Word arcs make every arc consume at most one hypothesis word; terminal
  // arcs consume none.
  WordLattice wl = bpe_to_word_with_provenance(lat, conv);
  const Lattice &g = wl.lattice;
  const std::size_t cols = ref.size() + 1;
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();

  // Back-pointer: how the state (node, j) was reached.
  struct Back {
    std::ptrdiff_t arc = -1;  // word-lattice arc, -1 for a deletion step
    NodeId from = -1;
    std::size_t from_j = 0;
  };
  std::vector<std::size_t> cost(static_cast<std::size_t>(g.num_nodes()) * cols, kInf);
  std::vector<Back> back(cost.size());
  auto at = [&](NodeId v, std::size_t j) { return static_cast<std::size_t>(v) * cols + j; };
  auto relax = [&](NodeId v, std::size_t j, std::size_t c, Back b) {
    if (c < cost[at(v, j)]) {
      cost[at(v, j)] = c;
      back[at(v, j)] = b;
    }
  };

  cost[at(g.start(), 0)] = 0;
  for (NodeId v : topo_order(g)) {
    for (std::size_t j = 0; j + 1 < cols; ++j)  // delete ref[j] without moving
      if (cost[at(v, j)] != kInf) relax(v, j + 1, cost[at(v, j)] + 1, {-1, v, j});
    for (std::size_t ai = g.out_begin(v); ai < g.out_end(v); ++ai) {
      const Arc &a = g.arc(ai);
      const bool eps = conv.is_terminal(a.label);
      for (std::size_t j = 0; j < cols; ++j) {
        std::size_t c = cost[at(v, j)];
        if (c == kInf) continue;
        Back b{static_cast<std::ptrdiff_t>(ai), v, j};
        if (eps) {
          relax(a.dst, j, c, b);
          continue;
        }
        relax(a.dst, j, c + 1, b);  // insertion
        if (j + 1 < cols) relax(a.dst, j + 1, c + (a.label == ref[j] ? 0 : 1), b);
      }
    }
  }

  // Walk the back-pointers to recover the word-arc sequence.
  std::vector<std::size_t> word_arcs;
  NodeId v = g.end();
  std::size_t j = ref.size();
  while (!(v == g.start() && j == 0)) {
    const Back &b = back[at(v, j)];
    if (b.arc >= 0) word_arcs.push_back(static_cast<std::size_t>(b.arc));
    v = b.from;
    j = b.from_j;
  }
  std::reverse(word_arcs.begin(), word_arcs.end());

  std::vector<std::size_t> ids;
  for (std::size_t wa : word_arcs)
    ids.insert(ids.end(), wl.provenance[wa].begin(), wl.provenance[wa].end());
  LatticeOracle out;
  out.witness = make_path(lat, ids);
  out.stats = wer(ref, path_words(out.witness, conv));
  return out;
}

std::vector<std::size_t> filter_pairs(std::span<const std::pair<Words, Words>> pairs,
                                      double threshold) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].first.empty()) throw EmptyReferenceError(i);
    if (wer(pairs[i].first, pairs[i].second).wer() <= threshold) kept.push_back(i);
  }
  return kept;
}

CorpusReport corpus_report(std::vector<UttStats> rows) {
  if (rows.empty()) throw ValidationError("corpus report needs at least one utterance");
  CorpusReport r;
  for (const UttStats &u : rows) r.total += u.stats;
  r.rows = std::move(rows);
  return r;
}

namespace {

std::string wer_string(const WerStats &s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", s.wer());
  return buf;
}

}  // namespace

void write_report_tsv(std::ostream &os, const CorpusReport &report,
                      std::span<const std::string> header) {
  write_header(os, header);
  os << "id\tsubs\tins\tdels\tref_len\twer\n";
  auto row = [&](const std::string &id, const WerStats &s) {
    os << id << '\t' << s.subs << '\t' << s.ins << '\t' << s.dels << '\t' << s.ref_len << '\t'
       << wer_string(s) << '\n';
  };
  for (const UttStats &u : report.rows) row(u.id, u.stats);
  row("TOTAL", report.total);
}

std::string format_report_table(const CorpusReport &report) {
  std::vector<std::vector<std::string>> cells{{"id", "subs", "ins", "dels", "ref_len", "wer"}};
  auto add = [&](const std::string &id, const WerStats &s) {
    cells.push_back({id, std::to_string(s.subs), std::to_string(s.ins), std::to_string(s.dels),
                     std::to_string(s.ref_len), wer_string(s)});
  };
  for (const UttStats &u : report.rows) add(u.id, u.stats);
  add("TOTAL", report.total);
  std::vector<std::size_t> width(6, 0);
  for (const auto &r : cells)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  std::ostringstream os;
  for (const auto &r : cells) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c == 0) {
        os << r[c] << std::string(width[c] - r[c].size(), ' ');
      } else {
        os << "  " << std::string(width[c] - r[c].size(), ' ') << r[c];
      }
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace latrec
