// tests/support.h

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

// Test helpers: lattice builders, random lattices, recursive path
// enumeration and a textbook edit distance.

#ifndef LATREC_TESTS_SUPPORT_H_
#define LATREC_TESTS_SUPPORT_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "latrec/lattice.h"
#include "latrec/scoring.h"
#include "latrec/simulate.h"
#include "latrec/token.h"

namespace latrec::testing {

inline Lattice make_lattice(NodeId start, NodeId end,
                            std::vector<std::tuple<NodeId, NodeId, std::string, double>> arcs) {
  std::vector<Arc> out;
  NodeId hi = std::max(start, end);
  for (auto &[s, d, l, w] : arcs) {
    out.push_back({s, d, l, w});
    hi = std::max({hi, s, d});
  }
  return Lattice(hi + 1, start, end, std::move(out));
}

struct RefPath {
  TokenSeq tokens;
  double score = 0.0;
};

// Every start->end path, by recursion over raw arcs (arc order as given).
inline std::vector<RefPath> brute_paths(const Lattice &lat) {
  std::vector<RefPath> out;
  RefPath cur;
  std::function<void(NodeId)> go = [&](NodeId v) {
    if (v == lat.end()) {
      out.push_back(cur);
      return;
    }
    for (const Arc &a : lat.arcs()) {
      if (a.src != v) continue;
      cur.tokens.push_back(a.label);
      double saved = cur.score;
      cur.score += a.score;
      go(a.dst);
      cur.score = saved;
      cur.tokens.pop_back();
    }
  };
  go(lat.start());
  return out;
}

// Plain (n+1)x(m+1) Levenshtein table.
inline std::size_t edit_distance(const std::vector<std::string> &a,
                                 const std::vector<std::string> &b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[a.size()][b.size()];
}

inline double uniform01(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t pick(std::mt19937_64 &rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

// Random connected DAG over nodes 0..n-1 (0 = start, n-1 = end), labels drawn
// from `labels`. Arcs only go from lower to higher ids, so the input is
// acyclic; every inner node gets an in-arc and an out-arc.
inline Lattice random_dag(std::mt19937_64 &rng, int n, const std::vector<std::string> &labels,
                          double extra_density = 0.35) {
  std::set<std::tuple<NodeId, NodeId, std::string>> seen;
  std::vector<Arc> arcs;
  auto add = [&](NodeId s, NodeId d) {
    for (int tries = 0; tries < 8; ++tries) {
      const std::string &l = labels[pick(rng, labels.size())];
      if (seen.insert({s, d, l}).second) {
        arcs.push_back({s, d, l, -3.0 * uniform01(rng)});
        return;
      }
    }
  };
  for (NodeId v = 1; v < n; ++v) add(static_cast<NodeId>(pick(rng, v)), v);
  for (NodeId v = 0; v + 1 < n; ++v) add(v, v + 1 + static_cast<NodeId>(pick(rng, n - 1 - v)));
  for (NodeId s = 0; s + 1 < n; ++s)
    for (NodeId d = s + 1; d < n; ++d)
      if (uniform01(rng) < extra_density) add(s, d);
  return Lattice(n, 0, n - 1, std::move(arcs));
}

// Random sub-word lattice whose paths all segment into words: arcs leaving
// the start node and arcs following a terminal-free word boundary start with
// the marker; the last arcs into the end node are terminals.
inline Lattice random_bpe_lattice(std::mt19937_64 &rng, int layers, const BoundaryConvention &conv) {
  static const std::vector<std::string> kPieces{"ka", "t", "ni", "ght", "s", "a", "ro", "mo"};
  // Nodes: layer i has 1..2 nodes; final node gets only terminal arcs.
  std::vector<std::vector<NodeId>> layer_nodes;
  NodeId next = 0;
  layer_nodes.push_back({next++});
  for (int i = 1; i <= layers; ++i) {
    std::vector<NodeId> ids;
    std::size_t width = 1 + pick(rng, 2);
    for (std::size_t j = 0; j < width; ++j) ids.push_back(next++);
    layer_nodes.push_back(ids);
  }
  NodeId end = next++;
  std::set<std::tuple<NodeId, NodeId, std::string>> seen;
  std::vector<Arc> arcs;
  auto add = [&](NodeId s, NodeId d, std::string l) {
    if (seen.insert({s, d, l}).second) arcs.push_back({s, d, std::move(l), -2.0 * uniform01(rng)});
  };
  auto label = [&](bool first) {
    std::string p = kPieces[pick(rng, kPieces.size())];
    return first || uniform01(rng) < 0.5 ? conv.marker + p : p;
  };
  for (int i = 0; i < layers; ++i) {
    const auto &from = layer_nodes[i];
    const auto &to = layer_nodes[i + 1];
    for (NodeId d : to) {
      NodeId s = from[pick(rng, from.size())];
      add(s, d, label(i == 0));
    }
    for (NodeId s : from) {
      NodeId d = to[pick(rng, to.size())];
      add(s, d, label(i == 0));
      if (uniform01(rng) < 0.5) add(s, to[pick(rng, to.size())], label(i == 0));
    }
  }
  for (NodeId s : layer_nodes.back()) add(s, end, conv.terminal);
  return Lattice(end + 1, 0, end, std::move(arcs));
}

// Unit-normalized draw of a distribution over `vocab` from a seed, used as a
// history-dependent scorer in tests.
class HashScorer : public Scorer {
 public:
  HashScorer(std::vector<Token> vocab, std::uint64_t salt) : vocab_(std::move(vocab)), salt_(salt) {}
  Session start(const EncoderInput &enc) override { return {enc.text}; }
  std::vector<double> next_logprobs(const Session &, std::span<const Token> history,
                                    std::span<const Token> candidates) override {
    std::uint64_t h = salt_;
    for (const Token &t : history)
      for (unsigned char c : t) h = (h ^ c) * 1099511628211ull;
    std::vector<double> w(vocab_.size());
    double z = 0.0;
    for (std::size_t i = 0; i < vocab_.size(); ++i) {
      std::uint64_t x = h ^ (0x9e3779b97f4a7c15ull * (i + 1));
      x ^= x >> 31;
      x *= 0xbf58476d1ce4e5b9ull;
      x ^= x >> 29;
      w[i] = 0.05 + static_cast<double>(x >> 11) * 0x1.0p-53;
      z += w[i];
    }
    std::vector<double> out;
    for (const Token &c : candidates) {
      auto it = std::find(vocab_.begin(), vocab_.end(), c);
      out.push_back(it == vocab_.end() ? std::log(1e-6) : std::log(w[it - vocab_.begin()] / z));
    }
    ++queries_;
    return out;
  }
  std::size_t queries() const { return queries_; }

 private:
  std::vector<Token> vocab_;
  std::uint64_t salt_;
  std::size_t queries_ = 0;
};

}  // namespace latrec::testing

#endif  // LATREC_TESTS_SUPPORT_H_
