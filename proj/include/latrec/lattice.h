// latrec/lattice.h

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

#ifndef LATREC_LATTICE_H_
#define LATREC_LATTICE_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "latrec/token.h"

namespace latrec {

using NodeId = int;

// One labeled, scored transition. Scores are natural-log, higher is better.
struct Arc {
  NodeId src = 0;
  NodeId dst = 0;
  Token label;
  double score = 0.0;

  bool operator==(const Arc &) const = default;
};

// Canonical arc order: (src, dst, label, score).
bool arc_less(const Arc &a, const Arc &b);

// Arc-labeled acyclic hypothesis graph with one start and one end node.
//
// The constructor only checks that node ids are in range, so that the
// adjacency index is well defined; the remaining structural invariants
// (acyclic, trim, unique start/end, no duplicates) are reported by
// validate_lattice() so that broken inputs can be diagnosed rather than
// rejected. Arcs are stored sorted in canonical order, which makes the
// out-arcs of a node a contiguous range.
class Lattice {
 public:
  Lattice() = default;
  Lattice(int num_nodes, NodeId start, NodeId end, std::vector<Arc> arcs);

  int num_nodes() const { return num_nodes_; }
  NodeId start() const { return start_; }
  NodeId end() const { return end_; }
  std::size_t num_arcs() const { return arcs_.size(); }

  std::span<const Arc> arcs() const { return arcs_; }
  const Arc &arc(std::size_t i) const { return arcs_[i]; }

  // Index of the first out-arc of `node`; out-arcs are
  // [out_begin(node), out_begin(node + 1)).
  std::size_t out_begin(NodeId node) const { return out_offsets_[node]; }
  std::size_t out_end(NodeId node) const { return out_offsets_[node + 1]; }
  std::span<const Arc> out_arcs(NodeId node) const {
    return std::span<const Arc>(arcs_).subspan(out_begin(node),
                                               out_end(node) - out_begin(node));
  }
  // Indices (into arcs()) of arcs entering `node`, ascending.
  std::span<const std::size_t> in_arc_ids(NodeId node) const {
    return std::span<const std::size_t>(in_ids_).subspan(
        in_offsets_[node], in_offsets_[node + 1] - in_offsets_[node]);
  }

  bool operator==(const Lattice &other) const {
    return num_nodes_ == other.num_nodes_ && start_ == other.start_ &&
           end_ == other.end_ && arcs_ == other.arcs_;
  }

 private:
  int num_nodes_ = 0;
  NodeId start_ = 0;
  NodeId end_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::size_t> out_offsets_;
  std::vector<std::size_t> in_offsets_;
  std::vector<std::size_t> in_ids_;
};

struct Violation {
  std::string kind;    // e.g. "cycle", "dead node", "duplicate arc"
  std::string detail;  // human readable, names the node or arc
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(std::string_view kind) const;
  std::string to_string() const;
};

ValidationReport validate_lattice(const Lattice &lat);

// Topological order, lowest node id first among the admissible choices.
// Throws CycleError.
std::vector<NodeId> topo_order(const Lattice &lat);

// A start-to-end path. `score` is the left-to-right sum of arc scores.
struct LatticePath {
  std::vector<std::size_t> arcs;  // indices into Lattice::arcs()
  TokenSeq tokens;
  double score = 0.0;
};

LatticePath make_path(const Lattice &lat, std::span<const std::size_t> arc_ids);

// True if the arc ids chain from start to end.
bool is_path(const Lattice &lat, std::span<const std::size_t> arc_ids);

// True if some start-to-end path carries exactly `tokens`.
bool accepts(const Lattice &lat, std::span<const Token> tokens);

inline constexpr std::size_t kAllPaths = std::numeric_limits<std::size_t>::max();

struct PathList {
  std::vector<LatticePath> paths;
  bool truncated = false;
};

// All start-to-end paths, best score first, ties by token sequence. When the
// lattice holds more than `max_paths` paths only the best `max_paths` are
// returned (found by A* on exact completion scores) and `truncated` is set.
PathList enumerate_paths(const Lattice &lat, std::size_t max_paths = kAllPaths);

// Number of start-to-end paths, saturating at UINT64_MAX.
std::uint64_t count_paths(const Lattice &lat);

// Keeps only nodes and arcs on some start-to-end path and renumbers the
// surviving nodes densely, preserving their relative order.
Lattice trim(const Lattice &lat);

}  // namespace latrec

#endif  // LATREC_LATTICE_H_
