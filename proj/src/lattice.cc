// latrec/lattice.cc

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

#include "latrec/lattice.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

#include "latrec/error.h"

namespace latrec {

bool arc_less(const Arc &a, const Arc &b) {
  return std::tie(a.src, a.dst, a.label, a.score) <
         std::tie(b.src, b.dst, b.label, b.score);
}

Lattice::Lattice(int num_nodes, NodeId start, NodeId end, std::vector<Arc> arcs)
    : num_nodes_(num_nodes), start_(start), end_(end), arcs_(std::move(arcs)) {
  if (num_nodes_ < 1) throw ValidationError("lattice needs at least one node");
  auto in_range = [&](NodeId n) { return n >= 0 && n < num_nodes_; };
  if (!in_range(start_)) throw ValidationError("start node out of range");
  if (!in_range(end_)) throw ValidationError("end node out of range");
  for (const Arc &a : arcs_) {
    if (!in_range(a.src) || !in_range(a.dst))
      throw ValidationError("arc " + std::to_string(a.src) + "->" +
                            std::to_string(a.dst) + " has a node out of range");
  }
  std::sort(arcs_.begin(), arcs_.end(), arc_less);

  out_offsets_.assign(num_nodes_ + 1, 0);
  in_offsets_.assign(num_nodes_ + 1, 0);
  for (const Arc &a : arcs_) {
    ++out_offsets_[a.src + 1];
    ++in_offsets_[a.dst + 1];
  }
  for (int v = 0; v < num_nodes_; ++v) {
    out_offsets_[v + 1] += out_offsets_[v];
    in_offsets_[v + 1] += in_offsets_[v];
  }
  in_ids_.resize(arcs_.size());
  std::vector<std::size_t> fill(in_offsets_.begin(), in_offsets_.end() - 1);
  for (std::size_t i = 0; i < arcs_.size(); ++i) in_ids_[fill[arcs_[i].dst]++] = i;
}

bool ValidationReport::has(std::string_view kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation &v) { return v.kind == kind; });
}

std::string ValidationReport::to_string() const {
  if (ok()) return "ok";
  std::string out;
  for (const Violation &v : violations) {
    if (!out.empty()) out += "; ";
    out += v.detail;
  }
  return out;
}

namespace {

std::string arc_name(const Arc &a) {
  return std::to_string(a.src) + "->" + std::to_string(a.dst) + " '" + a.label + "'";
}

// Kahn's algorithm with a min-heap; returns fewer than num_nodes ids when a
// cycle exists.
std::vector<NodeId> kahn(const Lattice &lat) {
  std::vector<int> indeg(lat.num_nodes(), 0);
  for (const Arc &a : lat.arcs()) ++indeg[a.dst];
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId v = 0; v < lat.num_nodes(); ++v)
    if (indeg[v] == 0) ready.push(v);
  std::vector<NodeId> order;
  order.reserve(lat.num_nodes());
  while (!ready.empty()) {
    NodeId v = ready.top();
    ready.pop();
    order.push_back(v);
    for (const Arc &a : lat.out_arcs(v))
      if (--indeg[a.dst] == 0) ready.push(a.dst);
  }
  return order;
}

std::vector<char> forward_reach(const Lattice &lat) {
  std::vector<char> seen(lat.num_nodes(), 0);
  std::vector<NodeId> stack{lat.start()};
  seen[lat.start()] = 1;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (const Arc &a : lat.out_arcs(v))
      if (!seen[a.dst]) {
        seen[a.dst] = 1;
        stack.push_back(a.dst);
      }
  }
  return seen;
}

std::vector<char> backward_reach(const Lattice &lat) {
  std::vector<char> seen(lat.num_nodes(), 0);
  std::vector<NodeId> stack{lat.end()};
  seen[lat.end()] = 1;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (std::size_t id : lat.in_arc_ids(v)) {
      NodeId u = lat.arc(id).src;
      if (!seen[u]) {
        seen[u] = 1;
        stack.push_back(u);
      }
    }
  }
  return seen;
}

}  // namespace

ValidationReport validate_lattice(const Lattice &lat) {
  ValidationReport report;
  auto add = [&](std::string kind, std::string detail) {
    report.violations.push_back({std::move(kind), std::move(detail)});
  };
  if (lat.num_nodes() == 0) {
    add("empty", "lattice has no nodes");
    return report;
  }
  if (lat.start() == lat.end()) add("start equals end", "start node equals end node");

  for (std::size_t i = 0; i < lat.num_arcs(); ++i) {
    const Arc &a = lat.arc(i);
    if (a.label == kEpsilon) {
      add("epsilon", "epsilon label on arc " + arc_name(a));
    } else if (std::string why = check_token(a.label); !why.empty()) {
      add("bad label", why + " on arc " + arc_name(a));
    }
    if (!std::isfinite(a.score)) add("non-finite score", "non-finite score on arc " + arc_name(a));
    if (a.src == a.dst) add("cycle", "self loop on arc " + arc_name(a));
    if (i > 0) {
      const Arc &p = lat.arc(i - 1);
      if (p.src == a.src && p.dst == a.dst && p.label == a.label)
        add("duplicate arc", "duplicate arc " + arc_name(a));
    }
  }
  if (!lat.in_arc_ids(lat.start()).empty())
    add("start has in-arcs", "start node " + std::to_string(lat.start()) + " has incoming arcs");
  if (!lat.out_arcs(lat.end()).empty())
    add("end has out-arcs", "end node " + std::to_string(lat.end()) + " has outgoing arcs");

  std::vector<NodeId> order = kahn(lat);
  if (static_cast<int>(order.size()) < lat.num_nodes() && !report.has("cycle"))
    add("cycle", "cycle among " + std::to_string(lat.num_nodes() - order.size()) + " nodes");

  std::vector<char> fwd = forward_reach(lat), bwd = backward_reach(lat);
  for (NodeId v = 0; v < lat.num_nodes(); ++v) {
    if (!fwd[v]) add("unreachable node", "unreachable node " + std::to_string(v));
    if (!bwd[v]) add("dead node", "dead node " + std::to_string(v));
  }
  return report;
}

std::vector<NodeId> topo_order(const Lattice &lat) {
  std::vector<NodeId> order = kahn(lat);
  if (static_cast<int>(order.size()) != lat.num_nodes())
    throw CycleError("lattice contains a cycle");
  return order;
}

LatticePath make_path(const Lattice &lat, std::span<const std::size_t> arc_ids) {
  LatticePath path;
  path.arcs.assign(arc_ids.begin(), arc_ids.end());
  path.tokens.reserve(arc_ids.size());
  for (std::size_t id : arc_ids) {
    path.tokens.push_back(lat.arc(id).label);
    path.score += lat.arc(id).score;
  }
  return path;
}

bool is_path(const Lattice &lat, std::span<const std::size_t> arc_ids) {
  NodeId at = lat.start();
  for (std::size_t id : arc_ids) {
    if (id >= lat.num_arcs() || lat.arc(id).src != at) return false;
    at = lat.arc(id).dst;
  }
  return at == lat.end();
}

bool accepts(const Lattice &lat, std::span<const Token> tokens) {
  std::set<NodeId> live{lat.start()};
  for (const Token &tok : tokens) {
    std::set<NodeId> next;
    for (NodeId v : live)
      for (const Arc &a : lat.out_arcs(v))
        if (a.label == tok) next.insert(a.dst);
    if (next.empty()) return false;
    live.swap(next);
  }
  return live.count(lat.end()) > 0;
}

std::uint64_t count_paths(const Lattice &lat) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::vector<NodeId> order = topo_order(lat);
  std::vector<std::uint64_t> n(lat.num_nodes(), 0);
  n[lat.end()] = 1;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (*it == lat.end()) continue;
    std::uint64_t total = 0;
    for (const Arc &a : lat.out_arcs(*it))
      total = (kMax - total < n[a.dst]) ? kMax : total + n[a.dst];
    n[*it] = total;
  }
  return n[lat.start()];
}

namespace {

bool path_before(const LatticePath &a, const LatticePath &b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.tokens != b.tokens) return a.tokens < b.tokens;
  return a.arcs < b.arcs;
}

void enumerate_all(const Lattice &lat, std::vector<LatticePath> *out) {
  if (lat.start() == lat.end()) return;
  // Iterative DFS; frame = (node, next out-arc index).
  std::vector<std::size_t> arcs;
  std::vector<std::pair<NodeId, std::size_t>> frames{{lat.start(), lat.out_begin(lat.start())}};
  while (!frames.empty()) {
    auto &[node, next] = frames.back();
    if (next == lat.out_end(node)) {
      frames.pop_back();
      if (!arcs.empty()) arcs.pop_back();
      continue;
    }
    std::size_t id = next++;
    NodeId dst = lat.arc(id).dst;
    arcs.push_back(id);
    if (dst == lat.end()) {
      out->push_back(make_path(lat, arcs));
      arcs.pop_back();
    } else {
      frames.emplace_back(dst, lat.out_begin(dst));
    }
  }
}

void enumerate_best(const Lattice &lat, std::size_t max_paths,
                    std::vector<LatticePath> *out) {
  std::vector<NodeId> order = topo_order(lat);
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<double> best_tail(lat.num_nodes(), kNegInf);
  best_tail[lat.end()] = 0.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    for (const Arc &a : lat.out_arcs(*it))
      best_tail[*it] = std::max(best_tail[*it], a.score + best_tail[a.dst]);

  struct Entry {
    std::size_t parent;  // index into entries, or npos for the root
    std::size_t arc;
    NodeId node;
    double prefix;
  };
  constexpr std::size_t kRoot = std::numeric_limits<std::size_t>::max();
  std::vector<Entry> entries{{kRoot, 0, lat.start(), 0.0}};
  using Item = std::pair<double, std::size_t>;  // (f, entry)
  auto cmp = [](const Item &a, const Item &b) {
    return a.first != b.first ? a.first < b.first : a.second > b.second;
  };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> open(cmp);
  open.push({best_tail[lat.start()], 0});
  double last = 0.0;
  while (!open.empty()) {
    auto [f, idx] = open.top();
    if (out->size() >= max_paths && f < last - 1e-9 * std::max(1.0, std::abs(last))) break;
    open.pop();
    Entry e = entries[idx];
    if (e.node == lat.end()) {
      std::vector<std::size_t> ids;
      for (std::size_t i = idx; entries[i].parent != kRoot; i = entries[i].parent)
        ids.push_back(entries[i].arc);
      std::reverse(ids.begin(), ids.end());
      out->push_back(make_path(lat, ids));
      last = out->back().score;
      continue;
    }
    for (std::size_t a = lat.out_begin(e.node); a < lat.out_end(e.node); ++a) {
      const Arc &arc = lat.arc(a);
      if (best_tail[arc.dst] == kNegInf) continue;
      double prefix = e.prefix + arc.score;
      entries.push_back({idx, a, arc.dst, prefix});
      open.push({prefix + best_tail[arc.dst], entries.size() - 1});
    }
  }
}

}  // namespace

PathList enumerate_paths(const Lattice &lat, std::size_t max_paths) {
  PathList result;
  std::uint64_t total = count_paths(lat);
  if (total <= max_paths) {
    enumerate_all(lat, &result.paths);
  } else {
    enumerate_best(lat, max_paths, &result.paths);
    result.truncated = true;
  }
  std::sort(result.paths.begin(), result.paths.end(), path_before);
  if (result.paths.size() > max_paths) result.paths.resize(max_paths);
  return result;
}

Lattice trim(const Lattice &lat) {
  std::vector<char> fwd = forward_reach(lat), bwd = backward_reach(lat);
  std::vector<NodeId> remap(lat.num_nodes(), -1);
  int n = 0;
  for (NodeId v = 0; v < lat.num_nodes(); ++v)
    if (fwd[v] && bwd[v]) remap[v] = n++;
  if (remap[lat.start()] < 0 || remap[lat.end()] < 0)
    throw ValidationError("no path from start to end");
  std::vector<Arc> arcs;
  for (const Arc &a : lat.arcs())
    if (remap[a.src] >= 0 && remap[a.dst] >= 0)
      arcs.push_back({remap[a.src], remap[a.dst], a.label, a.score});
  return Lattice(n, remap[lat.start()], remap[lat.end()], std::move(arcs));
}

}  // namespace latrec
