// latrec/retokenize.cc

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

#include "latrec/retokenize.h"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <tuple>

#include "latrec/error.h"

namespace latrec {

namespace {

std::size_t utf8_len(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

}  // namespace

VocabTokenizer::VocabTokenizer(std::vector<Token> vocab, BoundaryConvention conv)
    : vocab_(std::move(vocab)), conv_(std::move(conv)) {
  if (conv_.marker.empty()) throw ValidationError("boundary marker must be non-empty");
  std::sort(vocab_.begin(), vocab_.end());
  vocab_.erase(std::unique(vocab_.begin(), vocab_.end()), vocab_.end());
  for (const Token &t : vocab_) max_len_ = std::max(max_len_, t.size());
}

VocabTokenizer VocabTokenizer::from_file(const std::filesystem::path &path,
                                         BoundaryConvention conv) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open vocabulary '" + path.string() + "'");
  std::vector<Token> vocab;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    vocab.push_back(line);
  }
  return VocabTokenizer(std::move(vocab), std::move(conv));
}

TokenSeq VocabTokenizer::split(const std::string &word) const {
  if (word.empty()) throw TokenizerError("cannot split an empty word");
  const std::string s = conv_.marker + word;
  TokenSeq out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t take = 0;
    for (std::size_t len = std::min(max_len_, s.size() - pos); len > 0; --len) {
      if (std::binary_search(vocab_.begin(), vocab_.end(), s.substr(pos, len))) {
        take = len;
        break;
      }
    }
    if (take == 0) {
      // Fallback: one code point, glued to the marker at the word start.
      std::size_t at = pos == 0 ? conv_.marker.size() : pos;
      take = at - pos + utf8_len(static_cast<unsigned char>(s[at]));
      take = std::min(take, s.size() - pos);
    }
    out.push_back(s.substr(pos, take));
    pos += take;
  }
  return out;
}

namespace {

struct WordArcKey {
  NodeId src, dst;
  Token label;
  auto operator<=>(const WordArcKey &) const = default;
};

struct WordArcVal {
  double score;
  std::vector<std::size_t> ids;
};

}  // namespace

WordLattice bpe_to_word_with_provenance(const Lattice &lat, const BoundaryConvention &conv) {
  const int n = lat.num_nodes();
  std::vector<char> word_node(n, 0), after_terminal(n, 0);
  std::deque<NodeId> queue;
  auto mark = [&](NodeId v) {
    if (!word_node[v]) {
      word_node[v] = 1;
      queue.push_back(v);
    }
  };
  auto terminable = [&](NodeId v) {
    if (v == lat.end()) return true;
    for (const Arc &a : lat.out_arcs(v))
      if (conv.is_terminal(a.label) || conv.starts_word(a.label)) return true;
    return false;
  };

  std::map<WordArcKey, WordArcVal> best;
  auto offer = [&](NodeId src, NodeId dst, Token label, double score,
                   std::vector<std::size_t> ids) {
    WordArcKey key{src, dst, std::move(label)};
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(std::move(key), WordArcVal{score, std::move(ids)});
    } else if (score > it->second.score ||
               (score == it->second.score && ids < it->second.ids)) {
      it->second = WordArcVal{score, std::move(ids)};
    }
  };

  after_terminal[lat.start()] = 1;
  mark(lat.start());
  struct Run {
    NodeId at;
    std::string word;
    double score;
    std::vector<std::size_t> ids;
  };
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    for (std::size_t ai = lat.out_begin(u); ai < lat.out_end(u); ++ai) {
      const Arc &a = lat.arc(ai);
      if (conv.is_terminal(a.label)) {
        offer(u, a.dst, a.label, a.score, {ai});
        after_terminal[a.dst] = 1;
        mark(a.dst);
        continue;
      }
      if (!conv.starts_word(a.label)) continue;  // extends runs through u
      std::vector<Run> stack{{a.dst, a.label.substr(conv.marker.size()), a.score, {ai}}};
      while (!stack.empty()) {
        Run r = std::move(stack.back());
        stack.pop_back();
        if (terminable(r.at)) {
          if (r.word.empty())
            throw SegmentationError(u, "empty word starting at node " + std::to_string(u));
          offer(u, r.at, r.word, r.score, r.ids);
          mark(r.at);
        }
        for (std::size_t ci = lat.out_end(r.at); ci-- > lat.out_begin(r.at);) {
          const Arc &c = lat.arc(ci);
          if (conv.is_terminal(c.label) || conv.starts_word(c.label)) continue;
          Run next{c.dst, r.word + c.label, r.score + c.score, r.ids};
          next.ids.push_back(ci);
          stack.push_back(std::move(next));
        }
      }
    }
  }

  for (NodeId u = 0; u < n; ++u) {
    if (!word_node[u] || !after_terminal[u]) continue;
    for (const Arc &a : lat.out_arcs(u))
      if (!conv.is_terminal(a.label) && !conv.starts_word(a.label))
        throw SegmentationError(u, "path enters word position at node " + std::to_string(u) +
                                       " with non-initial token '" + a.label + "'");
  }

  std::vector<NodeId> remap(n, -1);
  int m = 0;
  for (NodeId v = 0; v < n; ++v)
    if (word_node[v]) remap[v] = m++;
  if (remap[lat.end()] < 0) throw SegmentationError(lat.end(), "end node is not reachable as a word boundary");

  std::vector<Arc> arcs;
  std::vector<std::pair<Arc, std::vector<std::size_t>>> tagged;
  for (auto &[key, val] : best)
    tagged.push_back({Arc{remap[key.src], remap[key.dst], key.label, val.score}, std::move(val.ids)});
  std::sort(tagged.begin(), tagged.end(),
            [](const auto &x, const auto &y) { return arc_less(x.first, y.first); });
  WordLattice out;
  for (auto &[arc, ids] : tagged) {
    arcs.push_back(arc);
    out.provenance.push_back(std::move(ids));
  }
  out.lattice = Lattice(m, remap[lat.start()], remap[lat.end()], std::move(arcs));
  return out;
}

Lattice bpe_to_word(const Lattice &lat, const BoundaryConvention &conv) {
  return bpe_to_word_with_provenance(lat, conv).lattice;
}

Lattice word_to_plm_bpe(const Lattice &lat, const WordTokenizer &tok) {
  const BoundaryConvention &conv = tok.convention();
  std::vector<Arc> arcs;
  int next = lat.num_nodes();
  for (const Arc &a : lat.arcs()) {
    if (conv.is_terminal(a.label)) {
      arcs.push_back(a);
      continue;
    }
    TokenSeq pieces = tok.split(a.label);
    if (pieces.empty()) throw TokenizerError("tokenizer returned no pieces for '" + a.label + "'");
    NodeId from = a.src;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      NodeId to = i + 1 == pieces.size() ? a.dst : next++;
      arcs.push_back({from, to, std::move(pieces[i]), i == 0 ? a.score : 0.0});
      from = to;
    }
  }
  return Lattice(next, lat.start(), lat.end(), std::move(arcs));
}

std::vector<std::string> path_words(const LatticePath &path, const BoundaryConvention &conv) {
  try {
    return assemble_words(path.tokens, conv);
  } catch (const SegmentationError &e) {
    throw SegmentationError(-1, std::string("path ") + e.what());
  }
}

}  // namespace latrec
