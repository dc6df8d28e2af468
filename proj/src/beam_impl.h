// latrec/beam_impl.h

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

#ifndef LATREC_BEAM_IMPL_H_
#define LATREC_BEAM_IMPL_H_

// Token-synchronous beam search shared by the ASR simulator and the
// unconstrained correction decoder.

#include <algorithm>
#include <vector>

#include "latrec/error.h"
#include "latrec/token.h"

namespace latrec::internal {

struct BeamEntry {
  TokenSeq history;
  double score = 0.0;
};

// Best first; equal scores ordered by token sequence.
inline bool entry_before(const BeamEntry &a, const BeamEntry &b) {
  if (a.score != b.score) return a.score > b.score;
  return a.history < b.history;
}

// `expand(history)` returns (token, logprob) pairs. Returns up to `beam`
// finished entries, best first, each history ending in `terminal`.
template <class Expand>
std::vector<BeamEntry> token_beam_search(Expand &&expand, std::size_t beam,
                                         std::size_t max_len, const Token &terminal) {
  if (beam == 0) throw ValidationError("beam width must be at least 1");
  if (max_len == 0) throw ValidationError("max_len must be at least 1");
  std::vector<BeamEntry> active{BeamEntry{}}, finished;
  for (std::size_t step = 0; step < max_len && !active.empty(); ++step) {
    std::vector<BeamEntry> cands;
    for (const BeamEntry &e : active) {
      for (const auto &[tok, lp] : expand(e.history)) {
        BeamEntry c{e.history, e.score + lp};
        c.history.push_back(tok);
        cands.push_back(std::move(c));
      }
    }
    std::sort(cands.begin(), cands.end(), entry_before);
    if (cands.size() > beam) cands.resize(beam);
    active.clear();
    for (BeamEntry &c : cands) {
      if (c.history.back() == terminal) {
        finished.push_back(std::move(c));
      } else {
        active.push_back(std::move(c));
      }
    }
  }
  if (finished.empty())
    throw NoHypothesisError("no hypothesis completed within " + std::to_string(max_len) +
                            " tokens");
  std::sort(finished.begin(), finished.end(), entry_before);
  if (finished.size() > beam) finished.resize(beam);
  return finished;
}

}  // namespace latrec::internal

#endif  // LATREC_BEAM_IMPL_H_
