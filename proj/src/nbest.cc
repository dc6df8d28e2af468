// latrec/nbest.cc

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

#include "latrec/nbest.h"

#include <algorithm>
#include <cmath>

#include "latrec/error.h"

namespace latrec {

Hypothesis make_hypothesis(TokenSeq tokens, double asr_score,
                           const BoundaryConvention &conv) {
  Hypothesis h;
  h.text = tokens_to_text(tokens, conv);
  h.tokens = std::move(tokens);
  h.asr_score = asr_score;
  return h;
}

NBestList::NBestList(std::string utt_id, std::vector<Hypothesis> hyps)
    : utt_id_(std::move(utt_id)), hyps_(std::move(hyps)) {
  if (utt_id_.empty()) throw ValidationError("n-best list has an empty utterance id");
  if (hyps_.empty()) throw ValidationError("n-best list '" + utt_id_ + "' is empty");
  for (const Hypothesis &h : hyps_) {
    if (!std::isfinite(h.asr_score))
      throw ValidationError("non-finite score in n-best list '" + utt_id_ + "'");
    for (const Token &t : h.tokens)
      if (std::string why = check_token(t); !why.empty())
        throw ValidationError(why + " in n-best list '" + utt_id_ + "'");
  }
  std::stable_sort(hyps_.begin(), hyps_.end(),
                   [](const Hypothesis &a, const Hypothesis &b) {
                     return a.asr_score > b.asr_score;
                   });
}

NBestList NBestList::top(std::size_t n) const {
  if (n == 0) throw ValidationError("n-best size must be at least 1");
  NBestList out = *this;
  if (out.hyps_.size() > n) out.hyps_.resize(n);
  return out;
}

TokenSeq hypothesis_tokens(const Hypothesis &hyp) {
  return hyp.tokens.empty() ? split_words(hyp.text) : hyp.tokens;
}

}  // namespace latrec
