// latrec/nbest.h

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

#ifndef LATREC_NBEST_H_
#define LATREC_NBEST_H_

#include <string>
#include <vector>

#include "latrec/token.h"

namespace latrec {

struct Hypothesis {
  TokenSeq tokens;  // may be empty when only the text is known
  std::string text;
  double asr_score = 0.0;

  bool operator==(const Hypothesis &) const = default;
};

// Builds a hypothesis whose text is tokens_to_text(tokens).
Hypothesis make_hypothesis(TokenSeq tokens, double asr_score,
                           const BoundaryConvention &conv = {});

// Ranked hypotheses for one utterance. Construction stable-sorts by
// asr_score, best first.
class NBestList {
 public:
  NBestList() = default;
  NBestList(std::string utt_id, std::vector<Hypothesis> hyps);

  const std::string &utt_id() const { return utt_id_; }
  const std::vector<Hypothesis> &hyps() const { return hyps_; }
  std::size_t size() const { return hyps_.size(); }
  const Hypothesis &operator[](std::size_t rank0) const { return hyps_[rank0]; }

  // The first `n` hypotheses (all of them if fewer).
  NBestList top(std::size_t n) const;

  bool operator==(const NBestList &) const = default;

 private:
  std::string utt_id_;
  std::vector<Hypothesis> hyps_;
};

// Tokens to feed a scorer for `hyp`: its own tokens, or the words of its
// text when no tokens were recorded.
TokenSeq hypothesis_tokens(const Hypothesis &hyp);

}  // namespace latrec

#endif  // LATREC_NBEST_H_
