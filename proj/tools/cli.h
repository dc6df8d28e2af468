// tools/cli.h

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

#ifndef LATREC_TOOLS_CLI_H_
#define LATREC_TOOLS_CLI_H_

#include <iosfwd>
#include <memory>
#include <string>

#include "latrec/decode.h"

namespace latrec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Entry point of the `latrec` tool. Returns the process exit code.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

// Scorer spec: "ngram:PATH", "external:HOST:PORT" or "external:COMMAND".
struct ScorerSpec {
  enum class Kind { kNgram, kExternalTcp, kExternalCommand } kind;
  std::string path_or_command;
  std::string host;
  int port = 0;
};
ScorerSpec parse_scorer_spec(const std::string &spec);

// Factory producing one scorer per worker. An n-gram model is trained once
// and shared; external specs open a new connection per call.
ScorerFactory make_scorer_factory(const ScorerSpec &spec, int ngram_order);

}  // namespace latrec::cli

#endif  // LATREC_TOOLS_CLI_H_
