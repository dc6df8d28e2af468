// tests/stub_scorer.cc

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

// Protocol stub: stub_scorer [fixed|ngram|garbage|error|badrid] [close_after]

#include <cstdlib>
#include <iostream>
#include <string>

#include "stub_protocol.h"

int main(int argc, char **argv) {
  latrec::testing::StubConfig cfg;
  if (argc > 1) cfg.mode = argv[1];
  if (argc > 2) cfg.close_after = std::atol(argv[2]);
  latrec::testing::StubEndpoint ep(cfg);
  std::string line;
  while (std::getline(std::cin, line)) {
    auto reply = ep.handle(line);
    if (!reply) return 0;
    std::cout << *reply << '\n' << std::flush;
  }
  return 0;
}
