// latrec/external_scorer.h

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

#ifndef LATREC_EXTERNAL_SCORER_H_
#define LATREC_EXTERNAL_SCORER_H_

// Client side of the external scorer protocol: one JSON object per line in
// each direction, over a child process's stdio or a TCP stream.
//
//   -> {"rid":1,"op":"start","encoder_input":"text correction: a b </s>"}
//   <- {"rid":1,"ok":true,"session":"s1"}
//   -> {"rid":2,"op":"next_logprobs","session":"s1","history":["a"],"candidates":["b","c"]}
//   <- {"rid":2,"ok":true,"logprobs":[-0.1,-2.3]}
//   -> {"rid":3,"op":"score_sequence","encoder_input":"...","target":["a","b"]}
//   <- {"rid":3,"ok":true,"logprob":-0.4}
//   -> {"rid":4,"op":"tokenize","word":"knight"}
//   <- {"rid":4,"ok":true,"tokens":["▁kn","ight"]}
//   -> {"rid":5,"op":"end","session":"s1"}
//   <- {"rid":5,"ok":true}
//
// A failed request is answered with {"rid":N,"ok":false,"error":"..."}.

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include <json.hpp>

#include "latrec/retokenize.h"
#include "latrec/scoring.h"

namespace latrec {

class LineTransport {
 public:
  virtual ~LineTransport() = default;
  // Both throw TransportError when the peer is gone.
  virtual void send_line(std::string_view line) = 0;
  virtual std::string recv_line() = 0;
};

// Buffered line reader over a file descriptor it does not own.
class FdLineReader {
 public:
  explicit FdLineReader(int fd) : fd_(fd) {}
  std::string read_line();

 private:
  int fd_;
  std::string buf_;
};

void write_all(int fd, std::string_view data, bool socket);

// Runs `command` through /bin/sh with its stdin/stdout connected to us.
// The child's stderr is inherited. Destruction closes the pipes and reaps
// the child, killing it if it does not exit within a second.
class ChildProcessTransport : public LineTransport {
 public:
  explicit ChildProcessTransport(const std::string &command);
  ~ChildProcessTransport() override;
  ChildProcessTransport(const ChildProcessTransport &) = delete;
  ChildProcessTransport &operator=(const ChildProcessTransport &) = delete;

  void send_line(std::string_view line) override;
  std::string recv_line() override;

 private:
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  FdLineReader reader_;
};

class TcpTransport : public LineTransport {
 public:
  TcpTransport(const std::string &host, int port);
  ~TcpTransport() override;
  TcpTransport(const TcpTransport &) = delete;
  TcpTransport &operator=(const TcpTransport &) = delete;

  void send_line(std::string_view line) override;
  std::string recv_line() override;

 private:
  int fd_ = -1;
  FdLineReader reader_;
};

// Scorer backed by a remote process. Not thread-safe: give each worker its
// own client. Identical (history, candidates) queries within a session are
// answered from a per-session cache.
class ExternalScorer : public Scorer {
 public:
  explicit ExternalScorer(std::unique_ptr<LineTransport> transport);
  ~ExternalScorer() override;

  Session start(const EncoderInput &enc) override;
  std::vector<double> next_logprobs(const Session &session, std::span<const Token> history,
                                    std::span<const Token> candidates) override;
  double score_sequence(const EncoderInput &enc, std::span<const Token> target) override;
  void end(const Session &session) override;

  TokenSeq tokenize(const std::string &word);

  // Sends one request (rid is filled in) and returns the validated ok:true
  // response.
  nlohmann::json call(nlohmann::json request);

  std::size_t cache_hits() const { return cache_hits_; }

 private:
  std::unique_ptr<LineTransport> transport_;
  std::int64_t next_rid_ = 1;
  std::map<std::string, std::map<std::string, std::vector<double>>> cache_;
  std::size_t cache_hits_ = 0;
};

// Word tokenizer answered by the remote `tokenize` op.
class ExternalTokenizer : public WordTokenizer {
 public:
  ExternalTokenizer(ExternalScorer &scorer, BoundaryConvention conv = {})
      : scorer_(scorer), conv_(std::move(conv)) {}
  TokenSeq split(const std::string &word) const override;
  const BoundaryConvention &convention() const override { return conv_; }

 private:
  ExternalScorer &scorer_;
  BoundaryConvention conv_;
};

}  // namespace latrec

#endif  // LATREC_EXTERNAL_SCORER_H_
