// latrec/error.h

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

#ifndef LATREC_ERROR_H_
#define LATREC_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace latrec {

// Root of all library errors. Callers that only care about "something went
// wrong in latrec" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user-supplied configuration or arguments.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. `line` is 1-based; 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string &reason)
      : Error(line ? "line " + std::to_string(line) + ": " + reason : reason),
        line_(line),
        reason_(reason) {}
  std::size_t line() const { return line_; }
  const std::string &reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class CycleError : public Error {
 public:
  using Error::Error;
};

// A lattice path cannot be segmented into whole words.
class SegmentationError : public Error {
 public:
  SegmentationError(int node, const std::string &what)
      : Error(what), node_(node) {}
  int node() const { return node_; }

 private:
  int node_;
};

class TokenizerError : public Error {
 public:
  using Error::Error;
};

// A search finished without any complete hypothesis.
class NoHypothesisError : public Error {
 public:
  using Error::Error;
};

class EmptyReferenceError : public Error {
 public:
  explicit EmptyReferenceError(std::size_t index = 0)
      : Error("empty reference at index " + std::to_string(index)),
        index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// External scorer failures.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

class RemoteError : public Error {
 public:
  using Error::Error;
};

}  // namespace latrec

#endif  // LATREC_ERROR_H_
