// latrec/external_scorer.cc

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

#include "latrec/external_scorer.h"

#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstring>
#include <mutex>
#include <thread>

#include <fcntl.h>
#include <netdb.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "latrec/error.h"

namespace latrec {

using nlohmann::json;

namespace {

// Writes to a pipe whose reader died must surface as EPIPE, not kill us.
void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

std::string sys_error(const std::string &what) {
  return what + ": " + std::strerror(errno);
}

}  // namespace

std::string FdLineReader::read_line() {
  while (true) {
    std::size_t nl = buf_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buf_.substr(0, nl);
      buf_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    char chunk[4096];
    ssize_t n = ::read(fd_, chunk, sizeof chunk);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) throw TransportError(sys_error("read from scorer failed"));
    if (n == 0) throw TransportError("scorer closed the connection");
    buf_.append(chunk, static_cast<std::size_t>(n));
  }
}

void write_all(int fd, std::string_view data, bool socket) {
  while (!data.empty()) {
    ssize_t n = socket ? ::send(fd, data.data(), data.size(), MSG_NOSIGNAL)
                       : ::write(fd, data.data(), data.size());
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) throw TransportError(sys_error("write to scorer failed"));
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

ChildProcessTransport::ChildProcessTransport(const std::string &command)
    : reader_(-1) {
  ignore_sigpipe();
  int in_pipe[2], out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw TransportError(sys_error("pipe"));
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw TransportError(sys_error("pipe"));
  }
  pid_t pid = ::fork();
  if (pid < 0) throw TransportError(sys_error("fork"));
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char *>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  reader_ = FdLineReader(from_child_);
}

ChildProcessTransport::~ChildProcessTransport() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ <= 0) return;
  for (int i = 0; i < 100; ++i) {
    if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ::kill(pid_, SIGKILL);
  ::waitpid(pid_, nullptr, 0);
}

void ChildProcessTransport::send_line(std::string_view line) {
  std::string data(line);
  data += '\n';
  write_all(to_child_, data, false);
}

std::string ChildProcessTransport::recv_line() { return reader_.read_line(); }

TcpTransport::TcpTransport(const std::string &host, int port) : reader_(-1) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo *res = nullptr;
  std::string service = std::to_string(port);
  if (int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0)
    throw TransportError("cannot resolve " + host + ": " + ::gai_strerror(rc));
  for (addrinfo *ai = res; ai; ai = ai->ai_next) {
    int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      fd_ = fd;
      break;
    }
    ::close(fd);
  }
  ::freeaddrinfo(res);
  if (fd_ < 0) throw TransportError("cannot connect to " + host + ":" + service);
  reader_ = FdLineReader(fd_);
}

TcpTransport::~TcpTransport() {
  if (fd_ >= 0) ::close(fd_);
}

void TcpTransport::send_line(std::string_view line) {
  std::string data(line);
  data += '\n';
  write_all(fd_, data, true);
}

std::string TcpTransport::recv_line() { return reader_.read_line(); }

ExternalScorer::ExternalScorer(std::unique_ptr<LineTransport> transport)
    : transport_(std::move(transport)) {}

ExternalScorer::~ExternalScorer() = default;

json ExternalScorer::call(json request) {
  const std::int64_t rid = next_rid_++;
  request["rid"] = rid;
  transport_->send_line(request.dump());
  std::string line = transport_->recv_line();
  json response;
  try {
    response = json::parse(line);
  } catch (const json::parse_error &) {
    throw ProtocolError("malformed response from scorer: '" + line.substr(0, 200) + "'");
  }
  if (!response.is_object()) throw ProtocolError("scorer response is not an object");
  if (!response.contains("rid") || !response["rid"].is_number_integer() ||
      response["rid"].get<std::int64_t>() != rid)
    throw ProtocolError("scorer response has a missing or mismatched rid");
  if (!response.contains("ok") || !response["ok"].is_boolean())
    throw ProtocolError("scorer response lacks a boolean 'ok'");
  if (!response["ok"].get<bool>()) {
    std::string msg = response.contains("error") && response["error"].is_string()
                          ? response["error"].get<std::string>()
                          : "unspecified error";
    throw RemoteError("scorer error: " + msg);
  }
  return response;
}

namespace {

double finite_number(const json &v, const char *field) {
  if (!v.is_number()) throw ProtocolError(std::string("field '") + field + "' is not a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) throw ProtocolError(std::string("field '") + field + "' is not finite");
  return x;
}

const json &field(const json &obj, const char *name) {
  if (!obj.contains(name)) throw ProtocolError(std::string("scorer response lacks '") + name + "'");
  return obj[name];
}

std::string query_key(std::span<const Token> history, std::span<const Token> candidates) {
  std::string key;
  for (const Token &t : history) (key += t) += '\x1f';
  key += '\x1e';
  for (const Token &t : candidates) (key += t) += '\x1f';
  return key;
}

}  // namespace

Session ExternalScorer::start(const EncoderInput &enc) {
  json r = call({{"op", "start"}, {"encoder_input", enc.text}});
  const json &s = field(r, "session");
  if (!s.is_string()) throw ProtocolError("session id is not a string");
  Session session{s.get<std::string>()};
  cache_[session.id].clear();
  return session;
}

std::vector<double> ExternalScorer::next_logprobs(const Session &session,
                                                  std::span<const Token> history,
                                                  std::span<const Token> candidates) {
  auto &cache = cache_[session.id];
  std::string key = query_key(history, candidates);
  if (auto it = cache.find(key); it != cache.end()) {
    ++cache_hits_;
    return it->second;
  }
  json r = call({{"op", "next_logprobs"},
                 {"session", session.id},
                 {"history", std::vector<Token>(history.begin(), history.end())},
                 {"candidates", std::vector<Token>(candidates.begin(), candidates.end())}});
  const json &lp = field(r, "logprobs");
  if (!lp.is_array() || lp.size() != candidates.size())
    throw ProtocolError("'logprobs' must be an array aligned with the candidates");
  std::vector<double> out;
  out.reserve(lp.size());
  for (const json &v : lp) out.push_back(finite_number(v, "logprobs"));
  cache.emplace(std::move(key), out);
  return out;
}

double ExternalScorer::score_sequence(const EncoderInput &enc, std::span<const Token> target) {
  json r = call({{"op", "score_sequence"},
                 {"encoder_input", enc.text},
                 {"target", std::vector<Token>(target.begin(), target.end())}});
  return finite_number(field(r, "logprob"), "logprob");
}

void ExternalScorer::end(const Session &session) {
  cache_.erase(session.id);
  call({{"op", "end"}, {"session", session.id}});
}

TokenSeq ExternalScorer::tokenize(const std::string &word) {
  json r = call({{"op", "tokenize"}, {"word", word}});
  const json &toks = field(r, "tokens");
  if (!toks.is_array()) throw ProtocolError("'tokens' must be an array");
  TokenSeq out;
  for (const json &t : toks) {
    if (!t.is_string()) throw ProtocolError("tokens must be strings");
    out.push_back(t.get<std::string>());
  }
  return out;
}

TokenSeq ExternalTokenizer::split(const std::string &word) const {
  TokenSeq out = scorer_.tokenize(word);
  if (out.empty()) throw TokenizerError("remote tokenizer returned no pieces for '" + word + "'");
  return out;
}

}  // namespace latrec
