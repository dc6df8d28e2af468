// latrec/io.cc

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

#include "latrec/io.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "latrec/error.h"

namespace latrec {

using nlohmann::json;

std::string format_score(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_score(std::string_view text, std::size_t line) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ParseError(line, "invalid score '" + std::string(text) + "'");
  return x;
}

namespace {

int parse_node(std::string_view text, std::size_t line) {
  int x = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() || x < 0)
    throw ParseError(line, "invalid node id '" + std::string(text) + "'");
  return x;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab == std::string_view::npos ? tab : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

void strip_cr(std::string &line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

template <class F>
void write_file(const std::filesystem::path &path, F &&body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path.string() + "' for writing");
  body(os);
  os.flush();
  if (!os) throw Error("write failed for '" + path.string() + "'");
}

std::ifstream open_in(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path.string() + "'");
  return is;
}

}  // namespace

void write_header(std::ostream &os, std::span<const std::string> header) {
  for (const std::string &h : header) os << "# " << h << '\n';
}

void write_lattice(std::ostream &os, const Lattice &lat,
                   std::span<const std::string> header) {
  os << "#LAT1\n";
  write_header(os, header);
  os << "#start " << lat.start() << "\n#end " << lat.end() << '\n';
  for (const Arc &a : lat.arcs())
    os << a.src << '\t' << a.dst << '\t' << a.label << '\t' << format_score(a.score) << '\n';
}

Lattice read_lattice(std::istream &is) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(is, line)) throw ParseError(1, "empty lattice file");
  ++lineno;
  strip_cr(line);
  if (line != "#LAT1") throw ParseError(1, "expected '#LAT1' magic line");
  int start = -1, end = -1, max_id = -1;
  std::vector<Arc> arcs;
  while (std::getline(is, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string_view sv(line);
      if (sv.starts_with("#start ")) {
        start = parse_node(sv.substr(7), lineno);
        max_id = std::max(max_id, start);
      } else if (sv.starts_with("#end ")) {
        end = parse_node(sv.substr(5), lineno);
        max_id = std::max(max_id, end);
      }
      continue;
    }
    auto fields = split_tabs(line);
    if (fields.size() != 4) throw ParseError(lineno, "expected 4 tab-separated fields");
    Arc a;
    a.src = parse_node(fields[0], lineno);
    a.dst = parse_node(fields[1], lineno);
    if (fields[2].empty()) throw ParseError(lineno, "empty arc label");
    a.label = std::string(fields[2]);
    a.score = parse_score(fields[3], lineno);
    max_id = std::max({max_id, a.src, a.dst});
    arcs.push_back(std::move(a));
  }
  if (start < 0) throw ParseError(0, "missing '#start' line");
  if (end < 0) throw ParseError(0, "missing '#end' line");
  return Lattice(max_id + 1, start, end, std::move(arcs));
}

void write_lattice_file(const std::filesystem::path &path, const Lattice &lat,
                        std::span<const std::string> header) {
  write_file(path, [&](std::ostream &os) { write_lattice(os, lat, header); });
}

Lattice read_lattice_file(const std::filesystem::path &path) {
  auto is = open_in(path);
  try {
    return read_lattice(is);
  } catch (const ParseError &e) {
    throw ParseError(e.line(), path.string() + ": " + e.reason());
  }
}

void write_nbest_jsonl(std::ostream &os, std::span<const NBestList> lists,
                       std::span<const std::string> header) {
  write_header(os, header);
  for (const NBestList &list : lists) {
    os << "{\"id\":" << json(list.utt_id()).dump() << ",\"hyps\":[";
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Hypothesis &h = list[i];
      if (i) os << ',';
      os << "{\"text\":" << json(h.text).dump();
      if (!h.tokens.empty()) os << ",\"tokens\":" << json(h.tokens).dump();
      os << ",\"score\":" << format_score(h.asr_score) << '}';
    }
    os << "]}\n";
  }
}

std::vector<NBestList> read_nbest_jsonl(std::istream &is) {
  std::vector<NBestList> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error &e) {
      throw ParseError(lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError(lineno, "expected a JSON object");
    if (!obj.contains("id")) throw ParseError(lineno, "missing field 'id'");
    if (!obj["id"].is_string()) throw ParseError(lineno, "field 'id' must be a string");
    if (!obj.contains("hyps")) throw ParseError(lineno, "missing field 'hyps'");
    const json &hyps = obj["hyps"];
    if (!hyps.is_array() || hyps.empty())
      throw ParseError(lineno, "field 'hyps' must be a non-empty array");
    std::vector<Hypothesis> parsed;
    for (const json &h : hyps) {
      if (!h.is_object()) throw ParseError(lineno, "hypothesis must be an object");
      if (!h.contains("text")) throw ParseError(lineno, "missing field 'text'");
      if (!h.contains("score")) throw ParseError(lineno, "missing field 'score'");
      if (!h["text"].is_string()) throw ParseError(lineno, "field 'text' must be a string");
      if (!h["score"].is_number()) throw ParseError(lineno, "field 'score' must be a number");
      Hypothesis hyp;
      hyp.text = h["text"].get<std::string>();
      hyp.asr_score = h["score"].get<double>();
      if (h.contains("tokens")) {
        if (!h["tokens"].is_array()) throw ParseError(lineno, "field 'tokens' must be an array");
        for (const json &t : h["tokens"]) {
          if (!t.is_string()) throw ParseError(lineno, "tokens must be strings");
          hyp.tokens.push_back(t.get<std::string>());
        }
      }
      parsed.push_back(std::move(hyp));
    }
    std::string id = obj["id"].get<std::string>();
    if (!seen.insert(id).second) throw ParseError(lineno, "duplicate utterance id '" + id + "'");
    try {
      out.emplace_back(std::move(id), std::move(parsed));
    } catch (const ValidationError &e) {
      throw ParseError(lineno, e.what());
    }
  }
  return out;
}

std::vector<NBestList> read_nbest_file(const std::filesystem::path &path) {
  auto is = open_in(path);
  try {
    return read_nbest_jsonl(is);
  } catch (const ParseError &e) {
    throw ParseError(e.line(), path.string() + ": " + e.reason());
  }
}

void write_refs(std::ostream &os, std::span<const TextRow> rows,
                std::span<const std::string> header) {
  write_header(os, header);
  for (const TextRow &r : rows) os << r.id << '\t' << r.text << '\n';
}

std::vector<TextRow> read_text_rows(std::istream &is) {
  std::vector<TextRow> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_tabs(line);
    if (fields.size() < 2) throw ParseError(lineno, "expected id<TAB>text");
    if (fields[0].empty()) throw ParseError(lineno, "empty id");
    TextRow row{std::string(fields[0]), std::string(fields[1])};
    if (!seen.insert(row.id).second) throw ParseError(lineno, "duplicate id '" + row.id + "'");
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<TextRow> read_text_rows_file(const std::filesystem::path &path) {
  auto is = open_in(path);
  try {
    return read_text_rows(is);
  } catch (const ParseError &e) {
    throw ParseError(e.line(), path.string() + ": " + e.reason());
  }
}

void write_hyps(std::ostream &os, std::span<const HypRow> rows,
                std::span<const std::string> header) {
  write_header(os, header);
  for (const HypRow &r : rows)
    os << r.id << '\t' << r.text << '\t' << format_score(r.combined) << '\t'
       << format_score(r.ec_score) << '\t' << format_score(r.asr_score) << '\n';
}

}  // namespace latrec
