// latrec/io.h

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

#ifndef LATREC_IO_H_
#define LATREC_IO_H_

// Text formats. Every format treats lines starting with '#' as comments (the
// lattice format additionally reserves "#LAT1", "#start" and "#end"), so
// writers can prepend a provenance header.
//
//   .lat          #LAT1 / #start <id> / #end <id> / src<TAB>dst<TAB>label<TAB>score
//   .nbest.jsonl  {"id": ..., "hyps": [{"text": ..., "tokens": [...], "score": ...}]}
//   .ref.tsv      id<TAB>text
//   hyps.tsv      id<TAB>text<TAB>combined<TAB>ec_score<TAB>asr_score
//
// Scores are written with 17 significant digits, which round-trips every
// finite double exactly.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "latrec/lattice.h"
#include "latrec/nbest.h"

namespace latrec {

std::string format_score(double x);
double parse_score(std::string_view text, std::size_t line);

void write_lattice(std::ostream &os, const Lattice &lat,
                   std::span<const std::string> header = {});
Lattice read_lattice(std::istream &is);

void write_lattice_file(const std::filesystem::path &path, const Lattice &lat,
                        std::span<const std::string> header = {});
Lattice read_lattice_file(const std::filesystem::path &path);

void write_nbest_jsonl(std::ostream &os, std::span<const NBestList> lists,
                       std::span<const std::string> header = {});
std::vector<NBestList> read_nbest_jsonl(std::istream &is);
std::vector<NBestList> read_nbest_file(const std::filesystem::path &path);

struct TextRow {
  std::string id;
  std::string text;
  bool operator==(const TextRow &) const = default;
};

void write_refs(std::ostream &os, std::span<const TextRow> rows,
                std::span<const std::string> header = {});
// Reads id<TAB>text[<TAB>...] rows; extra columns are ignored so that
// hyps.tsv files can be read as plain transcripts. Ids must be unique.
std::vector<TextRow> read_text_rows(std::istream &is);
std::vector<TextRow> read_text_rows_file(const std::filesystem::path &path);

struct HypRow {
  std::string id;
  std::string text;
  double combined = 0.0;
  double ec_score = 0.0;
  double asr_score = 0.0;
};

void write_hyps(std::ostream &os, std::span<const HypRow> rows,
                std::span<const std::string> header = {});

void write_header(std::ostream &os, std::span<const std::string> header);

}  // namespace latrec

#endif  // LATREC_IO_H_
