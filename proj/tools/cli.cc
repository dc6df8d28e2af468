// tools/cli.cc

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

#include "cli.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "latrec/error.h"
#include "latrec/external_scorer.h"
#include "latrec/io.h"
#include "latrec/metrics.h"
#include "latrec/retokenize.h"
#include "latrec/scoring.h"
#include "latrec/simulate.h"

#ifndef LATREC_VERSION
#define LATREC_VERSION "0.0.0"
#endif

namespace latrec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

ScorerSpec parse_scorer_spec(const std::string &spec) {
  ScorerSpec s{};
  if (spec.starts_with("ngram:") && spec.size() > 6) {
    s.kind = ScorerSpec::Kind::kNgram;
    s.path_or_command = spec.substr(6);
    return s;
  }
  if (spec.starts_with("external:") && spec.size() > 9) {
    std::string rest = spec.substr(9);
    static const std::regex kHostPort(R"(^([A-Za-z0-9.\-]+):([0-9]{1,5})$)");
    std::smatch m;
    if (std::regex_match(rest, m, kHostPort)) {
      s.kind = ScorerSpec::Kind::kExternalTcp;
      s.host = m[1];
      s.port = std::stoi(m[2]);
      if (s.port < 1 || s.port > 65535) throw ValidationError("bad port in scorer spec");
    } else {
      s.kind = ScorerSpec::Kind::kExternalCommand;
      s.path_or_command = rest;
    }
    return s;
  }
  throw ValidationError("bad scorer spec '" + spec +
                        "' (expected ngram:PATH, external:HOST:PORT or external:COMMAND)");
}

namespace {

// Forwards to a scorer shared by all workers; only used for immutable ones.
class SharedScorer : public Scorer {
 public:
  explicit SharedScorer(std::shared_ptr<Scorer> inner) : inner_(std::move(inner)) {}
  Session start(const EncoderInput &enc) override { return inner_->start(enc); }
  std::vector<double> next_logprobs(const Session &s, std::span<const Token> history,
                                    std::span<const Token> candidates) override {
    return inner_->next_logprobs(s, history, candidates);
  }
  double score_sequence(const EncoderInput &enc, std::span<const Token> target) override {
    return inner_->score_sequence(enc, target);
  }
  void end(const Session &s) override { inner_->end(s); }

 private:
  std::shared_ptr<Scorer> inner_;
};

std::unique_ptr<ExternalScorer> connect(const ScorerSpec &spec) {
  if (spec.kind == ScorerSpec::Kind::kExternalTcp)
    return std::make_unique<ExternalScorer>(std::make_unique<TcpTransport>(spec.host, spec.port));
  return std::make_unique<ExternalScorer>(
      std::make_unique<ChildProcessTransport>(spec.path_or_command));
}

}  // namespace

ScorerFactory make_scorer_factory(const ScorerSpec &spec, int ngram_order) {
  if (spec.kind == ScorerSpec::Kind::kNgram) {
    NgramScorer::Options opts;
    opts.order = ngram_order;
    auto model = std::make_shared<NgramScorer>(NgramScorer::train_file(spec.path_or_command, opts));
    return [model] { return std::make_unique<SharedScorer>(model); };
  }
  return [spec]() -> std::unique_ptr<Scorer> { return connect(spec); };
}

namespace {

std::string header_line(const std::string &command, json config) {
  config["command"] = command;
  return std::string("latrec ") + LATREC_VERSION + " config=" + config.dump();
}

template <class F>
void write_output(const std::string &path, F &&body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  body(os);
  if (!os.flush()) throw Error("write failed for '" + path + "'");
}

BoundaryConvention make_conv(const std::string &marker, const std::string &terminal) {
  if (marker.empty()) throw ValidationError("boundary marker must be non-empty");
  if (!check_token(terminal).empty()) throw ValidationError("bad terminal token");
  return BoundaryConvention{marker, terminal};
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::uint64_t seed = 1;
  std::size_t utts = 100;
  std::size_t k = 4;
  std::size_t beam = 10;
  std::size_t max_len = 64;
  double rho = 0.3;
  std::size_t lm_sentences = 2000;
  bool merge_across_steps = false;
  std::size_t jobs = 1;
  std::string out;

  json to_json() const {
    return {{"seed", seed}, {"utts", utts}, {"k", k}, {"beam", beam}, {"max_len", max_len},
            {"rho", rho}, {"lm_sentences", lm_sentences},
            {"merge_across_steps", merge_across_steps}, {"out", out}};
  }
};

void run_simulate(const SimulateArgs &a, std::ostream &out) {
  if (a.utts == 0) throw ValidationError("--utts must be at least 1");
  SimOptions opts;
  opts.seed = a.seed;
  opts.utts = a.utts;
  opts.rho = a.rho;
  opts.beam = BeamConfig{a.beam, a.k, a.max_len, a.merge_across_steps};
  opts.beam.validate();
  if (!(a.rho >= 0.0 && a.rho < 1.0)) throw ValidationError("--rho must be in [0, 1)");

  ToyLexicon lexicon(a.seed);
  std::vector<SimUtterance> utts(a.utts);
  parallel_for(a.utts, a.jobs, [&](std::size_t, std::size_t i) {
    utts[i] = simulate_utterance(lexicon, opts, i);
  });

  const fs::path dir(a.out);
  fs::create_directories(dir / "corpus.lat");
  const std::vector<std::string> header{header_line("simulate", a.to_json())};

  std::vector<NBestList> lists;
  std::vector<TextRow> refs;
  for (const SimUtterance &u : utts) {
    lists.push_back(u.nbest);
    refs.push_back({u.id, join(u.reference)});
    write_lattice_file(dir / "corpus.lat" / (u.id + ".lat"), u.lattice, header);
  }
  write_output((dir / "corpus.nbest.jsonl").string(),
               [&](std::ostream &os) { write_nbest_jsonl(os, lists, header); });
  write_output((dir / "corpus.ref.tsv").string(),
               [&](std::ostream &os) { write_refs(os, refs, header); });

  // LM text in the ASR token space, from the same sentence generator.
  write_output((dir / "corpus.lm.txt").string(), [&](std::ostream &os) {
    write_header(os, header);
    std::mt19937_64 rng(utterance_seed(a.seed, static_cast<std::size_t>(-1)));
    for (std::size_t i = 0; i < a.lm_sentences; ++i) {
      std::vector<std::string> words = lexicon.sample_sentence(rng);
      os << join(lexicon.asr_tokens(words)) << '\n';
    }
  });
  write_output((dir / "plm.vocab").string(), [&](std::ostream &os) {
    write_header(os, header);
    for (const Token &t : lexicon.plm_vocabulary()) os << t << '\n';
  });
  out << "simulated " << utts.size() << " utterances into " << dir.string() << '\n';
}

// --- retokenize -------------------------------------------------------------

struct RetokenizeArgs {
  std::string in, out, mode, vocab, scorer, marker{kDefaultMarker}, terminal{kDefaultTerminal};

  json to_json() const {
    return {{"in", in}, {"out", out}, {"mode", mode}, {"vocab", vocab},
            {"scorer", scorer}, {"marker", marker}, {"terminal", terminal}};
  }
};

void run_retokenize(const RetokenizeArgs &a, std::ostream &out) {
  BoundaryConvention conv = make_conv(a.marker, a.terminal);
  if (a.mode != "bpe2word" && a.mode != "word2plm")
    throw ValidationError("--mode must be bpe2word or word2plm");
  std::unique_ptr<ExternalScorer> remote;
  std::unique_ptr<WordTokenizer> tok;
  if (a.mode == "word2plm") {
    if (!a.vocab.empty()) {
      tok = std::make_unique<VocabTokenizer>(VocabTokenizer::from_file(a.vocab, conv));
    } else if (!a.scorer.empty()) {
      ScorerSpec spec = parse_scorer_spec(a.scorer);
      if (spec.kind == ScorerSpec::Kind::kNgram)
        throw ValidationError("word2plm needs --vocab or an external scorer");
      remote = connect(spec);
      tok = std::make_unique<ExternalTokenizer>(*remote, conv);
    } else {
      throw ValidationError("word2plm needs --vocab FILE or --scorer external:...");
    }
  }
  const std::vector<std::string> header{header_line("retokenize", a.to_json())};

  auto convert = [&](const fs::path &src, const fs::path &dst) {
    Lattice lat = read_lattice_file(src);
    if (auto report = validate_lattice(lat); !report.ok())
      throw ValidationError(src.string() + ": invalid lattice: " + report.to_string());
    Lattice res = a.mode == "bpe2word" ? bpe_to_word(lat, conv) : word_to_plm_bpe(lat, *tok);
    write_lattice_file(dst, res, header);
  };

  if (fs::is_directory(a.in)) {
    fs::create_directories(a.out);
    std::vector<fs::path> files;
    for (const auto &e : fs::directory_iterator(a.in))
      if (e.path().extension() == ".lat") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const fs::path &f : files) convert(f, fs::path(a.out) / f.filename());
    out << "converted " << files.size() << " lattices\n";
  } else {
    convert(a.in, a.out);
    out << "converted 1 lattice\n";
  }
}

// --- decode / sweep ---------------------------------------------------------

struct DecodeArgs {
  std::string mode = "nbest";
  double lambda = 0.75;
  std::size_t b = 1;
  std::size_t n = 10;
  std::size_t beam = 10;
  std::size_t max_len = 0;
  std::string scorer;
  int ngram_order = 3;
  std::string nbest, lattices, vocab, out;
  std::string prefix{kDefaultPrefix}, separator{kDefaultSeparator};
  std::string marker{kDefaultMarker}, terminal{kDefaultTerminal};
  bool length_normalize = false;
  std::size_t jobs = 1;
  // sweep only
  std::string ref;
  double grid = 0.05;

  json to_json(bool sweep) const {
    json j = {{"mode", mode}, {"b", b}, {"n", n}, {"beam", beam},
              {"max_len", max_len}, {"scorer", scorer}, {"ngram_order", ngram_order},
              {"nbest", nbest}, {"lattices", lattices}, {"vocab", vocab}, {"out", out},
              {"prefix", prefix}, {"separator", separator}, {"marker", marker},
              {"terminal", terminal}, {"length_normalize", length_normalize}};
    if (sweep) {
      j["ref"] = ref;
      j["grid"] = grid;
    } else {
      j["lambda"] = lambda;
    }
    return j;
  }
};

void add_decode_options(CLI::App *cmd, DecodeArgs &a, bool sweep) {
  cmd->add_option("--mode", a.mode, sweep ? "nbest|lattice" : "unconstrained|nbest|lattice")
      ->capture_default_str();
  if (!sweep)
    cmd->add_option("--lambda", a.lambda, "correction-model weight in [0,1]")
        ->capture_default_str();
  cmd->add_option("--b", a.b, "per-node beam of the lattice search")->capture_default_str();
  cmd->add_option("--n", a.n, "hypotheses in the encoder input")->capture_default_str();
  cmd->add_option("--beam", a.beam, "beam of unconstrained decoding")->capture_default_str();
  cmd->add_option("--max-len", a.max_len, "unconstrained length limit (0 = auto)");
  cmd->add_option("--scorer", a.scorer,
                  "ngram:PATH | external:HOST:PORT | external:COMMAND (default )");
  cmd->add_option("--ngram-order", a.ngram_order)->capture_default_str();
  cmd->add_option("--nbest", a.nbest, "N-best JSONL")->required();
  cmd->add_option("--lattices", a.lattices, "directory of <id>.lat files");
  cmd->add_option("--vocab", a.vocab, "scorer-side sub-word vocabulary for N-best texts");
  cmd->add_option("--prefix", a.prefix)->capture_default_str();
  cmd->add_option("--separator", a.separator)->capture_default_str();
  cmd->add_option("--marker", a.marker)->capture_default_str();
  cmd->add_option("--terminal", a.terminal)->capture_default_str();
  cmd->add_flag("--length-normalize", a.length_normalize);
  cmd->add_option("--jobs", a.jobs)->capture_default_str();
  cmd->add_option("--out", a.out, sweep ? "sweep TSV" : "hyps TSV")->required();
  if (sweep) {
    cmd->add_option("--ref", a.ref, "reference TSV")->required();
    cmd->add_option("--grid", a.grid, "lambda grid step")->capture_default_str();
  }
}

struct LoadedCorpus {
  std::vector<CorpusItem> items;
  DecodeOptions opts;
  ScorerFactory factory;
};

LoadedCorpus load_corpus(DecodeArgs &a) {
  if (a.scorer.empty())
    if (const char *env = std::getenv("LATREC_SCORER")) a.scorer = env;
  if (a.scorer.empty()) throw ValidationError("no scorer: pass --scorer or set LATREC_SCORER");
  if (a.n == 0) throw ValidationError("--n must be at least 1");
  if (a.b == 0) throw ValidationError("--b must be at least 1");
  if (a.beam == 0) throw ValidationError("--beam must be at least 1");
  if (a.jobs == 0) throw ValidationError("--jobs must be at least 1");
  InterpWeight check(a.lambda);
  (void)check;

  LoadedCorpus c;
  c.opts.mode = parse_decode_mode(a.mode);
  c.opts.lambda = a.lambda;
  c.opts.lattice_beam = a.b;
  c.opts.beam = a.beam;
  c.opts.max_len = a.max_len;
  c.opts.rescore.length_normalize = a.length_normalize;
  c.opts.conv = make_conv(a.marker, a.terminal);
  if (c.opts.mode == DecodeMode::kLattice && a.lattices.empty())
    throw ValidationError("lattice mode needs --lattices DIR");

  ScorerSpec spec = parse_scorer_spec(a.scorer);
  std::unique_ptr<VocabTokenizer> tok;
  if (!a.vocab.empty())
    tok = std::make_unique<VocabTokenizer>(VocabTokenizer::from_file(a.vocab, c.opts.conv));

  std::vector<NBestList> lists = read_nbest_file(a.nbest);
  std::sort(lists.begin(), lists.end(),
            [](const NBestList &x, const NBestList &y) { return x.utt_id() < y.utt_id(); });
  for (NBestList &list : lists) {
    CorpusItem item;
    item.id = list.utt_id();
    item.enc = build_encoder_input(list, a.n, a.prefix, a.separator);
    if (tok) {
      // Re-express hypotheses in the scorer's token space.
      std::vector<Hypothesis> hyps;
      for (const Hypothesis &h : list.hyps()) {
        Hypothesis t = h;
        t.tokens.clear();
        for (const std::string &w : split_words(h.text)) {
          TokenSeq pieces = tok->split(w);
          t.tokens.insert(t.tokens.end(), pieces.begin(), pieces.end());
        }
        t.tokens.push_back(c.opts.conv.terminal);
        hyps.push_back(std::move(t));
      }
      list = NBestList(list.utt_id(), std::move(hyps));
    }
    item.nbest = list;
    if (c.opts.mode == DecodeMode::kLattice) {
      fs::path p = fs::path(a.lattices) / (item.id + ".lat");
      if (!fs::exists(p)) throw ValidationError("missing lattice " + p.string());
      Lattice lat = read_lattice_file(p);
      if (auto report = validate_lattice(lat); !report.ok())
        throw ValidationError(p.string() + ": invalid lattice: " + report.to_string());
      item.lattice = std::move(lat);
    }
    c.items.push_back(std::move(item));
  }
  if (c.items.empty()) throw ValidationError("no utterances in " + a.nbest);

  if (c.opts.mode == DecodeMode::kUnconstrained) {
    if (spec.kind == ScorerSpec::Kind::kNgram) {
      NgramScorer::Options o;
      o.order = a.ngram_order;
      c.opts.vocab = NgramScorer::train_file(spec.path_or_command, o).vocabulary();
    } else if (tok) {
      c.opts.vocab = VocabTokenizer::from_file(a.vocab, c.opts.conv).vocabulary();
      if (std::find(c.opts.vocab.begin(), c.opts.vocab.end(), c.opts.conv.terminal) ==
          c.opts.vocab.end())
        c.opts.vocab.push_back(c.opts.conv.terminal);
    }
  }
  c.factory = make_scorer_factory(spec, a.ngram_order);
  return c;
}

void run_decode(DecodeArgs &a, std::ostream &out) {
  LoadedCorpus c = load_corpus(a);
  std::vector<DecodeResult> results = decode_corpus(c.items, c.opts, c.factory, a.jobs);
  std::vector<HypRow> rows;
  for (std::size_t i = 0; i < results.size(); ++i)
    rows.push_back({c.items[i].id, results[i].text, results[i].combined, results[i].ec_score,
                    results[i].asr_score});
  const std::vector<std::string> header{header_line("decode", a.to_json(false))};
  write_output(a.out, [&](std::ostream &os) { write_hyps(os, rows, header); });
  out << "decoded " << rows.size() << " utterances (" << a.mode << ") into " << a.out << '\n';
}

std::map<std::string, Words> ref_map(const std::string &path) {
  std::map<std::string, Words> refs;
  for (TextRow &r : read_text_rows_file(path)) refs[r.id] = split_words(r.text);
  return refs;
}

void run_sweep(DecodeArgs &a, std::ostream &out) {
  LoadedCorpus c = load_corpus(a);
  std::map<std::string, Words> refs = ref_map(a.ref);
  std::vector<Words> ordered;
  for (const CorpusItem &item : c.items) {
    auto it = refs.find(item.id);
    if (it == refs.end()) throw ValidationError("no reference for '" + item.id + "'");
    ordered.push_back(it->second);
  }
  SweepResult r = sweep_lambda(c.items, ordered, c.opts, c.factory, a.grid, a.jobs);
  const std::vector<std::string> header{header_line("sweep", a.to_json(true))};
  write_output(a.out, [&](std::ostream &os) {
    write_header(os, header);
    os << "lambda\twer\tedits\tref_len\n";
    for (const SweepRow &row : r.rows) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.2f\t%.6f", row.lambda, row.stats.wer());
      os << buf << '\t' << row.stats.edits() << '\t' << row.stats.ref_len << '\n';
    }
  });
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", r.best_lambda);
  out << "best lambda " << buf << '\n';
}

// --- metrics ------------------------------------------------------------------

struct WerArgs {
  std::string ref, hyp, out;
  json to_json() const { return {{"ref", ref}, {"hyp", hyp}, {"out", out}}; }
};

void run_wer(const WerArgs &a, std::ostream &out) {
  std::map<std::string, Words> refs = ref_map(a.ref);
  std::map<std::string, Words> hyps = ref_map(a.hyp);
  std::vector<UttStats> rows;
  for (const auto &[id, ref] : refs) {
    auto it = hyps.find(id);
    if (it == hyps.end()) throw ValidationError("no hypothesis for '" + id + "'");
    if (ref.empty()) throw ValidationError("empty reference for '" + id + "'");
    rows.push_back({id, wer(ref, it->second)});
  }
  CorpusReport report = corpus_report(std::move(rows));
  out << format_report_table(report);
  if (!a.out.empty()) {
    const std::vector<std::string> header{header_line("wer", a.to_json())};
    write_output(a.out, [&](std::ostream &os) { write_report_tsv(os, report, header); });
  }
}

struct OracleArgs {
  std::string ref, nbest, lattices, out;
  std::vector<std::size_t> n{1, 5, 10};
  std::string marker{kDefaultMarker}, terminal{kDefaultTerminal};
  json to_json() const {
    return {{"ref", ref}, {"nbest", nbest}, {"lattices", lattices}, {"out", out},
            {"n", n}, {"marker", marker}, {"terminal", terminal}};
  }
};

void run_oracle(const OracleArgs &a, std::ostream &out) {
  if (a.nbest.empty() && a.lattices.empty())
    throw ValidationError("oracle needs --nbest FILE and/or --lattices DIR");
  BoundaryConvention conv = make_conv(a.marker, a.terminal);
  std::map<std::string, Words> refs = ref_map(a.ref);
  std::map<std::string, NBestList> lists;
  if (!a.nbest.empty())
    for (NBestList &l : read_nbest_file(a.nbest)) lists.emplace(l.utt_id(), std::move(l));

  std::vector<std::string> columns;
  if (!a.nbest.empty())
    for (std::size_t n : a.n) {
      if (n == 0) throw ValidationError("--n entries must be at least 1");
      columns.push_back("nbest@" + std::to_string(n));
    }
  if (!a.lattices.empty()) columns.push_back("lattice");

  std::vector<std::vector<std::string>> table;
  std::vector<std::size_t> total(columns.size(), 0);
  std::size_t total_ref = 0;
  for (const auto &[id, ref] : refs) {
    if (ref.empty()) throw ValidationError("empty reference for '" + id + "'");
    std::vector<std::size_t> edits;
    if (!a.nbest.empty()) {
      auto it = lists.find(id);
      if (it == lists.end()) throw ValidationError("no n-best list for '" + id + "'");
      for (std::size_t n : a.n) edits.push_back(oracle_wer_nbest(ref, it->second.top(n)).stats.edits());
    }
    if (!a.lattices.empty()) {
      fs::path p = fs::path(a.lattices) / (id + ".lat");
      if (!fs::exists(p)) throw ValidationError("missing lattice " + p.string());
      Lattice lat = read_lattice_file(p);
      if (auto report = validate_lattice(lat); !report.ok())
        throw ValidationError(p.string() + ": invalid lattice: " + report.to_string());
      edits.push_back(oracle_wer_lattice(ref, lat, conv).stats.edits());
    }
    std::vector<std::string> row{id, std::to_string(ref.size())};
    for (std::size_t c = 0; c < edits.size(); ++c) {
      total[c] += edits[c];
      row.push_back(std::to_string(edits[c]));
    }
    total_ref += ref.size();
    table.push_back(std::move(row));
  }
  std::vector<std::string> total_row{"TOTAL", std::to_string(total_ref)}, wer_row{"WER", "-"};
  for (std::size_t e : total) {
    total_row.push_back(std::to_string(e));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", total_ref ? double(e) / double(total_ref) : 0.0);
    wer_row.push_back(buf);
  }
  table.push_back(total_row);
  table.push_back(wer_row);
  std::vector<std::string> head{"id", "ref_len"};
  head.insert(head.end(), columns.begin(), columns.end());

  auto emit = [&](std::ostream &os) {
    os << join(head, "\t") << '\n';
    for (const auto &row : table) os << join(row, "\t") << '\n';
  };
  if (a.out.empty()) {
    emit(out);
  } else {
    const std::vector<std::string> header{header_line("oracle", a.to_json())};
    write_output(a.out, [&](std::ostream &os) {
      write_header(os, header);
      emit(os);
    });
    out << join(head, "\t") << '\n' << join(table.back(), "\t") << '\n';
  }
}

struct FilterArgs {
  std::string ref, hyp, out;
  double threshold = 0.25;
  json to_json() const {
    return {{"ref", ref}, {"hyp", hyp}, {"out", out}, {"threshold", threshold}};
  }
};

void run_filter(const FilterArgs &a, std::ostream &out) {
  std::vector<TextRow> refs = read_text_rows_file(a.ref);
  std::map<std::string, std::string> hyps;
  for (TextRow &r : read_text_rows_file(a.hyp)) hyps[r.id] = r.text;
  std::vector<std::pair<Words, Words>> pairs;
  std::vector<const TextRow *> order;
  for (const TextRow &r : refs) {
    auto it = hyps.find(r.id);
    if (it == hyps.end()) throw ValidationError("no hypothesis for '" + r.id + "'");
    pairs.emplace_back(split_words(r.text), split_words(it->second));
    order.push_back(&r);
  }
  std::vector<std::size_t> kept;
  try {
    kept = filter_pairs(pairs, a.threshold);
  } catch (const EmptyReferenceError &e) {
    throw ValidationError("empty reference for '" + order[e.index()]->id + "'");
  }
  const std::vector<std::string> header{header_line("filter", a.to_json())};
  write_output(a.out, [&](std::ostream &os) {
    write_header(os, header);
    for (std::size_t i : kept)
      os << order[i]->id << '\t' << order[i]->text << '\t' << hyps[order[i]->id] << '\n';
  });
  out << "kept " << kept.size() << " of " << pairs.size() << " pairs\n";
}

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"latrec: lattice and N-best tools for ASR error correction"};
  app.set_version_flag("--version", std::string("latrec ") + LATREC_VERSION);
  app.require_subcommand(1);

  SimulateArgs sim;
  auto *c_sim = app.add_subcommand("simulate", "generate a synthetic N-best/lattice corpus");
  c_sim->add_option("--seed", sim.seed)->capture_default_str();
  c_sim->add_option("--utts", sim.utts)->capture_default_str();
  c_sim->add_option("--k", sim.k, "merge context size")->capture_default_str();
  c_sim->add_option("--beam", sim.beam)->capture_default_str();
  c_sim->add_option("--max-len", sim.max_len)->capture_default_str();
  c_sim->add_option("--rho", sim.rho, "mean channel noise")->capture_default_str();
  c_sim->add_option("--lm-sentences", sim.lm_sentences)->capture_default_str();
  c_sim->add_flag("--merge-across-steps", sim.merge_across_steps);
  c_sim->add_option("--jobs", sim.jobs)->capture_default_str();
  c_sim->add_option("--out", sim.out, "output directory")->required();

  RetokenizeArgs rt;
  auto *c_rt = app.add_subcommand("retokenize", "convert lattices between token spaces");
  c_rt->add_option("--in", rt.in, "lattice file or directory")->required();
  c_rt->add_option("--out", rt.out, "lattice file or directory")->required();
  c_rt->add_option("--mode", rt.mode, "bpe2word|word2plm")->required();
  c_rt->add_option("--vocab", rt.vocab, "sub-word vocabulary (word2plm)");
  c_rt->add_option("--scorer", rt.scorer, "external scorer used as tokenizer (word2plm)");
  c_rt->add_option("--marker", rt.marker)->capture_default_str();
  c_rt->add_option("--terminal", rt.terminal)->capture_default_str();

  DecodeArgs dec;
  auto *c_dec = app.add_subcommand("decode", "decode a corpus with the correction model");
  add_decode_options(c_dec, dec, false);

  DecodeArgs sw;
  auto *c_sw = app.add_subcommand("sweep", "corpus WER over a grid of interpolation weights");
  add_decode_options(c_sw, sw, true);

  WerArgs wa;
  auto *c_wer = app.add_subcommand("wer", "word error rate of hypotheses against references");
  c_wer->add_option("--ref", wa.ref)->required();
  c_wer->add_option("--hyp", wa.hyp)->required();
  c_wer->add_option("--out", wa.out, "per-utterance TSV report");

  OracleArgs oa;
  auto *c_or = app.add_subcommand("oracle", "oracle WER of N-best lists and lattices");
  c_or->add_option("--ref", oa.ref)->required();
  c_or->add_option("--nbest", oa.nbest);
  c_or->add_option("--lattices", oa.lattices);
  c_or->add_option("--n", oa.n, "N-best sizes")->delimiter(',')->capture_default_str();
  c_or->add_option("--marker", oa.marker)->capture_default_str();
  c_or->add_option("--terminal", oa.terminal)->capture_default_str();
  c_or->add_option("--out", oa.out);

  FilterArgs fa;
  auto *c_fi = app.add_subcommand("filter", "drop pairs whose WER exceeds a threshold");
  c_fi->add_option("--ref", fa.ref)->required();
  c_fi->add_option("--hyp", fa.hyp)->required();
  c_fi->add_option("--threshold", fa.threshold)->capture_default_str();
  c_fi->add_option("--out", fa.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (c_sim->parsed()) run_simulate(sim, out);
    else if (c_rt->parsed()) run_retokenize(rt, out);
    else if (c_dec->parsed()) run_decode(dec, out);
    else if (c_sw->parsed()) run_sweep(sw, out);
    else if (c_wer->parsed()) run_wer(wa, out);
    else if (c_or->parsed()) run_oracle(oa, out);
    else if (c_fi->parsed()) run_filter(fa, out);
  } catch (const ValidationError &e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ParseError &e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace latrec::cli
