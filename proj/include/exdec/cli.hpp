// Copyright 2026 The Exdec Authors.
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

#ifndef EXDEC_CLI_HPP_
#define EXDEC_CLI_HPP_

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "exdec/analysis.hpp"
#include "exdec/core.hpp"
#include "exdec/model.hpp"
#include "exdec/search.hpp"

namespace exdec {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// ---------------------------------------------------------------------------
// Corpus
// ---------------------------------------------------------------------------

/// One corpus sentence: {"id": str, "source": str, "reference": str?} with
/// whitespace tokenization and ids unique within the file.
struct CorpusLine {
  std::string id;
  std::vector<std::string> source;
  std::optional<std::vector<std::string>> reference;
};

inline std::vector<std::string> whitespace_tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream iss(text);
  std::string token;
  while (iss >> token) tokens.push_back(token);
  return tokens;
}

inline std::vector<CorpusLine> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kParseError, "cannot open corpus file " + path);
  }
  std::vector<CorpusLine> corpus;
  std::set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, path + ":" + std::to_string(line_no) +
                                              ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
        !j.contains("source") || !j["source"].is_string()) {
      throw Error(ErrorCode::kParseError,
                  path + ":" + std::to_string(line_no) +
                      ": corpus lines need string \"id\" and \"source\"");
    }
    CorpusLine entry;
    entry.id = j["id"].get<std::string>();
    if (!seen_ids.insert(entry.id).second) {
      throw Error(ErrorCode::kParseError,
                  path + ": duplicate sentence id \"" + entry.id + "\"");
    }
    entry.source = whitespace_tokenize(j["source"].get<std::string>());
    if (j.contains("reference")) {
      if (!j["reference"].is_string()) {
        throw Error(ErrorCode::kParseError,
                    path + ":" + std::to_string(line_no) +
                        ": \"reference\" must be a string");
      }
      entry.reference = whitespace_tokenize(j["reference"].get<std::string>());
    }
    corpus.push_back(std::move(entry));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Search specs
// ---------------------------------------------------------------------------

/// Parsed form of the --search argument:
///   greedy | beam:N | exact[:N] | exact-minlen[:R] | exact-fixedlen:(beam|ref|L)
///   | exact-lennorm | brute:L
struct SearchSpec {
  enum class Mode {
    kBeam,
    kExact,
    kExactMinLen,
    kExactFixedLenBeam,
    kExactFixedLenRef,
    kExactFixedLenAbs,
    kExactLengthNorm,
    kBruteForce,
  };

  Mode mode = Mode::kBeam;
  std::string label;          // the spec string, used as run label
  std::optional<int> beam_size;
  double min_ratio = 0.25;
  int fixed_len = 0;
  int brute_max_len = 0;
};

namespace detail {

inline std::optional<int> parse_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t pos = 0;
  int value = 0;
  try {
    value = std::stoi(s, &pos);
  } catch (...) {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;
  return value;
}

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &pos);
  } catch (...) {
    return std::nullopt;
  }
  if (pos != s.size()) return std::nullopt;
  return value;
}

}  // namespace detail

inline SearchSpec parse_search_spec(const std::string& spec) {
  SearchSpec out;
  out.label = spec;
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg =
      colon == std::string::npos ? "" : spec.substr(colon + 1);

  auto usage = [&](const std::string& why) -> Error {
    return Error(ErrorCode::kValidationError,
                 "bad search spec \"" + spec + "\": " + why);
  };

  if (head == "greedy") {
    if (!arg.empty()) throw usage("greedy takes no argument");
    out.mode = SearchSpec::Mode::kBeam;
    out.beam_size = 1;
  } else if (head == "beam") {
    auto n = detail::parse_int(arg);
    if (!n || *n < 1) throw usage("beam needs a positive size");
    out.mode = SearchSpec::Mode::kBeam;
    out.beam_size = *n;
  } else if (head == "exact") {
    out.mode = SearchSpec::Mode::kExact;
    if (!arg.empty()) {
      auto n = detail::parse_int(arg);
      if (!n || *n < 1) throw usage("exact:N needs a positive beam size");
      out.beam_size = *n;
    }
  } else if (head == "exact-minlen") {
    out.mode = SearchSpec::Mode::kExactMinLen;
    if (!arg.empty()) {
      auto r = detail::parse_double(arg);
      if (!r || !(*r > 0.0)) throw usage("exact-minlen:R needs a ratio > 0");
      out.min_ratio = *r;
    }
  } else if (head == "exact-fixedlen") {
    if (arg == "beam") {
      out.mode = SearchSpec::Mode::kExactFixedLenBeam;
    } else if (arg == "ref") {
      out.mode = SearchSpec::Mode::kExactFixedLenRef;
    } else {
      auto len = detail::parse_int(arg);
      if (!len || *len < 0) throw usage("exact-fixedlen needs beam, ref, or a length");
      out.mode = SearchSpec::Mode::kExactFixedLenAbs;
      out.fixed_len = *len;
    }
  } else if (head == "exact-lennorm") {
    if (!arg.empty()) throw usage("exact-lennorm takes no argument");
    out.mode = SearchSpec::Mode::kExactLengthNorm;
  } else if (head == "brute") {
    auto len = detail::parse_int(arg);
    if (!len || *len < 0) throw usage("brute:L needs a length >= 0");
    out.mode = SearchSpec::Mode::kBruteForce;
    out.brute_max_len = *len;
  } else {
    throw usage("unknown search kind \"" + head + "\"");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decoding a corpus
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::ordered_json hypothesis_tokens_json(const Vocabulary& vocab,
                                                     const TokenSequence& seq) {
  nlohmann::ordered_json tokens = nlohmann::ordered_json::array();
  for (TokenId id : seq) tokens.push_back(vocab.token(id));
  return tokens;
}

inline nlohmann::ordered_json flags_json(const SearchFlags& flags) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  if (flags.cap_hit) out.push_back("CAP_HIT");
  if (flags.timeout) out.push_back("TIMEOUT");
  if (flags.fallback_to_incumbent) out.push_back("FALLBACK_TO_INCUMBENT");
  return out;
}

// Serialized stats deliberately omit wall time: decode outputs are specified
// to be byte-identical across runs.
inline nlohmann::ordered_json stats_json(const SearchStats& stats) {
  nlohmann::ordered_json out;
  out["expansions"] = stats.expansions;
  out["evaluations"] = stats.evaluations;
  out["gamma_updates"] = stats.gamma_updates;
  out["max_depth"] = stats.max_depth;
  return out;
}

}  // namespace detail

/// Decodes one sentence under a parsed search spec. The per-sentence defaults
/// follow the library: cap = max(2I, I+10) unless a factor was given,
/// exact-lennorm searches lengths up to floor(1.2 * I), minimum-length exact
/// search keeps the beam hypothesis as incumbent when it satisfies the
/// constraint.
inline SearchOutcome decode_sentence(const SequenceModel& model,
                                     const CorpusLine& line,
                                     const SearchSpec& spec,
                                     SearchConfig config) {
  const int source_len = static_cast<int>(line.source.size());
  if (spec.beam_size) config.beam_size = *spec.beam_size;

  switch (spec.mode) {
    case SearchSpec::Mode::kBeam:
      return beam_search(model, line.source, config);

    case SearchSpec::Mode::kExact:
      return exact_search(model, line.source, config);

    case SearchSpec::Mode::kExactMinLen: {
      const LengthConstraint constraint =
          LengthConstraint::min_ratio(spec.min_ratio);
      SearchOutcome beam = beam_search(model, line.source, config);
      std::optional<Hypothesis> incumbent;
      if (beam.best.complete() &&
          constraint.satisfied_by(beam.best.length(), source_len)) {
        incumbent = beam.best;
      }
      return exact_search_constrained(model, line.source, config, constraint,
                                      incumbent);
    }

    case SearchSpec::Mode::kExactFixedLenBeam: {
      SearchOutcome beam = beam_search(model, line.source, config);
      if (!beam.best.complete()) {
        throw Error(ErrorCode::kNoFeasibleHypothesis,
                    "beam run produced no complete hypothesis to take the "
                    "length from");
      }
      return exact_search_constrained(model, line.source, config,
                                      LengthConstraint::exact(beam.best.length()),
                                      beam.best);
    }

    case SearchSpec::Mode::kExactFixedLenRef: {
      if (!line.reference) {
        throw Error(ErrorCode::kValidationError,
                    "exact-fixedlen:ref needs a reference for sentence " +
                        line.id);
      }
      const int ref_len = static_cast<int>(line.reference->size());
      return exact_search_constrained(model, line.source, config,
                                      LengthConstraint::exact(ref_len));
    }

    case SearchSpec::Mode::kExactFixedLenAbs:
      return exact_search_constrained(model, line.source, config,
                                      LengthConstraint::exact(spec.fixed_len));

    case SearchSpec::Mode::kExactLengthNorm: {
      const int k_max = static_cast<int>(std::floor(1.2 * source_len));
      PerLengthOutcome per_length = exact_search_per_length(
          model, line.source, config, k_max, BoundInit::kBeamLengthNorm);
      SearchOutcome out;
      out.best = optimize_length_objective(per_length.table,
                                           per_length.beam_incumbent,
                                           LengthObjective::length_norm());
      out.exact = per_length.exact;
      out.flags = per_length.flags;
      out.stats = per_length.stats;
      return out;
    }

    case SearchSpec::Mode::kBruteForce: {
      std::vector<Hypothesis> all =
          brute_force(model, line.source, spec.brute_max_len);
      if (all.empty()) {
        throw Error(ErrorCode::kNoFeasibleHypothesis,
                    "no complete hypothesis within the enumerated space");
      }
      SearchOutcome out;
      out.best = all.front();
      out.exact = true;
      return out;
    }
  }
  throw Error(ErrorCode::kValidationError, "unhandled search mode");
}

struct DecodeOptions {
  std::string model_path;
  std::string corpus_path;
  std::string search_spec;
  std::string out_path;
  std::optional<int> beam_size;
  std::optional<double> max_len_factor;
  std::optional<double> timeout_secs;
  std::optional<double> min_len_ratio;
  std::optional<int> fixed_len;
  double epsilon = 1e-6;
};

/// Decodes a corpus and writes one JSONL line per sentence, in corpus order:
/// {"id", "search", "hypothesis", "score", "exact", "flags", "stats"}.
/// Per-sentence failures become {"id", "search", "error"} lines and never
/// abort the run.
inline int cmd_decode(const DecodeOptions& options, std::ostream& diagnostics) {
  SearchSpec spec;
  try {
    spec = parse_search_spec(options.search_spec);
    if (options.beam_size) {
      if (*options.beam_size < 1) {
        throw Error(ErrorCode::kValidationError, "beam size must be >= 1");
      }
      if (!spec.beam_size) spec.beam_size = *options.beam_size;
    }
    if (options.min_len_ratio) {
      if (!(*options.min_len_ratio > 0.0)) {
        throw Error(ErrorCode::kValidationError, "min-len ratio must be > 0");
      }
      if (spec.mode == SearchSpec::Mode::kExactMinLen &&
          options.search_spec == "exact-minlen") {
        spec.min_ratio = *options.min_len_ratio;
      }
    }
    if (options.fixed_len && options.search_spec == "exact-fixedlen") {
      spec.mode = SearchSpec::Mode::kExactFixedLenAbs;
      spec.fixed_len = *options.fixed_len;
    }
  } catch (const Error& e) {
    diagnostics << e.what() << "\n";
    return kExitUsage;
  }

  std::unique_ptr<SequenceModel> model;
  std::vector<CorpusLine> corpus;
  try {
    model = load_model(options.model_path);
    corpus = load_corpus(options.corpus_path);
  } catch (const Error& e) {
    diagnostics << e.what() << "\n";
    return kExitData;
  }

  std::ofstream out(options.out_path);
  if (!out) {
    diagnostics << "cannot open output file " << options.out_path << "\n";
    return kExitData;
  }

  for (const CorpusLine& line : corpus) {
    SearchConfig config;
    config.beam_size = spec.beam_size.value_or(10);
    config.epsilon = options.epsilon;
    config.timeout_secs = options.timeout_secs;
    if (options.max_len_factor) {
      config.max_len_cap = std::max(
          1, static_cast<int>(*options.max_len_factor *
                              static_cast<double>(line.source.size())));
    }

    nlohmann::ordered_json record;
    record["id"] = line.id;
    record["search"] = spec.label;
    try {
      const SearchOutcome outcome = decode_sentence(*model, line, spec, config);
      record["hypothesis"] =
          detail::hypothesis_tokens_json(model->target_vocab(), outcome.best.seq);
      record["score"] = outcome.best.score;
      record["exact"] = outcome.exact;
      record["flags"] = detail::flags_json(outcome.flags);
      record["stats"] = detail::stats_json(outcome.stats);
    } catch (const Error& e) {
      record["error"] = e.what();
    }
    out << record.dump() << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Analyze
// ---------------------------------------------------------------------------

namespace detail {

inline RunResult run_result_from_json(const nlohmann::json& j) {
  RunResult result;
  for (const auto& t : j.at("hypothesis")) {
    result.tokens.push_back(t.get<std::string>());
  }
  result.score = j.at("score").get<double>();
  result.exact = j.at("exact").get<bool>();
  if (j.contains("flags")) {
    for (const auto& f : j["flags"]) {
      const std::string name = f.get<std::string>();
      if (name == "CAP_HIT") result.flags.cap_hit = true;
      if (name == "TIMEOUT") result.flags.timeout = true;
      if (name == "FALLBACK_TO_INCUMBENT") result.flags.fallback_to_incumbent = true;
    }
  }
  if (j.contains("stats")) {
    const auto& s = j["stats"];
    result.stats.expansions = s.value("expansions", 0);
    result.stats.evaluations = s.value("evaluations", 0);
    result.stats.gamma_updates = s.value("gamma_updates", 0);
    result.stats.max_depth = s.value("max_depth", 0);
  }
  return result;
}

/// Joins decode-output lines onto the corpus by id. Every corpus id must
/// appear exactly once; unknown or duplicate ids are ID_MISMATCH. Error lines
/// surface as std::nullopt entries.
inline std::map<std::string, std::optional<RunResult>> load_decode_output(
    const std::string& path, const std::vector<CorpusLine>& corpus) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kParseError, "cannot open decode output " + path);
  }
  std::set<std::string> corpus_ids;
  for (const auto& line : corpus) corpus_ids.insert(line.id);

  std::map<std::string, std::optional<RunResult>> results;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      const std::string id = j.at("id").get<std::string>();
      if (!corpus_ids.count(id)) {
        throw Error(ErrorCode::kIdMismatch,
                    path + ": id \"" + id + "\" not in the corpus");
      }
      if (results.count(id)) {
        throw Error(ErrorCode::kIdMismatch,
                    path + ": duplicate id \"" + id + "\"");
      }
      if (j.contains("error")) {
        results.emplace(id, std::nullopt);
      } else {
        results.emplace(id, run_result_from_json(j));
      }
    } catch (const Error&) {
      throw;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError,
                  path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (const auto& id : corpus_ids) {
    if (!results.count(id)) {
      throw Error(ErrorCode::kIdMismatch,
                  path + ": missing id \"" + id + "\"");
    }
  }
  return results;
}

inline nlohmann::ordered_json histogram_json(const RatioHistogram& hist) {
  nlohmann::ordered_json buckets = nlohmann::ordered_json::array();
  for (int i = 0; i < RatioHistogram::kBuckets; ++i) {
    nlohmann::ordered_json bucket;
    bucket["low"] = RatioHistogram::bucket_low(i);
    auto high = RatioHistogram::bucket_high(i);
    if (high) {
      bucket["high"] = *high;
    } else {
      bucket["high"] = nullptr;
    }
    bucket["count"] = hist.counts[static_cast<std::size_t>(i)];
    buckets.push_back(std::move(bucket));
  }
  nlohmann::ordered_json out;
  out["buckets"] = std::move(buckets);
  out["aggregate_ratio"] = hist.aggregate_ratio;
  out["included"] = hist.included;
  out["excluded_zero_denominator"] = hist.excluded_zero_denominator;
  return out;
}

inline nlohmann::ordered_json report_json(const Report& report) {
  nlohmann::ordered_json out;
  out["sentences"] = report.sentences;
  out["exact_label"] = report.exact_label;
  nlohmann::ordered_json runs;
  for (const auto& [label, run] : report.runs) {
    nlohmann::ordered_json r;
    if (run.bleu) r["bleu"] = *run.bleu; else r["bleu"] = nullptr;
    r["length_ratio_source"] = run.length_ratio_source;
    if (run.length_ratio_reference) {
      r["length_ratio_reference"] = *run.length_ratio_reference;
    } else {
      r["length_ratio_reference"] = nullptr;
    }
    if (run.search_error_pct) {
      r["search_error_pct"] = *run.search_error_pct;
    } else {
      r["search_error_pct"] = nullptr;
    }
    r["empty_pct"] = run.empty_pct;
    r["excluded_non_exact"] = run.excluded_non_exact;
    r["histogram_source"] = histogram_json(run.histogram_source);
    if (run.histogram_reference) {
      r["histogram_reference"] = histogram_json(*run.histogram_reference);
    } else {
      r["histogram_reference"] = nullptr;
    }
    nlohmann::ordered_json breakdown = nlohmann::ordered_json::array();
    for (const auto& bucket : run.source_length_breakdown) {
      nlohmann::ordered_json b;
      b["source_len_low"] = bucket.low;
      b["source_len_high"] = bucket.high;
      b["sentences"] = bucket.sentences;
      b["search_error_pct"] = bucket.search_error_pct;
      b["empty_pct"] = bucket.empty_pct;
      breakdown.push_back(std::move(b));
    }
    r["source_length_breakdown"] = std::move(breakdown);
    nlohmann::ordered_json stats;
    stats["mean_expansions"] = run.mean_expansions;
    stats["mean_evaluations"] = run.mean_evaluations;
    stats["mean_gamma_updates"] = run.mean_gamma_updates;
    r["stats"] = std::move(stats);
    runs[label] = std::move(r);
  }
  out["runs"] = std::move(runs);
  return out;
}

inline void write_histogram_csv(const std::string& path,
                                const RatioHistogram& hist,
                                std::ostream& diagnostics) {
  std::ofstream out(path);
  if (!out) {
    diagnostics << "cannot open histogram file " << path << "\n";
    throw Error(ErrorCode::kParseError, "cannot open " + path);
  }
  out << "bucket_low,bucket_high,count\n";
  for (int i = 0; i < RatioHistogram::kBuckets; ++i) {
    out << RatioHistogram::bucket_low(i) << ",";
    auto high = RatioHistogram::bucket_high(i);
    if (high) {
      out << *high;
    } else {
      out << "inf";
    }
    out << "," << hist.counts[static_cast<std::size_t>(i)] << "\n";
  }
}

inline std::string strip_json_suffix(const std::string& path) {
  const std::string suffix = ".json";
  if (path.size() > suffix.size() &&
      path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return path.substr(0, path.size() - suffix.size());
  }
  return path;
}

}  // namespace detail

struct AnalyzeOptions {
  std::string corpus_path;
  /// label=path pairs, e.g. {"greedy=g.jsonl", "exact=e.jsonl"}.
  std::vector<std::string> labeled_runs;
  std::string out_path;
  double epsilon = 1e-6;
};

/// Joins decode outputs onto the corpus, aggregates the measurement suite,
/// and writes the report JSON plus one histogram CSV per run and denominator.
/// Sentences with decode errors in any analyzed run are dropped from the
/// joined records and reported on stderr.
inline int cmd_analyze(const AnalyzeOptions& options, std::ostream& diagnostics) {
  std::vector<std::pair<std::string, std::string>> runs;
  for (const auto& pair : options.labeled_runs) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size()) {
      diagnostics << "bad --labels entry \"" << pair
                  << "\" (expected label=path)\n";
      return kExitUsage;
    }
    runs.emplace_back(pair.substr(0, eq), pair.substr(eq + 1));
  }
  if (runs.empty()) {
    diagnostics << "no labeled decode outputs given\n";
    return kExitUsage;
  }

  try {
    const std::vector<CorpusLine> corpus = load_corpus(options.corpus_path);
    if (corpus.empty()) {
      throw Error(ErrorCode::kEmptyCorpus, "corpus is empty");
    }

    std::vector<SentenceRecord> records;
    records.reserve(corpus.size());
    for (const auto& line : corpus) {
      SentenceRecord rec;
      rec.id = line.id;
      rec.source = line.source;
      rec.reference = line.reference;
      records.push_back(std::move(rec));
    }

    std::vector<std::string> labels;
    int dropped = 0;
    std::vector<bool> has_error(records.size(), false);
    for (const auto& [label, path] : runs) {
      labels.push_back(label);
      auto results = detail::load_decode_output(path, corpus);
      for (std::size_t i = 0; i < records.size(); ++i) {
        auto& result = results.at(records[i].id);
        if (result) {
          records[i].decoded.emplace(label, std::move(*result));
        } else {
          has_error[i] = true;
        }
      }
    }
    std::vector<SentenceRecord> usable;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (has_error[i]) {
        ++dropped;
      } else {
        usable.push_back(std::move(records[i]));
      }
    }
    if (dropped > 0) {
      diagnostics << "dropped " << dropped
                  << " sentence(s) with decode errors\n";
    }

    const Report report = aggregate_report(usable, labels, options.epsilon);

    std::ofstream out(options.out_path);
    if (!out) {
      diagnostics << "cannot open report file " << options.out_path << "\n";
      return kExitData;
    }
    out << detail::report_json(report).dump(2) << "\n";

    const std::string stem = detail::strip_json_suffix(options.out_path);
    for (const auto& [label, run] : report.runs) {
      detail::write_histogram_csv(stem + "_hist_" + label + "_source.csv",
                                  run.histogram_source, diagnostics);
      if (run.histogram_reference) {
        detail::write_histogram_csv(stem + "_hist_" + label + "_reference.csv",
                                    *run.histogram_reference, diagnostics);
      }
    }
  } catch (const Error& e) {
    diagnostics << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct SweepOptions {
  std::string model_path;
  std::string corpus_path;
  std::vector<int> beam_sizes;
  std::string out_path;
  std::optional<int> exact_beam_size;  // bootstrap beam for the exact run
  std::optional<double> max_len_factor;
  std::optional<double> timeout_secs;
  double epsilon = 1e-6;
};

/// Runs exact search once, then beam search per size, and writes one CSV row
/// per beam size: n, search_error_pct, length_ratio (hypothesis/source),
/// bleu, mean_expansions. Rows are sorted by n ascending.
inline int cmd_sweep(const SweepOptions& options, std::ostream& diagnostics) {
  if (options.beam_sizes.empty()) {
    diagnostics << "no beam sizes given\n";
    return kExitUsage;
  }
  for (int n : options.beam_sizes) {
    if (n < 1) {
      diagnostics << "beam sizes must be positive\n";
      return kExitUsage;
    }
  }
  std::vector<int> sizes = options.beam_sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  try {
    auto model = load_model(options.model_path);
    const std::vector<CorpusLine> corpus = load_corpus(options.corpus_path);
    if (corpus.empty()) {
      throw Error(ErrorCode::kEmptyCorpus, "corpus is empty");
    }
    const bool have_references =
        std::any_of(corpus.begin(), corpus.end(),
                    [](const CorpusLine& l) { return l.reference.has_value(); });
    if (!have_references) {
      throw Error(ErrorCode::kEmptyCorpus,
                  "sweep needs references to report BLEU");
    }

    auto make_config = [&](const CorpusLine& line, int beam_size) {
      SearchConfig config;
      config.beam_size = beam_size;
      config.epsilon = options.epsilon;
      config.timeout_secs = options.timeout_secs;
      if (options.max_len_factor) {
        config.max_len_cap = std::max(
            1, static_cast<int>(*options.max_len_factor *
                                static_cast<double>(line.source.size())));
      }
      return config;
    };

    std::vector<SearchOutcome> exact_runs;
    exact_runs.reserve(corpus.size());
    for (const auto& line : corpus) {
      exact_runs.push_back(exact_search(
          *model, line.source, make_config(line, options.exact_beam_size.value_or(10))));
    }

    std::ofstream out(options.out_path);
    if (!out) {
      diagnostics << "cannot open output file " << options.out_path << "\n";
      return kExitData;
    }
    out << "n,search_error_pct,length_ratio,bleu,mean_expansions\n";

    for (int n : sizes) {
      std::int64_t hyp_total = 0;
      std::int64_t src_total = 0;
      std::int64_t expansions = 0;
      int counted = 0;
      int errors = 0;
      std::vector<std::vector<std::string>> hyps;
      std::vector<std::vector<std::string>> refs;

      for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& line = corpus[i];
        const SearchOutcome beam =
            beam_search(*model, line.source, make_config(line, n));
        if (exact_runs[i].exact) {
          ++counted;
          if (exact_runs[i].best.score - beam.best.score > options.epsilon) {
            ++errors;
          }
        }
        hyp_total += beam.best.length();
        src_total += static_cast<std::int64_t>(line.source.size());
        expansions += beam.stats.expansions;
        if (line.reference) {
          std::vector<std::string> tokens;
          for (TokenId id : beam.best.seq) {
            if (id != Vocabulary::kEosId) {
              tokens.push_back(model->target_vocab().token(id));
            }
          }
          hyps.push_back(std::move(tokens));
          refs.push_back(*line.reference);
        }
      }

      const double error_pct = counted == 0 ? 0.0 : 100.0 * errors / counted;
      const double ratio =
          src_total == 0 ? 0.0
                         : static_cast<double>(hyp_total) /
                               static_cast<double>(src_total);
      const double bleu = corpus_bleu(hyps, refs);
      const double mean_expansions =
          static_cast<double>(expansions) / static_cast<double>(corpus.size());
      out << n << "," << error_pct << "," << ratio << "," << bleu << ","
          << mean_expansions << "\n";
    }
  } catch (const Error& e) {
    diagnostics << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace exdec

#endif  // EXDEC_CLI_HPP_
