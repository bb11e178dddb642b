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

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "exdec/cli.hpp"

namespace {

std::vector<std::string> split_commas(const std::vector<std::string>& values) {
  std::vector<std::string> out;
  for (const auto& value : values) {
    std::size_t start = 0;
    while (start <= value.size()) {
      const auto comma = value.find(',', start);
      const std::string piece = value.substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!piece.empty()) out.push_back(piece);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoding engine and search-error analysis toolkit for "
               "autoregressive sequence models"};
  app.require_subcommand(1);

  // decode
  exdec::DecodeOptions decode;
  double decode_epsilon = 1e-6;
  std::optional<int> beam_size;
  std::optional<double> max_len_factor;
  std::optional<double> timeout_secs;
  std::optional<double> min_len_ratio;
  std::optional<int> fixed_len;
  auto* decode_cmd = app.add_subcommand("decode", "Decode a corpus");
  decode_cmd->add_option("--model", decode.model_path, "Model JSON file")
      ->required();
  decode_cmd->add_option("--corpus", decode.corpus_path, "Corpus JSONL file")
      ->required();
  decode_cmd
      ->add_option("--search", decode.search_spec,
                   "greedy | beam:N | exact[:N] | exact-minlen[:R] | "
                   "exact-fixedlen:(beam|ref|L) | exact-lennorm | brute:L")
      ->required();
  decode_cmd->add_option("--out", decode.out_path, "Output JSONL file")
      ->required();
  decode_cmd->add_option("--beam-size", beam_size,
                         "Beam size when the search spec leaves it open");
  decode_cmd->add_option("--epsilon", decode_epsilon,
                         "Score-comparison tolerance");
  decode_cmd->add_option("--max-len-factor", max_len_factor,
                         "Length cap as a factor of the source length");
  decode_cmd->add_option("--timeout-secs", timeout_secs,
                         "Per-sentence time budget");
  decode_cmd->add_option("--min-len-ratio", min_len_ratio,
                         "Minimum-length ratio for exact-minlen");
  decode_cmd->add_option("--fixed-len", fixed_len,
                         "Length for exact-fixedlen");

  // analyze
  exdec::AnalyzeOptions analyze;
  std::vector<std::string> label_args;
  auto* analyze_cmd =
      app.add_subcommand("analyze", "Aggregate decode outputs into a report");
  analyze_cmd->add_option("--corpus", analyze.corpus_path, "Corpus JSONL file")
      ->required();
  analyze_cmd
      ->add_option("--labels", label_args,
                   "label=decode-output.jsonl (repeat or comma-separate)")
      ->required();
  analyze_cmd->add_option("--out", analyze.out_path, "Report JSON file")
      ->required();
  analyze_cmd->add_option("--epsilon", analyze.epsilon,
                          "Search-error tolerance");

  // sweep
  exdec::SweepOptions sweep;
  std::vector<std::string> size_args;
  std::optional<int> sweep_beam_size;
  std::optional<double> sweep_max_len_factor;
  std::optional<double> sweep_timeout;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Beam-size sweep against one exact run");
  sweep_cmd->add_option("--model", sweep.model_path, "Model JSON file")
      ->required();
  sweep_cmd->add_option("--corpus", sweep.corpus_path, "Corpus JSONL file")
      ->required();
  sweep_cmd
      ->add_option("--beam-sizes", size_args,
                   "Beam sizes to sweep (repeat or comma-separate)")
      ->required();
  sweep_cmd->add_option("--out", sweep.out_path, "Output CSV file")->required();
  sweep_cmd->add_option("--beam-size", sweep_beam_size,
                        "Bootstrap beam size for the exact run");
  sweep_cmd->add_option("--epsilon", sweep.epsilon, "Search-error tolerance");
  sweep_cmd->add_option("--max-len-factor", sweep_max_len_factor,
                        "Length cap as a factor of the source length");
  sweep_cmd->add_option("--timeout-secs", sweep_timeout,
                        "Per-sentence time budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exdec::kExitOk : exdec::kExitUsage;
  }

  if (decode_cmd->parsed()) {
    decode.epsilon = decode_epsilon;
    decode.beam_size = beam_size;
    decode.max_len_factor = max_len_factor;
    decode.timeout_secs = timeout_secs;
    decode.min_len_ratio = min_len_ratio;
    decode.fixed_len = fixed_len;
    return exdec::cmd_decode(decode, std::cerr);
  }

  if (analyze_cmd->parsed()) {
    analyze.labeled_runs = split_commas(label_args);
    return exdec::cmd_analyze(analyze, std::cerr);
  }

  if (sweep_cmd->parsed()) {
    for (const auto& piece : split_commas(size_args)) {
      auto n = exdec::detail::parse_int(piece);
      if (!n) {
        std::cerr << "bad beam size \"" << piece << "\"\n";
        return exdec::kExitUsage;
      }
      sweep.beam_sizes.push_back(*n);
    }
    sweep.exact_beam_size = sweep_beam_size;
    sweep.max_len_factor = sweep_max_len_factor;
    sweep.timeout_secs = sweep_timeout;
    return exdec::cmd_sweep(sweep, std::cerr);
  }

  return exdec::kExitUsage;
}
