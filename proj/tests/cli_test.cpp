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

#include "exdec/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "support/fixtures.hpp"

namespace exdec {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("exdec_cli_" + std::string(::testing::UnitTest::GetInstance()
                                           ->current_test_info()
                                           ->name()));
    fs::create_directories(dir_);
    model_path_ = write("m1.json", testing::m1_json());
    corpus_path_ = write("corpus.jsonl",
                         R"({"id": "s1", "source": "x y", "reference": "a"})"
                         "\n");
  }

  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream out(path);
    out << content;
    return path.string();
  }

  std::string read(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream oss;
    oss << in.rdbuf();
    return oss.str();
  }

  std::string path(const std::string& name) { return (dir_ / name).string(); }

  fs::path dir_;
  std::string model_path_;
  std::string corpus_path_;
};

TEST_F(CliTest, CorpusParsesIdsSourcesAndReferences) {
  const auto corpus = load_corpus(corpus_path_);
  ASSERT_EQ(corpus.size(), 1u);
  EXPECT_EQ(corpus[0].id, "s1");
  EXPECT_EQ(corpus[0].source, (std::vector<std::string>{"x", "y"}));
  ASSERT_TRUE(corpus[0].reference.has_value());
  EXPECT_EQ(*corpus[0].reference, (std::vector<std::string>{"a"}));
}

TEST_F(CliTest, CorpusRejectsDuplicateIds) {
  const auto dup = write("dup.jsonl",
                         "{\"id\": \"s1\", \"source\": \"x\"}\n"
                         "{\"id\": \"s1\", \"source\": \"y\"}\n");
  EXPECT_THROW(load_corpus(dup), Error);
}

TEST_F(CliTest, SearchSpecsParse) {
  EXPECT_EQ(parse_search_spec("greedy").beam_size, 1);
  EXPECT_EQ(parse_search_spec("beam:4").beam_size, 4);
  EXPECT_EQ(parse_search_spec("exact:2").beam_size, 2);
  EXPECT_FALSE(parse_search_spec("exact").beam_size.has_value());
  EXPECT_DOUBLE_EQ(parse_search_spec("exact-minlen:0.5").min_ratio, 0.5);
  EXPECT_EQ(parse_search_spec("exact-fixedlen:beam").mode,
            SearchSpec::Mode::kExactFixedLenBeam);
  EXPECT_EQ(parse_search_spec("exact-fixedlen:ref").mode,
            SearchSpec::Mode::kExactFixedLenRef);
  EXPECT_EQ(parse_search_spec("exact-fixedlen:3").fixed_len, 3);
  EXPECT_EQ(parse_search_spec("exact-lennorm").mode,
            SearchSpec::Mode::kExactLengthNorm);
  EXPECT_EQ(parse_search_spec("brute:5").brute_max_len, 5);

  EXPECT_THROW(parse_search_spec("beam:0"), Error);
  EXPECT_THROW(parse_search_spec("beam"), Error);
  EXPECT_THROW(parse_search_spec("warp"), Error);
  EXPECT_THROW(parse_search_spec("exact-minlen:-1"), Error);
}

TEST_F(CliTest, DecodeExactTwoEmitsTheEmptyTranslation) {
  DecodeOptions options;
  options.model_path = model_path_;
  options.corpus_path = corpus_path_;
  options.search_spec = "exact:2";
  options.out_path = path("exact.jsonl");
  std::ostringstream diag;
  ASSERT_EQ(cmd_decode(options, diag), kExitOk) << diag.str();

  const auto lines = read(options.out_path);
  json line = json::parse(lines.substr(0, lines.find('\n')));
  EXPECT_EQ(line["id"], "s1");
  EXPECT_EQ(line["search"], "exact:2");
  EXPECT_EQ(line["hypothesis"], json::array({"</s>"}));
  EXPECT_NEAR(line["score"].get<double>(), -0.9163, 5e-5);
  EXPECT_TRUE(line["exact"].get<bool>());
  EXPECT_TRUE(line.contains("stats"));
  EXPECT_FALSE(line["stats"].contains("wall_time_secs"));
}

TEST_F(CliTest, DecodeBeamZeroIsAUsageError) {
  DecodeOptions options;
  options.model_path = model_path_;
  options.corpus_path = corpus_path_;
  options.search_spec = "beam:0";
  options.out_path = path("beam0.jsonl");
  std::ostringstream diag;
  EXPECT_EQ(cmd_decode(options, diag), kExitUsage);
}

TEST_F(CliTest, FixedLenRefWithoutReferenceIsAnInlineError) {
  const auto corpus = write("noref.jsonl",
                            "{\"id\": \"s1\", \"source\": \"x\"}\n");
  DecodeOptions options;
  options.model_path = model_path_;
  options.corpus_path = corpus;
  options.search_spec = "exact-fixedlen:ref";
  options.out_path = path("fixed.jsonl");
  std::ostringstream diag;
  ASSERT_EQ(cmd_decode(options, diag), kExitOk);
  json line = json::parse(read(options.out_path));
  EXPECT_EQ(line["id"], "s1");
  EXPECT_TRUE(line.contains("error"));
  EXPECT_FALSE(line.contains("hypothesis"));
}

TEST_F(CliTest, EveryCorpusLineAppearsExactlyOnce) {
  const auto corpus = write("three.jsonl",
                            "{\"id\": \"s1\", \"source\": \"x\"}\n"
                            "{\"id\": \"s2\", \"source\": \"x\"}\n"
                            "{\"id\": \"s3\", \"source\": \"x\"}\n");
  DecodeOptions options;
  options.model_path = model_path_;
  options.corpus_path = corpus;
  options.search_spec = "greedy";
  options.out_path = path("three_out.jsonl");
  std::ostringstream diag;
  ASSERT_EQ(cmd_decode(options, diag), kExitOk);
  std::istringstream lines(read(options.out_path));
  std::string line;
  std::vector<std::string> ids;
  while (std::getline(lines, line)) {
    ids.push_back(json::parse(line)["id"].get<std::string>());
  }
  EXPECT_EQ(ids, (std::vector<std::string>{"s1", "s2", "s3"}));
}

TEST_F(CliTest, AnalyzeReportsTheGreedySearchError) {
  DecodeOptions greedy;
  greedy.model_path = model_path_;
  greedy.corpus_path = corpus_path_;
  greedy.search_spec = "greedy";
  greedy.out_path = path("greedy.jsonl");
  DecodeOptions exact;
  exact.model_path = model_path_;
  exact.corpus_path = corpus_path_;
  exact.search_spec = "exact:2";
  exact.out_path = path("exact.jsonl");
  std::ostringstream diag;
  ASSERT_EQ(cmd_decode(greedy, diag), kExitOk);
  ASSERT_EQ(cmd_decode(exact, diag), kExitOk);

  AnalyzeOptions analyze;
  analyze.corpus_path = corpus_path_;
  analyze.labeled_runs = {"greedy=" + greedy.out_path,
                          "exact=" + exact.out_path};
  analyze.out_path = path("report.json");
  ASSERT_EQ(cmd_analyze(analyze, diag), kExitOk) << diag.str();

  json report = json::parse(read(analyze.out_path));
  EXPECT_EQ(report["exact_label"], "exact");
  EXPECT_DOUBLE_EQ(report["runs"]["greedy"]["search_error_pct"].get<double>(),
                   100.0);
  EXPECT_DOUBLE_EQ(report["runs"]["exact"]["empty_pct"].get<double>(), 100.0);
  EXPECT_TRUE(fs::exists(path("report_hist_greedy_source.csv")));
  EXPECT_TRUE(fs::exists(path("report_hist_exact_reference.csv")));
}

TEST_F(CliTest, AnalyzeSingleExactRunAgainstItself) {
  DecodeOptions exact;
  exact.model_path = model_path_;
  exact.corpus_path = corpus_path_;
  exact.search_spec = "exact:2";
  exact.out_path = path("exact.jsonl");
  std::ostringstream diag;
  ASSERT_EQ(cmd_decode(exact, diag), kExitOk);

  AnalyzeOptions analyze;
  analyze.corpus_path = corpus_path_;
  analyze.labeled_runs = {"exact=" + exact.out_path};
  analyze.out_path = path("solo.json");
  ASSERT_EQ(cmd_analyze(analyze, diag), kExitOk);
  json report = json::parse(read(analyze.out_path));
  EXPECT_DOUBLE_EQ(report["runs"]["exact"]["search_error_pct"].get<double>(),
                   0.0);
}

TEST_F(CliTest, AnalyzeMismatchedIdsFails) {
  const auto other = write("other.jsonl",
                           "{\"id\": \"zzz\", \"source\": \"x\"}\n");
  DecodeOptions decode;
  decode.model_path = model_path_;
  decode.corpus_path = other;
  decode.search_spec = "greedy";
  decode.out_path = path("other_out.jsonl");
  std::ostringstream diag;
  ASSERT_EQ(cmd_decode(decode, diag), kExitOk);

  AnalyzeOptions analyze;
  analyze.corpus_path = corpus_path_;  // ids do not match the decode output
  analyze.labeled_runs = {"greedy=" + decode.out_path};
  analyze.out_path = path("mismatch.json");
  EXPECT_EQ(cmd_analyze(analyze, diag), kExitData);
}

TEST_F(CliTest, SweepEmitsOneRowPerBeamSizeSortedAscending) {
  SweepOptions sweep;
  sweep.model_path = model_path_;
  sweep.corpus_path = corpus_path_;
  sweep.beam_sizes = {2, 1};  // canonical ordering is ascending
  sweep.out_path = path("sweep.csv");
  std::ostringstream diag;
  ASSERT_EQ(cmd_sweep(sweep, diag), kExitOk) << diag.str();

  std::istringstream csv(read(sweep.out_path));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "n,search_error_pct,length_ratio,bleu,mean_expansions");
  std::string row1;
  std::string row2;
  ASSERT_TRUE(static_cast<bool>(std::getline(csv, row1)));
  ASSERT_TRUE(static_cast<bool>(std::getline(csv, row2)));
  EXPECT_EQ(row1.substr(0, 2), "1,");
  EXPECT_EQ(row2.substr(0, 2), "2,");
  // Greedy misses the empty translation (100% errors); beam-2 finds it.
  EXPECT_NE(row1.find(",100,"), std::string::npos);
  EXPECT_NE(row2.find(",0,"), std::string::npos);
}

TEST_F(CliTest, SweepWithoutSizesIsAUsageError) {
  SweepOptions sweep;
  sweep.model_path = model_path_;
  sweep.corpus_path = corpus_path_;
  sweep.out_path = path("sweep.csv");
  std::ostringstream diag;
  EXPECT_EQ(cmd_sweep(sweep, diag), kExitUsage);
}

TEST_F(CliTest, DecodeAndAnalyzeAreByteDeterministic) {
  for (const std::string spec : {"greedy", "exact:2", "exact-lennorm"}) {
    DecodeOptions first;
    first.model_path = model_path_;
    first.corpus_path = corpus_path_;
    first.search_spec = spec;
    first.out_path = path("det_a.jsonl");
    DecodeOptions second = first;
    second.out_path = path("det_b.jsonl");
    std::ostringstream diag;
    ASSERT_EQ(cmd_decode(first, diag), kExitOk);
    ASSERT_EQ(cmd_decode(second, diag), kExitOk);
    EXPECT_EQ(read(first.out_path), read(second.out_path)) << spec;
  }
}

TEST_F(CliTest, MinLenDecodeExcludesTheEmptyTranslation) {
  DecodeOptions options;
  options.model_path = model_path_;
  options.corpus_path = corpus_path_;  // source length 2
  options.search_spec = "exact-minlen:0.25";
  options.out_path = path("minlen.jsonl");
  std::ostringstream diag;
  ASSERT_EQ(cmd_decode(options, diag), kExitOk);
  json line = json::parse(read(options.out_path));
  // ceil(0.25 * 2) = 1: the empty translation is excluded.
  EXPECT_EQ(line["hypothesis"], json::array({"a", "</s>"}));
  EXPECT_NEAR(line["score"].get<double>(), -1.2040, 5e-5);
}

TEST_F(CliTest, BruteDecodeMatchesExact) {
  DecodeOptions options;
  options.model_path = model_path_;
  options.corpus_path = corpus_path_;
  options.search_spec = "brute:6";
  options.out_path = path("brute.jsonl");
  std::ostringstream diag;
  ASSERT_EQ(cmd_decode(options, diag), kExitOk);
  json line = json::parse(read(options.out_path));
  EXPECT_EQ(line["hypothesis"], json::array({"</s>"}));
  EXPECT_TRUE(line["exact"].get<bool>());
}

}  // namespace
}  // namespace exdec
