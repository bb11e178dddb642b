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

#ifndef EXDEC_ANALYSIS_HPP_
#define EXDEC_ANALYSIS_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "exdec/core.hpp"

namespace exdec {

/// One decoded run of one sentence, as read back from a decode output line.
/// Token strings include the trailing "</s>" for complete hypotheses.
struct RunResult {
  std::vector<std::string> tokens;
  LogScore score = 0.0;
  bool exact = false;
  SearchFlags flags;
  SearchStats stats;

  int length() const {
    if (!tokens.empty() && tokens.back() == Vocabulary::kEosToken) {
      return static_cast<int>(tokens.size()) - 1;
    }
    return static_cast<int>(tokens.size());
  }

  bool empty_translation() const {
    return tokens.size() == 1 && tokens.front() == Vocabulary::kEosToken;
  }

  /// Hypothesis tokens without the trailing EOS, for surface-level scoring.
  std::vector<std::string> surface_tokens() const {
    std::vector<std::string> out = tokens;
    if (!out.empty() && out.back() == Vocabulary::kEosToken) out.pop_back();
    return out;
  }
};

/// Everything known about one corpus sentence across decode runs.
struct SentenceRecord {
  std::string id;
  std::vector<std::string> source;
  std::optional<std::vector<std::string>> reference;
  std::map<std::string, RunResult> decoded;

  const RunResult* run(const std::string& label) const {
    auto it = decoded.find(label);
    return it == decoded.end() ? nullptr : &it->second;
  }
};

// ---------------------------------------------------------------------------
// Search-error classification
// ---------------------------------------------------------------------------

/// A sentence is a search error when the approximate run scores more than
/// epsilon below the exact run. Sentences where the exact run is itself
/// inexact (cap or timeout) cannot be judged and are excluded and counted.
struct SearchErrorReport {
  /// Aligned with the input records; nullopt marks an excluded sentence.
  std::vector<std::optional<bool>> per_sentence;
  int counted = 0;
  int errors = 0;
  int excluded_non_exact = 0;

  double error_pct() const {
    return counted == 0 ? 0.0 : 100.0 * errors / counted;
  }
};

inline SearchErrorReport classify_search_errors(
    const std::vector<SentenceRecord>& records, const std::string& approx_label,
    const std::string& exact_label, double epsilon) {
  SearchErrorReport report;
  for (const auto& rec : records) {
    const RunResult* approx = rec.run(approx_label);
    const RunResult* exact = rec.run(exact_label);
    if (!approx) {
      throw Error(ErrorCode::kMissingRun,
                  "sentence " + rec.id + " lacks run \"" + approx_label + "\"");
    }
    if (!exact) {
      throw Error(ErrorCode::kMissingRun,
                  "sentence " + rec.id + " lacks run \"" + exact_label + "\"");
    }
    if (!exact->exact) {
      report.per_sentence.push_back(std::nullopt);
      ++report.excluded_non_exact;
      continue;
    }
    const bool is_error = exact->score - approx->score > epsilon;
    report.per_sentence.push_back(is_error);
    ++report.counted;
    if (is_error) ++report.errors;
  }
  if (!records.empty() && report.counted == 0) {
    throw Error(ErrorCode::kNonExactReference,
                "run \"" + exact_label + "\" is inexact on every sentence");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Empty-translation rate
// ---------------------------------------------------------------------------

/// Percentage of sentences whose decoded output is exactly [</s>].
inline double empty_rate(const std::vector<SentenceRecord>& records,
                         const std::string& label) {
  if (records.empty()) return 0.0;
  int empty = 0;
  for (const auto& rec : records) {
    const RunResult* run = rec.run(label);
    if (!run) {
      throw Error(ErrorCode::kMissingRun,
                  "sentence " + rec.id + " lacks run \"" + label + "\"");
    }
    if (run->empty_translation()) ++empty;
  }
  return 100.0 * empty / static_cast<double>(records.size());
}

// ---------------------------------------------------------------------------
// Length-ratio histogram
// ---------------------------------------------------------------------------

enum class RatioDenominator { kSource, kReference };

inline const char* to_string(RatioDenominator d) {
  return d == RatioDenominator::kSource ? "source" : "reference";
}

/// Buckets are [0, 0.1], (0.1, 0.2], ..., (1.9, 2.0] plus a (2.0, inf)
/// overflow bucket.
struct RatioHistogram {
  static constexpr int kBuckets = 21;
  static constexpr double kWidth = 0.1;

  std::vector<std::int64_t> counts = std::vector<std::int64_t>(kBuckets, 0);
  /// Corpus-level ratio: sum of hypothesis lengths over sum of denominators.
  double aggregate_ratio = 0.0;
  int included = 0;
  int excluded_zero_denominator = 0;

  static int bucket_of(double ratio) {
    if (ratio <= kWidth + 1e-9) return 0;
    if (ratio > 2.0 + 1e-9) return kBuckets - 1;
    const int idx = static_cast<int>(std::ceil(ratio / kWidth - 1e-6)) - 1;
    return std::clamp(idx, 0, kBuckets - 1);
  }

  static double bucket_low(int idx) { return idx * kWidth; }
  static std::optional<double> bucket_high(int idx) {
    if (idx == kBuckets - 1) return std::nullopt;  // open-ended overflow
    return (idx + 1) * kWidth;
  }
};

inline RatioHistogram length_ratio_histogram(
    const std::vector<SentenceRecord>& records, const std::string& label,
    RatioDenominator denominator) {
  RatioHistogram hist;
  std::int64_t hyp_total = 0;
  std::int64_t denom_total = 0;
  for (const auto& rec : records) {
    const RunResult* run = rec.run(label);
    if (!run) {
      throw Error(ErrorCode::kMissingRun,
                  "sentence " + rec.id + " lacks run \"" + label + "\"");
    }
    int denom = 0;
    if (denominator == RatioDenominator::kSource) {
      denom = static_cast<int>(rec.source.size());
    } else {
      denom = rec.reference ? static_cast<int>(rec.reference->size()) : 0;
    }
    if (denom <= 0) {
      ++hist.excluded_zero_denominator;
      continue;
    }
    const int hyp_len = run->length();
    ++hist.counts[static_cast<std::size_t>(RatioHistogram::bucket_of(
        static_cast<double>(hyp_len) / static_cast<double>(denom)))];
    ++hist.included;
    hyp_total += hyp_len;
    denom_total += denom;
  }
  hist.aggregate_ratio =
      denom_total == 0 ? 0.0
                       : static_cast<double>(hyp_total) /
                             static_cast<double>(denom_total);
  return hist;
}

// ---------------------------------------------------------------------------
// Per-source-length breakdown
// ---------------------------------------------------------------------------

struct SourceLengthBucket {
  int low = 0;   // inclusive
  int high = 0;  // inclusive
  int sentences = 0;
  double search_error_pct = 0.0;
  double empty_pct = 0.0;  // empty global bests (exact run)
};

/// Buckets sentences by source length into [1, w], [w+1, 2w], ... and reports
/// the per-bucket search-error rate of `approx_label` and the per-bucket rate
/// of empty global bests under `exact_label`. Empty buckets are omitted;
/// sentences excluded by the error classifier are skipped here too.
inline std::vector<SourceLengthBucket> source_length_breakdown(
    const std::vector<SentenceRecord>& records, const std::string& approx_label,
    const std::string& exact_label, int bucket_width, double epsilon) {
  if (bucket_width < 1) {
    throw Error(ErrorCode::kValidationError, "bucket width must be >= 1");
  }
  SearchErrorReport errors =
      classify_search_errors(records, approx_label, exact_label, epsilon);

  std::map<int, SourceLengthBucket> buckets;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!errors.per_sentence[i].has_value()) continue;
    const auto& rec = records[i];
    const int source_len = static_cast<int>(rec.source.size());
    if (source_len < 1) continue;
    const int idx = (source_len - 1) / bucket_width;
    auto& bucket = buckets[idx];
    if (bucket.sentences == 0) {
      bucket.low = idx * bucket_width + 1;
      bucket.high = (idx + 1) * bucket_width;
    }
    ++bucket.sentences;
    if (*errors.per_sentence[i]) bucket.search_error_pct += 1.0;
    if (rec.run(exact_label)->empty_translation()) bucket.empty_pct += 1.0;
  }

  std::vector<SourceLengthBucket> out;
  for (auto& [idx, bucket] : buckets) {
    bucket.search_error_pct *= 100.0 / bucket.sentences;
    bucket.empty_pct *= 100.0 / bucket.sentences;
    out.push_back(bucket);
  }
  return out;
}

// ---------------------------------------------------------------------------
// BLEU
// ---------------------------------------------------------------------------

namespace detail {

inline std::unordered_map<std::string, int> ngram_counts(
    const std::vector<std::string>& tokens, int n) {
  std::unordered_map<std::string, int> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
    std::string key;
    for (int k = 0; k < n; ++k) {
      if (k > 0) key += ' ';
      key += tokens[i + static_cast<std::size_t>(k)];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace detail

/// Corpus-level BLEU with modified (clipped) n-gram precision, geometric mean
/// over the orders with nonzero denominators, and the standard brevity
/// penalty. No smoothing: any included order with a zero numerator collapses
/// the score to 0. Tokens are compared as exact strings; strip EOS first.
inline double corpus_bleu(const std::vector<std::vector<std::string>>& hypotheses,
                          const std::vector<std::vector<std::string>>& references,
                          int max_n = 4) {
  if (hypotheses.size() != references.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "hypothesis and reference corpora differ in size");
  }
  if (hypotheses.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "cannot score an empty corpus");
  }

  std::vector<std::int64_t> matches(static_cast<std::size_t>(max_n), 0);
  std::vector<std::int64_t> totals(static_cast<std::size_t>(max_n), 0);
  std::int64_t hyp_len_total = 0;
  std::int64_t ref_len_total = 0;

  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    hyp_len_total += static_cast<std::int64_t>(hypotheses[s].size());
    ref_len_total += static_cast<std::int64_t>(references[s].size());
    for (int n = 1; n <= max_n; ++n) {
      const auto hyp_counts = detail::ngram_counts(hypotheses[s], n);
      const auto ref_counts = detail::ngram_counts(references[s], n);
      for (const auto& [gram, count] : hyp_counts) {
        totals[static_cast<std::size_t>(n - 1)] += count;
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) {
          matches[static_cast<std::size_t>(n - 1)] += std::min(count, it->second);
        }
      }
    }
  }

  if (hyp_len_total == 0) return 0.0;

  double log_precision_sum = 0.0;
  int included = 0;
  for (int n = 1; n <= max_n; ++n) {
    const auto i = static_cast<std::size_t>(n - 1);
    if (totals[i] == 0) continue;  // order longer than every hypothesis
    if (matches[i] == 0) return 0.0;
    log_precision_sum += std::log(static_cast<double>(matches[i]) /
                                  static_cast<double>(totals[i]));
    ++included;
  }
  if (included == 0) return 0.0;

  const double brevity =
      hyp_len_total < ref_len_total
          ? std::exp(1.0 - static_cast<double>(ref_len_total) /
                               static_cast<double>(hyp_len_total))
          : 1.0;
  return 100.0 * brevity * std::exp(log_precision_sum / included);
}

// ---------------------------------------------------------------------------
// Aggregate report
// ---------------------------------------------------------------------------

struct RunReport {
  std::optional<double> bleu;
  double length_ratio_source = 0.0;
  std::optional<double> length_ratio_reference;
  std::optional<double> search_error_pct;
  double empty_pct = 0.0;
  RatioHistogram histogram_source;
  std::optional<RatioHistogram> histogram_reference;
  std::vector<SourceLengthBucket> source_length_breakdown;
  int excluded_non_exact = 0;
  double mean_expansions = 0.0;
  double mean_evaluations = 0.0;
  double mean_gamma_updates = 0.0;
};

struct Report {
  int sentences = 0;
  std::string exact_label;  // empty when no exact reference run exists
  std::map<std::string, RunReport> runs;
};

/// Picks the run usable as the exactness reference: the label with the most
/// exact-flagged outcomes (at least one), preferring the label literally
/// named "exact", then earlier labels, on ties. Sentences where the chosen
/// run is inexact are excluded per classifier rules rather than disqualifying
/// the label outright.
inline std::string detect_exact_label(const std::vector<SentenceRecord>& records,
                                      const std::vector<std::string>& labels) {
  std::string best;
  int best_count = 0;
  for (const auto& label : labels) {
    int count = 0;
    for (const auto& rec : records) {
      const RunResult* run = rec.run(label);
      if (run && run->exact) ++count;
    }
    const bool wins =
        count > best_count || (count == best_count && count > 0 &&
                               label == "exact" && best != "exact");
    if (wins) {
      best = label;
      best_count = count;
    }
  }
  return best;
}

/// Composes the measurement suite into one report: BLEU, corpus length
/// ratios, search-error and empty-translation rates, histograms, and the
/// per-source-length breakdown, per run label.
inline Report aggregate_report(const std::vector<SentenceRecord>& records,
                               const std::vector<std::string>& labels,
                               double epsilon,
                               const std::string& exact_label_hint = "",
                               int breakdown_bucket_width = 10) {
  if (records.empty() || labels.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "nothing to analyze");
  }
  Report report;
  report.sentences = static_cast<int>(records.size());
  report.exact_label = exact_label_hint.empty()
                           ? detect_exact_label(records, labels)
                           : exact_label_hint;

  const bool have_references =
      std::any_of(records.begin(), records.end(),
                  [](const SentenceRecord& r) { return r.reference.has_value(); });

  for (const auto& label : labels) {
    RunReport run;

    if (have_references) {
      std::vector<std::vector<std::string>> hyps;
      std::vector<std::vector<std::string>> refs;
      for (const auto& rec : records) {
        if (!rec.reference) continue;
        const RunResult* r = rec.run(label);
        if (!r) {
          throw Error(ErrorCode::kMissingRun,
                      "sentence " + rec.id + " lacks run \"" + label + "\"");
        }
        hyps.push_back(r->surface_tokens());
        refs.push_back(*rec.reference);
      }
      run.bleu = corpus_bleu(hyps, refs);
    }

    run.histogram_source =
        length_ratio_histogram(records, label, RatioDenominator::kSource);
    run.length_ratio_source = run.histogram_source.aggregate_ratio;
    if (have_references) {
      run.histogram_reference =
          length_ratio_histogram(records, label, RatioDenominator::kReference);
      run.length_ratio_reference = run.histogram_reference->aggregate_ratio;
    }
    run.empty_pct = empty_rate(records, label);

    if (!report.exact_label.empty()) {
      SearchErrorReport errors =
          classify_search_errors(records, label, report.exact_label, epsilon);
      run.search_error_pct = errors.error_pct();
      run.excluded_non_exact = errors.excluded_non_exact;
      run.source_length_breakdown = source_length_breakdown(
          records, label, report.exact_label, breakdown_bucket_width, epsilon);
    }

    double expansions = 0.0;
    double evaluations = 0.0;
    double gamma_updates = 0.0;
    for (const auto& rec : records) {
      const RunResult* r = rec.run(label);
      if (!r) {
        throw Error(ErrorCode::kMissingRun,
                    "sentence " + rec.id + " lacks run \"" + label + "\"");
      }
      expansions += static_cast<double>(r->stats.expansions);
      evaluations += static_cast<double>(r->stats.evaluations);
      gamma_updates += static_cast<double>(r->stats.gamma_updates);
    }
    run.mean_expansions = expansions / report.sentences;
    run.mean_evaluations = evaluations / report.sentences;
    run.mean_gamma_updates = gamma_updates / report.sentences;

    report.runs.emplace(label, std::move(run));
  }
  return report;
}

}  // namespace exdec

#endif  // EXDEC_ANALYSIS_HPP_
