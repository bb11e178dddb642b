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

#ifndef EXDEC_CORE_HPP_
#define EXDEC_CORE_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace exdec {

using TokenId = std::int32_t;

/// A target-side sequence as token ids. A sequence is "complete" when it ends
/// with the end-of-sentence token; the hypothesis length excludes that token,
/// so the empty translation [</s>] has length 0.
using TokenSequence = std::vector<TokenId>;

/// Natural-log probability. -inf marks impossible events.
using LogScore = double;

inline constexpr LogScore kNegInf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ErrorCode {
  kParseError,
  kValidationError,
  kUnknownSourceToken,
  kAdvancePastEos,
  kImpossibleToken,
  kSpaceTooLarge,
  kNoFeasibleHypothesis,
  kMissingRun,
  kNonExactReference,
  kLengthMismatch,
  kEmptyCorpus,
  kIdMismatch,
  kEmptyTable,
  kBoundMismatch,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError: return "PARSE_ERROR";
    case ErrorCode::kValidationError: return "VALIDATION_ERROR";
    case ErrorCode::kUnknownSourceToken: return "UNKNOWN_SOURCE_TOKEN";
    case ErrorCode::kAdvancePastEos: return "ADVANCE_PAST_EOS";
    case ErrorCode::kImpossibleToken: return "IMPOSSIBLE_TOKEN";
    case ErrorCode::kSpaceTooLarge: return "SPACE_TOO_LARGE";
    case ErrorCode::kNoFeasibleHypothesis: return "NO_FEASIBLE_HYPOTHESIS";
    case ErrorCode::kMissingRun: return "MISSING_RUN";
    case ErrorCode::kNonExactReference: return "NON_EXACT_REFERENCE";
    case ErrorCode::kLengthMismatch: return "LENGTH_MISMATCH";
    case ErrorCode::kEmptyCorpus: return "EMPTY_CORPUS";
    case ErrorCode::kIdMismatch: return "ID_MISMATCH";
    case ErrorCode::kEmptyTable: return "EMPTY_TABLE";
    case ErrorCode::kBoundMismatch: return "BOUND_MISMATCH";
  }
  return "UNKNOWN_ERROR";
}

/// Library error with a machine-readable code and a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

/// Token inventory with the end-of-sentence token stored first (id 0) so that
/// EOS-first iteration over token ids is the natural index order.
class Vocabulary {
 public:
  static constexpr TokenId kEosId = 0;
  static constexpr std::string_view kEosToken = "</s>";

  explicit Vocabulary(std::vector<std::string> tokens)
      : tokens_(std::move(tokens)) {
    if (tokens_.size() < 2) {
      throw Error(ErrorCode::kValidationError,
                  "vocabulary needs at least EOS and one content token");
    }
    if (tokens_.front() != kEosToken) {
      throw Error(ErrorCode::kValidationError,
                  "vocabulary must store \"</s>\" first");
    }
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (tokens_[i].empty()) {
        throw Error(ErrorCode::kValidationError, "empty token in vocabulary");
      }
      auto [it, inserted] =
          index_.emplace(tokens_[i], static_cast<TokenId>(i));
      if (!inserted) {
        throw Error(ErrorCode::kValidationError,
                    "duplicate token \"" + tokens_[i] + "\"");
      }
    }
  }

  int size() const { return static_cast<int>(tokens_.size()); }
  TokenId eos_id() const { return kEosId; }

  const std::string& token(TokenId id) const {
    return tokens_.at(static_cast<std::size_t>(id));
  }

  std::optional<TokenId> find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

// ---------------------------------------------------------------------------
// Hypotheses
// ---------------------------------------------------------------------------

/// True when the sequence ends with EOS and contains it nowhere else.
inline bool is_complete(const TokenSequence& seq) {
  if (seq.empty() || seq.back() != Vocabulary::kEosId) return false;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    if (seq[i] == Vocabulary::kEosId) return false;
  }
  return true;
}

/// Hypothesis length: tokens excluding the trailing EOS. [</s>] has length 0.
inline int hypothesis_length(const TokenSequence& seq) {
  if (!seq.empty() && seq.back() == Vocabulary::kEosId) {
    return static_cast<int>(seq.size()) - 1;
  }
  return static_cast<int>(seq.size());
}

/// A (partial or complete) target sequence with its accumulated log-score.
struct Hypothesis {
  TokenSequence seq;
  LogScore score = 0.0;

  bool complete() const { return is_complete(seq); }
  int length() const { return hypothesis_length(seq); }
};

/// Three-way comparison defining the global ranking of hypotheses: score
/// descending, then sequence length ascending, then lexicographic token-id
/// ascending. Negative means `a` ranks before `b`. This is a strict total
/// order on distinct sequences, used wherever ties must break
/// deterministically (beam cuts, argmax selections).
inline int compare_hypotheses(const Hypothesis& a, const Hypothesis& b) {
  if (a.score != b.score) return a.score > b.score ? -1 : 1;
  if (a.seq.size() != b.seq.size()) return a.seq.size() < b.seq.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.seq.size(); ++i) {
    if (a.seq[i] != b.seq[i]) return a.seq[i] < b.seq[i] ? -1 : 1;
  }
  return 0;
}

inline bool hypothesis_precedes(const Hypothesis& a, const Hypothesis& b) {
  return compare_hypotheses(a, b) < 0;
}

// ---------------------------------------------------------------------------
// Search bookkeeping
// ---------------------------------------------------------------------------

/// Counters for one search invocation. `expansions` counts decoder-state
/// advance operations, `evaluations` counts next-token distribution queries.
/// For the exact searches the counters cover the branch-and-bound phase; the
/// bootstrap beam run reports through its own outcome.
struct SearchStats {
  std::int64_t expansions = 0;
  std::int64_t evaluations = 0;
  std::int64_t gamma_updates = 0;
  int max_depth = 0;
  double wall_time_secs = 0.0;
};

struct SearchFlags {
  bool cap_hit = false;
  bool timeout = false;
  bool fallback_to_incumbent = false;

  bool any() const { return cap_hit || timeout || fallback_to_incumbent; }
};

/// Result of a search: the best hypothesis found, whether that result is
/// certified optimal, and what happened along the way.
struct SearchOutcome {
  Hypothesis best;
  bool exact = false;
  SearchFlags flags;
  SearchStats stats;
};

// ---------------------------------------------------------------------------
// Per-length bounds
// ---------------------------------------------------------------------------

enum class BoundInit {
  kNegInf,         // all gamma_k start at -inf; incumbents are per-length optima
  kBeamLengthNorm  // gamma_k derived from a beam hypothesis' normalized score
};

struct LengthEntry {
  LogScore gamma = kNegInf;
  std::optional<Hypothesis> incumbent;
};

/// Per-length lower bounds gamma_k with incumbents, for exact search under
/// length-dependent objectives. gamma_k never decreases; a stored incumbent
/// always has length exactly k and raw score equal to gamma_k.
class LengthTable {
 public:
  LengthTable(int k_max, BoundInit init)
      : k_max_(k_max), init_(init),
        entries_(static_cast<std::size_t>(k_max) + 1) {
    if (k_max < 0) {
      throw Error(ErrorCode::kValidationError, "k_max must be >= 0");
    }
  }

  int k_max() const { return k_max_; }
  BoundInit init() const { return init_; }

  const LengthEntry& entry(int k) const {
    return entries_.at(static_cast<std::size_t>(k));
  }

  LogScore gamma(int k) const { return entry(k).gamma; }

  /// Raises gamma_k without storing an incumbent (bound initialization).
  void set_bound(int k, LogScore gamma) {
    auto& e = entries_.at(static_cast<std::size_t>(k));
    if (gamma > e.gamma) e.gamma = gamma;
  }

  /// Installs `hyp` as the length-k incumbent if it strictly improves
  /// gamma_k. Returns true on improvement.
  bool offer(const Hypothesis& hyp) {
    const int k = hyp.length();
    if (k < 0 || k > k_max_) return false;
    auto& e = entries_.at(static_cast<std::size_t>(k));
    if (hyp.score > e.gamma) {
      e.gamma = hyp.score;
      e.incumbent = hyp;
      return true;
    }
    return false;
  }

  /// Seeds the incumbent slot at `hyp.length()` when the score matches the
  /// already-installed bound (the bound-deriving hypothesis itself).
  void seed_incumbent(const Hypothesis& hyp) {
    const int k = hyp.length();
    if (k < 0 || k > k_max_) return;
    auto& e = entries_.at(static_cast<std::size_t>(k));
    if (!e.incumbent && hyp.score >= e.gamma) {
      e.gamma = hyp.score;
      e.incumbent = hyp;
    }
  }

  /// Smallest bound over lengths in [k_lo, k_max]; +inf when the range is
  /// empty, so prefixes past k_max are never admissible.
  LogScore min_bound_from(int k_lo) const {
    LogScore m = std::numeric_limits<double>::infinity();
    for (int k = std::max(k_lo, 0); k <= k_max_; ++k) {
      m = std::min(m, entries_[static_cast<std::size_t>(k)].gamma);
    }
    return m;
  }

 private:
  int k_max_;
  BoundInit init_;
  std::vector<LengthEntry> entries_;
};

}  // namespace exdec

#endif  // EXDEC_CORE_HPP_
