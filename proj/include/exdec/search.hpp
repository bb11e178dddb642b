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

#ifndef EXDEC_SEARCH_HPP_
#define EXDEC_SEARCH_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "exdec/core.hpp"
#include "exdec/model.hpp"

namespace exdec {

/// Order in which DFS visits the children of a prefix. EOS first is the
/// default: completing early updates the incumbent early, which tightens
/// pruning in the rest of the traversal. The ordering never affects which
/// hypothesis is returned, only how much work finding it takes.
enum class ChildOrder {
  kEosFirstDescending,  // </s>, then content tokens by descending logprob
  kEosFirstAscending,   // </s>, then content tokens by ascending logprob
  kEosLastDescending,   // content tokens by descending logprob, then </s>
};

struct SearchConfig {
  int beam_size = 1;
  /// Maximum hypothesis length; defaults to max(2*I, I + 10) per sentence.
  std::optional<int> max_len_cap;
  std::optional<double> timeout_secs;
  /// Score-comparison tolerance for downstream error classification.
  double epsilon = 1e-6;
  ChildOrder child_order = ChildOrder::kEosFirstDescending;

  void validate() const {
    if (beam_size < 1) {
      throw Error(ErrorCode::kValidationError, "beam size must be >= 1");
    }
    if (max_len_cap && *max_len_cap < 1) {
      throw Error(ErrorCode::kValidationError, "max_len_cap must be >= 1");
    }
    if (!(epsilon > 0.0)) {
      throw Error(ErrorCode::kValidationError, "epsilon must be > 0");
    }
  }

  int resolve_cap(int source_len) const {
    if (max_len_cap) return *max_len_cap;
    return std::max(2 * source_len, source_len + 10);
  }
};

/// Restriction of the feasible hypothesis lengths.
struct LengthConstraint {
  enum class Kind { kNone, kMinRatio, kMinAbs, kExact };

  Kind kind = Kind::kNone;
  double ratio = 0.0;  // kMinRatio
  int length = 0;      // kMinAbs / kExact

  static LengthConstraint none() { return {}; }
  static LengthConstraint min_ratio(double r) {
    if (!(r > 0.0)) {
      throw Error(ErrorCode::kValidationError, "min-length ratio must be > 0");
    }
    return {Kind::kMinRatio, r, 0};
  }
  static LengthConstraint min_abs(int len) {
    if (len < 0) {
      throw Error(ErrorCode::kValidationError, "min length must be >= 0");
    }
    return {Kind::kMinAbs, 0.0, len};
  }
  static LengthConstraint exact(int len) {
    if (len < 0) {
      throw Error(ErrorCode::kValidationError, "exact length must be >= 0");
    }
    return {Kind::kExact, 0.0, len};
  }

  /// Minimum admissible hypothesis length for a source of length I.
  /// "longer than r times the source length" resolves to ceil(r * I).
  int min_length(int source_len) const {
    switch (kind) {
      case Kind::kNone: return 0;
      case Kind::kMinRatio:
        return static_cast<int>(
            std::ceil(ratio * static_cast<double>(source_len) - 1e-12));
      case Kind::kMinAbs: return length;
      case Kind::kExact: return length;
    }
    return 0;
  }

  bool is_exact_length() const { return kind == Kind::kExact; }

  bool satisfied_by(int hyp_len, int source_len) const {
    if (is_exact_length()) return hyp_len == length;
    return hyp_len >= min_length(source_len);
  }
};

/// How a complete hypothesis is valued when picking the final output.
struct LengthObjective {
  enum class Kind { kRaw, kLengthNorm, kWordReward };

  Kind kind = Kind::kRaw;
  double reward = 0.0;  // per-token bonus in nats (kWordReward)

  static LengthObjective raw() { return {}; }
  static LengthObjective length_norm() { return {Kind::kLengthNorm, 0.0}; }
  static LengthObjective word_reward(double lambda) {
    if (!(lambda > 0.0)) {
      throw Error(ErrorCode::kValidationError, "word reward must be > 0");
    }
    return {Kind::kWordReward, lambda};
  }

  /// Objective value of a length-k hypothesis with raw score p. Lengths are
  /// shifted by one so the empty translation (k = 0) stays well-defined.
  double value(LogScore raw_score, int k) const {
    switch (kind) {
      case Kind::kRaw: return raw_score;
      case Kind::kLengthNorm: return raw_score / static_cast<double>(k + 1);
      case Kind::kWordReward:
        return raw_score + reward * static_cast<double>(k + 1);
    }
    return raw_score;
  }
};

namespace detail {

class Deadline {
 public:
  explicit Deadline(std::optional<double> timeout_secs) {
    if (timeout_secs) {
      deadline_ = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(*timeout_secs));
    }
  }

  static Deadline at(std::optional<std::chrono::steady_clock::time_point> tp) {
    Deadline d(std::nullopt);
    d.deadline_ = tp;
    return d;
  }

  std::optional<std::chrono::steady_clock::time_point> time_point() const {
    return deadline_;
  }

  bool expired() const {
    return deadline_ && std::chrono::steady_clock::now() >= *deadline_;
  }

 private:
  std::optional<std::chrono::steady_clock::time_point> deadline_;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Content-token visit order for one expansion step.
inline std::vector<TokenId> content_order(const std::vector<LogScore>& logprobs,
                                          ChildOrder order) {
  std::vector<TokenId> ids;
  ids.reserve(logprobs.size() - 1);
  for (std::size_t w = 1; w < logprobs.size(); ++w) {
    if (logprobs[w] != kNegInf) ids.push_back(static_cast<TokenId>(w));
  }
  const bool ascending = order == ChildOrder::kEosFirstAscending;
  std::stable_sort(ids.begin(), ids.end(), [&](TokenId a, TokenId b) {
    const LogScore la = logprobs[static_cast<std::size_t>(a)];
    const LogScore lb = logprobs[static_cast<std::size_t>(b)];
    if (la != lb) return ascending ? la < lb : la > lb;
    return a < b;
  });
  return ids;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Beam search
// ---------------------------------------------------------------------------

/// Time-synchronous beam search. Complete hypotheses are carried forward
/// unexpanded; each iteration keeps the min(n, |candidates|) best under the
/// global hypothesis order; the loop stops as soon as the top-ranked active
/// hypothesis is complete. If `max_len_cap` iterations elapse first, the best
/// complete hypothesis seen anywhere is returned (or the best partial when
/// none completed) with CAP_HIT. Greedy decoding is beam size 1. Beam outcomes
/// are never marked exact: the beam cannot certify optimality.
inline SearchOutcome beam_search(const SequenceModel& model,
                                 const std::vector<std::string>& source,
                                 const SearchConfig& config) {
  config.validate();
  const detail::Stopwatch watch;
  const detail::Deadline deadline(config.timeout_secs);
  const int cap = config.resolve_cap(static_cast<int>(source.size()));
  const std::size_t n = static_cast<std::size_t>(config.beam_size);

  SearchOutcome out;
  out.exact = false;

  struct BeamItem {
    Hypothesis hyp;
    std::optional<DecoderState> state;  // partials only
  };

  std::vector<BeamItem> beam;
  beam.push_back(BeamItem{Hypothesis{{}, 0.0}, model.init_state(source)});

  std::optional<Hypothesis> best_complete_seen;
  auto note_complete = [&](const Hypothesis& hyp) {
    if (!best_complete_seen || hypothesis_precedes(hyp, *best_complete_seen)) {
      best_complete_seen = hyp;
    }
  };

  struct Candidate {
    Hypothesis hyp;
    int parent = -1;        // index into `beam` for freshly expanded children
    TokenId token = -1;
    bool complete = false;
  };

  for (int iteration = 1; iteration <= cap; ++iteration) {
    if (deadline.expired()) {
      out.flags.timeout = true;
      break;
    }

    std::vector<Candidate> next;
    for (std::size_t i = 0; i < beam.size(); ++i) {
      const BeamItem& item = beam[i];
      if (item.hyp.complete()) {
        next.push_back(Candidate{item.hyp, -1, -1, true});
        continue;
      }
      const std::vector<LogScore> lp = model.logprobs(*item.state);
      ++out.stats.evaluations;
      for (std::size_t w = 0; w < lp.size(); ++w) {
        if (lp[w] == kNegInf) continue;
        Candidate cand;
        cand.hyp.seq = item.hyp.seq;
        cand.hyp.seq.push_back(static_cast<TokenId>(w));
        cand.hyp.score = item.hyp.score + lp[w];
        cand.parent = static_cast<int>(i);
        cand.token = static_cast<TokenId>(w);
        cand.complete = static_cast<TokenId>(w) == Vocabulary::kEosId;
        if (cand.complete) note_complete(cand.hyp);
        next.push_back(std::move(cand));
      }
    }

    std::sort(next.begin(), next.end(), [](const Candidate& a, const Candidate& b) {
      return hypothesis_precedes(a.hyp, b.hyp);
    });
    if (next.size() > n) next.resize(n);

    std::vector<BeamItem> new_beam;
    new_beam.reserve(next.size());
    for (const Candidate& cand : next) {
      BeamItem item;
      item.hyp = cand.hyp;
      if (!cand.complete) {
        if (cand.parent >= 0) {
          item.state = model.advance(*beam[static_cast<std::size_t>(cand.parent)].state,
                                     cand.token);
          ++out.stats.expansions;
        }
        out.stats.max_depth = std::max(out.stats.max_depth, item.hyp.length());
      }
      new_beam.push_back(std::move(item));
    }
    beam = std::move(new_beam);

    if (!beam.empty() && beam.front().hyp.complete()) {
      out.best = beam.front().hyp;
      out.stats.wall_time_secs = watch.seconds();
      return out;
    }
  }

  if (!out.flags.timeout) out.flags.cap_hit = true;
  if (best_complete_seen) {
    out.best = *best_complete_seen;
  } else {
    out.best = beam.front().hyp;  // best partial: nothing ever completed
  }
  out.stats.wall_time_secs = watch.seconds();
  return out;
}

inline SearchOutcome greedy_search(const SequenceModel& model,
                                   const std::vector<std::string>& source,
                                   SearchConfig config = {}) {
  config.beam_size = 1;
  return beam_search(model, source, config);
}

// ---------------------------------------------------------------------------
// Exact depth-first search
// ---------------------------------------------------------------------------

namespace detail {

struct DfsContext {
  const SequenceModel* model = nullptr;
  int cap = 0;
  ChildOrder order = ChildOrder::kEosFirstDescending;
  Deadline deadline{std::nullopt};

  // Length feasibility; min_len/exact_len carve the admissible completions.
  int min_len = 0;
  std::optional<int> exact_len;

  LogScore gamma = kNegInf;
  std::optional<Hypothesis> incumbent;
  SearchStats stats;
  SearchFlags flags;

  bool eos_admissible(int prefix_len) const {
    if (exact_len) return prefix_len == *exact_len;
    return prefix_len >= min_len;
  }

  bool content_admissible(int prefix_len) const {
    const int child_len = prefix_len + 1;
    if (child_len > cap) return false;
    if (exact_len && child_len > *exact_len) return false;
    return true;
  }
};

/// One branch-and-bound node: scores all children of `prefix`, completes via
/// EOS when admissible, and recurses into children whose accumulated score
/// still reaches the bound. Mirrors the classic DFS with a single global
/// incumbent; admission uses >= gamma, replacement strict >.
inline void dfs_visit(DfsContext& ctx, const DecoderState& state,
                      const TokenSequence& prefix, LogScore score) {
  if (ctx.deadline.expired()) {
    ctx.flags.timeout = true;
    return;
  }
  const int prefix_len = static_cast<int>(prefix.size());
  ctx.stats.max_depth = std::max(ctx.stats.max_depth, prefix_len);

  const std::vector<LogScore> lp = ctx.model->logprobs(state);
  ++ctx.stats.evaluations;

  auto try_complete = [&]() {
    if (!ctx.eos_admissible(prefix_len)) return;
    const LogScore eos_lp = lp[static_cast<std::size_t>(Vocabulary::kEosId)];
    if (eos_lp == kNegInf) return;
    const LogScore total = score + eos_lp;
    if (total > ctx.gamma) {
      Hypothesis hyp;
      hyp.seq = prefix;
      hyp.seq.push_back(Vocabulary::kEosId);
      hyp.score = total;
      ctx.gamma = total;
      ctx.incumbent = std::move(hyp);
      ++ctx.stats.gamma_updates;
    }
  };

  if (ctx.order != ChildOrder::kEosLastDescending) try_complete();

  for (TokenId w : content_order(lp, ctx.order)) {
    if (ctx.flags.timeout) return;
    const LogScore child_score = score + lp[static_cast<std::size_t>(w)];
    if (!(child_score >= ctx.gamma)) continue;
    if (!ctx.content_admissible(prefix_len)) {
      // A bound-viable branch was cut by the length cap: optimality within
      // the cap still holds, but the unconstrained claim does not.
      if (child_score > ctx.gamma && !ctx.exact_len) ctx.flags.cap_hit = true;
      continue;
    }
    DecoderState child = ctx.model->advance(state, w);
    ++ctx.stats.expansions;
    TokenSequence child_prefix = prefix;
    child_prefix.push_back(w);
    dfs_visit(ctx, child, child_prefix, child_score);
  }

  if (ctx.order == ChildOrder::kEosLastDescending) try_complete();
}

}  // namespace detail

/// Exact inference: a beam run supplies the incumbent and lower bound, then
/// depth-first branch-and-bound over the capped space either finds something
/// strictly better or certifies the incumbent. The returned score is the
/// maximum over all complete hypotheses of length <= max_len_cap; the outcome
/// is exact unless the cap truncated a viable branch or the timeout fired.
/// Outcome stats cover the DFS phase.
inline SearchOutcome exact_search(const SequenceModel& model,
                                  const std::vector<std::string>& source,
                                  const SearchConfig& config) {
  config.validate();
  const detail::Stopwatch watch;
  // One per-sentence budget covers the bootstrap beam and the DFS together.
  const detail::Deadline budget(config.timeout_secs);

  SearchOutcome beam = beam_search(model, source, config);

  detail::DfsContext ctx;
  ctx.model = &model;
  ctx.cap = config.resolve_cap(static_cast<int>(source.size()));
  ctx.order = config.child_order;
  ctx.deadline = detail::Deadline::at(budget.time_point());
  if (beam.best.complete()) {
    ctx.gamma = beam.best.score;
    ctx.incumbent = beam.best;
  }

  detail::dfs_visit(ctx, model.init_state(source), TokenSequence{}, 0.0);

  SearchOutcome out;
  out.flags = ctx.flags;
  if (beam.flags.timeout) out.flags.timeout = true;
  if (ctx.incumbent) {
    out.best = *ctx.incumbent;
    out.flags.fallback_to_incumbent =
        beam.best.complete() && ctx.stats.gamma_updates == 0;
  } else {
    // Timed out before anything completed; only the beam partial remains.
    out.best = beam.best;
  }
  out.exact = !out.flags.cap_hit && !out.flags.timeout && ctx.incumbent.has_value();
  out.stats = ctx.stats;
  out.stats.wall_time_secs = watch.seconds();
  return out;
}

/// Exact inference restricted to hypothesis lengths admitted by `constraint`.
/// The bound starts at -inf unless a constraint-satisfying `incumbent` is
/// supplied. Throws NO_FEASIBLE_HYPOTHESIS when the restricted space is empty.
inline SearchOutcome exact_search_constrained(
    const SequenceModel& model, const std::vector<std::string>& source,
    const SearchConfig& config, const LengthConstraint& constraint,
    const std::optional<Hypothesis>& incumbent = std::nullopt) {
  config.validate();
  const detail::Stopwatch watch;
  const int source_len = static_cast<int>(source.size());
  const int cap = config.resolve_cap(source_len);

  if (constraint.is_exact_length() && constraint.length > cap) {
    throw Error(ErrorCode::kNoFeasibleHypothesis,
                "exact length " + std::to_string(constraint.length) +
                    " exceeds the length cap " + std::to_string(cap));
  }

  detail::DfsContext ctx;
  ctx.model = &model;
  ctx.cap = cap;
  ctx.order = config.child_order;
  ctx.deadline = detail::Deadline(config.timeout_secs);
  ctx.min_len = constraint.min_length(source_len);
  if (constraint.is_exact_length()) ctx.exact_len = constraint.length;

  if (incumbent) {
    if (!incumbent->complete() ||
        !constraint.satisfied_by(incumbent->length(), source_len)) {
      throw Error(ErrorCode::kValidationError,
                  "supplied incumbent does not satisfy the length constraint");
    }
    ctx.gamma = incumbent->score;
    ctx.incumbent = *incumbent;
  }

  const std::int64_t seeded_updates = ctx.stats.gamma_updates;
  detail::dfs_visit(ctx, model.init_state(source), TokenSequence{}, 0.0);

  if (!ctx.incumbent) {
    throw Error(ErrorCode::kNoFeasibleHypothesis,
                "no complete hypothesis satisfies the length constraint");
  }
  SearchOutcome out;
  out.best = *ctx.incumbent;
  out.flags = ctx.flags;
  out.flags.fallback_to_incumbent =
      incumbent.has_value() && ctx.stats.gamma_updates == seeded_updates;
  out.exact = !out.flags.cap_hit && !out.flags.timeout;
  out.stats = ctx.stats;
  out.stats.wall_time_secs = watch.seconds();
  return out;
}

// ---------------------------------------------------------------------------
// Per-length exact search
// ---------------------------------------------------------------------------

struct PerLengthOutcome {
  LengthTable table;
  /// Best hypothesis of the bootstrap beam run, when it completed.
  std::optional<Hypothesis> beam_incumbent;
  /// True when every table entry is certified (no timeout).
  bool exact = false;
  SearchFlags flags;
  SearchStats stats;
};

namespace detail {

struct PerLengthContext {
  const SequenceModel* model = nullptr;
  ChildOrder order = ChildOrder::kEosFirstDescending;
  Deadline deadline{std::nullopt};
  LengthTable* table = nullptr;
  SearchStats stats;
  SearchFlags flags;
};

/// Branch-and-bound against per-length bounds: a prefix is viable while its
/// score still clears the weakest bound among the lengths it can reach. Any
/// completion of a length-j prefix at length k >= j scores strictly below the
/// prefix, so p > min_k gamma_k is the admission test.
inline void per_length_visit(PerLengthContext& ctx, const DecoderState& state,
                             const TokenSequence& prefix, LogScore score) {
  if (ctx.deadline.expired()) {
    ctx.flags.timeout = true;
    return;
  }
  const int prefix_len = static_cast<int>(prefix.size());
  ctx.stats.max_depth = std::max(ctx.stats.max_depth, prefix_len);

  const std::vector<LogScore> lp = ctx.model->logprobs(state);
  ++ctx.stats.evaluations;

  auto try_complete = [&]() {
    const LogScore eos_lp = lp[static_cast<std::size_t>(Vocabulary::kEosId)];
    if (eos_lp == kNegInf) return;
    Hypothesis hyp;
    hyp.seq = prefix;
    hyp.seq.push_back(Vocabulary::kEosId);
    hyp.score = score + eos_lp;
    if (ctx.table->offer(hyp)) ++ctx.stats.gamma_updates;
  };

  if (ctx.order != ChildOrder::kEosLastDescending) try_complete();

  if (prefix_len < ctx.table->k_max()) {
    for (TokenId w : content_order(lp, ctx.order)) {
      if (ctx.flags.timeout) return;
      const LogScore child_score = score + lp[static_cast<std::size_t>(w)];
      if (!(child_score > ctx.table->min_bound_from(prefix_len + 1))) continue;
      DecoderState child = ctx.model->advance(state, w);
      ++ctx.stats.expansions;
      TokenSequence child_prefix = prefix;
      child_prefix.push_back(w);
      per_length_visit(ctx, child, child_prefix, child_score);
    }
  }

  if (ctx.order == ChildOrder::kEosLastDescending) try_complete();
}

}  // namespace detail

/// Finds the best model score for every hypothesis length k in [0, k_max].
/// With kBeamLengthNorm, a bootstrap beam run seeds gamma_k =
/// (k+1) * score(y_beam) / (|y_beam| + 1); entries that keep their seed bound
/// certify that no length-k hypothesis clears it. With kNegInf every entry
/// with any feasible completion ends up holding the per-length optimum.
/// Outcome stats cover the DFS phase.
inline PerLengthOutcome exact_search_per_length(
    const SequenceModel& model, const std::vector<std::string>& source,
    const SearchConfig& config, int k_max,
    BoundInit init = BoundInit::kBeamLengthNorm) {
  config.validate();
  if (k_max < 0) {
    throw Error(ErrorCode::kValidationError, "k_max must be >= 0");
  }
  const detail::Stopwatch watch;

  std::optional<Hypothesis> beam_incumbent;
  if (init == BoundInit::kBeamLengthNorm) {
    SearchOutcome beam = beam_search(model, source, config);
    if (beam.best.complete()) {
      beam_incumbent = beam.best;
    } else {
      init = BoundInit::kNegInf;  // nothing to derive bounds from
    }
  }

  PerLengthOutcome out{LengthTable(k_max, init), std::nullopt, false, {}, {}};
  if (beam_incumbent) {
    const double normalized =
        beam_incumbent->score / static_cast<double>(beam_incumbent->length() + 1);
    for (int k = 0; k <= k_max; ++k) {
      if (k == beam_incumbent->length()) {
        // The deriving hypothesis meets its own bound with equality; install
        // it exactly rather than through the (k+1)*normalized round trip.
        out.table.seed_incumbent(*beam_incumbent);
      } else {
        out.table.set_bound(k, static_cast<double>(k + 1) * normalized);
      }
    }
    out.beam_incumbent = beam_incumbent;
  }

  detail::PerLengthContext ctx;
  ctx.model = &model;
  ctx.order = config.child_order;
  ctx.deadline = detail::Deadline(config.timeout_secs);
  ctx.table = &out.table;
  detail::per_length_visit(ctx, model.init_state(source), TokenSequence{}, 0.0);

  out.flags = ctx.flags;
  out.exact = !ctx.flags.timeout && !ctx.flags.cap_hit;
  out.stats = ctx.stats;
  out.stats.wall_time_secs = watch.seconds();
  return out;
}

/// Argmax of the length objective over the table incumbents plus the beam
/// hypothesis. Beam-derived bounds certify dominance only under the
/// length-normalized objective, so other objectives demand a table built with
/// kNegInf bounds.
inline Hypothesis optimize_length_objective(
    const LengthTable& table, const std::optional<Hypothesis>& beam_incumbent,
    const LengthObjective& objective) {
  if (objective.kind != LengthObjective::Kind::kLengthNorm &&
      table.init() != BoundInit::kNegInf) {
    throw Error(ErrorCode::kBoundMismatch,
                "this objective requires a table built with -inf bounds");
  }

  std::optional<Hypothesis> best;
  double best_value = 0.0;
  auto consider = [&](const Hypothesis& hyp) {
    const double value = objective.value(hyp.score, hyp.length());
    if (!best || value > best_value ||
        (value == best_value && hypothesis_precedes(hyp, *best))) {
      best = hyp;
      best_value = value;
    }
  };

  if (beam_incumbent) consider(*beam_incumbent);
  for (int k = 0; k <= table.k_max(); ++k) {
    if (table.entry(k).incumbent) consider(*table.entry(k).incumbent);
  }
  if (!best) {
    throw Error(ErrorCode::kEmptyTable,
                "no incumbents to optimize over");
  }
  return *best;
}

// ---------------------------------------------------------------------------
// Brute force
// ---------------------------------------------------------------------------

/// Exhaustively enumerates every complete hypothesis of length <= max_len
/// with finite score, sorted by the global hypothesis order. The independent
/// oracle for everything else in this header. Refuses spaces above 1e7 leaves.
inline std::vector<Hypothesis> brute_force(const SequenceModel& model,
                                           const std::vector<std::string>& source,
                                           int max_len) {
  if (max_len < 0) {
    throw Error(ErrorCode::kValidationError, "max_len must be >= 0");
  }
  const double leaves = std::pow(static_cast<double>(model.target_vocab().size()),
                                 static_cast<double>(max_len));
  if (leaves > 1e7) {
    throw Error(ErrorCode::kSpaceTooLarge,
                "vocab^max_len exceeds 1e7 leaves; refusing to enumerate");
  }

  std::vector<Hypothesis> all;
  TokenSequence prefix;

  auto visit = [&](auto&& self, const DecoderState& state, LogScore score) -> void {
    const std::vector<LogScore> lp = model.logprobs(state);
    const LogScore eos_lp = lp[static_cast<std::size_t>(Vocabulary::kEosId)];
    if (eos_lp != kNegInf) {
      Hypothesis hyp;
      hyp.seq = prefix;
      hyp.seq.push_back(Vocabulary::kEosId);
      hyp.score = score + eos_lp;
      all.push_back(std::move(hyp));
    }
    if (static_cast<int>(prefix.size()) >= max_len) return;
    for (std::size_t w = 1; w < lp.size(); ++w) {
      if (lp[w] == kNegInf) continue;
      prefix.push_back(static_cast<TokenId>(w));
      self(self, model.advance(state, static_cast<TokenId>(w)), score + lp[w]);
      prefix.pop_back();
    }
  };
  visit(visit, model.init_state(source), 0.0);

  std::sort(all.begin(), all.end(), hypothesis_precedes);
  return all;
}

}  // namespace exdec

#endif  // EXDEC_SEARCH_HPP_
