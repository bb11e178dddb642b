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

#ifndef EXDEC_MODEL_HPP_
#define EXDEC_MODEL_HPP_

#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "exdec/core.hpp"

namespace exdec {

class SequenceModel;

/// Immutable snapshot of a model conditioned on (source, prefix). `advance`
/// produces a new state and never touches its input, so depth-first
/// backtracking needs no undo machinery.
class DecoderState {
 public:
  DecoderState(const SequenceModel* model,
                std::shared_ptr<const std::vector<std::string>> source,
                TokenSequence prefix)
      : model_(model), source_(std::move(source)), prefix_(std::move(prefix)) {}

  int prefix_len() const { return static_cast<int>(prefix_.size()); }
  const TokenSequence& prefix() const { return prefix_; }
  const std::vector<std::string>& source() const { return *source_; }
  int source_len() const { return static_cast<int>(source_->size()); }
  const SequenceModel& model() const { return *model_; }

  DecoderState with_token(TokenId token) const {
    TokenSequence next = prefix_;
    next.push_back(token);
    return DecoderState(model_, source_, std::move(next));
  }

 private:
  const SequenceModel* model_;
  std::shared_ptr<const std::vector<std::string>> source_;
  TokenSequence prefix_;
};

/// Locally normalized left-to-right sequence model. `logprobs` returns one
/// finite-or--inf natural log per target token; finite entries are strictly
/// negative and the distribution exp-sums to 1.
class SequenceModel {
 public:
  virtual ~SequenceModel() = default;

  const Vocabulary& target_vocab() const { return *vocab_; }

  /// State conditioned on (source, empty prefix).
  DecoderState init_state(std::vector<std::string> source) const {
    validate_source(source);
    return DecoderState(
        this, std::make_shared<const std::vector<std::string>>(std::move(source)),
        TokenSequence{});
  }

  /// Extends the conditioning prefix by one non-EOS token.
  DecoderState advance(const DecoderState& state, TokenId token) const {
    if (token == Vocabulary::kEosId) {
      throw Error(ErrorCode::kAdvancePastEos,
                  "cannot condition on a prefix containing </s>");
    }
    if (token < 0 || token >= vocab_->size()) {
      throw Error(ErrorCode::kValidationError,
                  "token id " + std::to_string(token) + " out of range");
    }
    if (logprobs(state)[static_cast<std::size_t>(token)] == kNegInf) {
      throw Error(ErrorCode::kImpossibleToken,
                  "token \"" + vocab_->token(token) +
                      "\" has probability zero in this context");
    }
    return state.with_token(token);
  }

  /// Next-token conditional log-probabilities, one per target token.
  virtual std::vector<LogScore> logprobs(const DecoderState& state) const = 0;

 protected:
  explicit SequenceModel(std::shared_ptr<const Vocabulary> vocab)
      : vocab_(std::move(vocab)) {}

  virtual void validate_source(const std::vector<std::string>& source) const {
    (void)source;
  }

  std::shared_ptr<const Vocabulary> vocab_;
};

namespace detail {

// Max conditional probability allowed by validation. Guarantees every step
// costs at least ~1e-6 nats, which bounds DFS depth for any finite bound.
inline constexpr double kMaxProb = 1.0 - 1e-6;
inline constexpr double kSumTolerance = 1e-9;

inline std::vector<LogScore> to_logs(const std::vector<double>& probs) {
  std::vector<LogScore> logs(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    logs[i] = probs[i] > 0.0 ? std::log(probs[i]) : kNegInf;
  }
  return logs;
}

inline void validate_distribution(const std::vector<double>& probs,
                                  const std::string& where) {
  double sum = 0.0;
  double max = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::kValidationError,
                  "context \"" + where + "\": probabilities must be finite and >= 0");
    }
    sum += p;
    max = std::max(max, p);
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    std::ostringstream oss;
    oss << "context \"" << where << "\": distribution sums to " << sum;
    throw Error(ErrorCode::kValidationError, oss.str());
  }
  if (max > kMaxProb) {
    std::ostringstream oss;
    oss << "context \"" << where << "\": max probability " << max
        << " exceeds 1 - 1e-6";
    throw Error(ErrorCode::kValidationError, oss.str());
  }
}

inline std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// TabularModel
// ---------------------------------------------------------------------------

/// Conditional LM with explicitly tabulated next-token distributions, keyed by
/// the space-joined target prefix ("" for the empty prefix). Unlisted prefixes
/// fall back to a default distribution; an optional per-source override swaps
/// in a different context table for an exact source string. A desk-scale
/// stand-in for a trained NMT system that makes adversarial fixtures easy to
/// author.
class TabularModel : public SequenceModel {
 public:
  using ContextTable = std::unordered_map<std::string, std::vector<double>>;

  TabularModel(std::shared_ptr<const Vocabulary> vocab, ContextTable contexts,
               std::vector<double> default_dist,
               std::unordered_map<std::string, ContextTable> source_override = {})
      : SequenceModel(std::move(vocab)) {
    const auto n = static_cast<std::size_t>(vocab_->size());
    if (default_dist.size() != n) {
      throw Error(ErrorCode::kValidationError,
                  "default distribution has wrong arity");
    }
    detail::validate_distribution(default_dist, "default");
    default_logs_ = detail::to_logs(default_dist);
    for (auto& [key, dist] : contexts) {
      if (dist.size() != n) {
        throw Error(ErrorCode::kValidationError,
                    "context \"" + key + "\" has wrong arity");
      }
      detail::validate_distribution(dist, key);
      context_logs_.emplace(key, detail::to_logs(dist));
    }
    for (auto& [src, table] : source_override) {
      std::unordered_map<std::string, std::vector<LogScore>> logs;
      for (auto& [key, dist] : table) {
        if (dist.size() != n) {
          throw Error(ErrorCode::kValidationError,
                      "override \"" + src + "\" context \"" + key +
                          "\" has wrong arity");
        }
        detail::validate_distribution(dist, src + "::" + key);
        logs.emplace(key, detail::to_logs(dist));
      }
      override_logs_.emplace(src, std::move(logs));
    }
  }

  std::vector<LogScore> logprobs(const DecoderState& state) const override {
    std::string key = prefix_key(state);
    if (!override_logs_.empty()) {
      auto src_it = override_logs_.find(detail::join_tokens(state.source()));
      if (src_it != override_logs_.end()) {
        auto it = src_it->second.find(key);
        if (it != src_it->second.end()) return it->second;
        return default_logs_;
      }
    }
    auto it = context_logs_.find(key);
    if (it != context_logs_.end()) return it->second;
    return default_logs_;
  }

 private:
  std::string prefix_key(const DecoderState& state) const {
    std::string key;
    const auto& prefix = state.prefix();
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      if (i > 0) key += ' ';
      key += vocab_->token(prefix[i]);
    }
    return key;
  }

  std::unordered_map<std::string, std::vector<LogScore>> context_logs_;
  std::vector<LogScore> default_logs_;
  std::unordered_map<std::string,
                     std::unordered_map<std::string, std::vector<LogScore>>>
      override_logs_;
};

// ---------------------------------------------------------------------------
// ToyLexicalModel
// ---------------------------------------------------------------------------

/// Parametric model with a logistic stopping hazard and a bag-of-words lexical
/// mixture, exhibiting the length bias of locally normalized models:
///   p_eos(j, I) = 1 / (1 + exp(-a * (j - b * I)))   clamped to [1e-6, 1 - 1e-6]
///   q(w) proportional to (1/I) * sum_i ttable(x_i, w)
/// where j is the prefix length and I the source length.
class ToyLexicalModel : public SequenceModel {
 public:
  ToyLexicalModel(std::shared_ptr<const Vocabulary> vocab,
                  std::unordered_map<std::string, std::vector<double>> ttable,
                  double hazard_slope, double hazard_offset_factor)
      : SequenceModel(std::move(vocab)),
        ttable_(std::move(ttable)),
        a_(hazard_slope),
        b_(hazard_offset_factor) {
    if (!std::isfinite(a_) || !std::isfinite(b_)) {
      throw Error(ErrorCode::kValidationError,
                  "hazard parameters must be finite");
    }
    const auto n = static_cast<std::size_t>(vocab_->size());
    for (const auto& [src, column] : ttable_) {
      if (column.size() != n) {
        throw Error(ErrorCode::kValidationError,
                    "ttable column \"" + src + "\" has wrong arity");
      }
      if (column[Vocabulary::kEosId] != 0.0) {
        throw Error(ErrorCode::kValidationError,
                    "ttable column \"" + src + "\" assigns mass to </s>");
      }
      double sum = 0.0;
      for (double p : column) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
          throw Error(ErrorCode::kValidationError,
                      "ttable column \"" + src + "\": negative probability");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > detail::kSumTolerance) {
        throw Error(ErrorCode::kValidationError,
                    "ttable column \"" + src + "\" does not normalize");
      }
    }
  }

  std::vector<LogScore> logprobs(const DecoderState& state) const override {
    const int j = state.prefix_len();
    const int source_len = state.source_len();
    const double hazard =
        1.0 / (1.0 + std::exp(-a_ * (static_cast<double>(j) -
                                     b_ * static_cast<double>(source_len))));
    const double p_eos = std::clamp(hazard, 1e-6, detail::kMaxProb);

    const auto n = static_cast<std::size_t>(vocab_->size());
    std::vector<double> mix(n, 0.0);
    double total = 0.0;
    for (const auto& token : state.source()) {
      const auto& column = ttable_.at(token);
      for (std::size_t w = 1; w < n; ++w) {
        mix[w] += column[w];
        total += column[w];
      }
    }
    std::vector<double> probs(n, 0.0);
    probs[Vocabulary::kEosId] = p_eos;
    if (total > 0.0) {
      for (std::size_t w = 1; w < n; ++w) {
        probs[w] = (1.0 - p_eos) * mix[w] / total;
      }
    } else {
      // Degenerate source (empty, or all-zero columns): spread the non-EOS
      // mass uniformly so the distribution stays proper.
      for (std::size_t w = 1; w < n; ++w) {
        probs[w] = (1.0 - p_eos) / static_cast<double>(n - 1);
      }
    }
    return detail::to_logs(probs);
  }

  double hazard_slope() const { return a_; }
  double hazard_offset_factor() const { return b_; }

 protected:
  void validate_source(const std::vector<std::string>& source) const override {
    for (const auto& token : source) {
      if (ttable_.find(token) == ttable_.end()) {
        throw Error(ErrorCode::kUnknownSourceToken,
                    "source token \"" + token + "\" not in ttable");
      }
    }
  }

 private:
  std::unordered_map<std::string, std::vector<double>> ttable_;
  double a_;
  double b_;
};

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

namespace detail {

inline std::shared_ptr<const Vocabulary> parse_vocab(const nlohmann::json& j) {
  if (!j.contains("target_vocab") || !j["target_vocab"].is_array()) {
    throw Error(ErrorCode::kValidationError, "missing target_vocab array");
  }
  std::vector<std::string> tokens;
  for (const auto& t : j["target_vocab"]) {
    if (!t.is_string()) {
      throw Error(ErrorCode::kValidationError, "target_vocab entries must be strings");
    }
    tokens.push_back(t.get<std::string>());
  }
  return std::make_shared<const Vocabulary>(std::move(tokens));
}

// {token: probability} object -> dense per-id vector. Unlisted tokens get 0.
inline std::vector<double> parse_distribution(const nlohmann::json& j,
                                              const Vocabulary& vocab,
                                              const std::string& where) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kValidationError,
                "context \"" + where + "\" must be an object");
  }
  std::vector<double> probs(static_cast<std::size_t>(vocab.size()), 0.0);
  for (const auto& [token, value] : j.items()) {
    auto id = vocab.find(token);
    if (!id) {
      throw Error(ErrorCode::kValidationError,
                  "context \"" + where + "\": unknown token \"" + token + "\"");
    }
    if (!value.is_number()) {
      throw Error(ErrorCode::kValidationError,
                  "context \"" + where + "\": probability must be a number");
    }
    probs[static_cast<std::size_t>(*id)] = value.get<double>();
  }
  return probs;
}

inline void validate_prefix_key(const std::string& key, const Vocabulary& vocab) {
  if (key.empty()) return;
  std::istringstream iss(key);
  std::string token;
  while (iss >> token) {
    if (!vocab.find(token)) {
      throw Error(ErrorCode::kValidationError,
                  "context key \"" + key + "\": unknown token \"" + token + "\"");
    }
  }
}

inline TabularModel::ContextTable parse_context_table(
    const nlohmann::json& j, const Vocabulary& vocab, const std::string& where) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kValidationError, where + " must be an object");
  }
  TabularModel::ContextTable table;
  for (const auto& [key, dist] : j.items()) {
    validate_prefix_key(key, vocab);
    table.emplace(key, parse_distribution(dist, vocab, key));
  }
  return table;
}

}  // namespace detail

/// Builds a model from parsed JSON; see the model-file format in the README.
inline std::unique_ptr<SequenceModel> model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw Error(ErrorCode::kValidationError, "model file needs a \"type\" field");
  }
  const std::string type = j["type"].get<std::string>();
  auto vocab = detail::parse_vocab(j);

  if (type == "tabular") {
    if (!j.contains("contexts") || !j.contains("default")) {
      throw Error(ErrorCode::kValidationError,
                  "tabular model needs \"contexts\" and \"default\"");
    }
    auto contexts = detail::parse_context_table(j["contexts"], *vocab, "contexts");
    auto default_dist = detail::parse_distribution(j["default"], *vocab, "default");
    std::unordered_map<std::string, TabularModel::ContextTable> overrides;
    if (j.contains("source_override")) {
      if (!j["source_override"].is_object()) {
        throw Error(ErrorCode::kValidationError, "source_override must be an object");
      }
      for (const auto& [src, table] : j["source_override"].items()) {
        overrides.emplace(src, detail::parse_context_table(
                                   table, *vocab, "source_override " + src));
      }
    }
    return std::make_unique<TabularModel>(std::move(vocab), std::move(contexts),
                                          std::move(default_dist),
                                          std::move(overrides));
  }

  if (type == "toy_lexical") {
    if (!j.contains("ttable") || !j["ttable"].is_object()) {
      throw Error(ErrorCode::kValidationError, "toy_lexical model needs a \"ttable\"");
    }
    if (!j.contains("a") || !j.contains("b") || !j["a"].is_number() ||
        !j["b"].is_number()) {
      throw Error(ErrorCode::kValidationError,
                  "toy_lexical model needs numeric \"a\" and \"b\"");
    }
    std::unordered_map<std::string, std::vector<double>> ttable;
    for (const auto& [src, dist] : j["ttable"].items()) {
      ttable.emplace(src, detail::parse_distribution(dist, *vocab, "ttable " + src));
    }
    return std::make_unique<ToyLexicalModel>(std::move(vocab), std::move(ttable),
                                             j["a"].get<double>(),
                                             j["b"].get<double>());
  }

  throw Error(ErrorCode::kValidationError, "unknown model type \"" + type + "\"");
}

/// Loads and validates a model file.
inline std::unique_ptr<SequenceModel> load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kParseError, "cannot open model file " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("malformed model file: ") + e.what());
  }
  return model_from_json(j);
}

/// Re-evaluates `seq` step by step and returns the accumulated log-score.
/// Every hypothesis emitted by a search reproduces its stored score this way.
inline LogScore rescore(const SequenceModel& model,
                        const std::vector<std::string>& source,
                        const TokenSequence& seq) {
  DecoderState state = model.init_state(source);
  LogScore total = 0.0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const TokenId token = seq[i];
    if (token < 0 || token >= model.target_vocab().size()) {
      throw Error(ErrorCode::kValidationError,
                  "token id " + std::to_string(token) + " out of range");
    }
    total += model.logprobs(state)[static_cast<std::size_t>(token)];
    if (token == Vocabulary::kEosId) {
      if (i + 1 != seq.size()) {
        throw Error(ErrorCode::kValidationError, "</s> before end of sequence");
      }
      break;
    }
    if (i + 1 < seq.size()) state = model.advance(state, token);
  }
  return total;
}

}  // namespace exdec

#endif  // EXDEC_MODEL_HPP_
