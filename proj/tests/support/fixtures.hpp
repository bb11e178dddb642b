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

#ifndef EXDEC_TESTS_SUPPORT_FIXTURES_HPP_
#define EXDEC_TESTS_SUPPORT_FIXTURES_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "exdec/core.hpp"
#include "exdec/model.hpp"
#include "exdec/search.hpp"

namespace exdec::testing {

/// Seeded generator with platform-stable derived values (no distribution
/// objects, whose output the standard leaves implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform int in [0, n).
  int below(int n) {
    return static_cast<int>(gen_() % static_cast<std::uint64_t>(n));
  }

 private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// The M1 fixture: vocab [</s>, a]; "" -> {a: 0.6, </s>: 0.4};
// default -> {a: 0.5, </s>: 0.5}. Greedy prefers "a" and ends at -1.2040
// while the global best is the empty translation at -0.9163.
// ---------------------------------------------------------------------------

inline std::shared_ptr<const Vocabulary> m1_vocab() {
  return std::make_shared<const Vocabulary>(
      std::vector<std::string>{"</s>", "a"});
}

inline std::unique_ptr<TabularModel> make_m1() {
  TabularModel::ContextTable contexts;
  contexts.emplace("", std::vector<double>{0.4, 0.6});
  return std::make_unique<TabularModel>(m1_vocab(), std::move(contexts),
                                        std::vector<double>{0.5, 0.5});
}

inline const char* m1_json() {
  return R"({
  "type": "tabular",
  "target_vocab": ["</s>", "a"],
  "contexts": {"": {"a": 0.6, "</s>": 0.4}},
  "default": {"a": 0.5, "</s>": 0.5}
})";
}

// ---------------------------------------------------------------------------
// Random tabular models: vocab size 3-4, random contexts of depth <= 2. EOS
// always keeps some mass and at least one content token stays possible, so
// every prefix has a finite completion and beam runs always see complete
// hypotheses.
// ---------------------------------------------------------------------------

inline std::vector<double> random_distribution(Rng& rng, int arity) {
  std::vector<double> weights(static_cast<std::size_t>(arity), 0.0);
  weights[0] = rng.uniform(0.1, 1.0);  // EOS never impossible
  int nonzero_content = 0;
  for (int i = 1; i < arity; ++i) {
    if (rng.uniform() < 0.2) continue;  // carve a zero-probability token
    weights[static_cast<std::size_t>(i)] = rng.uniform(0.05, 1.0);
    ++nonzero_content;
  }
  if (nonzero_content == 0) {
    weights[static_cast<std::size_t>(1 + rng.below(arity - 1))] =
        rng.uniform(0.05, 1.0);
  }
  double sum = 0.0;
  for (double w : weights) sum += w;
  for (double& w : weights) w /= sum;
  return weights;
}

inline std::unique_ptr<TabularModel> random_tabular_model(Rng& rng) {
  const int vocab_size = 3 + rng.below(2);
  std::vector<std::string> tokens{"</s>"};
  const char* names[] = {"a", "b", "c"};
  for (int i = 0; i < vocab_size - 1; ++i) tokens.emplace_back(names[i]);
  auto vocab = std::make_shared<const Vocabulary>(std::move(tokens));

  TabularModel::ContextTable contexts;
  std::vector<std::string> keys{""};
  for (int i = 1; i < vocab_size; ++i) {
    keys.push_back(vocab->token(i));
    for (int k = 1; k < vocab_size; ++k) {
      keys.push_back(vocab->token(i) + " " + vocab->token(k));
    }
  }
  for (const auto& key : keys) {
    if (rng.uniform() < 0.7) {
      contexts.emplace(key, random_distribution(rng, vocab_size));
    }
  }
  auto default_dist = random_distribution(rng, vocab_size);
  return std::make_unique<TabularModel>(vocab, std::move(contexts),
                                        std::move(default_dist));
}

// ---------------------------------------------------------------------------
// Toy lexical fixture: six source words, six content targets; column i leans
// on target t_i.
// ---------------------------------------------------------------------------

inline std::vector<std::string> toy_source_words() {
  return {"w1", "w2", "w3", "w4", "w5", "w6"};
}

inline std::unique_ptr<ToyLexicalModel> make_toy_lexical(double a, double b) {
  std::vector<std::string> tokens{"</s>", "t1", "t2", "t3", "t4", "t5", "t6"};
  auto vocab = std::make_shared<const Vocabulary>(std::move(tokens));
  std::unordered_map<std::string, std::vector<double>> ttable;
  const auto sources = toy_source_words();
  for (std::size_t i = 0; i < sources.size(); ++i) {
    std::vector<double> column(7, 0.1);
    column[0] = 0.0;
    column[i + 1] = 0.5;
    ttable.emplace(sources[i], std::move(column));
  }
  return std::make_unique<ToyLexicalModel>(vocab, std::move(ttable), a, b);
}

inline std::vector<std::vector<std::string>> synthetic_sources(Rng& rng,
                                                               int count,
                                                               int min_len,
                                                               int max_len) {
  const auto words = toy_source_words();
  std::vector<std::vector<std::string>> sources;
  sources.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int len = min_len + rng.below(max_len - min_len + 1);
    std::vector<std::string> sentence;
    sentence.reserve(static_cast<std::size_t>(len));
    for (int k = 0; k < len; ++k) {
      sentence.push_back(words[static_cast<std::size_t>(
          rng.below(static_cast<int>(words.size())))]);
    }
    sources.push_back(std::move(sentence));
  }
  return sources;
}

// ---------------------------------------------------------------------------
// Brute-force derived oracles
// ---------------------------------------------------------------------------

/// Best hypothesis per length, from an exhaustive enumeration.
inline std::map<int, Hypothesis> per_length_maxima(
    const std::vector<Hypothesis>& all) {
  std::map<int, Hypothesis> best;
  for (const auto& hyp : all) {
    auto it = best.find(hyp.length());
    if (it == best.end() || hypothesis_precedes(hyp, it->second)) {
      best.insert_or_assign(hyp.length(), hyp);
    }
  }
  return best;
}

/// Argmax of an objective over an exhaustive enumeration, breaking objective
/// ties by the global hypothesis order.
inline Hypothesis argmax_objective(const std::vector<Hypothesis>& all,
                                   const LengthObjective& objective) {
  const Hypothesis* best = nullptr;
  double best_value = 0.0;
  for (const auto& hyp : all) {
    const double value = objective.value(hyp.score, hyp.length());
    if (!best || value > best_value ||
        (value == best_value && hypothesis_precedes(hyp, *best))) {
      best = &hyp;
      best_value = value;
    }
  }
  return *best;
}

inline TokenSequence seq(std::initializer_list<TokenId> ids) {
  return TokenSequence(ids);
}

}  // namespace exdec::testing

#endif  // EXDEC_TESTS_SUPPORT_FIXTURES_HPP_
