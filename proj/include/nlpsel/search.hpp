#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nlpsel/laplace.hpp"
#include "nlpsel/likelihood.hpp"
#include "nlpsel/prior.hpp"
#include "nlpsel/types.hpp"

namespace nlpsel {

using Rng = std::mt19937_64;

enum class Algorithm { SSS, RSSS };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

struct SearchConfig {
  int n_iterations = 100;
  int k1 = 10;  // top-|corr| additions (RSSS)
  int k2 = 10;  // random additions (RSSS)
  std::uint64_t seed = 1;
  Algorithm algorithm = Algorithm::RSSS;
  // nullopt -> three distinct indices drawn uniformly ("random-3").
  std::optional<ModelIndex> initial_model;
  // Workers used to score neighbors within an iteration. Results do not depend on it.
  int threads = 1;
  ModeOptions mode;

  void validate() const;
};

/// Add / remove / swap neighbors of a model.
struct Neighborhood {
  std::vector<ModelIndex> plus;
  std::vector<ModelIndex> minus;
  std::vector<ModelIndex> zero;
  // Covariates used to build `plus` and `zero`.
  std::vector<int> additions;
};

Neighborhood neighborhood(const ModelIndex& k, int p);

/// |corr(X_j, y)| for every column, ranked once per dataset (descending, ties
/// to the lower index).
class CorrelationScreen {
 public:
  explicit CorrelationScreen(const Dataset& data);

  [[nodiscard]] const Vector& abs_correlation() const { return abs_corr_; }
  [[nodiscard]] const std::vector<int>& ranking() const { return ranking_; }
  /// The `count` best-ranked columns not in k.
  [[nodiscard]] std::vector<int> top_excluding(const ModelIndex& k, int count) const;

 private:
  Vector abs_corr_;
  std::vector<int> ranking_;
};

/// Reduced neighborhood: additions restricted to the top-k1 screened columns
/// plus k2 distinct non-member columns drawn uniformly from the rest.
Neighborhood reduced_neighborhood(const ModelIndex& k, const CorrelationScreen& screen, int p,
                                  int k1, int k2, Rng& rng);

/// Uniform double in [0, 1) from 53 random bits.
double uniform01(Rng& rng);
/// Uniform integer in [0, n).
std::size_t uniform_index(Rng& rng, std::size_t n);

/// Draws an index with probability proportional to exp(log_weights[i]),
/// exponentiating after subtracting the maximum.
std::size_t sample_log_weights(std::span<const double> log_weights, Rng& rng);

/// Memoized model scores for one search run. nullopt records a model whose
/// scoring failed numerically (treated as probability 0).
class MarginalCache {
 public:
  using Entry = std::optional<ScoredModel>;

  [[nodiscard]] const Entry* find(const ModelIndex& k) const;
  // Keeps the first value stored for a key; scoring is deterministic, so a
  // concurrent second insert would carry the same value.
  const Entry& insert(const ModelIndex& k, Entry value);
  [[nodiscard]] std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<ModelIndex, Entry, ModelIndexHash> entries_;
};

struct VisitedState {
  int iteration = 0;
  ModelIndex k;
  double log_posterior = 0.0;
};

struct ModeUpdate {
  int iteration = 0;
  std::int64_t models_scored = 0;
  ModelIndex k;
  double log_posterior = 0.0;
};

struct SearchTrace {
  std::vector<VisitedState> visited;
  ScoredModel best;
  double best_log_posterior = 0.0;
  // Distinct models scored up to and including the first scoring of `best`.
  std::int64_t models_scored_before_best = 0;
  std::int64_t cache_hits = 0;
  std::int64_t cache_misses = 0;
  std::int64_t failed_scores = 0;
  std::vector<ModeUpdate> mode_history;
};

/// Shotgun stochastic search (full or reduced neighborhoods) for the
/// posterior-mode model. The reported best is the best model ever scored.
SearchTrace run_search(const Dataset& data, const HyperPmomConfig& prior,
                       const SearchConfig& search, const Likelihood& lik = logistic_likelihood());

}  // namespace nlpsel
