#pragma once

#include <random>

#include "nlpsel/simulate.hpp"
#include "nlpsel/types.hpp"

namespace nlpsel::testing {

/// Standardized Gaussian design with logistic responses from beta on the first
/// |beta| columns.
inline Dataset random_dataset(int n, int p, std::uint64_t seed, double signal = 1.0,
                              int active = 3) {
  SimDesign d;
  d.n = n;
  d.p = p;
  d.n_test = 1;
  d.signal = signal;
  std::vector<int> support;
  for (int j = 0; j < std::min(active, p); ++j) support.push_back(j);
  d.true_support = ModelIndex(support);
  d.seed = seed;
  return generate(d).train;
}

/// Random model of the given size and a nonzero coefficient vector for it.
inline std::pair<ModelIndex, Vector> random_point(int p, int size, std::mt19937_64& rng,
                                                  double scale = 1.5) {
  std::vector<int> all(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) all[static_cast<std::size_t>(j)] = j;
  std::shuffle(all.begin(), all.end(), rng);
  std::vector<int> idx(all.begin(), all.begin() + size);
  std::sort(idx.begin(), idx.end());
  std::uniform_real_distribution<double> mag(0.2, scale);
  std::bernoulli_distribution sign(0.5);
  Vector beta(size);
  for (int i = 0; i < size; ++i) beta[i] = (sign(rng) ? -1.0 : 1.0) * mag(rng);
  return {ModelIndex(std::move(idx)), beta};
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

inline double max_rel_err(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace nlpsel::testing
