#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "nlpsel/types.hpp"

namespace nlpsel {

/// GLM log-likelihood contract. Everything downstream (prior objective, Laplace
/// fit, search) talks to the likelihood only through this interface.
///
/// Implementations must be pure and reentrant. score() must be the gradient of
/// log_lik() and neg_hessian() minus its Hessian; the contract test suite checks
/// both by finite differences.
class Likelihood {
 public:
  virtual ~Likelihood() = default;

  [[nodiscard]] virtual std::string_view name() const = 0;
  [[nodiscard]] virtual double log_lik(const ActiveDesign& d, const Vector& beta) const = 0;
  [[nodiscard]] virtual Vector score(const ActiveDesign& d, const Vector& beta) const = 0;
  [[nodiscard]] virtual Matrix neg_hessian(const ActiveDesign& d, const Vector& beta) const = 0;
  /// log_lik() and score() in one call. The default simply calls both.
  virtual double log_lik_and_score(const ActiveDesign& d, const Vector& beta, Vector& grad) const;
  /// Log-likelihood of the model with no covariates.
  [[nodiscard]] virtual double null_log_lik(const Dataset& data) const = 0;
  /// Mean response for a linear predictor (used for prediction).
  [[nodiscard]] virtual double mean(double eta) const = 0;
};

class LogisticLikelihood final : public Likelihood {
 public:
  [[nodiscard]] std::string_view name() const override { return "logistic"; }
  [[nodiscard]] double log_lik(const ActiveDesign& d, const Vector& beta) const override;
  [[nodiscard]] Vector score(const ActiveDesign& d, const Vector& beta) const override;
  [[nodiscard]] Matrix neg_hessian(const ActiveDesign& d, const Vector& beta) const override;
  double log_lik_and_score(const ActiveDesign& d, const Vector& beta, Vector& grad) const override;
  [[nodiscard]] double null_log_lik(const Dataset& data) const override;
  [[nodiscard]] double mean(double eta) const override;
};

const Likelihood& logistic_likelihood();

/// Name -> likelihood lookup. "logistic" is registered at startup.
class LikelihoodRegistry {
 public:
  static LikelihoodRegistry& global();

  void add(std::shared_ptr<const Likelihood> lik);
  [[nodiscard]] std::shared_ptr<const Likelihood> resolve(std::string_view name) const;
  [[nodiscard]] std::vector<std::string> names() const;

 private:
  LikelihoodRegistry();

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Likelihood>, std::less<>> entries_;
};

std::shared_ptr<const Likelihood> resolve_likelihood(std::string_view name);

// Numerically stable log(1 + exp(z)).
double softplus(double z);
// exp(z) / (1 + exp(z)) without overflow.
double logistic(double z);

// Logistic model core over a (data, k) restriction. Beta must match |k| and
// be finite; otherwise std::invalid_argument.
double log_likelihood(const Dataset& data, const ModelIndex& k, const Vector& beta);
Vector score(const Dataset& data, const ModelIndex& k, const Vector& beta);
Matrix neg_hessian(const Dataset& data, const ModelIndex& k, const Vector& beta);

}  // namespace nlpsel
