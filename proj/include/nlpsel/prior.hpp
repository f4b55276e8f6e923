#pragma once

#include <optional>

#include "nlpsel/likelihood.hpp"
#include "nlpsel/types.hpp"

namespace nlpsel {

/// Hyper-pMOM prior with U = I: beta | tau ~ pMOM(r, tau), tau ~ IG(lambda1, lambda2),
/// and a uniform model prior truncated at |k| <= m_n.
struct HyperPmomConfig {
  int r = 1;
  double lambda1 = 1.0;
  double lambda2 = 100.0;
  int m_n = 1;
  // Always-included, flat-prior intercept. Off by default (no intercept in the model).
  bool intercept = false;

  /// r = 1, lambda1 = 1, lambda2 = default_lambda2(n, p), m_n = default_model_size_cap(n, p).
  static HyperPmomConfig defaults(int n, int p);
  /// Throws std::invalid_argument on r < 1, non-positive lambdas, or m_n outside [1, p].
  void validate(int p) const;
};

/// 100 * n^(-1/3) * p^(2.001 * 2/3).
double default_lambda2(int n, int p);

/// min(p, 4 * ceil(sqrt(n / log p))); p when p == 1.
int default_model_size_cap(int n, int p);

/// log d_k = -|k| log((2r-1)!!).
double log_norm_const(int r, int k_size);

/// log pi(beta_k | k) with tau integrated out. Zero entries -> std::domain_error.
/// The empty model contributes 0.
double log_prior_density(const HyperPmomConfig& cfg, const Vector& beta);
Vector grad_log_prior(const HyperPmomConfig& cfg, const Vector& beta);
Matrix hessian_log_prior(const HyperPmomConfig& cfg, const Vector& beta);

/// f(beta_k) = L_n(beta_k) + log pi(beta_k | k).
double log_objective_f(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
                       const Vector& beta, const Likelihood& lik = logistic_likelihood());
Vector grad_f(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
              const Vector& beta, const Likelihood& lik = logistic_likelihood());
/// Hessian V(beta_k) of f; negative definite at an interior maximum.
Matrix hessian_V(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
                 const Vector& beta, const Likelihood& lik = logistic_likelihood());

/// 0 when |k| <= m_n; std::nullopt marks a model excluded by the size cap.
std::optional<double> log_model_prior(const HyperPmomConfig& cfg, const ModelIndex& k);

}  // namespace nlpsel
