#pragma once

#include <optional>
#include <string>

#include "nlpsel/likelihood.hpp"
#include "nlpsel/prior.hpp"
#include "nlpsel/types.hpp"

namespace nlpsel {

struct ModeOptions {
  int max_iterations = 500;
  // Convergence when |grad f|_inf < grad_tol * (1 + |f|).
  double grad_tol = 1e-6;
};

struct ModeDiagnostics {
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
  std::string stop_reason;
  // Coefficients the optimizer started from; their signs fix the orthant searched.
  Vector start;
};

struct ModeResult {
  Vector beta;
  double intercept = 0.0;
  double log_f = 0.0;
  ModeDiagnostics diagnostics;
};

/// A model with its posterior mode coefficients and Laplace log marginal.
struct ScoredModel {
  ModelIndex k;
  Vector beta_hat;
  double intercept = 0.0;
  double log_f_at_mode = 0.0;
  double log_laplace_marginal = 0.0;
  bool converged = true;
  int iterations = 0;
};

/// Ridge-penalized (weight 1/n) logistic fit, with coordinates of magnitude
/// below 0.05 pushed out to +-0.05 so the start lies strictly inside an orthant.
/// With an intercept the trailing entry is the intercept.
Vector ridge_start(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
                   const Likelihood& lik = logistic_likelihood());

/// Maximizes f over beta_k (and the intercept if enabled) by BFGS with an Armijo
/// backtracking line search. Steps never cross a coordinate hyperplane: each
/// step is capped at 0.9 of the distance to the nearest sign change.
///
/// Throws std::invalid_argument for an empty model without intercept, or an
/// init with zero entries. Non-convergence is reported in the diagnostics.
ModeResult find_mode(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
                     const std::optional<Vector>& init = std::nullopt,
                     const Likelihood& lik = logistic_likelihood(), const ModeOptions& opts = {});

/// Laplace log marginal: (d/2) log(2 pi) + f(mode) - log det(-V(mode)) / 2.
/// For the empty model (no intercept) this is exactly the null log-likelihood.
/// Throws NumericalFailure when -V is not positive definite at the mode.
ScoredModel log_marginal(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
                         const Likelihood& lik = logistic_likelihood(),
                         const ModeOptions& opts = {});

/// log pi(k1 | y) - log pi(k2 | y). Both models must satisfy the size cap.
double log_posterior_ratio(const ScoredModel& a, const ScoredModel& b, const HyperPmomConfig& cfg);

/// log pi(k) + log m_k(y); nullopt for models excluded by the size cap.
std::optional<double> log_unnormalized_posterior(const ScoredModel& sm, const HyperPmomConfig& cfg);

}  // namespace nlpsel
