#pragma once

// Brute-force reference computations used by the test and acceptance suites.
// Nothing here is on a production path.

#include <functional>
#include <utility>
#include <vector>

#include "nlpsel/laplace.hpp"
#include "nlpsel/likelihood.hpp"
#include "nlpsel/prior.hpp"
#include "nlpsel/types.hpp"

namespace nlpsel::oracle {

struct QuadratureSpec {
  // Per-axis domain is [0, |mode_i| + half_width * s_i] inside each orthant,
  // widened until the integrand at the edge is below boundary_ratio of the peak.
  double half_width = 10.0;
  double rel_tol = 1e-9;
  double boundary_ratio = 1e-12;
  int max_depth = 18;
};

/// log of the integral of exp{f(beta_k)} over every orthant (|k| <= 2, n <= 200).
/// Throws std::runtime_error when the adaptive rule does not reach rel_tol.
double quadrature_marginal(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
                           const QuadratureSpec& spec = {},
                           const Likelihood& lik = logistic_likelihood());

/// log of the double integral over (beta, tau) of exp{L_n} * pMOM(beta | tau) * IG(tau),
/// for a single covariate. Does not use the tau-marginal closed form.
double hierarchical_marginal(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
                             const QuadratureSpec& spec = {});

struct ExhaustiveResult {
  ScoredModel best;
  double best_log_posterior = 0.0;
  std::vector<std::pair<ModelIndex, double>> scores;  // enumeration order
};

/// Scores every subset with |k| <= min(max_size, m_n) and returns the argmax
/// (ties: smaller |k|, then lexicographic). Refuses p > 15.
ExhaustiveResult exhaustive_mode(const Dataset& data, const HyperPmomConfig& cfg, int max_size,
                                 const Likelihood& lik = logistic_likelihood(), int threads = 1);

using ScalarFn = std::function<double(const Vector&)>;
using VectorFn = std::function<Vector(const Vector&)>;

/// Central differences; the step is h * max(1, |x_i|).
Vector central_gradient(const ScalarFn& f, const Vector& x, double h = 1e-6);
/// Central-difference Jacobian of a vector function (rows: outputs).
Matrix central_jacobian(const VectorFn& g, const Vector& x, double h = 1e-6);

}  // namespace nlpsel::oracle
