#include "nlpsel/oracle.hpp"

#include <algorithm>
#include <bit>
#include <optional>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nlpsel/parallel.hpp"

namespace nlpsel::oracle {

namespace {

using boost::math::quadrature::gauss_kronrod;

// Adaptive Gauss-Kronrod with a hard check on the reported error.
template <typename F>
double integrate(F&& fn, double a, double b, const QuadratureSpec& spec) {
  double error = 0.0;
  const double value =
      gauss_kronrod<double, 61>::integrate(fn, a, b, static_cast<unsigned>(spec.max_depth),
                                           spec.rel_tol, &error);
  if (!std::isfinite(value) || error > 1e-6 * std::abs(value) + 1e-300) {
    throw std::runtime_error("oracle quadrature did not converge: value " + std::to_string(value) +
                             ", error " + std::to_string(error));
  }
  return value;
}

struct Integrand {
  ActiveDesign design;
  HyperPmomConfig cfg;
  const Likelihood* lik;

  // f(beta) with -inf on the coordinate hyperplanes.
  double log_f(const Vector& beta) const {
    if ((beta.array() == 0.0).any()) return -std::numeric_limits<double>::infinity();
    return lik->log_lik(design, beta) + log_prior_density(cfg, beta);
  }
};

struct Window {
  Vector mode;
  Vector scale;
  double peak = 0.0;
};

Window laplace_window(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
                      const Likelihood& lik) {
  const ScoredModel sm = log_marginal(data, cfg, k, lik);
  const Matrix v = hessian_V(data, cfg, k, sm.beta_hat, lik);
  const Matrix cov = (-v).inverse();
  Window w;
  w.mode = sm.beta_hat;
  w.scale = cov.diagonal().cwiseSqrt();
  w.peak = sm.log_f_at_mode;
  return w;
}

void check_problem(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
                   std::size_t max_dim) {
  k.check(data.p());
  if (k.size() > max_dim) {
    throw std::invalid_argument("oracle: quadrature supports |k| <= " + std::to_string(max_dim));
  }
  if (data.n() > 200) throw std::invalid_argument("oracle: quadrature supports n <= 200");
  if (cfg.intercept) throw std::invalid_argument("oracle: intercept models are not supported");
}

// Upper integration limits per axis, grown until the log integrand at the edge
// is below log(boundary_ratio) relative to the peak.
Vector orthant_limits(const Window& w, const Vector& signs, const QuadratureSpec& spec,
                      const std::function<double(const Vector&)>& log_f) {
  const Eigen::Index m = w.mode.size();
  Vector limit = w.mode.cwiseAbs() + spec.half_width * w.scale;
  const double floor = std::log(spec.boundary_ratio);
  for (Eigen::Index axis = 0; axis < m; ++axis) {
    for (int grow = 0; grow < 60; ++grow) {
      double worst = -std::numeric_limits<double>::infinity();
      const int probes = m == 1 ? 1 : 41;
      for (int s = 0; s < probes; ++s) {
        Vector pt(m);
        for (Eigen::Index j = 0; j < m; ++j) {
          const double along = j == axis ? limit[j] : limit[j] * (s + 0.5) / probes;
          pt[j] = signs[j] * along;
        }
        worst = std::max(worst, log_f(pt) - w.peak);
      }
      if (worst < floor) break;
      limit[axis] *= 1.5;
    }
  }
  return limit;
}

double orthant_integral(const Vector& signs, const Vector& limit, double peak,
                        const std::function<double(const Vector&)>& log_f,
                        const QuadratureSpec& spec) {
  const Eigen::Index m = signs.size();
  if (m == 1) {
    auto fn = [&](double t) {
      Vector b(1);
      b[0] = signs[0] * t;
      return std::exp(log_f(b) - peak);
    };
    return integrate(fn, 0.0, limit[0], spec);
  }
  auto outer = [&](double t1) {
    auto inner = [&](double t2) {
      Vector b(2);
      b[0] = signs[0] * t1;
      b[1] = signs[1] * t2;
      return std::exp(log_f(b) - peak);
    };
    double error = 0.0;
    return gauss_kronrod<double, 61>::integrate(inner, 0.0, limit[1],
                                                static_cast<unsigned>(spec.max_depth), spec.rel_tol,
                                                &error);
  };
  return integrate(outer, 0.0, limit[0], spec);
}

double sum_over_orthants(const Window& w, const QuadratureSpec& spec,
                         const std::function<double(const Vector&)>& log_f) {
  const Eigen::Index m = w.mode.size();
  double total = 0.0;
  for (int mask = 0; mask < (1 << m); ++mask) {
    Vector signs(m);
    for (Eigen::Index j = 0; j < m; ++j) signs[j] = (mask >> j) & 1 ? -1.0 : 1.0;
    const Vector limit = orthant_limits(w, signs, spec, log_f);
    total += orthant_integral(signs, limit, w.peak, log_f, spec);
  }
  return w.peak + std::log(total);
}

}  // namespace

double quadrature_marginal(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
                           const QuadratureSpec& spec, const Likelihood& lik) {
  check_problem(data, cfg, k, 2);
  if (k.empty()) return lik.null_log_lik(data);
  const Integrand integrand{ActiveDesign::from(data, k), cfg, &lik};
  const Window w = laplace_window(data, cfg, k, lik);
  return sum_over_orthants(w, spec, [&](const Vector& b) { return integrand.log_f(b); });
}

double hierarchical_marginal(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
                             const QuadratureSpec& spec) {
  check_problem(data, cfg, k, 1);
  if (k.size() != 1) throw std::invalid_argument("hierarchical_marginal: needs |k| = 1");
  const ActiveDesign design = ActiveDesign::from(data, k);
  const Likelihood& lik = logistic_likelihood();
  const double r = cfg.r;
  const double l1 = cfg.lambda1;
  const double l2 = cfg.lambda2;

  // log of (2r-1)!!, computed directly.
  double log_dfact = 0.0;
  for (int j = 1; j <= 2 * cfg.r - 1; j += 2) log_dfact += std::log(static_cast<double>(j));

  // log pMOM(beta | tau) + log IG(tau) + log tau  (the Jacobian of tau = e^u).
  auto log_joint = [&](double beta, double u) {
    const double tau = std::exp(u);
    const double pmom = -log_dfact - 0.5 * std::log(2.0 * std::numbers::pi) - (r + 0.5) * u -
                        beta * beta / (2.0 * tau) + 2.0 * r * std::log(std::abs(beta));
    const double ig = l1 * std::log(l2) - std::lgamma(l1) - (l1 + 1.0) * u - l2 / tau;
    return pmom + ig + u;
  };

  // log of the integral over tau for fixed beta.
  auto log_tau_integral = [&](double beta) {
    const double centre = std::log((l2 + 0.5 * beta * beta) / (r + 0.5 + l1));
    const double ref = log_joint(beta, centre);
    auto fn = [&](double u) { return std::exp(log_joint(beta, u) - ref); };
    return ref + std::log(integrate(fn, centre - 12.0, centre + 60.0, spec));
  };

  auto log_f = [&](const Vector& b) {
    if (b[0] == 0.0) return -std::numeric_limits<double>::infinity();
    return lik.log_lik(design, b) + log_tau_integral(b[0]);
  };
  const Window w = laplace_window(data, cfg, k, lik);
  return sum_over_orthants(w, spec, log_f);
}

ExhaustiveResult exhaustive_mode(const Dataset& data, const HyperPmomConfig& cfg, int max_size,
                                 const Likelihood& lik, int threads) {
  const int p = data.p();
  if (p > 15) throw std::invalid_argument("exhaustive_mode: p=" + std::to_string(p) + " exceeds 15");
  const int cap = std::min(max_size, cfg.m_n);

  std::vector<ModelIndex> models;
  for (std::uint32_t mask = 0; mask < (1U << p); ++mask) {
    if (std::popcount(mask) > cap) continue;
    std::vector<int> idx;
    for (int j = 0; j < p; ++j) {
      if (mask >> j & 1U) idx.push_back(j);
    }
    models.emplace_back(std::move(idx));
  }

  std::vector<std::optional<ScoredModel>> scored(models.size());
  parallel_for(models.size(), threads, [&](std::size_t i) {
    try {
      scored[i] = log_marginal(data, cfg, models[i], lik);
    } catch (const NumericalFailure&) {
      scored[i].reset();
    }
  });

  ExhaustiveResult out;
  bool have = false;
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (!scored[i]) continue;
    const double lp = *log_unnormalized_posterior(*scored[i], cfg);
    out.scores.emplace_back(models[i], lp);
    const auto better = [&] {
      if (!have || lp > out.best_log_posterior) return true;
      if (lp < out.best_log_posterior) return false;
      if (models[i].size() != out.best.k.size()) return models[i].size() < out.best.k.size();
      return models[i] < out.best.k;
    }();
    if (better) {
      have = true;
      out.best = *scored[i];
      out.best_log_posterior = lp;
    }
  }
  if (!have) throw NumericalFailure("exhaustive_mode: no model could be scored");
  for (const auto& [k, lp] : out.scores) {
    if (lp > out.best_log_posterior) throw std::logic_error("exhaustive_mode: argmax violated");
  }
  return out;
}

Vector central_gradient(const ScalarFn& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    Vector hi = x, lo = x;
    hi[i] += step;
    lo[i] -= step;
    g[i] = (f(hi) - f(lo)) / (2.0 * step);
  }
  return g;
}

Matrix central_jacobian(const VectorFn& g, const Vector& x, double h) {
  const Eigen::Index m = g(x).size();
  Matrix jac(m, x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x[i]));
    Vector hi = x, lo = x;
    hi[i] += step;
    lo[i] -= step;
    jac.col(i) = (g(hi) - g(lo)) / (2.0 * step);
  }
  return jac;
}

}  // namespace nlpsel::oracle
