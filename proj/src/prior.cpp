#include "nlpsel/prior.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nlpsel {

namespace {

void require_nonzero(const Vector& beta) {
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    if (beta[i] == 0.0) {
      throw std::domain_error("hyper-pMOM density is zero: coefficient " + std::to_string(i) +
                              " is exactly 0");
    }
  }
  if (!beta.allFinite()) throw std::invalid_argument("prior: non-finite coefficients");
}

void require_match(const ModelIndex& k, const Vector& beta) {
  if (static_cast<Eigen::Index>(k.size()) != beta.size()) {
    throw std::invalid_argument("prior: coefficient length " + std::to_string(beta.size()) +
                                " does not match |k| = " + std::to_string(k.size()));
  }
}

// Exponent on (lambda2 + |beta|^2 / 2) after integrating tau out.
double tail_exponent(const HyperPmomConfig& cfg, Eigen::Index m) {
  const double km = static_cast<double>(m);
  return cfg.r * km + km / 2.0 + cfg.lambda1;
}

}  // namespace

HyperPmomConfig HyperPmomConfig::defaults(int n, int p) {
  HyperPmomConfig cfg;
  cfg.lambda2 = default_lambda2(n, p);
  cfg.m_n = default_model_size_cap(n, p);
  return cfg;
}

void HyperPmomConfig::validate(int p) const {
  if (r < 1) throw std::invalid_argument("prior: r must be >= 1");
  if (!(lambda1 > 0.0) || !std::isfinite(lambda1)) {
    throw std::invalid_argument("prior: lambda1 must be positive");
  }
  if (!(lambda2 > 0.0) || !std::isfinite(lambda2)) {
    throw std::invalid_argument("prior: lambda2 must be positive");
  }
  if (m_n < 1 || m_n > p) {
    throw std::invalid_argument("prior: m_n must lie in [1, p]; got " + std::to_string(m_n));
  }
}

double default_lambda2(int n, int p) {
  return 100.0 * std::pow(static_cast<double>(n), -1.0 / 3.0) *
         std::pow(static_cast<double>(p), 2.001 * 2.0 / 3.0);
}

int default_model_size_cap(int n, int p) {
  if (p <= 1) return p;
  const double base = std::ceil(std::sqrt(static_cast<double>(n) / std::log(static_cast<double>(p))));
  return static_cast<int>(std::min<double>(p, 4.0 * base));
}

double log_norm_const(int r, int k_size) {
  if (k_size == 0) return 0.0;
  double log_dfact = 0.0;
  for (int j = 2 * r - 1; j > 1; j -= 2) log_dfact += std::log(static_cast<double>(j));
  return -static_cast<double>(k_size) * log_dfact;
}

double log_prior_density(const HyperPmomConfig& cfg, const Vector& beta) {
  const Eigen::Index m = beta.size();
  if (m == 0) return 0.0;
  require_nonzero(beta);
  const double c = tail_exponent(cfg, m);
  const double km = static_cast<double>(m);
  double log_abs = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) log_abs += std::log(std::abs(beta[i]));
  return cfg.lambda1 * std::log(cfg.lambda2) - std::lgamma(cfg.lambda1) +
         log_norm_const(cfg.r, static_cast<int>(m)) -
         0.5 * km * std::log(2.0 * std::numbers::pi) + std::lgamma(c) -
         c * std::log(cfg.lambda2 + 0.5 * beta.squaredNorm()) + 2.0 * cfg.r * log_abs;
}

Vector grad_log_prior(const HyperPmomConfig& cfg, const Vector& beta) {
  const Eigen::Index m = beta.size();
  if (m == 0) return Vector();
  require_nonzero(beta);
  const double c = tail_exponent(cfg, m);
  const double s = cfg.lambda2 + 0.5 * beta.squaredNorm();
  return -(c / s) * beta + 2.0 * cfg.r * beta.cwiseInverse();
}

Matrix hessian_log_prior(const HyperPmomConfig& cfg, const Vector& beta) {
  const Eigen::Index m = beta.size();
  if (m == 0) return Matrix();
  require_nonzero(beta);
  const double c = tail_exponent(cfg, m);
  const double s = cfg.lambda2 + 0.5 * beta.squaredNorm();
  Matrix h = (c / (s * s)) * (beta * beta.transpose());
  h.diagonal().array() -= c / s;
  h.diagonal().array() -= 2.0 * cfg.r * beta.array().square().inverse();
  return h;
}

double log_objective_f(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
                       const Vector& beta, const Likelihood& lik) {
  require_match(k, beta);
  const double prior = log_prior_density(cfg, beta);
  return lik.log_lik(ActiveDesign::from(data, k), beta) + prior;
}

Vector grad_f(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
              const Vector& beta, const Likelihood& lik) {
  require_match(k, beta);
  if (k.empty()) return Vector();
  Vector g = grad_log_prior(cfg, beta);
  return lik.score(ActiveDesign::from(data, k), beta) + g;
}

Matrix hessian_V(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
                 const Vector& beta, const Likelihood& lik) {
  require_match(k, beta);
  if (k.empty()) return Matrix();
  Matrix h = hessian_log_prior(cfg, beta);
  return h - lik.neg_hessian(ActiveDesign::from(data, k), beta);
}

std::optional<double> log_model_prior(const HyperPmomConfig& cfg, const ModelIndex& k) {
  if (static_cast<int>(k.size()) > cfg.m_n) return std::nullopt;
  return 0.0;
}

}  // namespace nlpsel
