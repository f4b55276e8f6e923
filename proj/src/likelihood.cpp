#include "nlpsel/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nlpsel {

namespace {

void check_beta(const ActiveDesign& d, const Vector& beta) {
  if (beta.size() != d.x.cols()) {
    throw std::invalid_argument("likelihood: coefficient length " + std::to_string(beta.size()) +
                                " does not match model size " + std::to_string(d.x.cols()));
  }
  if (!beta.allFinite()) throw std::invalid_argument("likelihood: non-finite coefficients");
}

Vector linear_predictor(const ActiveDesign& d, const Vector& beta) {
  if (beta.size() == 0) return Vector::Zero(d.x.rows());
  return d.x * beta;
}

}  // namespace

double softplus(double z) { return std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0); }

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double LogisticLikelihood::log_lik(const ActiveDesign& d, const Vector& beta) const {
  check_beta(d, beta);
  const Vector eta = linear_predictor(d, beta);
  // Neumaier-compensated sum
  double total = 0.0;
  double carry = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double term = d.y[i] * eta[i] - softplus(eta[i]);
    const double t = total + term;
    carry += std::abs(total) >= std::abs(term) ? (total - t) + term : (term - t) + total;
    total = t;
  }
  return total + carry;
}

double Likelihood::log_lik_and_score(const ActiveDesign& d, const Vector& beta, Vector& grad) const {
  grad = score(d, beta);
  return log_lik(d, beta);
}

double LogisticLikelihood::log_lik_and_score(const ActiveDesign& d, const Vector& beta,
                                             Vector& grad) const {
  check_beta(d, beta);
  const Vector eta = linear_predictor(d, beta);
  Vector resid(eta.size());
  double total = 0.0;
  double carry = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double term = d.y[i] * eta[i] - softplus(eta[i]);
    const double t = total + term;
    carry += std::abs(total) >= std::abs(term) ? (total - t) + term : (term - t) + total;
    total = t;
    resid[i] = d.y[i] - logistic(eta[i]);
  }
  grad = d.x.transpose() * resid;
  return total + carry;
}

Vector LogisticLikelihood::score(const ActiveDesign& d, const Vector& beta) const {
  check_beta(d, beta);
  const Vector eta = linear_predictor(d, beta);
  Vector resid(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) resid[i] = d.y[i] - logistic(eta[i]);
  return d.x.transpose() * resid;
}

Matrix LogisticLikelihood::neg_hessian(const ActiveDesign& d, const Vector& beta) const {
  check_beta(d, beta);
  const Vector eta = linear_predictor(d, beta);
  Vector w(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double mu = logistic(eta[i]);
    w[i] = mu * (1.0 - mu);
  }
  Matrix h = d.x.transpose() * w.asDiagonal() * d.x;
  return 0.5 * (h + h.transpose());
}

double LogisticLikelihood::null_log_lik(const Dataset& data) const {
  return -static_cast<double>(data.n()) * std::numbers::ln2;
}

double LogisticLikelihood::mean(double eta) const { return logistic(eta); }

const Likelihood& logistic_likelihood() {
  static const LogisticLikelihood instance;
  return instance;
}

LikelihoodRegistry::LikelihoodRegistry() {
  entries_.emplace("logistic", std::shared_ptr<const Likelihood>(&logistic_likelihood(),
                                                                 [](const Likelihood*) {}));
}

LikelihoodRegistry& LikelihoodRegistry::global() {
  static LikelihoodRegistry registry;
  return registry;
}

void LikelihoodRegistry::add(std::shared_ptr<const Likelihood> lik) {
  if (!lik) throw std::invalid_argument("LikelihoodRegistry: null likelihood");
  std::lock_guard lock(mu_);
  entries_.insert_or_assign(std::string(lik->name()), std::move(lik));
}

std::shared_ptr<const Likelihood> LikelihoodRegistry::resolve(std::string_view name) const {
  std::lock_guard lock(mu_);
  if (auto it = entries_.find(name); it != entries_.end()) return it->second;
  std::string known;
  for (const auto& [key, _] : entries_) {
    if (!known.empty()) known += ", ";
    known += key;
  }
  throw std::invalid_argument("unknown likelihood '" + std::string(name) +
                              "'; registered likelihoods: " + known);
}

std::vector<std::string> LikelihoodRegistry::names() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [key, _] : entries_) out.push_back(key);
  return out;
}

std::shared_ptr<const Likelihood> resolve_likelihood(std::string_view name) {
  return LikelihoodRegistry::global().resolve(name);
}

double log_likelihood(const Dataset& data, const ModelIndex& k, const Vector& beta) {
  return logistic_likelihood().log_lik(ActiveDesign::from(data, k), beta);
}

Vector score(const Dataset& data, const ModelIndex& k, const Vector& beta) {
  return logistic_likelihood().score(ActiveDesign::from(data, k), beta);
}

Matrix neg_hessian(const Dataset& data, const ModelIndex& k, const Vector& beta) {
  return logistic_likelihood().neg_hessian(ActiveDesign::from(data, k), beta);
}

}  // namespace nlpsel
