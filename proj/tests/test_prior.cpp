#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "nlpsel/oracle.hpp"
#include "nlpsel/prior.hpp"

using namespace nlpsel;
using nlpsel::testing::max_rel_err;
using nlpsel::testing::random_dataset;
using nlpsel::testing::random_point;

namespace {

// Density value of the tau-marginal hyper-pMOM prior assembled factor by factor.
double brute_prior_density(const HyperPmomConfig& cfg, const Vector& beta) {
  const double m = static_cast<double>(beta.size());
  double dfact = 1.0;
  for (int j = 2 * cfg.r - 1; j > 1; j -= 2) dfact *= j;
  const double c = cfg.r * m + m / 2.0 + cfg.lambda1;
  double prod = 1.0;
  for (Eigen::Index i = 0; i < beta.size(); ++i) prod *= std::pow(beta[i], 2 * cfg.r);
  return std::pow(cfg.lambda2, cfg.lambda1) / std::tgamma(cfg.lambda1) * std::tgamma(c) /
         std::pow(cfg.lambda2 + beta.dot(beta) / 2.0, c) * std::pow(dfact, -m) *
         std::pow(2.0 * std::numbers::pi, -m / 2.0) * prod;
}

}  // namespace

TEST_CASE("default_lambda2") {
  CHECK(default_lambda2(1, 1) == doctest::Approx(100.0).epsilon(1e-15));
  // 40-digit evaluations of 100 n^(-1/3) p^(2.001*2/3)
  CHECK(default_lambda2(100, 100) == doctest::Approx(10030.748310822916867).epsilon(1e-10));
  CHECK(default_lambda2(100, 300) == doctest::Approx(43432.325868542498326).epsilon(1e-10));
}

TEST_CASE("default model size cap") {
  CHECK(default_model_size_cap(100, 1) == 1);
  CHECK(default_model_size_cap(100, 8) == 8);
  // ceil(sqrt(100 / log 100)) = 5
  CHECK(default_model_size_cap(100, 100) == 20);
  CHECK(default_model_size_cap(100, 500) == 20);
}

TEST_CASE("log_norm_const") {
  CHECK(log_norm_const(1, 3) == 0.0);
  CHECK(log_norm_const(2, 2) == doctest::Approx(-2.1972245773362194).epsilon(1e-15));
  CHECK(log_norm_const(1, 0) == 0.0);
  CHECK(log_norm_const(3, 1) == doctest::Approx(-std::log(15.0)));
}

TEST_CASE("config validation") {
  HyperPmomConfig cfg = HyperPmomConfig::defaults(100, 50);
  CHECK_NOTHROW(cfg.validate(50));
  CHECK(cfg.r == 1);
  CHECK(cfg.lambda1 == 1.0);
  CHECK_FALSE(cfg.intercept);
  auto bad = cfg;
  bad.r = 0;
  CHECK_THROWS_AS(bad.validate(50), std::invalid_argument);
  bad = cfg;
  bad.lambda2 = -1;
  CHECK_THROWS_AS(bad.validate(50), std::invalid_argument);
  bad = cfg;
  bad.m_n = 51;
  CHECK_THROWS_AS(bad.validate(50), std::invalid_argument);
}

TEST_CASE("f of the empty model is the null likelihood") {
  const Dataset data = random_dataset(10, 4, 1);
  const HyperPmomConfig cfg = HyperPmomConfig::defaults(10, 4);
  CHECK(log_objective_f(data, cfg, {}, Vector()) == -10.0 * std::numbers::ln2);
  CHECK(grad_f(data, cfg, {}, Vector()).size() == 0);
  CHECK(hessian_V(data, cfg, {}, Vector()).size() == 0);
}

TEST_CASE("f equals likelihood plus factor-by-factor prior density") {
  std::mt19937_64 rng(13);
  const Dataset data = random_dataset(50, 10, 2);
  for (double lambda2 : {5.0, 1000.0, default_lambda2(50, 10)}) {
    for (int r : {1, 2}) {
      HyperPmomConfig cfg = HyperPmomConfig::defaults(50, 10);
      cfg.lambda2 = lambda2;
      cfg.r = r;
      cfg.lambda1 = r == 1 ? 1.0 : 2.5;
      for (int rep = 0; rep < 10; ++rep) {
        auto [k, beta] = random_point(10, 1 + rep % 4, rng);
        const double expected = log_likelihood(data, k, beta) + std::log(brute_prior_density(cfg, beta));
        CHECK(std::abs(log_objective_f(data, cfg, k, beta) - expected) < 1e-10);
      }
    }
  }
}

TEST_CASE("grad_f and hessian_V match finite differences") {
  std::mt19937_64 rng(17);
  for (int inst = 0; inst < 5; ++inst) {
    const Dataset data = random_dataset(50, 10, 300 + inst);
    const HyperPmomConfig cfg = HyperPmomConfig::defaults(50, 10);
    for (int rep = 0; rep < 20; ++rep) {
      auto [k, beta] = random_point(10, 1 + rep % 4, rng);
      const Vector fd = oracle::central_gradient(
          [&](const Vector& b) { return log_objective_f(data, cfg, k, b); }, beta);
      CHECK(max_rel_err(grad_f(data, cfg, k, beta), fd) < 1e-5);
      const Matrix fd_h = oracle::central_jacobian(
          [&](const Vector& b) { return grad_f(data, cfg, k, b); }, beta);
      CHECK(max_rel_err(hessian_V(data, cfg, k, beta), fd_h) < 1e-4);
    }
  }
}

TEST_CASE("zero coefficients are a domain error") {
  const Dataset data = random_dataset(20, 4, 5);
  const HyperPmomConfig cfg = HyperPmomConfig::defaults(20, 4);
  Vector beta(2);
  beta << 0.5, 0.0;
  CHECK_THROWS_AS(log_objective_f(data, cfg, {0, 1}, beta), std::domain_error);
  CHECK_THROWS_AS(grad_f(data, cfg, {0, 1}, beta), std::domain_error);
  CHECK_THROWS_AS(hessian_V(data, cfg, {0, 1}, beta), std::domain_error);
  CHECK_THROWS_AS(log_objective_f(data, cfg, {0, 1}, Vector::Ones(3)), std::invalid_argument);
}

TEST_CASE("f is repelled from zero coordinates") {
  std::mt19937_64 rng(23);
  const Dataset data = random_dataset(50, 6, 9);
  const HyperPmomConfig cfg = HyperPmomConfig::defaults(50, 6);
  for (int rep = 0; rep < 20; ++rep) {
    auto [k, beta] = random_point(6, 1 + rep % 3, rng);
    Vector near = beta, nearer = beta;
    near[0] = 1e-3;
    nearer[0] = 1e-8;
    CHECK(log_objective_f(data, cfg, k, nearer) < log_objective_f(data, cfg, k, near) - 10.0);
  }
}

TEST_CASE("f is invariant to relabeling covariates") {
  const Dataset data = random_dataset(50, 5, 4);
  Matrix swapped = data.x();
  swapped.col(0).swap(swapped.col(3));
  const Dataset other(swapped, data.y());
  const HyperPmomConfig cfg = HyperPmomConfig::defaults(50, 5);
  Vector a(3), b(3);
  a << 0.7, -1.2, 2.0;  // k = {0, 2, 3}
  b << 2.0, -1.2, 0.7;  // same coefficients after swapping columns 0 and 3
  CHECK(log_objective_f(data, cfg, {0, 2, 3}, a) ==
        doctest::Approx(log_objective_f(other, cfg, {0, 2, 3}, b)).epsilon(1e-13));
}

TEST_CASE("gradient is dominated by the score for large coefficients") {
  const Dataset data = random_dataset(50, 3, 6, 2.0);
  const HyperPmomConfig cfg = HyperPmomConfig::defaults(50, 3);
  Vector beta(1);
  beta << 50.0;
  const double prior_part = grad_f(data, cfg, {0}, beta)[0] - score(data, {0}, beta)[0];
  const double c = cfg.r + 0.5 + cfg.lambda1;
  CHECK(std::abs(prior_part) <= 2.0 * cfg.r / 50.0 + c * 50.0 / (cfg.lambda2 + 1250.0) + 1e-12);
  CHECK(std::abs(score(data, {0}, beta)[0]) > std::abs(prior_part));
}

TEST_CASE("log_model_prior") {
  HyperPmomConfig cfg;
  cfg.m_n = 10;
  CHECK(log_model_prior(cfg, {0, 1, 2}) == 0.0);
  std::vector<int> big(11);
  for (int i = 0; i < 11; ++i) big[i] = i;
  CHECK_FALSE(log_model_prior(cfg, ModelIndex(big)).has_value());
}

TEST_CASE("closed-form tau marginal matches hierarchical quadrature") {
  // Tiny-n fixture: 1-D quadrature of exp(f) vs 2-D (beta, tau) quadrature of the
  // pMOM x Inverse-Gamma hierarchy.
  const Dataset data = random_dataset(20, 3, 77, 1.5);
  for (double lambda1 : {1.0, 0.5, 3.0}) {
    HyperPmomConfig cfg = HyperPmomConfig::defaults(20, 3);
    cfg.lambda1 = lambda1;
    const double closed = oracle::quadrature_marginal(data, cfg, {0});
    const double hier = oracle::hierarchical_marginal(data, cfg, {0});
    CHECK(std::abs(std::expm1(closed - hier)) < 1e-4);
  }
}
