#include <memory>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "nlpsel/laplace.hpp"
#include "nlpsel/likelihood.hpp"
#include "nlpsel/oracle.hpp"
#include "nlpsel/search.hpp"

using namespace nlpsel;
using nlpsel::testing::max_rel_err;
using nlpsel::testing::random_dataset;
using nlpsel::testing::random_point;

namespace {

// Gaussian pseudo-likelihood -|y - X beta|^2 / 2; concave, exists only for tests.
class QuadraticPseudoLikelihood final : public Likelihood {
 public:
  std::string_view name() const override { return "quadratic-test"; }
  double log_lik(const ActiveDesign& d, const Vector& beta) const override {
    return -0.5 * (d.y - eta(d, beta)).squaredNorm();
  }
  Vector score(const ActiveDesign& d, const Vector& beta) const override {
    return d.x.transpose() * (d.y - eta(d, beta));
  }
  Matrix neg_hessian(const ActiveDesign& d, const Vector&) const override {
    return d.x.transpose() * d.x;
  }
  double null_log_lik(const Dataset& data) const override { return -0.5 * data.y().squaredNorm(); }
  double mean(double e) const override { return e; }

 private:
  static Vector eta(const ActiveDesign& d, const Vector& beta) {
    return beta.size() ? Vector(d.x * beta) : Vector(Vector::Zero(d.n()));
  }
};

// The interface contract every registered likelihood must satisfy.
void check_contract(const Likelihood& lik, const Dataset& data, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int size = 1; size <= 3; ++size) {
    for (int rep = 0; rep < 10; ++rep) {
      auto [k, beta] = random_point(data.p(), size, rng);
      const ActiveDesign d = ActiveDesign::from(data, k);
      const Vector fd = oracle::central_gradient([&](const Vector& b) { return lik.log_lik(d, b); }, beta);
      CHECK(max_rel_err(lik.score(d, beta), fd) < 1e-5);
      const Matrix fd_h =
          oracle::central_jacobian([&](const Vector& b) { return lik.score(d, b); }, beta);
      const Matrix h = lik.neg_hessian(d, beta);
      CHECK(max_rel_err(h, -fd_h) < 1e-4);
      CHECK(max_rel_err(h, h.transpose()) < 1e-14);
      CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues().minCoeff() > -1e-10);
      Vector g;
      const double v = lik.log_lik_and_score(d, beta, g);
      CHECK(v == doctest::Approx(lik.log_lik(d, beta)).epsilon(1e-14));
      CHECK(max_rel_err(g, lik.score(d, beta)) < 1e-14);
    }
  }
  CHECK(lik.null_log_lik(data) == doctest::Approx(lik.log_lik(ActiveDesign::from(data, {}), Vector())));
}

}  // namespace

TEST_CASE("resolve logistic delegates to the model core") {
  const auto lik = resolve_likelihood("logistic");
  REQUIRE(lik);
  CHECK(lik->name() == "logistic");
  const Dataset data = random_dataset(40, 6, 17);
  std::mt19937_64 rng(1);
  for (int rep = 0; rep < 10; ++rep) {
    auto [k, beta] = random_point(6, 3, rng);
    const ActiveDesign d = ActiveDesign::from(data, k);
    CHECK(std::abs(lik->log_lik(d, beta) - log_likelihood(data, k, beta)) < 1e-12);
  }
}

TEST_CASE("unknown likelihoods list the registered names") {
  CHECK_THROWS_WITH_AS(resolve_likelihood("probit"), doctest::Contains("logistic"),
                       std::invalid_argument);
}

TEST_CASE("logistic satisfies the likelihood contract") {
  check_contract(logistic_likelihood(), random_dataset(50, 8, 3), 7);
}

TEST_CASE("a registered pseudo-likelihood passes the contract and drives the pipeline") {
  LikelihoodRegistry::global().add(std::make_shared<QuadraticPseudoLikelihood>());
  const auto lik = resolve_likelihood("quadratic-test");
  const Dataset data = random_dataset(80, 8, 31, 2.0);
  check_contract(*lik, data, 9);

  HyperPmomConfig cfg = HyperPmomConfig::defaults(data.n(), data.p());
  const ScoredModel sm = log_marginal(data, cfg, {0, 1}, *lik);
  CHECK(sm.converged);
  CHECK(std::isfinite(sm.log_laplace_marginal));
  CHECK(grad_f(data, cfg, sm.k, sm.beta_hat, *lik).lpNorm<Eigen::Infinity>() <
        1e-6 * (1.0 + std::abs(sm.log_f_at_mode)));
  CHECK(log_marginal(data, cfg, {}, *lik).log_laplace_marginal == lik->null_log_lik(data));

  SearchConfig sc;
  sc.n_iterations = 15;
  sc.algorithm = Algorithm::SSS;
  sc.seed = 5;
  const SearchTrace trace = run_search(data, cfg, sc, *lik);
  CHECK(trace.visited.size() == 15);
  CHECK(trace.failed_scores == 0);
  for (const auto& v : trace.visited) CHECK(v.log_posterior <= trace.best_log_posterior);
}
