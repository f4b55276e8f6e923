#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "nlpsel/laplace.hpp"
#include "nlpsel/likelihood.hpp"
#include "nlpsel/oracle.hpp"

using namespace nlpsel;
using nlpsel::testing::max_rel_err;
using nlpsel::testing::random_dataset;
using nlpsel::testing::random_point;

TEST_CASE("model index neighbours stay sorted") {
  const ModelIndex k{1, 4, 7};
  CHECK(k.with(5) == ModelIndex{1, 4, 5, 7});
  CHECK(k.with(4) == k);
  CHECK(k.without(4) == ModelIndex{1, 7});
  CHECK(k.swapped(1, 9) == ModelIndex{4, 7, 9});
  CHECK(k.to_string(1) == "{2,5,8}");
  CHECK_THROWS_AS(ModelIndex({3, 2}), std::invalid_argument);
  CHECK_THROWS_AS(ModelIndex({2, 2}), std::invalid_argument);
  CHECK_THROWS_AS(k.check(7), std::invalid_argument);
}

TEST_CASE("dataset standardization") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(5.0, 3.0);
  Matrix x(40, 4);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  Vector y(40);
  for (int i = 0; i < 40; ++i) y[i] = i % 2;
  const Dataset d = Dataset::standardize(x, y);
  for (int j = 0; j < 4; ++j) {
    const double mean = d.x().col(j).mean();
    const double sd = std::sqrt(d.x().col(j).squaredNorm() / 39.0 - 40.0 / 39.0 * mean * mean);
    CHECK(std::abs(mean) < 1e-10);
    CHECK(std::abs(sd - 1.0) < 1e-10);
  }

  SUBCASE("constant columns are rejected") {
    Matrix c = x;
    c.col(2).setConstant(1.5);
    CHECK_THROWS_WITH_AS(Dataset::standardize(c, y), doctest::Contains("x3"), std::invalid_argument);
  }
  SUBCASE("responses must be binary") {
    Vector bad = y;
    bad[7] = 2.0;
    CHECK_THROWS_AS(Dataset::standardize(x, bad), std::invalid_argument);
  }
  SUBCASE("test rows reuse training statistics") {
    const Dataset t = Dataset::apply_standardization(x, y, d.column_means(), d.column_sds());
    CHECK(max_rel_err(t.x(), d.x()) < 1e-14);
  }
}

TEST_CASE("log_likelihood reference values") {
  Matrix x(4, 2);
  x << 0.3, -1.0, 2.0, 0.1, -0.7, 0.4, 1.1, 1.2;
  const Dataset data(x, Vector::Map(std::array{1.0, 0.0, 1.0, 1.0}.data(), 4));
  CHECK(log_likelihood(data, {}, Vector()) == doctest::Approx(-2.772588722239781).epsilon(1e-15));

  Matrix one(1, 1);
  one << 1.0;
  const Dataset single(one, Vector::Ones(1));
  Vector b(1);
  b << 1.0;
  CHECK(log_likelihood(single, {0}, b) == doctest::Approx(-0.31326168751822283).epsilon(1e-14));
}

TEST_CASE("log_likelihood at zero is exactly -n log 2") {
  for (int n : {1, 4, 10, 57, 100, 400}) {
    const Dataset data = random_dataset(std::max(n, 2), 5, 11 + n);
    const ModelIndex k{0, 2, 3};
    CHECK(log_likelihood(data, k, Vector::Zero(3)) == -data.n() * std::numbers::ln2);
  }
}

TEST_CASE("log_likelihood matches per-observation Bernoulli sums") {
  const Dataset data = random_dataset(100, 8, 5);
  const ModelIndex t{0, 1, 2};
  Vector beta = Vector::Ones(3);
  double brute = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    double eta = 0.0;
    for (int j = 0; j < 3; ++j) eta += data.x()(i, t[j]) * beta[j];
    const double prob = 1.0 / (1.0 + std::exp(-eta));
    brute += data.y()[i] == 1.0 ? std::log(prob) : std::log(1.0 - prob);
  }
  CHECK(std::abs(log_likelihood(data, t, beta) - brute) < 1e-10);
}

TEST_CASE("softplus survives extreme linear predictors") {
  CHECK(softplus(700.0) == doctest::Approx(700.0));
  CHECK(softplus(-700.0) > 0.0);
  CHECK(std::isfinite(softplus(800.0)));
  Matrix x(2, 1);
  x << 700.0, -700.0;
  Vector y(2);
  y << 0.0, 1.0;
  const Dataset data(x, y);
  Vector b(1);
  b << 1.0;
  CHECK(log_likelihood(data, {0}, b) == doctest::Approx(-1400.0));
  CHECK(score(data, {0}, b).allFinite());
  CHECK(neg_hessian(data, {0}, b).allFinite());
}

TEST_CASE("dimension and finiteness errors") {
  const Dataset data = random_dataset(20, 4, 2);
  CHECK_THROWS_AS(log_likelihood(data, {0, 1}, Vector::Ones(3)), std::invalid_argument);
  Vector nan = Vector::Ones(2);
  nan[1] = std::nan("");
  CHECK_THROWS_AS(log_likelihood(data, {0, 1}, nan), std::invalid_argument);
  CHECK_THROWS_AS(score(data, {0, 9}, Vector::Ones(2)), std::invalid_argument);
}

TEST_CASE("score and neg_hessian for the empty model") {
  const Dataset data = random_dataset(20, 4, 2);
  CHECK(score(data, {}, Vector()).size() == 0);
  CHECK(neg_hessian(data, {}, Vector()).size() == 0);
}

TEST_CASE("neg_hessian at the origin is X'X / 4") {
  const Dataset data = random_dataset(30, 5, 8);
  const ModelIndex k{1, 3, 4};
  const Matrix xk = ActiveDesign::from(data, k).x;
  const Matrix expected = xk.transpose() * xk / 4.0;
  CHECK(max_rel_err(neg_hessian(data, k, Vector::Zero(3)), expected) < 1e-14);
}

TEST_CASE("score and neg_hessian match finite differences") {
  std::mt19937_64 rng(99);
  for (int size = 1; size <= 4; ++size) {
    const Dataset data = random_dataset(50, 10, 100 + size);
    for (int rep = 0; rep < 20; ++rep) {
      auto [k, beta] = random_point(10, size, rng);
      const Vector fd = oracle::central_gradient(
          [&](const Vector& b) { return log_likelihood(data, k, b); }, beta);
      CHECK(max_rel_err(score(data, k, beta), fd) < 1e-5);
      const Matrix fd_h = oracle::central_jacobian(
          [&](const Vector& b) { return score(data, k, b); }, beta);
      CHECK(max_rel_err(neg_hessian(data, k, beta), -fd_h) < 1e-4);
    }
  }
}

TEST_CASE("score vanishes at the unpenalized MLE") {
  const Dataset data = random_dataset(100, 6, 21);
  const ModelIndex k{0, 1, 2};
  Vector beta = Vector::Zero(3);
  for (int it = 0; it < 50; ++it) {
    beta += neg_hessian(data, k, beta).ldlt().solve(score(data, k, beta));
  }
  CHECK(score(data, k, beta).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("log_likelihood is concave along random segments") {
  std::mt19937_64 rng(4);
  const Dataset data = random_dataset(60, 6, 12);
  for (int rep = 0; rep < 50; ++rep) {
    auto [k, a] = random_point(6, 3, rng, 8.0);
    auto [k2, b] = random_point(6, 3, rng, 8.0);
    (void)k2;
    const double la = log_likelihood(data, k, a);
    const double lb = log_likelihood(data, k, b);
    const double mid = log_likelihood(data, k, 0.5 * (a + b));
    CHECK(std::isfinite(mid));
    CHECK(mid >= std::min(la, lb));
    CHECK(mid >= 0.5 * (la + lb) - 1e-9);
  }
}
