#include <cmath>

#include "doctest.h"
#include "nlpsel/likelihood.hpp"
#include "nlpsel/simulate.hpp"

using namespace nlpsel;

namespace {

double corr(const Vector& a, const Vector& b) {
  const Vector ac = a.array() - a.mean();
  const Vector bc = b.array() - b.mean();
  return ac.dot(bc) / (ac.norm() * bc.norm());
}

}  // namespace

TEST_CASE("isotropic design has identity covariance") {
  SimDesign d;
  d.n = 100000;
  d.p = 3;
  d.seed = 2;
  const SimulatedData s = generate(d);
  const Matrix& x = s.raw_train_x;
  const Matrix centered = x.rowwise() - x.colwise().mean();
  const Matrix cov = centered.transpose() * centered / (d.n - 1.0);
  CHECK((cov - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("AR design correlations") {
  SimDesign d;
  d.n = 100000;
  d.p = 5;
  d.covariance = Covariance::AR;
  d.seed = 3;
  const SimulatedData s = generate(d);
  CHECK(std::abs(corr(s.raw_train_x.col(0), s.raw_train_x.col(1)) - 0.3) < 0.03);
  CHECK(std::abs(corr(s.raw_train_x.col(0), s.raw_train_x.col(2)) - 0.09) < 0.03);
  CHECK(design_covariance(d)(1, 4) == doctest::Approx(0.027));
}

TEST_CASE("a null coefficient vector gives a fair coin") {
  SimDesign d;
  d.n = 100000;
  d.p = 2;
  d.true_support = ModelIndex{};
  d.seed = 4;
  const SimulatedData s = generate(d);
  CHECK(std::abs(s.train.y().mean() - 0.5) < 0.01);
  CHECK(s.truth.beta.size() == 0);
}

TEST_CASE("generation is seed-deterministic") {
  SimDesign d;
  d.p = 20;
  d.seed = 77;
  const SimulatedData a = generate(d), b = generate(d);
  CHECK((a.train.x().array() == b.train.x().array()).all());
  CHECK((a.train.y().array() == b.train.y().array()).all());
  CHECK((a.test.x().array() == b.test.x().array()).all());
  CHECK((a.test.y().array() == b.test.y().array()).all());
  CHECK(a.truth.support == b.truth.support);
  d.seed = 78;
  CHECK_FALSE((generate(d).train.x().array() == a.train.x().array()).all());
}

TEST_CASE("responses depend on the design only through the true support") {
  SimDesign d;
  d.p = 30;
  d.signal = 1.0;
  d.covariance = Covariance::AR;
  d.true_support = ModelIndex{4, 9};
  d.seed = 5;
  const SimulatedData s = generate(d);
  const Vector eta = s.raw_train_x.col(4) + s.raw_train_x.col(9);
  CHECK((eta - s.train_eta).cwiseAbs().maxCoeff() < 1e-12);
  for (int i = 0; i < d.n; ++i) {
    CHECK(s.train.y()[i] == (s.train_uniforms[i] < logistic(eta[i]) ? 1.0 : 0.0));
  }
  for (int i = 0; i < d.n_test; ++i) {
    const double e = s.raw_test_x(i, 4) + s.raw_test_x(i, 9);
    CHECK(s.test.y()[i] == (s.test_uniforms[i] < logistic(e) ? 1.0 : 0.0));
  }
}

TEST_CASE("train is standardized and test reuses its statistics") {
  SimDesign d;
  d.seed = 6;
  const SimulatedData s = generate(d);
  CHECK(s.train.n() == 100);
  CHECK(s.test.n() == 50);
  CHECK(s.train.p() == 100);
  for (int j = 0; j < d.p; ++j) {
    const Vector c = s.train.x().col(j);
    CHECK(std::abs(c.mean()) < 1e-12);
    CHECK(std::abs((c.array() - c.mean()).matrix().squaredNorm() / 99.0 - 1.0) < 1e-12);
    const Vector expected =
        (s.raw_test_x.col(j).array() - s.train.column_means()[j]) / s.train.column_sds()[j];
    CHECK((expected - s.test.x().col(j)).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK(s.truth.beta == Vector::Constant(3, 2.0));
}

TEST_CASE("design parsing and validation") {
  CHECK(parse_signal("weak") == 1.0);
  CHECK(parse_signal("moderate") == 2.0);
  CHECK(parse_signal("1.5") == 1.5);
  CHECK_THROWS_AS(parse_signal("-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_signal("strong"), std::invalid_argument);
  CHECK(parse_covariance("ar") == Covariance::AR);
  CHECK_THROWS_AS(parse_covariance("toeplitz"), std::invalid_argument);
  SimDesign d;
  d.true_support = ModelIndex{0, 100};
  CHECK_THROWS_AS(generate(d), std::invalid_argument);
}
