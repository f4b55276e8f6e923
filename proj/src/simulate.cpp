#include "nlpsel/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "nlpsel/likelihood.hpp"

namespace nlpsel {

std::string to_string(Covariance c) { return c == Covariance::Isotropic ? "isotropic" : "ar"; }

Covariance parse_covariance(const std::string& name) {
  if (name == "isotropic" || name == "case1" || name == "1") return Covariance::Isotropic;
  if (name == "ar" || name == "ar1" || name == "case2" || name == "2") return Covariance::AR;
  throw std::invalid_argument("unknown covariance '" + name + "' (expected isotropic or ar)");
}

double parse_signal(const std::string& name) {
  if (name == "weak") return 1.0;
  if (name == "moderate") return 2.0;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(name, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != name.size() || !(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("invalid signal '" + name + "' (expected weak, moderate or a positive number)");
  }
  return value;
}

void SimDesign::validate() const {
  if (n < 2) throw std::invalid_argument("simulate: n must be >= 2");
  if (p < 1) throw std::invalid_argument("simulate: p must be >= 1");
  if (n_test < 1) throw std::invalid_argument("simulate: n_test must be >= 1");
  if (!(signal > 0.0)) throw std::invalid_argument("simulate: signal must be positive");
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("simulate: |rho| must be < 1");
  true_support.check(p);
}

Matrix design_covariance(const SimDesign& design) {
  const int p = design.p;
  if (design.covariance == Covariance::Isotropic) return Matrix::Identity(p, p);
  Matrix sigma(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) sigma(i, j) = std::pow(design.rho, std::abs(i - j));
  }
  return sigma;
}

namespace {

struct Draw {
  Matrix x;
  Vector eta;
  Vector u;
  Vector y;
};

Draw draw_rows(int rows, int p, const Matrix* chol, const Vector& beta_full, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Draw d;
  d.x.resize(rows, p);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < p; ++j) d.x(i, j) = normal(rng);
  }
  if (chol != nullptr) d.x = d.x * chol->transpose();  // rows become L z
  d.eta = d.x * beta_full;
  d.u.resize(rows);
  d.y.resize(rows);
  for (int i = 0; i < rows; ++i) {
    d.u[i] = unif(rng);
    d.y[i] = d.u[i] < logistic(d.eta[i]) ? 1.0 : 0.0;
  }
  return d;
}

}  // namespace

SimulatedData generate(const SimDesign& design) {
  design.validate();
  std::mt19937_64 rng(design.seed);

  Vector beta = Vector::Constant(static_cast<Eigen::Index>(design.true_support.size()), design.signal);
  const Vector beta_full = embed(design.true_support, beta, design.p);

  Matrix chol;
  const Matrix* chol_ptr = nullptr;
  if (design.covariance == Covariance::AR) {
    Eigen::LLT<Matrix> llt(design_covariance(design));
    if (llt.info() != Eigen::Success) throw std::runtime_error("simulate: covariance not positive definite");
    chol = llt.matrixL();
    chol_ptr = &chol;
  }

  Draw train = draw_rows(design.n, design.p, chol_ptr, beta_full, rng);
  Draw test = draw_rows(design.n_test, design.p, chol_ptr, beta_full, rng);

  Dataset train_data = Dataset::standardize(train.x, train.y);
  Dataset test_data = Dataset::apply_standardization(test.x, test.y, train_data.column_means(),
                                                     train_data.column_sds());
  return SimulatedData{std::move(train_data),
                       std::move(test_data),
                       Truth{design.true_support, std::move(beta)},
                       std::move(train.x),
                       std::move(test.x),
                       std::move(train.eta),
                       std::move(test.eta),
                       std::move(train.u),
                       std::move(test.u)};
}

}  // namespace nlpsel
