#pragma once

#include <cstdint>
#include <string>

#include "nlpsel/types.hpp"

namespace nlpsel {

enum class Covariance { Isotropic, AR };

std::string to_string(Covariance c);
Covariance parse_covariance(const std::string& name);
/// "weak" -> 1.0, "moderate" -> 2.0, otherwise a positive decimal.
double parse_signal(const std::string& name);

struct SimDesign {
  int n = 100;
  int p = 100;
  int n_test = 50;
  double signal = 2.0;
  Covariance covariance = Covariance::Isotropic;
  double rho = 0.3;
  ModelIndex true_support{0, 1, 2};
  std::uint64_t seed = 1;

  void validate() const;
};

struct Truth {
  ModelIndex support;
  Vector beta;  // aligned with support
};

struct SimulatedData {
  Dataset train;
  Dataset test;
  Truth truth;
  // Unstandardized draws and the linear predictors used to generate y.
  Matrix raw_train_x;
  Matrix raw_test_x;
  Vector train_eta;
  Vector test_eta;
  Vector train_uniforms;
  Vector test_uniforms;
};

/// Covariance matrix of the design: I or rho^|i-j|.
Matrix design_covariance(const SimDesign& design);

/// Draws x_i ~ N_p(0, Sigma) and y_i ~ Bernoulli(logistic(x_i' beta0)) from the raw
/// covariates, then standardizes the training columns and applies the
/// training means/sds to the test rows.
SimulatedData generate(const SimDesign& design);

}  // namespace nlpsel
