#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nlpsel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Raised when an optimum is rejected (e.g. -V not positive definite at the
// claimed mode). Maps to CLI exit code 4.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered subset of covariate indices (0-based, strictly increasing).
class ModelIndex {
 public:
  ModelIndex() = default;
  ModelIndex(std::initializer_list<int> indices);
  explicit ModelIndex(std::vector<int> indices);

  /// Validates against a covariate count; throws std::invalid_argument.
  void check(int p) const;

  [[nodiscard]] std::size_t size() const { return indices_.size(); }
  [[nodiscard]] bool empty() const { return indices_.empty(); }
  [[nodiscard]] int operator[](std::size_t i) const { return indices_[i]; }
  [[nodiscard]] const std::vector<int>& indices() const { return indices_; }
  [[nodiscard]] auto begin() const { return indices_.begin(); }
  [[nodiscard]] auto end() const { return indices_.end(); }

  [[nodiscard]] bool contains(int j) const;
  [[nodiscard]] ModelIndex with(int j) const;
  [[nodiscard]] ModelIndex without(int j) const;
  [[nodiscard]] ModelIndex swapped(int out, int in) const;

  [[nodiscard]] std::string to_string(int base = 0) const;

  friend bool operator==(const ModelIndex&, const ModelIndex&) = default;
  friend std::strong_ordering operator<=>(const ModelIndex& a, const ModelIndex& b) {
    return a.indices_ <=> b.indices_;
  }

 private:
  std::vector<int> indices_;
};

struct ModelIndexHash {
  std::size_t operator()(const ModelIndex& k) const noexcept;
};

/// Design matrix and binary response. Columns are standardized when built via
/// standardize(); the raw constructor keeps X as given (means 0, sds 1).
class Dataset {
 public:
  Dataset(Matrix x, Vector y);

  /// Centers and scales every column to mean 0 / sample sd 1. Constant
  /// columns are rejected.
  static Dataset standardize(Matrix x, Vector y);
  /// Applies a previously computed standardization (train stats on test rows).
  static Dataset apply_standardization(Matrix x, Vector y, const Vector& means,
                                       const Vector& sds);

  [[nodiscard]] const Matrix& x() const { return x_; }
  [[nodiscard]] const Vector& y() const { return y_; }
  [[nodiscard]] const Vector& column_means() const { return means_; }
  [[nodiscard]] const Vector& column_sds() const { return sds_; }
  [[nodiscard]] int n() const { return static_cast<int>(x_.rows()); }
  [[nodiscard]] int p() const { return static_cast<int>(x_.cols()); }

 private:
  Dataset(Matrix x, Vector y, Vector means, Vector sds);

  Matrix x_;
  Vector y_;
  Vector means_;
  Vector sds_;
};

/// Columns of X restricted to a model (optionally with a trailing column of
/// ones), plus the response. Built once per model fit.
struct ActiveDesign {
  Matrix x;
  Vector y;

  static ActiveDesign from(const Dataset& data, const ModelIndex& k, bool intercept = false);
  [[nodiscard]] int n() const { return static_cast<int>(x.rows()); }
  [[nodiscard]] int dim() const { return static_cast<int>(x.cols()); }
};

/// Embeds active coefficients into a dense length-p vector.
Vector embed(const ModelIndex& k, const Vector& beta, int p);

}  // namespace nlpsel
