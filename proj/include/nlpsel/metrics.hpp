#pragma once

#include <optional>
#include <vector>

#include "nlpsel/laplace.hpp"
#include "nlpsel/types.hpp"

namespace nlpsel {

struct Confusion {
  int tp = 0;
  int tn = 0;
  int fp = 0;
  int fn = 0;
};

/// Selection quality of one fit. Ratios with a zero denominator are left empty.
struct SelectionReport {
  Confusion counts;
  std::optional<double> precision;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  double mcc = 0.0;
  std::optional<double> mspe;
};

Confusion confusion(const ModelIndex& selected, const ModelIndex& truth, int p);

/// Matthews correlation; 0 when any marginal count is zero.
double mcc(int tp, int tn, int fp, int fn);

/// Logistic probabilities for each test row with beta_hat embedded in R^p.
Vector predict(const Dataset& test, const ScoredModel& fitted);
/// Same, from a dense length-p coefficient vector (plus intercept).
Vector predict_dense(const Dataset& test, const Vector& beta, double intercept = 0.0);

/// Mean squared difference; length mismatch -> std::invalid_argument.
double mspe(const Vector& y, const Vector& y_hat);

SelectionReport selection_report(const ModelIndex& selected, const ModelIndex& truth, int p);

/// Indices whose |coefficient| exceeds the threshold (default: any nonzero).
ModelIndex support_of(const Vector& beta, double threshold = 0.0);

/// Scores an externally estimated dense coefficient vector through the same path.
SelectionReport evaluate_coefficients(const Vector& beta, double intercept, const ModelIndex& truth,
                                      const Dataset& test, double threshold = 0.0);

/// Column means over replicates, skipping undefined entries.
struct ReportAverage {
  std::optional<double> precision;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> mcc;
  std::optional<double> mspe;
  int n_precision = 0;
  int n_sensitivity = 0;
  int n_specificity = 0;
  int n_mcc = 0;
  int n_mspe = 0;
  int replicates = 0;
};

ReportAverage average(const std::vector<SelectionReport>& reports);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

/// (fpr, tpr) of the rule y_hat >= threshold at each given threshold.
std::vector<RocPoint> roc_points(const Vector& y, const Vector& y_hat,
                                 const std::vector<double>& thresholds);

}  // namespace nlpsel
