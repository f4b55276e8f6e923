#include "nlpsel/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "nlpsel/likelihood.hpp"

namespace nlpsel {

Confusion confusion(const ModelIndex& selected, const ModelIndex& truth, int p) {
  selected.check(p);
  truth.check(p);
  Confusion c;
  for (int j : selected) {
    if (truth.contains(j)) {
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  c.fn = static_cast<int>(truth.size()) - c.tp;
  c.tn = p - c.tp - c.fp - c.fn;
  return c;
}

double mcc(int tp, int tn, int fp, int fn) {
  const double a = static_cast<double>(tp) + fp;
  const double b = static_cast<double>(tp) + fn;
  const double c = static_cast<double>(tn) + fp;
  const double d = static_cast<double>(tn) + fn;
  if (a == 0.0 || b == 0.0 || c == 0.0 || d == 0.0) return 0.0;
  const double num = static_cast<double>(tp) * tn - static_cast<double>(fp) * fn;
  return num / std::sqrt(a * b * c * d);
}

Vector predict_dense(const Dataset& test, const Vector& beta, double intercept) {
  if (beta.size() != test.p()) {
    throw std::invalid_argument("predict: coefficient length " + std::to_string(beta.size()) +
                                " does not match p=" + std::to_string(test.p()));
  }
  const Vector eta = (test.x() * beta).array() + intercept;
  return eta.unaryExpr([](double z) { return logistic(z); });
}

Vector predict(const Dataset& test, const ScoredModel& fitted) {
  return predict_dense(test, embed(fitted.k, fitted.beta_hat, test.p()), fitted.intercept);
}

double mspe(const Vector& y, const Vector& y_hat) {
  if (y.size() != y_hat.size()) {
    throw std::invalid_argument("mspe: " + std::to_string(y.size()) + " outcomes but " +
                                std::to_string(y_hat.size()) + " predictions");
  }
  if (y.size() == 0) throw std::invalid_argument("mspe: no observations");
  return (y - y_hat).squaredNorm() / static_cast<double>(y.size());
}

namespace {

std::optional<double> ratio(int num, int den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / den;
}

}  // namespace

SelectionReport selection_report(const ModelIndex& selected, const ModelIndex& truth, int p) {
  SelectionReport r;
  r.counts = confusion(selected, truth, p);
  const auto& c = r.counts;
  r.precision = ratio(c.tp, c.tp + c.fp);
  r.sensitivity = ratio(c.tp, c.tp + c.fn);
  r.specificity = ratio(c.tn, c.tn + c.fp);
  r.mcc = mcc(c.tp, c.tn, c.fp, c.fn);
  return r;
}

ModelIndex support_of(const Vector& beta, double threshold) {
  std::vector<int> idx;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (std::abs(beta[j]) > threshold) idx.push_back(static_cast<int>(j));
  }
  return ModelIndex(std::move(idx));
}

SelectionReport evaluate_coefficients(const Vector& beta, double intercept, const ModelIndex& truth,
                                      const Dataset& test, double threshold) {
  SelectionReport r = selection_report(support_of(beta, threshold), truth, test.p());
  r.mspe = mspe(test.y(), predict_dense(test, beta, intercept));
  return r;
}

ReportAverage average(const std::vector<SelectionReport>& reports) {
  ReportAverage out;
  out.replicates = static_cast<int>(reports.size());
  double sp = 0, ss = 0, sc = 0, sm = 0, se = 0;
  for (const auto& r : reports) {
    if (r.precision) sp += *r.precision, ++out.n_precision;
    if (r.sensitivity) ss += *r.sensitivity, ++out.n_sensitivity;
    if (r.specificity) sc += *r.specificity, ++out.n_specificity;
    sm += r.mcc, ++out.n_mcc;
    if (r.mspe) se += *r.mspe, ++out.n_mspe;
  }
  auto mean = [](double s, int n) -> std::optional<double> {
    if (n == 0) return std::nullopt;
    return s / n;
  };
  out.precision = mean(sp, out.n_precision);
  out.sensitivity = mean(ss, out.n_sensitivity);
  out.specificity = mean(sc, out.n_specificity);
  out.mcc = mean(sm, out.n_mcc);
  out.mspe = mean(se, out.n_mspe);
  return out;
}

std::vector<RocPoint> roc_points(const Vector& y, const Vector& y_hat,
                                 const std::vector<double>& thresholds) {
  if (y.size() != y_hat.size()) throw std::invalid_argument("roc_points: length mismatch");
  std::vector<RocPoint> out;
  for (double t : thresholds) {
    int tp = 0, fp = 0, pos = 0, neg = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const bool called = y_hat[i] >= t;
      if (y[i] == 1.0) {
        ++pos;
        tp += called;
      } else {
        ++neg;
        fp += called;
      }
    }
    out.push_back({t, neg ? static_cast<double>(fp) / neg : 0.0,
                   pos ? static_cast<double>(tp) / pos : 0.0});
  }
  return out;
}

}  // namespace nlpsel
