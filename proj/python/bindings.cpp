#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "nlpsel/laplace.hpp"
#include "nlpsel/metrics.hpp"
#include "nlpsel/prior.hpp"
#include "nlpsel/search.hpp"
#include "nlpsel/simulate.hpp"

namespace py = pybind11;
using namespace nlpsel;

namespace {

// Indices are 0-based on the Python side.
ModelIndex model_of(const std::vector<int>& indices, int p) {
  std::vector<int> sorted(indices);
  std::sort(sorted.begin(), sorted.end());
  ModelIndex k(std::move(sorted));
  k.check(p);
  return k;
}

HyperPmomConfig prior_of(int n, int p, std::optional<double> lambda2, double lambda1, int r,
                         std::optional<int> m_n, bool intercept) {
  HyperPmomConfig cfg = HyperPmomConfig::defaults(n, p);
  if (lambda2) cfg.lambda2 = *lambda2;
  if (m_n) cfg.m_n = *m_n;
  cfg.lambda1 = lambda1;
  cfg.r = r;
  cfg.intercept = intercept;
  cfg.validate(p);
  return cfg;
}

py::dict scored_dict(const ScoredModel& sm) {
  py::dict d;
  d["model"] = sm.k.indices();
  d["beta_hat"] = sm.beta_hat;
  d["intercept"] = sm.intercept;
  d["log_marginal"] = sm.log_laplace_marginal;
  d["log_f_at_mode"] = sm.log_f_at_mode;
  d["converged"] = sm.converged;
  d["iterations"] = sm.iterations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_nlpsel, m) {
  m.doc() = "Bayesian variable selection for logistic regression with hyper-pMOM priors.";

  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

  m.def("default_lambda2", &default_lambda2, py::arg("n"), py::arg("p"));
  m.def("default_model_size_cap", &default_model_size_cap, py::arg("n"), py::arg("p"));

  m.def(
      "simulate",
      [](int n, int p, int n_test, double signal, const std::string& covariance, double rho,
         const std::vector<int>& support, std::uint64_t seed) {
        SimDesign d;
        d.n = n;
        d.p = p;
        d.n_test = n_test;
        d.signal = signal;
        d.covariance = parse_covariance(covariance);
        d.rho = rho;
        d.true_support = model_of(support, p);
        d.seed = seed;
        const SimulatedData sim = generate(d);
        py::dict out;
        out["x"] = sim.raw_train_x;
        out["y"] = sim.train.y();
        out["x_test"] = sim.raw_test_x;
        out["y_test"] = sim.test.y();
        out["support"] = sim.truth.support.indices();
        out["beta"] = sim.truth.beta;
        return out;
      },
      py::arg("n") = 100, py::arg("p") = 100, py::arg("n_test") = 50, py::arg("signal") = 2.0,
      py::arg("covariance") = "isotropic", py::arg("rho") = 0.3, py::arg("support") = std::vector<int>{0, 1, 2},
      py::arg("seed") = 1,
      "Draws a train/test pair; x is returned unstandardized.");

  m.def(
      "log_marginal",
      [](const Matrix& x, const Vector& y, const std::vector<int>& model, std::optional<double> lambda2,
         double lambda1, int r, bool intercept) {
        const Dataset data = Dataset::standardize(x, y);
        const HyperPmomConfig cfg = prior_of(data.n(), data.p(), lambda2, lambda1, r, std::nullopt, intercept);
        return scored_dict(log_marginal(data, cfg, model_of(model, data.p())));
      },
      py::arg("x"), py::arg("y"), py::arg("model"), py::arg("lambda2") = py::none(), py::arg("lambda1") = 1.0,
      py::arg("r") = 1, py::arg("intercept") = false,
      "Laplace log marginal likelihood of one model on standardized x.");

  m.def(
      "fit",
      [](const Matrix& x, const Vector& y, const std::string& algorithm, int iterations, int k1, int k2,
         std::uint64_t seed, std::optional<std::vector<int>> initial, int threads, std::optional<double> lambda2,
         double lambda1, int r, std::optional<int> m_n, bool intercept) {
        const Dataset data = Dataset::standardize(x, y);
        const HyperPmomConfig cfg = prior_of(data.n(), data.p(), lambda2, lambda1, r, m_n, intercept);
        SearchConfig sc;
        sc.algorithm = parse_algorithm(algorithm);
        sc.n_iterations = iterations;
        sc.k1 = k1;
        sc.k2 = k2;
        sc.seed = seed;
        sc.threads = threads;
        if (initial) sc.initial_model = model_of(*initial, data.p());
        sc.validate();
        SearchTrace trace;
        {
          py::gil_scoped_release release;
          trace = run_search(data, cfg, sc);
        }
        py::dict out = scored_dict(trace.best);
        out["log_posterior"] = trace.best_log_posterior;
        out["models_scored"] = trace.cache_misses;
        out["models_scored_before_best"] = trace.models_scored_before_best;
        out["lambda2"] = cfg.lambda2;
        out["m_n"] = cfg.m_n;
        return out;
      },
      py::arg("x"), py::arg("y"), py::arg("algorithm") = "rsss", py::arg("iterations") = 100, py::arg("k1") = 10,
      py::arg("k2") = 10, py::arg("seed") = 1, py::arg("initial") = py::none(), py::arg("threads") = 1,
      py::arg("lambda2") = py::none(), py::arg("lambda1") = 1.0, py::arg("r") = 1, py::arg("m_n") = py::none(),
      py::arg("intercept") = false,
      "Stochastic shotgun search for the posterior mode model. x is standardized internally.");

  m.def(
      "selection_metrics",
      [](const std::vector<int>& selected, const std::vector<int>& truth, int p) {
        const SelectionReport rep = selection_report(model_of(selected, p), model_of(truth, p), p);
        py::dict out;
        out["precision"] = rep.precision;
        out["sensitivity"] = rep.sensitivity;
        out["specificity"] = rep.specificity;
        out["mcc"] = rep.mcc;
        out["tp"] = rep.counts.tp;
        out["tn"] = rep.counts.tn;
        out["fp"] = rep.counts.fp;
        out["fn"] = rep.counts.fn;
        return out;
      },
      py::arg("selected"), py::arg("truth"), py::arg("p"));
}
