#include "nlpsel/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nlpsel {

namespace {

constexpr double kMinStartMagnitude = 0.05;
constexpr double kArmijo = 1e-4;
constexpr double kStepFraction = 0.9;
constexpr int kMaxBacktracks = 60;
constexpr int kPolishSteps = 3;

// f over theta = (beta_k, [intercept]); only the first m entries carry the prior.
class ModeObjective {
 public:
  ModeObjective(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
                const Likelihood& lik)
      : design_(ActiveDesign::from(data, k, cfg.intercept)),
        cfg_(cfg),
        lik_(lik),
        m_(static_cast<Eigen::Index>(k.size())) {}

  [[nodiscard]] Eigen::Index dim() const { return design_.dim(); }
  [[nodiscard]] Eigen::Index penalized() const { return m_; }
  [[nodiscard]] const ActiveDesign& design() const { return design_; }

  // -inf when a penalized coordinate is exactly zero.
  [[nodiscard]] double value(const Vector& theta) const {
    const Vector beta = theta.head(m_);
    if ((beta.array() == 0.0).any()) return -std::numeric_limits<double>::infinity();
    return lik_.log_lik(design_, theta) + log_prior_density(cfg_, beta);
  }

  double value_and_gradient(const Vector& theta, Vector& grad) const {
    const Vector beta = theta.head(m_);
    const double ll = lik_.log_lik_and_score(design_, theta, grad);
    grad.head(m_) += grad_log_prior(cfg_, beta);
    return ll + log_prior_density(cfg_, beta);
  }

  [[nodiscard]] Matrix hessian(const Vector& theta) const {
    Matrix h = -lik_.neg_hessian(design_, theta);
    if (m_ > 0) h.topLeftCorner(m_, m_) += hessian_log_prior(cfg_, theta.head(m_));
    return h;
  }

 private:
  ActiveDesign design_;
  HyperPmomConfig cfg_;
  const Likelihood& lik_;
  Eigen::Index m_;
};

Vector ridge_fit(const ActiveDesign& design, const Likelihood& lik) {
  const Eigen::Index d = design.dim();
  const double penalty = 1.0 / static_cast<double>(design.n());
  Vector theta = Vector::Zero(d);
  auto objective = [&](const Vector& t) { return lik.log_lik(design, t) - 0.5 * penalty * t.squaredNorm(); };
  double current = objective(theta);
  for (int iter = 0; iter < 50; ++iter) {
    const Vector g = lik.score(design, theta) - penalty * theta;
    Matrix h = lik.neg_hessian(design, theta);
    h.diagonal().array() += penalty;
    const Vector step = h.ldlt().solve(g);
    if (!step.allFinite()) break;
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      const Vector trial = theta + t * step;
      const double val = objective(trial);
      if (std::isfinite(val) && val >= current) {
        theta = trial;
        current = val;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted || t * step.lpNorm<Eigen::Infinity>() < 1e-10) break;
  }
  return theta;
}

// Largest step length along d that keeps every penalized coordinate strictly
// inside its current orthant.
double max_step(const Vector& x, const Vector& d, Eigen::Index penalized) {
  double t = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < penalized; ++i) {
    if (x[i] * d[i] < 0.0) t = std::min(t, -x[i] / d[i]);
  }
  return t;
}

}  // namespace

Vector ridge_start(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
                   const Likelihood& lik) {
  Vector theta = ridge_fit(ActiveDesign::from(data, k, cfg.intercept), lik);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(k.size()); ++i) {
    if (std::abs(theta[i]) < kMinStartMagnitude) {
      theta[i] = theta[i] < 0.0 ? -kMinStartMagnitude : kMinStartMagnitude;
    }
  }
  return theta;
}

ModeResult find_mode(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
                     const std::optional<Vector>& init, const Likelihood& lik,
                     const ModeOptions& opts) {
  if (k.empty() && !cfg.intercept) {
    throw std::invalid_argument("find_mode: the empty model has no coefficients to optimize");
  }
  k.check(data.p());
  ModeObjective obj(data, cfg, k, lik);
  const Eigen::Index d = obj.dim();
  const Eigen::Index m = obj.penalized();

  Vector x;
  if (init) {
    if (init->size() != d) throw std::invalid_argument("find_mode: init has wrong length");
    if ((init->head(m).array() == 0.0).any()) {
      throw std::invalid_argument("find_mode: init has a zero coefficient");
    }
    x = *init;
  } else {
    x = ridge_start(data, cfg, k, lik);
  }

  ModeResult result;
  result.diagnostics.start = x;

  Vector g(d);
  double fx = obj.value_and_gradient(x, g);
  if (!std::isfinite(fx)) {
    throw NumericalFailure("find_mode: objective is not finite at the start for model " +
                           k.to_string(1));
  }

  // Inverse Hessian seeded with the analytic curvature at the start when it is
  // usable, identity otherwise.
  const Matrix ident = Matrix::Identity(d, d);
  Matrix hinv = ident;
  {
    Eigen::LLT<Matrix> llt(-obj.hessian(x));
    if (llt.info() == Eigen::Success) {
      Matrix inv = llt.solve(ident);
      if (inv.allFinite()) hinv = inv;
    }
  }

  ModeDiagnostics& diag = result.diagnostics;
  diag.stop_reason = "max-iterations";
  int iter = 0;
  for (;; ++iter) {
    diag.grad_norm = g.lpNorm<Eigen::Infinity>();
    if (diag.grad_norm < opts.grad_tol * (1.0 + std::abs(fx))) {
      diag.converged = true;
      diag.stop_reason = "gradient";
      break;
    }
    if (iter >= opts.max_iterations) break;

    bool accepted = false;
    Vector x_new;
    Vector g_new(d);
    double f_new = fx;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      Vector dir = hinv * g;
      double slope = g.dot(dir);
      if (!(slope > 0.0) || !dir.allFinite()) {
        hinv = ident;
        dir = g;
        slope = g.squaredNorm();
      }
      double t = std::min(1.0, kStepFraction * max_step(x, dir, m));
      for (int ls = 0; ls < kMaxBacktracks; ++ls) {
        x_new = x + t * dir;
        const double trial = obj.value(x_new);
        if (std::isfinite(trial) && trial >= fx + kArmijo * t * slope) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) hinv = ident;
    }
    if (!accepted) {
      diag.stop_reason = "line-search";
      break;
    }

    f_new = obj.value_and_gradient(x_new, g_new);
    const Vector s = x_new - x;
    const Vector yv = g - g_new;  // gradient change of -f
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      const double rho = 1.0 / sy;
      const Matrix left = ident - rho * s * yv.transpose();
      hinv = left * hinv * left.transpose() + rho * s * s.transpose();
    }
    x = std::move(x_new);
    g = g_new;
    fx = f_new;
  }

  // The relative gradient test leaves the mode a few 1e-6 off when |f| is large;
  // polish with exact-curvature Newton steps, keeping any that improve f.
  if (diag.converged) {
    for (int polish = 0; polish < kPolishSteps; ++polish) {
      Eigen::LLT<Matrix> llt(-obj.hessian(x));
      if (llt.info() != Eigen::Success) break;
      const Vector step = llt.solve(g);
      if (!step.allFinite() || max_step(x, step, m) <= 1.0) break;
      Vector g_new(d);
      const Vector x_new = x + step;
      const double f_new = obj.value_and_gradient(x_new, g_new);
      if (!(f_new >= fx) || !(g_new.lpNorm<Eigen::Infinity>() <= g.lpNorm<Eigen::Infinity>())) break;
      x = x_new;
      g = g_new;
      fx = f_new;
    }
    diag.grad_norm = g.lpNorm<Eigen::Infinity>();
  }

  diag.iterations = iter;
  result.beta = x.head(m);
  result.intercept = cfg.intercept ? x[d - 1] : 0.0;
  result.log_f = fx;
  return result;
}

ScoredModel log_marginal(const Dataset& data, const HyperPmomConfig& cfg, const ModelIndex& k,
                         const Likelihood& lik, const ModeOptions& opts) {
  k.check(data.p());
  if (static_cast<int>(k.size()) > cfg.m_n) {
    throw std::invalid_argument("log_marginal: model " + k.to_string(1) +
                                " exceeds the size cap m_n=" + std::to_string(cfg.m_n));
  }
  ScoredModel sm;
  sm.k = k;
  if (k.empty() && !cfg.intercept) {
    const double null = lik.null_log_lik(data);
    sm.log_f_at_mode = null;
    sm.log_laplace_marginal = null;
    return sm;
  }

  const ModeResult mode = find_mode(data, cfg, k, std::nullopt, lik, opts);
  ModeObjective obj(data, cfg, k, lik);
  Vector theta(obj.dim());
  theta.head(obj.penalized()) = mode.beta;
  if (cfg.intercept) theta[obj.dim() - 1] = mode.intercept;

  Eigen::LLT<Matrix> llt(-obj.hessian(theta));
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("log_marginal: -V is not positive definite at the mode of model " +
                           k.to_string(1));
  }
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double value = 0.5 * static_cast<double>(obj.dim()) * std::log(2.0 * std::numbers::pi) +
                       mode.log_f - 0.5 * log_det;
  if (!std::isfinite(value)) {
    throw NumericalFailure("log_marginal: non-finite Laplace value for model " + k.to_string(1));
  }

  sm.beta_hat = mode.beta;
  sm.intercept = mode.intercept;
  sm.log_f_at_mode = mode.log_f;
  sm.log_laplace_marginal = value;
  sm.converged = mode.diagnostics.converged;
  sm.iterations = mode.diagnostics.iterations;
  return sm;
}

std::optional<double> log_unnormalized_posterior(const ScoredModel& sm, const HyperPmomConfig& cfg) {
  const auto prior = log_model_prior(cfg, sm.k);
  if (!prior) return std::nullopt;
  return *prior + sm.log_laplace_marginal;
}

double log_posterior_ratio(const ScoredModel& a, const ScoredModel& b, const HyperPmomConfig& cfg) {
  const auto la = log_unnormalized_posterior(a, cfg);
  const auto lb = log_unnormalized_posterior(b, cfg);
  if (!la || !lb) {
    throw std::invalid_argument("log_posterior_ratio: model exceeds the size cap");
  }
  return *la - *lb;
}

}  // namespace nlpsel
