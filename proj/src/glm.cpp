#include "mirs/glm.hpp"

#include <cmath>

#include "mirs/errors.hpp"

namespace mirs {

namespace {

// Sum of w_i * [y_i eta_i - log(1 + exp(eta_i))], stable in both tails.
double weighted_loglik(const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                       const Eigen::VectorXd& eta) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    if (w[i] == 0.0) continue;
    const double e = eta[i];
    const double log1pexp =
        e > 0.0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
    ll += w[i] * (y[i] * e - log1pexp);
  }
  return ll;
}

struct IrlsResult {
  Eigen::VectorXd beta;
  Eigen::MatrixXd info;
  int n_iter{0};
  bool converged{false};
  bool singular{false};
  std::vector<double> trace;
};

IrlsResult run_irls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& w, double tol, int max_iter,
                    double ridge) {
  const Eigen::Index p = X.cols();
  IrlsResult res;
  res.beta = Eigen::VectorXd::Zero(p);
  res.info = Eigen::MatrixXd::Zero(p, p);

  // Ridge acts on non-intercept coefficients only.
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(p, ridge);
  penalty[0] = 0.0;

  Eigen::VectorXd eta = X * res.beta;
  auto penalized_ll = [&](const Eigen::VectorXd& beta,
                          const Eigen::VectorXd& eta_at) {
    double ll = weighted_loglik(y, w, eta_at);
    if (ridge > 0.0) ll -= 0.5 * (penalty.array() * beta.array().square()).sum();
    return ll;
  };

  double ll = penalized_ll(res.beta, eta);
  res.trace.push_back(ll);

  for (int iter = 1; iter <= max_iter; ++iter) {
    res.n_iter = iter;
    Eigen::VectorXd mu(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) mu[i] = inv_logit(eta[i]);

    Eigen::VectorXd score = X.transpose() * (w.array() * (y - mu).array()).matrix();
    if (ridge > 0.0) score -= (penalty.array() * res.beta.array()).matrix();

    Eigen::VectorXd irls_w = (w.array() * mu.array() * (1.0 - mu.array())).matrix();
    res.info = X.transpose() * irls_w.asDiagonal() * X;
    if (ridge > 0.0) res.info += penalty.asDiagonal();

    if (score.cwiseAbs().maxCoeff() < tol) {
      res.converged = true;
      return res;
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(res.info);
    Eigen::VectorXd delta = ldlt.solve(score);
    if (ldlt.info() != Eigen::Success || !delta.allFinite()) {
      res.singular = true;
      return res;
    }

    // Step halving keeps the penalized log-likelihood non-decreasing.
    double step = 1.0;
    bool improved = false;
    Eigen::VectorXd beta_new, eta_new;
    double ll_new = ll;
    for (int half = 0; half < 30; ++half) {
      beta_new = res.beta + step * delta;
      eta_new = X * beta_new;
      ll_new = penalized_ll(beta_new, eta_new);
      if (std::isfinite(ll_new) && ll_new >= ll - 1e-10) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      res.singular = true;
      return res;
    }
    res.beta = beta_new;
    eta = eta_new;
    ll = ll_new;
    res.trace.push_back(ll);
  }
  return res;
}

}  // namespace

GlmFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& w, double tol, int max_iter) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (n == 0 || p == 0) throw FitError("empty design matrix");
  if (y.size() != n || w.size() != n)
    throw FitError("response/weight length does not match design matrix");

  bool saw0 = false, saw1 = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(w[i] >= 0.0) || !std::isfinite(w[i]))
      throw FitError("case weights must be finite and non-negative");
    if (y[i] != 0.0 && y[i] != 1.0) throw FitError("response must be 0/1");
    if (w[i] > 0.0) (y[i] == 1.0 ? saw1 : saw0) = true;
  }
  if (!saw0 || !saw1)
    throw FitError("need both response classes among positively weighted cases");

  const double ridge =
      1e-6 * static_cast<double>(n) / static_cast<double>(p);

  IrlsResult res;
  bool ridge_used = false;
  if (n >= p) {
    res = run_irls(X, y, w, tol, max_iter, 0.0);
    // A "converged" fit whose linear predictor is pinned far into a tail is
    // separation: the score vanished because probabilities saturated.
    if (res.converged && (X * res.beta).cwiseAbs().maxCoeff() > 30.0)
      res.converged = false;
  } else {
    res.singular = true;  // under-determined, go straight to the ridge
  }
  if (!res.converged) {
    ridge_used = true;
    res = run_irls(X, y, w, tol, max_iter, ridge);
    if (!res.converged)
      throw FitError(res.singular
                         ? "singular information matrix (ridge retry failed)"
                         : "IRLS did not converge (ridge retry failed)");
  }

  GlmFit fit;
  fit.beta = res.beta;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(res.info);
  fit.cov = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
  if (ldlt.info() != Eigen::Success || !fit.cov.allFinite())
    throw FitError("information matrix not invertible at convergence");
  // Symmetrize against round-off.
  fit.cov = 0.5 * (fit.cov + fit.cov.transpose()).eval();
  fit.n_iter = res.n_iter;
  fit.converged = res.converged;
  fit.ridge_used = ridge_used;
  fit.loglik_trace = std::move(res.trace);
  return fit;
}

Eigen::VectorXd predict_prob(const GlmFit& fit, const Eigen::MatrixXd& X) {
  if (X.cols() != fit.beta.size())
    throw FitError("design matrix column count does not match coefficients");
  Eigen::VectorXd eta = X * fit.beta;
  for (Eigen::Index i = 0; i < eta.size(); ++i) eta[i] = inv_logit(eta[i]);
  return eta;
}

namespace {

bool try_psd_factor(const Eigen::MatrixXd& A, double tol, Eigen::MatrixXd& L) {
  const Eigen::Index p = A.rows();
  L.setZero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double d = A(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (d > tol) {
      L(j, j) = std::sqrt(d);
      for (Eigen::Index i = j + 1; i < p; ++i) {
        double s = A(i, j);
        for (Eigen::Index k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
        L(i, j) = s / L(j, j);
      }
    } else if (d > -tol) {
      L.col(j).setZero();  // semi-definite direction
    } else {
      return false;
    }
  }
  return true;
}

}  // namespace

Eigen::MatrixXd psd_lower_factor(const Eigen::MatrixXd& A) {
  const double scale = std::max(1.0, A.diagonal().cwiseAbs().maxCoeff());
  Eigen::MatrixXd L;
  if (try_psd_factor(A, 1e-10 * scale, L)) return L;
  // Ill-conditioned inverses can look indefinite through cancellation;
  // escalate a diagonal jitter before giving up.
  for (double jitter = 1e-12 * scale; jitter <= 1e-4 * scale; jitter *= 10.0) {
    Eigen::MatrixXd Aj = A;
    Aj.diagonal().array() += jitter;
    if (try_psd_factor(Aj, 1e-10 * scale, L)) return L;
  }
  throw FitError("covariance matrix is not positive semi-definite");
}

Eigen::VectorXd draw_posterior(const GlmFit& fit, RandomStream& stream) {
  if (!fit.converged && !fit.ridge_used)
    throw FitError("posterior draw requires a converged fit");
  const Eigen::MatrixXd L = psd_lower_factor(fit.cov);
  Eigen::VectorXd z(fit.beta.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = stream.normal();
  return fit.beta + L * z;
}

}  // namespace mirs
