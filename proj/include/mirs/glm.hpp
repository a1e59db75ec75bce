#ifndef MIRS_GLM_HPP
#define MIRS_GLM_HPP

#include <Eigen/Dense>

#include "mirs/rng.hpp"

namespace mirs {

inline double inv_logit(double eta) {
  if (eta >= 0.0) {
    return 1.0 / (1.0 + std::exp(-eta));
  }
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

// Weighted logistic regression fit.  cov is the inverse of the weighted
// Fisher information at convergence (including the ridge term when the
// fallback was used).
struct GlmFit {
  Eigen::VectorXd beta;
  Eigen::MatrixXd cov;
  int n_iter{0};
  bool converged{false};
  bool ridge_used{false};
  std::vector<double> loglik_trace;  // weighted log-likelihood per iteration
};

// Maximizes the w-weighted Bernoulli log-likelihood by iteratively
// reweighted least squares with step halving.  On separation or a singular
// information matrix the fit is retried with a small ridge penalty
// (1e-6 * n/p on the non-intercept coefficients, column 0 assumed to be the
// intercept); if that also fails a FitError is thrown.  Requires at least
// one y=0 and one y=1 among cases with positive weight.
GlmFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& w, double tol = 1e-8,
                    int max_iter = 50);

// Inverse-logit of X * beta.
Eigen::VectorXd predict_prob(const GlmFit& fit, const Eigen::MatrixXd& X);

// One draw beta + L z with L L^T = cov and z standard normal; consumes
// exactly beta.size() normals.  Requires a converged (or ridge) fit.
Eigen::VectorXd draw_posterior(const GlmFit& fit, RandomStream& stream);

// Lower-triangular factor L with L L^T = A for symmetric positive
// SEMI-definite A (rank-deficient columns are zeroed).  Throws FitError if
// A is indefinite beyond round-off.
Eigen::MatrixXd psd_lower_factor(const Eigen::MatrixXd& A);

}  // namespace mirs

#endif  // MIRS_GLM_HPP
