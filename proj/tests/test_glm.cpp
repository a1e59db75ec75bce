#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mirs/errors.hpp"
#include "mirs/glm.hpp"
#include "oracles.hpp"

using mirs::fit_logistic;
using mirs::GlmFit;

namespace {

struct Problem {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd w;
};

Problem random_problem(std::mt19937_64& gen, int n, int p,
                       bool unit_weights = false) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> wdist(0.5, 2.0);
  Problem prob;
  prob.X.resize(n, p);
  prob.y.resize(n);
  prob.w.resize(n);
  Eigen::VectorXd beta(p);
  for (int c = 0; c < p; ++c) beta[c] = 0.5 * normal(gen);
  for (int i = 0; i < n; ++i) {
    prob.X(i, 0) = 1.0;
    for (int c = 1; c < p; ++c) prob.X(i, c) = normal(gen);
    const double eta = prob.X.row(i) * beta;
    std::bernoulli_distribution coin(mirs::inv_logit(eta));
    prob.y[i] = coin(gen) ? 1.0 : 0.0;
    prob.w[i] = unit_weights ? 1.0 : wdist(gen);
  }
  // Guarantee both classes.
  prob.y[0] = 0.0;
  prob.y[1] = 1.0;
  return prob;
}

}  // namespace

TEST_CASE("intercept-only fit recovers logit of the mean") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(10, 1);
  Eigen::VectorXd y(10);
  y << 1, 1, 1, 0, 0, 0, 0, 0, 0, 0;
  const GlmFit fit = fit_logistic(X, y, Eigen::VectorXd::Ones(10));
  CHECK(fit.converged);
  CHECK_FALSE(fit.ridge_used);
  CHECK(fit.beta[0] == doctest::Approx(std::log(0.3 / 0.7)).epsilon(1e-8));
}

TEST_CASE("finite-difference score vanishes at convergence") {
  std::mt19937_64 gen(2024);
  for (int rep = 0; rep < 50; ++rep) {
    const Problem prob = random_problem(gen, 60, 3);
    const GlmFit fit = fit_logistic(prob.X, prob.y, prob.w);
    REQUIRE(fit.converged);

    std::vector<std::vector<double>> Xv(prob.X.rows(),
                                        std::vector<double>(prob.X.cols()));
    std::vector<double> yv(prob.y.size()), wv(prob.w.size()),
        beta(fit.beta.size());
    for (int i = 0; i < prob.X.rows(); ++i)
      for (int c = 0; c < prob.X.cols(); ++c) Xv[i][c] = prob.X(i, c);
    for (int i = 0; i < prob.y.size(); ++i) yv[i] = prob.y[i];
    for (int i = 0; i < prob.w.size(); ++i) wv[i] = prob.w[i];
    for (int c = 0; c < fit.beta.size(); ++c) beta[c] = fit.beta[c];

    const auto grad = oracles::logistic_score_fd(Xv, yv, wv, beta);
    for (double g : grad) CHECK(std::abs(g) < 1e-7);
  }
}

TEST_CASE("duplicating rows while halving weights leaves beta unchanged") {
  std::mt19937_64 gen(5);
  const Problem prob = random_problem(gen, 40, 3);
  const GlmFit fit = fit_logistic(prob.X, prob.y, prob.w);

  Eigen::MatrixXd X2(80, 3);
  Eigen::VectorXd y2(80), w2(80);
  X2 << prob.X, prob.X;
  y2 << prob.y, prob.y;
  w2 << 0.5 * prob.w, 0.5 * prob.w;
  const GlmFit fit2 = fit_logistic(X2, y2, w2);
  CHECK((fit.beta - fit2.beta).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("log-likelihood trace is non-decreasing") {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 20; ++rep) {
    const Problem prob = random_problem(gen, 50, 4);
    const GlmFit fit = fit_logistic(prob.X, prob.y, prob.w);
    for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i)
      CHECK(fit.loglik_trace[i] >= fit.loglik_trace[i - 1] - 1e-8);
  }
}

TEST_CASE("scaling a design column rescales its coefficient") {
  std::mt19937_64 gen(17);
  const Problem prob = random_problem(gen, 80, 3);
  const GlmFit fit = fit_logistic(prob.X, prob.y, prob.w);
  Eigen::MatrixXd Xs = prob.X;
  Xs.col(1) *= 10.0;
  const GlmFit fits = fit_logistic(Xs, prob.y, prob.w);
  CHECK(fits.beta[1] == doctest::Approx(fit.beta[1] / 10.0).epsilon(1e-6));
  CHECK(fits.beta[0] == doctest::Approx(fit.beta[0]).epsilon(1e-6));
  CHECK(fits.beta[2] == doctest::Approx(fit.beta[2]).epsilon(1e-6));
}

TEST_CASE("zero-weight cases have no influence") {
  std::mt19937_64 gen(23);
  Problem prob = random_problem(gen, 50, 3);
  for (int i = 40; i < 50; ++i) prob.w[i] = 0.0;
  const GlmFit full = fit_logistic(prob.X, prob.y, prob.w);
  const GlmFit sub = fit_logistic(prob.X.topRows(40), prob.y.head(40),
                                  prob.w.head(40));
  CHECK((full.beta - sub.beta).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("separated data falls back to the ridge") {
  Eigen::MatrixXd X(6, 2);
  X << 1, -3, 1, -2, 1, -1, 1, 1, 1, 2, 1, 3;
  Eigen::VectorXd y(6);
  y << 0, 0, 0, 1, 1, 1;
  const GlmFit fit = fit_logistic(X, y, Eigen::VectorXd::Ones(6));
  CHECK(fit.ridge_used);
  CHECK(fit.converged);
  CHECK(fit.beta.allFinite());
  CHECK(fit.beta[1] > 0.0);
}

TEST_CASE("under-determined fits go through the ridge") {
  Eigen::MatrixXd X(2, 3);
  X << 1, 0, 0, 1, 0, 0;
  Eigen::VectorXd y(2);
  y << 0, 1;
  const GlmFit fit = fit_logistic(X, y, Eigen::VectorXd::Ones(2));
  CHECK(fit.ridge_used);
  CHECK(fit.beta.allFinite());
}

TEST_CASE("single-class response is rejected") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Ones(5, 1);
  CHECK_THROWS_AS(
      fit_logistic(X, Eigen::VectorXd::Ones(5), Eigen::VectorXd::Ones(5)),
      mirs::FitError);
  // Both classes present, but only one carries positive weight.
  Eigen::VectorXd y(5), w(5);
  y << 1, 1, 1, 0, 0;
  w << 1, 1, 1, 0, 0;
  CHECK_THROWS_AS(fit_logistic(X, y, w), mirs::FitError);
}

TEST_CASE("predict_prob matches the direct formula") {
  std::mt19937_64 gen(31);
  const Problem prob = random_problem(gen, 30, 3);
  GlmFit fit;
  fit.beta = Eigen::VectorXd::Zero(3);
  fit.converged = true;

  SUBCASE("zero coefficients give one half") {
    const Eigen::VectorXd p = predict_prob(fit, prob.X);
    for (int i = 0; i < p.size(); ++i) CHECK(p[i] == 0.5);
  }
  SUBCASE("intercept-only gives the inverse logit of the intercept") {
    fit.beta[0] = std::log(0.3 / 0.7);
    Eigen::MatrixXd X = prob.X;
    X.col(1).setZero();
    X.col(2).setZero();
    const Eigen::VectorXd p = predict_prob(fit, X);
    for (int i = 0; i < p.size(); ++i)
      CHECK(p[i] == doctest::Approx(0.3).epsilon(1e-12));
  }
  SUBCASE("agrees with an explicitly coded inverse logit") {
    fit.beta << 0.3, -0.7, 1.1;
    const Eigen::VectorXd p = predict_prob(fit, prob.X);
    for (int i = 0; i < p.size(); ++i) {
      const double eta = prob.X.row(i) * fit.beta;
      CHECK(p[i] == doctest::Approx(1.0 / (1.0 + std::exp(-eta)))
                        .epsilon(1e-12));
    }
  }
  SUBCASE("dimension mismatch throws") {
    Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(4, 2);
    CHECK_THROWS_AS(predict_prob(fit, bad), mirs::FitError);
  }
}

TEST_CASE("posterior draws follow N(beta, cov)") {
  GlmFit fit;
  fit.beta.resize(2);
  fit.beta << 0.3, -0.2;
  fit.cov.resize(2, 2);
  fit.cov << 0.04, 0.01, 0.01, 0.09;
  fit.converged = true;

  mirs::RandomStream stream =
      mirs::derive_stream(mirs::StreamKey{20240101, {77}});
  const int n = 100000;
  std::vector<double> d0(n), d1(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd draw = draw_posterior(fit, stream);
    d0[i] = draw[0];
    d1[i] = draw[1];
  }
  CHECK(std::abs(oracles::mean(d0) - 0.3) < 4.0 * std::sqrt(0.04 / n));
  CHECK(std::abs(oracles::mean(d1) + 0.2) < 4.0 * std::sqrt(0.09 / n));

  const double v0 = oracles::sample_variance(d0);
  const double v1 = oracles::sample_variance(d1);
  double c01 = 0.0;
  const double m0 = oracles::mean(d0), m1 = oracles::mean(d1);
  for (int i = 0; i < n; ++i) c01 += (d0[i] - m0) * (d1[i] - m1);
  c01 /= n - 1;
  const double frob_err =
      std::sqrt(std::pow(v0 - 0.04, 2) + 2.0 * std::pow(c01 - 0.01, 2) +
                std::pow(v1 - 0.09, 2));
  const double frob =
      std::sqrt(0.04 * 0.04 + 2.0 * 0.01 * 0.01 + 0.09 * 0.09);
  CHECK(frob_err / frob < 0.05);
}

TEST_CASE("zero covariance degenerates to the point estimate") {
  GlmFit fit;
  fit.beta.resize(3);
  fit.beta << 1.0, -2.0, 0.5;
  fit.cov = Eigen::MatrixXd::Zero(3, 3);
  fit.converged = true;
  mirs::RandomStream stream =
      mirs::derive_stream(mirs::StreamKey{20240101, {78}});
  const Eigen::VectorXd draw = draw_posterior(fit, stream);
  CHECK(draw == fit.beta);
}

TEST_CASE("indefinite covariance is rejected") {
  GlmFit fit;
  fit.beta = Eigen::VectorXd::Zero(2);
  fit.cov.resize(2, 2);
  fit.cov << 1.0, 0.0, 0.0, -1.0;
  fit.converged = true;
  mirs::RandomStream stream =
      mirs::derive_stream(mirs::StreamKey{20240101, {79}});
  CHECK_THROWS_AS(draw_posterior(fit, stream), mirs::FitError);
}
