#include "mirs/impute.hpp"

#include <algorithm>
#include <numeric>

#include "mirs/errors.hpp"

namespace mirs {

void ImputationSpec::validate() const {
  if (m < 1) throw ConfigError("imputation count m must be >= 1");
  if (sweeps < 1) throw ConfigError("sweeps must be >= 1");
  if (predictors.empty())
    throw ConfigError("imputation model needs at least one predictor");
}

namespace {

double predictor_value(const DataMatrix& data, std::span<const double> weights,
                       PredictorRole role, std::size_t row) {
  switch (role) {
    case PredictorRole::X1:
      return data.x1[row];
    case PredictorRole::X2:
      return data.x2[row];
    case PredictorRole::Weight:
      return weights[row];
  }
  throw ConfigError("unknown predictor role");
}

Eigen::MatrixXd build_design(const DataMatrix& data,
                             std::span<const double> weights,
                             const ImputationSpec& spec,
                             const std::vector<std::uint32_t>& rows) {
  Eigen::MatrixXd X(rows.size(), spec.predictors.size() + 1);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    X(r, 0) = 1.0;
    for (std::size_t c = 0; c < spec.predictors.size(); ++c)
      X(r, c + 1) = predictor_value(data, weights, spec.predictors[c], rows[r]);
  }
  return X;
}

}  // namespace

GlmFit fit_imputation_model(const DataMatrix& data,
                            std::span<const double> weights,
                            const ImputationSpec& spec) {
  spec.validate();
  if (weights.size() != data.n())
    throw ImputeError("weight vector length does not match data");
  for (double w : weights)
    if (!std::isfinite(w) || w < 0.0)
      throw ImputeError("case weights must be finite and non-negative");

  std::vector<std::uint32_t> complete;
  complete.reserve(data.n());
  bool saw0 = false, saw1 = false;
  for (std::uint32_t i = 0; i < data.n(); ++i) {
    if (!data.y_observed[i]) continue;
    complete.push_back(i);
    (data.y[i] ? saw1 : saw0) = true;
  }
  if (complete.empty())
    throw ImputeError("all outcomes are missing; nothing to fit");
  if (!saw0 || !saw1)
    throw ImputeError("complete cases carry a single outcome class");

  Eigen::MatrixXd X = build_design(data, weights, spec, complete);
  Eigen::VectorXd y(complete.size());
  for (std::size_t r = 0; r < complete.size(); ++r)
    y[r] = static_cast<double>(data.y[complete[r]]);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(complete.size());
  try {
    return fit_logistic(X, y, ones);
  } catch (const FitError& e) {
    throw ImputeError(std::string("imputation model fit failed: ") + e.what());
  }
}

namespace detail {

ImputationContext make_imputation_context(const DataMatrix& data,
                                          std::span<const double> weights,
                                          const ImputationSpec& spec) {
  ImputationContext ctx;
  ctx.fit = fit_imputation_model(data, weights, spec);
  ctx.cov_factor = psd_lower_factor(ctx.fit.cov);

  ctx.missing_rows.reserve(data.n_missing());
  for (std::uint32_t i = 0; i < data.n(); ++i)
    if (!data.y_observed[i]) ctx.missing_rows.push_back(i);
  std::sort(ctx.missing_rows.begin(), ctx.missing_rows.end(),
            [&](std::uint32_t a, std::uint32_t b) {
              return data.case_id[a] < data.case_id[b];
            });
  ctx.design_missing = build_design(data, weights, spec, ctx.missing_rows);
  return ctx;
}

void draw_imputed_values(const ImputationContext& ctx,
                         const ImputationSpec& spec, RandomStream& stream,
                         std::span<std::int8_t> values) {
  const Eigen::Index p = ctx.fit.beta.size();
  Eigen::VectorXd z(p);
  for (int sweep = 0; sweep < spec.sweeps; ++sweep) {
    for (Eigen::Index c = 0; c < p; ++c) z[c] = stream.normal();
    const Eigen::VectorXd beta_star = ctx.fit.beta + ctx.cov_factor * z;
    const Eigen::VectorXd eta = ctx.design_missing * beta_star;
    for (Eigen::Index i = 0; i < eta.size(); ++i)
      values[i] = stream.bernoulli(inv_logit(eta[i])) ? 1 : 0;
  }
}

}  // namespace detail

CompletedDataset impute_once(const DataMatrix& data,
                             std::span<const double> weights,
                             const ImputationSpec& spec,
                             RandomStream& stream) {
  spec.validate();
  CompletedDataset out;
  out.base = std::make_shared<DataMatrix>(data);
  out.y_filled.assign(data.y.begin(), data.y.end());
  if (data.all_observed()) return out;

  const auto ctx = detail::make_imputation_context(data, weights, spec);
  std::vector<std::int8_t> values(ctx.missing_rows.size());
  detail::draw_imputed_values(ctx, spec, stream, values);
  for (std::size_t k = 0; k < ctx.missing_rows.size(); ++k)
    out.y_filled[ctx.missing_rows[k]] = values[k];
  return out;
}

std::vector<CompletedDataset> impute_m(const DataMatrix& data,
                                       std::span<const double> weights,
                                       const ImputationSpec& spec,
                                       const StreamKey& base_key) {
  spec.validate();
  std::vector<CompletedDataset> out;
  out.reserve(spec.m);

  auto base = std::make_shared<DataMatrix>(data);
  if (data.all_observed()) {
    for (int k = 1; k <= spec.m; ++k) {
      CompletedDataset cd;
      cd.base = base;
      cd.y_filled.assign(data.y.begin(), data.y.end());
      out.push_back(std::move(cd));
    }
    return out;
  }

  // The complete-case fit is deterministic, so it is shared across k.
  const auto ctx = detail::make_imputation_context(data, weights, spec);
  std::vector<std::int8_t> values(ctx.missing_rows.size());
  for (int k = 1; k <= spec.m; ++k) {
    RandomStream stream =
        derive_stream(base_key.child(static_cast<std::uint64_t>(k)));
    detail::draw_imputed_values(ctx, spec, stream, values);
    CompletedDataset cd;
    cd.base = base;
    cd.y_filled.assign(data.y.begin(), data.y.end());
    for (std::size_t i = 0; i < ctx.missing_rows.size(); ++i)
      cd.y_filled[ctx.missing_rows[i]] = values[i];
    out.push_back(std::move(cd));
  }
  return out;
}

}  // namespace mirs
