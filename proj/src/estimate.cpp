#include "mirs/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mirs/errors.hpp"
#include "mirs/glm.hpp"

namespace mirs {

WeightVector compute_blend_weights(const DataMatrix& data) {
  const std::size_t n = data.n();
  if (n == 0) throw EstimateError("cannot compute weights on empty data");
  bool saw_prob = false, saw_conv = false;
  for (Source s : data.source)
    (s == Source::Probability ? saw_prob : saw_conv) = true;
  if (!saw_prob || !saw_conv)
    throw EstimateError("weights need both probability and convenience cases");

  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd conv(n);
  for (std::size_t i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = data.x1[i];
    X(i, 2) = data.x2[i];
    conv[i] = data.source[i] == Source::Convenience ? 1.0 : 0.0;
  }
  GlmFit fit;
  try {
    fit = fit_logistic(X, conv, Eigen::VectorXd::Ones(n));
  } catch (const FitError& e) {
    throw EstimateError(std::string("membership model fit failed: ") +
                        e.what());
  }
  const Eigen::VectorXd gamma = predict_prob(fit, X);

  WeightVector wv;
  wv.w.resize(n);
  wv.gamma_hat.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Keep gamma off the boundary so every weight stays finite and positive.
    const double g = std::clamp(gamma[i], 1e-12, 1.0 - 1e-12);
    wv.gamma_hat[i] = g;
    wv.w[i] = (1.0 - g) / data.p_s[i];
  }
  return wv;
}

double weighted_mean(std::span<const double> y, std::span<const double> w) {
  if (y.empty()) throw EstimateError("weighted mean of empty input");
  if (y.size() != w.size())
    throw EstimateError("weighted mean: length mismatch");
  double sw = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sw += w[i];
    swy += w[i] * y[i];
  }
  if (!(sw > 0.0)) throw EstimateError("weighted mean: sum of weights <= 0");
  return swy / sw;
}

namespace {

struct SplitSums {
  double sum_w{0.0};
  double sum_obs{0.0};  // sum over observed cases of w * y
};

SplitSums observed_sums(const DataMatrix& data, std::span<const double> w) {
  SplitSums s;
  for (std::size_t i = 0; i < data.n(); ++i) {
    s.sum_w += w[i];
    if (data.y_observed[i]) s.sum_obs += w[i] * static_cast<double>(data.y[i]);
  }
  return s;
}

}  // namespace

double weight_ratio(const WeightVector& wv) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double w : wv.w) {
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  return wv.w.empty() ? 0.0 : hi / lo;
}

std::vector<double> replicate_estimates_per_imputation(
    const DataMatrix& rep_data, const ImputationSpec& spec,
    const StreamKey& base_key) {
  return replicate_estimates_per_imputation(
      rep_data, compute_blend_weights(rep_data), spec, base_key);
}

std::vector<double> replicate_estimates_per_imputation(
    const DataMatrix& rep_data, const WeightVector& wv,
    const ImputationSpec& spec, const StreamKey& base_key) {
  spec.validate();
  const SplitSums sums = observed_sums(rep_data, wv.w);

  if (rep_data.all_observed())
    return std::vector<double>(spec.m, sums.sum_obs / sums.sum_w);

  const detail::ImputationContext ctx =
      detail::make_imputation_context(rep_data, wv.w, spec);
  std::vector<double> w_mis(ctx.missing_rows.size());
  for (std::size_t i = 0; i < ctx.missing_rows.size(); ++i)
    w_mis[i] = wv.w[ctx.missing_rows[i]];

  std::vector<double> out(spec.m);
  std::vector<std::int8_t> values(ctx.missing_rows.size());
  for (int k = 1; k <= spec.m; ++k) {
    RandomStream stream =
        derive_stream(base_key.child(static_cast<std::uint64_t>(k)));
    detail::draw_imputed_values(ctx, spec, stream, values);
    double s_mis = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
      s_mis += w_mis[i] * static_cast<double>(values[i]);
    out[k - 1] = (sums.sum_obs + s_mis) / sums.sum_w;
  }
  return out;
}

double replicate_estimate(const DataMatrix& rep_data,
                          const ImputationSpec& spec,
                          const StreamKey& base_key) {
  const auto per_k = replicate_estimates_per_imputation(rep_data, spec,
                                                        base_key);
  double s = 0.0;
  for (double v : per_k) s += v;
  return s / static_cast<double>(per_k.size());
}

ReuseImputations make_reuse_imputations(const DataMatrix& full_data,
                                        std::span<const double> full_weights,
                                        const ImputationSpec& spec,
                                        const StreamKey& base_key) {
  spec.validate();
  ReuseImputations imps;
  imps.m = spec.m;
  imps.missing_slot.assign(full_data.n(), -1);
  if (full_data.all_observed()) return imps;

  const auto ctx =
      detail::make_imputation_context(full_data, full_weights, spec);
  imps.missing_rows = ctx.missing_rows;
  for (std::size_t slot = 0; slot < imps.missing_rows.size(); ++slot)
    imps.missing_slot[imps.missing_rows[slot]] =
        static_cast<std::int32_t>(slot);
  imps.values.resize(imps.missing_rows.size() * spec.m);
  for (int k = 1; k <= spec.m; ++k) {
    RandomStream stream =
        derive_stream(base_key.child(static_cast<std::uint64_t>(k)));
    detail::draw_imputed_values(
        ctx, spec, stream,
        std::span<std::int8_t>(
            imps.values.data() + (k - 1) * imps.missing_rows.size(),
            imps.missing_rows.size()));
  }
  return imps;
}

std::vector<double> reuse_replicate_estimates_per_imputation(
    const DataMatrix& full_data, std::span<const double> full_weights,
    const ReuseImputations& imps, const ReplicatePlan& plan, int r) {
  if (r < 0 || r >= plan.count())
    throw ConfigError("replicate index out of range");
  const auto& rows = plan.replicates[r];

  double sum_w = 0.0, sum_obs = 0.0;
  std::vector<double> w_mis;
  std::vector<std::uint32_t> slot_mis;
  for (std::uint32_t i : rows) {
    const double w = full_weights[i];
    sum_w += w;
    if (full_data.y_observed[i]) {
      sum_obs += w * static_cast<double>(full_data.y[i]);
    } else {
      w_mis.push_back(w);
      slot_mis.push_back(static_cast<std::uint32_t>(imps.missing_slot[i]));
    }
  }
  if (!(sum_w > 0.0)) throw EstimateError("replicate has non-positive weight");

  std::vector<double> out(imps.m);
  for (int k = 0; k < imps.m; ++k) {
    double s_mis = 0.0;
    for (std::size_t t = 0; t < slot_mis.size(); ++t)
      s_mis += w_mis[t] * static_cast<double>(imps.value(k, slot_mis[t]));
    out[k] = (sum_obs + s_mis) / sum_w;
  }
  return out;
}

std::vector<double> reuse_mode_estimates(const DataMatrix& full_data,
                                         const ReplicatePlan& plan,
                                         const ImputationSpec& spec,
                                         const StreamKey& base_key) {
  const WeightVector wv = compute_blend_weights(full_data);
  const ReuseImputations imps =
      make_reuse_imputations(full_data, wv.w, spec, base_key);
  std::vector<double> out(plan.count());
  for (int r = 0; r < plan.count(); ++r) {
    const auto per_k = reuse_replicate_estimates_per_imputation(
        full_data, wv.w, imps, plan, r);
    double s = 0.0;
    for (double v : per_k) s += v;
    out[r] = s / static_cast<double>(per_k.size());
  }
  return out;
}

}  // namespace mirs
