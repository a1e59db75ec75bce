#ifndef MIRS_ESTIMATE_HPP
#define MIRS_ESTIMATE_HPP

#include <span>
#include <vector>

#include "mirs/data.hpp"
#include "mirs/impute.hpp"
#include "mirs/resample.hpp"
#include "mirs/rng.hpp"

namespace mirs {

// Propensity blending weights w_i = (1 - gamma_i) / p_s_i, where gamma_i is
// the fitted probability of convenience-sample membership given (x1, x2).
struct WeightVector {
  std::vector<double> w;
  std::vector<double> gamma_hat;
};

// Unweighted logistic fit of 1{source = convenience} on (1, x1, x2) over
// all cases in data.  Throws EstimateError on single-source data.
WeightVector compute_blend_weights(const DataMatrix& data);

// Hajek ratio estimate sum(w y) / sum(w).
double weighted_mean(std::span<const double> y, std::span<const double> w);

// Per-imputation estimates for one replicate: recompute blending weights,
// fit the imputation model once, and return the weighted mean of each of
// the m completed datasets (imputation k keyed base_key.child(k)).
std::vector<double> replicate_estimates_per_imputation(
    const DataMatrix& rep_data, const ImputationSpec& spec,
    const StreamKey& base_key);

// Same, with the replicate's weights already computed by the caller.
std::vector<double> replicate_estimates_per_imputation(
    const DataMatrix& rep_data, const WeightVector& wv,
    const ImputationSpec& spec, const StreamKey& base_key);

// max(w) / min(w), the spread diagnostic logged per replicate.
double weight_ratio(const WeightVector& wv);

// Average of the per-imputation estimates: the replicate-level estimate
// mu_hat^(r) with freshly drawn imputations.
double replicate_estimate(const DataMatrix& rep_data,
                          const ImputationSpec& spec,
                          const StreamKey& base_key);

// One batch of full-sample imputations, stored as the drawn values at the
// masked positions (column k-1 holds imputation k).
struct ReuseImputations {
  std::vector<std::uint32_t> missing_rows;  // full-sample rows, case-id order
  std::vector<std::int32_t> missing_slot;   // row -> position in missing_rows
  std::vector<std::int8_t> values;          // m columns of missing_rows.size()
  int m{0};

  std::int8_t value(int k, std::size_t slot) const {
    return values[static_cast<std::size_t>(k) * missing_rows.size() + slot];
  }
};

ReuseImputations make_reuse_imputations(const DataMatrix& full_data,
                                        std::span<const double> full_weights,
                                        const ImputationSpec& spec,
                                        const StreamKey& base_key);

// Per-imputation estimates of one replicate under reuse: the full-sample
// completed values restricted to the replicate's rows (bootstrap
// multiplicity included), weighted by the full-sample weights restricted to
// those rows.
std::vector<double> reuse_replicate_estimates_per_imputation(
    const DataMatrix& full_data, std::span<const double> full_weights,
    const ReuseImputations& imps, const ReplicatePlan& plan, int r);

// Replicate estimates when one batch of m full-sample imputations is
// recycled across all replicates (the failing baseline).  Element r is the
// average over k of the restricted weighted means.
std::vector<double> reuse_mode_estimates(const DataMatrix& full_data,
                                         const ReplicatePlan& plan,
                                         const ImputationSpec& spec,
                                         const StreamKey& base_key);

}  // namespace mirs

#endif  // MIRS_ESTIMATE_HPP
