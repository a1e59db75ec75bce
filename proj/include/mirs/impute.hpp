#ifndef MIRS_IMPUTE_HPP
#define MIRS_IMPUTE_HPP

#include <span>
#include <vector>

#include "mirs/data.hpp"
#include "mirs/glm.hpp"
#include "mirs/rng.hpp"

namespace mirs {

enum class PredictorRole { X1, X2, Weight };

struct ImputationSpec {
  std::vector<PredictorRole> predictors{PredictorRole::X1, PredictorRole::X2,
                                        PredictorRole::Weight};
  int sweeps{1};  // chained-equation refresh passes; >1 redraws in place
  int m{1};       // number of imputed datasets

  void validate() const;
};

// Unweighted logistic fit of the observed outcomes on (1, predictors); the
// case weights enter as a covariate, not as fitting weights.  Throws
// ImputeError when every outcome is missing or the complete cases carry a
// single class.
GlmFit fit_imputation_model(const DataMatrix& data,
                            std::span<const double> weights,
                            const ImputationSpec& spec);

// One stochastic imputation: draw model coefficients from the approximate
// posterior, then draw each masked outcome from Bernoulli(inverse-logit).
// Masked positions are filled in stable case-id order, so results do not
// depend on row storage order.  A dataset without masked outcomes is
// returned as-is and consumes nothing from the stream.
CompletedDataset impute_once(const DataMatrix& data,
                             std::span<const double> weights,
                             const ImputationSpec& spec, RandomStream& stream);

// m independent imputations; element k uses the stream keyed base_key.child(k)
// for k = 1..m.
std::vector<CompletedDataset> impute_m(const DataMatrix& data,
                                       std::span<const double> weights,
                                       const ImputationSpec& spec,
                                       const StreamKey& base_key);

namespace detail {

// Precomputed pieces shared by every imputation of one dataset.
struct ImputationContext {
  GlmFit fit;
  Eigen::MatrixXd cov_factor;     // lower factor of fit.cov
  Eigen::MatrixXd design_missing; // rows for masked cases, case-id order
  std::vector<std::uint32_t> missing_rows;  // row indices, case-id order
};

ImputationContext make_imputation_context(const DataMatrix& data,
                                          std::span<const double> weights,
                                          const ImputationSpec& spec);

// Draws imputed values for the masked cases into values[0..missing), one
// sweep after another; only the last sweep survives.
void draw_imputed_values(const ImputationContext& ctx,
                         const ImputationSpec& spec, RandomStream& stream,
                         std::span<std::int8_t> values);

}  // namespace detail

}  // namespace mirs

#endif  // MIRS_IMPUTE_HPP
