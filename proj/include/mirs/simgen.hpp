#ifndef MIRS_SIMGEN_HPP
#define MIRS_SIMGEN_HPP

#include <optional>

#include "mirs/data.hpp"
#include "mirs/rng.hpp"

namespace mirs {

// Synthetic-population recipe.  Success probabilities:
//   convenience membership: inverse-logit(conv_intercept + conv_slope_x2*x2)
//   outcome:                inverse-logit(outcome_coef_x1*x1 + outcome_coef_x2*x2)
//   missingness:            1 / (1 + exp(miss_intercept + miss_slope_x1*x1))
struct DgpConfig {
  std::size_t population_size{20000};
  double rho{0.5};
  double p_s{0.02};
  double conv_intercept{-10.0 / 3.0};
  double conv_slope_x2{0.75};
  double miss_intercept{2.0 / 3.0};
  double miss_slope_x1{0.5};
  double outcome_coef_x1{1.0};
  double outcome_coef_x2{-1.0};

  void validate() const;
  double p_convenience(double x2) const;
  double p_missing(double x1) const;
  double p_outcome(double x1, double x2) const;
};

struct Population {
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<std::int8_t> y;
  double true_mu{0.0};  // finite-population mean of y

  std::size_t size() const { return x1.size(); }
};

// (x1, x2) bivariate normal with correlation rho, outcome Bernoulli per the
// configured success probability.
Population generate_population(const DgpConfig& cfg, RandomStream& stream);

// Assigns each unit to the probability sample with probability p_s and each
// remaining unit to the convenience sample with its x2-dependent
// probability, returning the union sample.  Empty probability or
// convenience membership is a regeneration signal (nullopt); the caller
// retries with the next substream.
std::optional<DataMatrix> draw_samples(const Population& pop,
                                       const DgpConfig& cfg,
                                       RandomStream& stream);

// Masks each outcome independently with the x1-dependent missingness
// probability; the underlying values stay in place but estimators only see
// the mask.  All-masked output is a regeneration signal (nullopt).
std::optional<DataMatrix> apply_missingness(const DataMatrix& data,
                                            const DgpConfig& cfg,
                                            RandomStream& stream);

}  // namespace mirs

#endif  // MIRS_SIMGEN_HPP
