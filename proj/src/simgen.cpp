#include "mirs/simgen.hpp"

#include <cmath>

#include "mirs/errors.hpp"
#include "mirs/glm.hpp"

namespace mirs {

void DgpConfig::validate() const {
  if (population_size < 2)
    throw ConfigError("population size must be at least 2");
  if (!(std::abs(rho) < 1.0)) throw ConfigError("rho must lie in (-1, 1)");
  if (!(p_s > 0.0 && p_s <= 1.0))
    throw ConfigError("p_s must lie in (0, 1]");
}

double DgpConfig::p_convenience(double x2) const {
  return inv_logit(conv_intercept + conv_slope_x2 * x2);
}

double DgpConfig::p_missing(double x1) const {
  return inv_logit(-(miss_intercept + miss_slope_x1 * x1));
}

double DgpConfig::p_outcome(double x1, double x2) const {
  return inv_logit(outcome_coef_x1 * x1 + outcome_coef_x2 * x2);
}

Population generate_population(const DgpConfig& cfg, RandomStream& stream) {
  cfg.validate();
  const std::size_t N = cfg.population_size;
  Population pop;
  pop.x1.resize(N);
  pop.x2.resize(N);
  pop.y.resize(N);
  std::size_t ones = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const auto [x1, x2] = sample_bivariate_normal(stream, cfg.rho);
    pop.x1[i] = x1;
    pop.x2[i] = x2;
    pop.y[i] = stream.bernoulli(cfg.p_outcome(x1, x2)) ? 1 : 0;
    ones += pop.y[i];
  }
  pop.true_mu = static_cast<double>(ones) / static_cast<double>(N);
  return pop;
}

std::optional<DataMatrix> draw_samples(const Population& pop,
                                       const DgpConfig& cfg,
                                       RandomStream& stream) {
  cfg.validate();
  DataMatrix data;
  std::size_t n_prob = 0, n_conv = 0;
  std::uint64_t row = 0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (stream.bernoulli(cfg.p_s)) {
      data.push_row(pop.x1[i], pop.x2[i], pop.y[i], true, Source::Probability,
                    cfg.p_s, row++ << 32);
      ++n_prob;
    } else if (stream.bernoulli(cfg.p_convenience(pop.x2[i]))) {
      data.push_row(pop.x1[i], pop.x2[i], pop.y[i], true, Source::Convenience,
                    cfg.p_s, row++ << 32);
      ++n_conv;
    }
  }
  if (n_prob == 0 || n_conv == 0) return std::nullopt;
  return data;
}

std::optional<DataMatrix> apply_missingness(const DataMatrix& data,
                                            const DgpConfig& cfg,
                                            RandomStream& stream) {
  cfg.validate();
  DataMatrix out = data;
  std::size_t observed = 0;
  for (std::size_t i = 0; i < out.n(); ++i) {
    if (stream.bernoulli(cfg.p_missing(out.x1[i]))) {
      out.y_observed[i] = 0;
    } else {
      out.y_observed[i] = 1;
      ++observed;
    }
  }
  if (observed == 0 && out.n() > 0) return std::nullopt;
  return out;
}

}  // namespace mirs
