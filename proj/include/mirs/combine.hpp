#ifndef MIRS_COMBINE_HPP
#define MIRS_COMBINE_HPP

#include <span>
#include <utility>
#include <vector>

namespace mirs {

enum class Method { Jackknife, Bootstrap };
enum class Mode { ReImpute, Reuse };

struct CombinedEstimate {
  Method method{Method::Jackknife};
  double point{0.0};
  double variance{0.0};
  double ci_low{0.0};
  double ci_high{0.0};
  int G_or_B{0};
  int m{0};          // filled by the caller that knows the imputation count
  Mode mode{Mode::ReImpute};
  double alpha{0.05};
};

struct JackknifeDiagnostics {
  std::vector<double> pseudovalues;
  double omega2_hat{0.0};  // sample variance of the pseudovalues
};

// Delete-a-group jackknife: point = mean(thetas),
// variance = (G-1)/G * sum (theta_g - mean)^2, normal-quantile CI.
CombinedEstimate jackknife_combine(std::span<const double> thetas,
                                   double alpha);

// Pseudovalues G*mean - (G-1)*theta_g; their sample variance divided by G
// reproduces the jackknife variance exactly.
JackknifeDiagnostics pseudovalues(std::span<const double> thetas);

// Bootstrap: point = mean(thetas), variance = sample variance, normal CI.
CombinedEstimate bootstrap_combine(std::span<const double> thetas,
                                   double alpha);

// point -/+ z_{1-alpha/2} * sqrt(variance).
std::pair<double, double> confidence_interval(double point, double variance,
                                              double alpha);

// Inverse standard normal CDF (Wichura's rational approximation,
// accurate well beyond 1e-8).
double normal_quantile(double p);

}  // namespace mirs

#endif  // MIRS_COMBINE_HPP
