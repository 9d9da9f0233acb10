#include "mcopt/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mcopt/errors.hpp"

namespace mcopt {

namespace {

void check_std(double std) {
  if (!(std >= 0.0)) throw DomainError("acquisition requires std >= 0, got " + std::to_string(std));
}

}  // namespace

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double expected_improvement(double mean, double std, double best) {
  check_std(std);
  const double gap = best - mean;
  if (std == 0.0) return std::max(gap, 0.0);
  const double z = gap / std;
  return std::max(gap * normal_cdf(z) + std * normal_pdf(z), 0.0);
}

double probability_of_improvement(double mean, double std, double best) {
  check_std(std);
  if (std == 0.0) return mean < best ? 1.0 : 0.0;
  return std::clamp(normal_cdf((best - mean) / std), 0.0, 1.0);
}

double lower_confidence_bound_score(double mean, double std, double kappa) {
  check_std(std);
  return -(mean - kappa * std);
}

double Acquisition::score(double mean, double std, double best) const {
  switch (kind) {
    case AcquisitionKind::ExpectedImprovement:
      return expected_improvement(mean, std, best);
    case AcquisitionKind::ProbabilityOfImprovement:
      return probability_of_improvement(mean, std, best);
    case AcquisitionKind::LowerConfidenceBound:
      return lower_confidence_bound_score(mean, std, kappa);
  }
  return 0.0;
}

}  // namespace mcopt
