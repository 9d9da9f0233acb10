#pragma once

namespace mcopt {

double normal_pdf(double z);
double normal_cdf(double z);

enum class AcquisitionKind { ExpectedImprovement, ProbabilityOfImprovement, LowerConfidenceBound };

/// Acquisition function under the minimization convention; higher scores are
/// more desirable to evaluate.
struct Acquisition {
  AcquisitionKind kind = AcquisitionKind::ExpectedImprovement;
  double kappa = 1.96;  // only used by LowerConfidenceBound

  /// Throws DomainError when std is negative or NaN.
  double score(double mean, double std, double best) const;
};

/// E[max(best - Y, 0)] for Y ~ N(mean, std^2); max(best - mean, 0) when std == 0.
double expected_improvement(double mean, double std, double best);
/// P(Y < best); 1 if mean < best else 0 when std == 0.
double probability_of_improvement(double mean, double std, double best);
/// -(mean - kappa * std)
double lower_confidence_bound_score(double mean, double std, double kappa);

}  // namespace mcopt
