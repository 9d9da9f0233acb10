#pragma once

#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "mcopt/space.hpp"

namespace mcopt {

struct Prediction {
  double mean = 0.0;
  double std = 0.0;
};

/// Matérn-5/2 covariance at distance r.
double matern52(double r, double length_scale, double variance);

struct GpOptions {
  bool log_transform = true;
  std::vector<double> length_scales{0.1, 0.3, 1.0, 3.0, 10.0};
  double jitter = 1e-6;
  double max_jitter = 1e-2;
};

/// Gaussian-process regression with a Matérn-5/2 kernel on standardized targets.
///
/// The length scale is picked from a fixed ladder by maximum marginal likelihood
/// (ties resolve to the smaller scale); the signal variance is 1 after
/// standardization. Predictions are reported in the original target scale.
class GpModel {
 public:
  static GpModel fit(std::span<const EncodedPoint> inputs, std::span<const double> targets,
                     const GpOptions& options = {});

  Prediction predict(const EncodedPoint& x) const;

  double length_scale() const { return length_scale_; }
  double jitter() const { return jitter_; }
  double log_marginal_likelihood() const { return log_marginal_likelihood_; }
  std::size_t size() const { return static_cast<std::size_t>(inputs_.rows()); }

 private:
  GpModel() = default;

  Eigen::MatrixXd inputs_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd alpha_;
  double length_scale_ = 1.0;
  double jitter_ = 0.0;
  double log_marginal_likelihood_ = 0.0;
  double y_mean_ = 0.0;
  double y_std_ = 1.0;
  bool log_transform_ = false;
};

}  // namespace mcopt
