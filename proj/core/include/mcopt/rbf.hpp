#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "mcopt/space.hpp"

namespace mcopt {

/// Cubic radial-basis interpolant, phi(r) = r^3, with a polynomial tail.
///
/// With at least dim + 2 centers the tail is linear (affinely dependent encoding
/// columns, e.g. one-hot blocks, are dropped so the saddle system stays
/// solvable); with fewer centers it is a constant and the RBF block carries a
/// 1e-8 ridge. A constant tail reduces to the constant predictor for a single center.
class RbfModel {
 public:
  static RbfModel fit(std::span<const EncodedPoint> inputs, std::span<const double> targets);

  double predict(const EncodedPoint& x) const;

  bool linear_tail() const { return tail_columns_.size() > 0; }
  double ridge() const { return ridge_; }
  std::size_t size() const { return static_cast<std::size_t>(centers_.rows()); }

 private:
  Eigen::MatrixXd centers_;
  Eigen::VectorXd weights_;
  // Coefficient for the constant term, then one per kept encoding column.
  Eigen::VectorXd tail_;
  std::vector<Eigen::Index> tail_columns_;
  double ridge_ = 0.0;
};

}  // namespace mcopt
