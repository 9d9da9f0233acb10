#include "mcopt/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mcopt/errors.hpp"

namespace mcopt {

namespace {

constexpr int kRefinementSteps = 50;

struct Candidate {
  Eigen::LLT<Eigen::MatrixXd> chol;
  Eigen::VectorXd alpha;
  double jitter = 0.0;
  double lml = -std::numeric_limits<double>::infinity();
};

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, double ell) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r = (X.row(i) - X.row(j)).norm();
      K(i, j) = K(j, i) = matern52(r, ell, 1.0);
    }
  }
  return K;
}

Candidate factorize(const Eigen::MatrixXd& K, const Eigen::VectorXd& z, const GpOptions& opt) {
  const Eigen::Index n = K.rows();
  for (double jitter = opt.jitter; jitter <= opt.max_jitter * (1.0 + 1e-9); jitter *= 10.0) {
    Candidate c;
    c.chol.compute(K + jitter * Eigen::MatrixXd::Identity(n, n));
    if (c.chol.info() != Eigen::Success) continue;
    const Eigen::MatrixXd L = c.chol.matrixL();
    bool positive = true;
    for (Eigen::Index i = 0; i < n; ++i) positive = positive && L(i, i) > 0.0;
    if (!positive) continue;
    c.alpha = c.chol.solve(z);
    c.jitter = jitter;
    c.lml = -0.5 * z.dot(c.alpha) - L.diagonal().array().log().sum() -
            0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    return c;
  }
  throw NumericError("GP kernel matrix not positive definite after jitter escalation to " +
                     std::to_string(opt.max_jitter));
}

}  // namespace

double matern52(double r, double length_scale, double variance) {
  const double s = std::sqrt(5.0) * r / length_scale;
  return variance * (1.0 + s + s * s / 3.0) * std::exp(-s);
}

GpModel GpModel::fit(std::span<const EncodedPoint> inputs, std::span<const double> targets,
                     const GpOptions& options) {
  if (inputs.empty()) throw FitError("GP fit needs at least one training point");
  if (inputs.size() != targets.size()) throw FitError("GP inputs and targets differ in length");
  if (options.length_scales.empty()) throw FitError("GP length-scale ladder is empty");
  const std::size_t dim = inputs.front().size();

  // Transform, then collapse exact duplicates; conflicting duplicates are an error.
  std::vector<std::size_t> kept;
  std::vector<double> transformed;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != dim) throw FitError("GP inputs have inconsistent dimension");
    double y = targets[i];
    if (options.log_transform) {
      if (!(y > 0.0)) throw FitError("log-transformed GP targets must be positive");
      y = std::log(y);
    }
    if (!std::isfinite(y)) throw FitError("GP targets must be finite");
    bool duplicate = false;
    for (std::size_t j = 0; j < kept.size(); ++j) {
      if (inputs[kept[j]] == inputs[i]) {
        if (transformed[j] != y) throw FitError("duplicate GP input with conflicting targets");
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      kept.push_back(i);
      transformed.push_back(y);
    }
  }

  const auto n = static_cast<Eigen::Index>(kept.size());
  GpModel model;
  model.log_transform_ = options.log_transform;
  model.inputs_.resize(n, static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index d = 0; d < static_cast<Eigen::Index>(dim); ++d)
      model.inputs_(i, d) = inputs[kept[static_cast<std::size_t>(i)]][static_cast<std::size_t>(d)];

  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(transformed.data(), n);
  model.y_mean_ = y.mean();
  const double var = (y.array() - model.y_mean_).square().mean();
  model.y_std_ = var > 1e-24 ? std::sqrt(var) : 1.0;
  const Eigen::VectorXd z = (y.array() - model.y_mean_) / model.y_std_;

  bool have = false;
  Candidate best;
  for (double ell : options.length_scales) {
    Candidate c = factorize(kernel_matrix(model.inputs_, ell), z, options);
    if (!have || c.lml > best.lml) {
      best = std::move(c);
      model.length_scale_ = ell;
      have = true;
    }
  }
  // The jitter only stabilizes the factorization. Iterative refinement with the
  // jittered factor as preconditioner recovers the noise-free weights, so the
  // posterior mean interpolates the training targets.
  const Eigen::MatrixXd K = kernel_matrix(model.inputs_, model.length_scale_);
  Eigen::VectorXd residual = z - K * best.alpha;
  for (int step = 0; step < kRefinementSteps && residual.lpNorm<Eigen::Infinity>() > 1e-13; ++step) {
    const Eigen::VectorXd next = best.alpha + best.chol.solve(residual);
    const Eigen::VectorXd next_residual = z - K * next;
    if (!(next_residual.lpNorm<Eigen::Infinity>() < residual.lpNorm<Eigen::Infinity>())) break;
    best.alpha = next;
    residual = next_residual;
  }
  model.chol_ = std::move(best.chol);
  model.alpha_ = std::move(best.alpha);
  model.jitter_ = best.jitter;
  model.log_marginal_likelihood_ = best.lml;
  return model;
}

Prediction GpModel::predict(const EncodedPoint& x) const {
  if (static_cast<Eigen::Index>(x.size()) != inputs_.cols())
    throw DomainError("GP query has wrong dimension");
  const Eigen::Map<const Eigen::RowVectorXd> q(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::Index n = inputs_.rows();
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) k(i) = matern52((inputs_.row(i) - q).norm(), length_scale_, 1.0);

  const double mean_z = k.dot(alpha_);
  const Eigen::VectorXd v = chol_.matrixL().solve(k);
  const double var_z = std::max(1.0 - v.squaredNorm(), 0.0);

  const double h = mean_z * y_std_ + y_mean_;
  const double s = std::sqrt(var_z) * y_std_;
  if (!log_transform_) return {h, s};
  const double m = std::exp(h);
  return {m, m * s};
}

}  // namespace mcopt
