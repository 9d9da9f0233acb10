#include "mcopt/rbf.hpp"

#include <cmath>

#include <Eigen/LU>
#include <Eigen/QR>

#include "mcopt/errors.hpp"

namespace mcopt {

namespace {

constexpr double kFallbackRidge = 1e-8;
constexpr double kMaxRidge = 1e-4;
constexpr int kRefinementSteps = 20;

double cubic(double r) { return r * r * r; }

// Greedily keeps encoding columns that raise the rank of [1, kept...].
std::vector<Eigen::Index> independent_columns(const Eigen::MatrixXd& X) {
  std::vector<Eigen::Index> kept;
  Eigen::MatrixXd basis = Eigen::MatrixXd::Ones(X.rows(), 1);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    Eigen::MatrixXd trial(X.rows(), basis.cols() + 1);
    trial << basis, X.col(j);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(trial);
    qr.setThreshold(1e-10);
    if (qr.rank() == trial.cols()) {
      basis = std::move(trial);
      kept.push_back(j);
    }
  }
  return kept;
}

}  // namespace

RbfModel RbfModel::fit(std::span<const EncodedPoint> inputs, std::span<const double> targets) {
  if (inputs.empty()) throw FitError("RBF fit needs at least one center");
  if (inputs.size() != targets.size()) throw FitError("RBF inputs and targets differ in length");
  const std::size_t dim = inputs.front().size();

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != dim) throw FitError("RBF inputs have inconsistent dimension");
    if (!std::isfinite(targets[i])) throw FitError("RBF targets must be finite");
    bool duplicate = false;
    for (auto j : kept) {
      if (inputs[j] == inputs[i]) {
        if (targets[j] != targets[i]) throw FitError("duplicate RBF center with conflicting targets");
        duplicate = true;
        break;
      }
    }
    if (!duplicate) kept.push_back(i);
  }

  RbfModel model;
  const auto n = static_cast<Eigen::Index>(kept.size());
  const auto d = static_cast<Eigen::Index>(dim);
  model.centers_.resize(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto src = kept[static_cast<std::size_t>(i)];
    for (Eigen::Index c = 0; c < d; ++c) model.centers_(i, c) = inputs[src][static_cast<std::size_t>(c)];
    y(i) = targets[src];
  }

  const bool use_linear = kept.size() >= dim + 2;
  if (use_linear) model.tail_columns_ = independent_columns(model.centers_);
  const auto m = static_cast<Eigen::Index>(model.tail_columns_.size()) + 1;

  Eigen::MatrixXd phi(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    phi(i, i) = 0.0;
    for (Eigen::Index j = 0; j < i; ++j)
      phi(i, j) = phi(j, i) = cubic((model.centers_.row(i) - model.centers_.row(j)).norm());
  }
  Eigen::MatrixXd P(n, m);
  P.col(0).setOnes();
  for (Eigen::Index t = 1; t < m; ++t)
    P.col(t) = model.centers_.col(model.tail_columns_[static_cast<std::size_t>(t - 1)]);

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + m);
  rhs.head(n) = y;

  for (double ridge = use_linear ? 0.0 : kFallbackRidge; ridge <= kMaxRidge * (1.0 + 1e-9);
       ridge = ridge == 0.0 ? kFallbackRidge : ridge * 10.0) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + m, n + m);
    A.topLeftCorner(n, n) = phi + ridge * Eigen::MatrixXd::Identity(n, n);
    A.topRightCorner(n, m) = P;
    A.bottomLeftCorner(m, n) = P.transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) continue;
    Eigen::VectorXd sol = lu.solve(rhs);
    if (!sol.allFinite()) continue;
    // Refine against the ridge-free system so the centers are interpolated.
    A.topLeftCorner(n, n) = phi;
    Eigen::VectorXd residual = rhs - A * sol;
    for (int step = 0; step < kRefinementSteps && residual.lpNorm<Eigen::Infinity>() > 1e-13; ++step) {
      const Eigen::VectorXd next = sol + lu.solve(residual);
      const Eigen::VectorXd next_residual = rhs - A * next;
      if (!next.allFinite() || !(next_residual.lpNorm<Eigen::Infinity>() < residual.lpNorm<Eigen::Infinity>()))
        break;
      sol = next;
      residual = next_residual;
    }
    model.weights_ = sol.head(n);
    model.tail_ = sol.tail(m);
    model.ridge_ = ridge;
    return model;
  }
  throw NumericError("RBF interpolation system singular after ridge escalation");
}

double RbfModel::predict(const EncodedPoint& x) const {
  if (static_cast<Eigen::Index>(x.size()) != centers_.cols())
    throw DomainError("RBF query has wrong dimension");
  const Eigen::Map<const Eigen::RowVectorXd> q(x.data(), static_cast<Eigen::Index>(x.size()));
  double value = tail_(0);
  for (std::size_t t = 0; t < tail_columns_.size(); ++t)
    value += tail_(static_cast<Eigen::Index>(t) + 1) * q(tail_columns_[t]);
  for (Eigen::Index i = 0; i < centers_.rows(); ++i) value += weights_(i) * cubic((centers_.row(i) - q).norm());
  return value;
}

}  // namespace mcopt
