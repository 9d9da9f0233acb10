#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/QR>

#include "mcopt/errors.hpp"
#include "mcopt/multicloud.hpp"

namespace mcopt {

namespace {

constexpr Eigen::Index kFeatures = 4;

Eigen::RowVector4d ernest_features(double n) { return {1.0, 1.0 / n, std::log(n), n}; }

}  // namespace

std::size_t LinearPrediction::fallback_count() const {
  return static_cast<std::size_t>(
      std::count_if(ranking.begin(), ranking.end(), [](const PredictedPoint& p) { return p.fallback; }));
}

LinearPrediction linear_predict_loo(const ObjectiveTable& table, std::size_t workload, Target target) {
  const SearchSpace& space = table.space();
  const auto& nodes = space.node_counts();
  if (nodes.size() < 2)
    throw DomainError("leave-one-out prediction needs at least two cluster sizes");
  const std::size_t stride = nodes.size();
  const std::vector<double> values = table.values(workload, target);

  std::vector<PredictedPoint> predictions(space.total_points());
  for (std::size_t base = 0; base < space.total_points(); base += stride) {
    for (std::size_t held = 0; held < stride; ++held) {
      const auto rows = static_cast<Eigen::Index>(stride - 1);
      Eigen::MatrixXd A(rows, kFeatures);
      Eigen::VectorXd b(rows);
      Eigen::Index r = 0;
      for (std::size_t j = 0; j < stride; ++j) {
        if (j == held) continue;
        A.row(r) = ernest_features(static_cast<double>(nodes[j]));
        b(r) = values[base + j];
        ++r;
      }
      PredictedPoint& out = predictions[base + held];
      out.point = space.point_at(base + held);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
      const bool constant = (b.array() == b(0)).all();
      if (constant && rows >= kFeatures && qr.rank() == kFeatures) {
        // The exact least-squares answer; solving would only add rounding noise.
        out.predicted = b(0);
      } else if (rows >= kFeatures && qr.rank() == kFeatures) {
        const Eigen::Vector4d coef = qr.solve(b);
        out.predicted = ernest_features(static_cast<double>(nodes[held])).dot(coef);
      } else {
        out.predicted = b.mean();
        out.fallback = true;
      }
    }
  }

  std::stable_sort(predictions.begin(), predictions.end(),
                   [](const PredictedPoint& a, const PredictedPoint& b) { return a.predicted < b.predicted; });
  return LinearPrediction{std::move(predictions)};
}

}  // namespace mcopt
