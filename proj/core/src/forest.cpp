#include "mcopt/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcopt/errors.hpp"
#include "mcopt/rng.hpp"

namespace mcopt {

class TreeBuilder {
 public:
  TreeBuilder(std::span<const EncodedPoint> X, std::span<const double> y, const ForestOptions& opt,
              std::size_t mtry, Rng& rng)
      : X_(X), y_(y), opt_(opt), mtry_(mtry), rng_(rng) {}

  ForestModel::Tree build(std::vector<std::size_t> samples) {
    tree_.clear();
    grow(std::move(samples), 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
    bool found = false;
  };

  std::size_t grow(std::vector<std::size_t> samples, std::size_t depth) {
    const std::size_t id = tree_.size();
    tree_.emplace_back();
    double sum = 0.0;
    for (auto i : samples) sum += y_[i];
    tree_[id].value = sum / static_cast<double>(samples.size());

    const bool depth_ok = opt_.max_depth == 0 || depth < opt_.max_depth;
    if (samples.size() < opt_.min_node_size || !depth_ok || constant_targets(samples)) return id;

    const Split split = best_split(samples);
    if (!split.found) return id;

    std::vector<std::size_t> left, right;
    for (auto i : samples) (X_[i][split.feature] <= split.threshold ? left : right).push_back(i);
    samples.clear();
    samples.shrink_to_fit();

    tree_[id].leaf = false;
    tree_[id].feature = split.feature;
    tree_[id].threshold = split.threshold;
    const std::size_t l = grow(std::move(left), depth + 1);
    const std::size_t r = grow(std::move(right), depth + 1);
    tree_[id].left = l;
    tree_[id].right = r;
    return id;
  }

  bool constant_targets(const std::vector<std::size_t>& samples) const {
    for (auto i : samples)
      if (y_[i] != y_[samples.front()]) return false;
    return true;
  }

  // Features are visited in a random order. The first mtry are always scored; if
  // none of them separates the node, scanning continues until one does.
  Split best_split(const std::vector<std::size_t>& samples) {
    const std::size_t dim = X_.front().size();
    const auto order = rng_.sample_without_replacement(dim, dim);
    Split best;
    for (std::size_t visited = 0; visited < order.size(); ++visited) {
      if (visited >= mtry_ && best.found) break;
      score_feature(samples, order[visited], best);
    }
    return best;
  }

  void score_feature(const std::vector<std::size_t>& samples, std::size_t f, Split& best) const {
    std::vector<std::size_t> sorted = samples;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [&](std::size_t a, std::size_t b) { return X_[a][f] < X_[b][f]; });
    double total = 0.0;
    for (auto i : sorted) total += y_[i];
    const auto n = static_cast<double>(sorted.size());
    const double parent = total * total / n;

    double left_sum = 0.0;
    for (std::size_t pos = 0; pos + 1 < sorted.size(); ++pos) {
      left_sum += y_[sorted[pos]];
      const double a = X_[sorted[pos]][f];
      const double b = X_[sorted[pos + 1]][f];
      if (a == b) continue;
      const auto nl = static_cast<double>(pos + 1);
      const double right_sum = total - left_sum;
      const double gain = left_sum * left_sum / nl + right_sum * right_sum / (n - nl) - parent;
      if (gain > 1e-12 * (std::abs(parent) + 1.0) && (!best.found || gain > best.gain)) {
        best = Split{f, 0.5 * (a + b), gain, true};
      }
    }
  }

  std::span<const EncodedPoint> X_;
  std::span<const double> y_;
  const ForestOptions& opt_;
  std::size_t mtry_;
  Rng& rng_;
  ForestModel::Tree tree_;
};

ForestModel ForestModel::fit(std::span<const EncodedPoint> inputs, std::span<const double> targets,
                             const ForestOptions& options, std::uint64_t seed) {
  if (inputs.empty()) throw FitError("forest fit needs at least one training point");
  if (inputs.size() != targets.size()) throw FitError("forest inputs and targets differ in length");
  if (options.n_trees < 1) throw FitError("forest needs at least one tree");
  const std::size_t dim = inputs.front().size();
  for (const auto& x : inputs)
    if (x.size() != dim) throw FitError("forest inputs have inconsistent dimension");

  std::size_t mtry = options.features_per_split.value_or(
      static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(dim)))));
  mtry = std::clamp<std::size_t>(mtry, 1, std::max<std::size_t>(dim, 1));

  ForestModel model;
  model.dim_ = dim;
  Rng rng(seed);
  TreeBuilder builder(inputs, targets, options, mtry, rng);
  const std::size_t n = inputs.size();
  for (std::size_t t = 0; t < options.n_trees; ++t) {
    std::vector<std::size_t> samples(n);
    if (options.bootstrap) {
      for (auto& s : samples) s = rng.index(n);
    } else {
      std::iota(samples.begin(), samples.end(), std::size_t{0});
    }
    model.trees_.push_back(builder.build(std::move(samples)));
  }
  return model;
}

double ForestModel::predict_tree(const Tree& tree, const EncodedPoint& x) {
  std::size_t id = 0;
  while (!tree[id].leaf) id = x[tree[id].feature] <= tree[id].threshold ? tree[id].left : tree[id].right;
  return tree[id].value;
}

Prediction ForestModel::predict(const EncodedPoint& x) const {
  if (x.size() != dim_) throw DomainError("forest query has wrong dimension");
  std::vector<double> values;
  values.reserve(trees_.size());
  for (const auto& tree : trees_) values.push_back(predict_tree(tree, x));
  const auto n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace mcopt
