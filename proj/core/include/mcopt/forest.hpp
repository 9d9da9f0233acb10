#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mcopt/gp.hpp"
#include "mcopt/space.hpp"

namespace mcopt {

struct ForestOptions {
  std::size_t n_trees = 50;
  bool bootstrap = true;
  /// Nodes with fewer samples than this become leaves.
  std::size_t min_node_size = 2;
  /// 0 means unlimited depth.
  std::size_t max_depth = 0;
  /// Features tried per split; defaults to ceil(sqrt(dim)).
  std::optional<std::size_t> features_per_split;
};

/// Bagged regression trees with greedy variance-reduction splits.
///
/// predict() reports the mean of tree predictions and the (population) standard
/// deviation across trees, which is what gives PI a spread to work with.
class ForestModel {
 public:
  static ForestModel fit(std::span<const EncodedPoint> inputs, std::span<const double> targets,
                         const ForestOptions& options, std::uint64_t seed);

  Prediction predict(const EncodedPoint& x) const;
  std::size_t tree_count() const { return trees_.size(); }

 private:
  struct Node {
    std::size_t feature = 0;
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    double value = 0.0;
    bool leaf = true;
  };
  using Tree = std::vector<Node>;

  static double predict_tree(const Tree& tree, const EncodedPoint& x);

  std::vector<Tree> trees_;
  std::size_t dim_ = 0;

  friend class TreeBuilder;
};

}  // namespace mcopt
