#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mcopt {

struct Parameter {
  std::string name;
  std::vector<std::string> values;
};

/// One provider's flat categorical configuration space.
struct ProviderSpace {
  std::string name;
  std::vector<Parameter> params;

  /// Number of parameter assignments (product of value counts).
  std::size_t config_count() const;
  /// Sum of value counts; the width of the one-hot section of an encoding.
  std::size_t one_hot_width() const;
};

/// One candidate deployment: provider, cluster size and a value index per parameter.
struct ConfigPoint {
  std::size_t provider = 0;
  int nodes = 0;
  std::vector<std::size_t> assignment;

  auto operator<=>(const ConfigPoint&) const = default;
  bool operator==(const ConfigPoint&) const = default;
};

using EncodedPoint = std::vector<double>;

/// The hierarchical multi-cloud domain: providers with their own parameters, plus
/// a cluster-size set shared by all of them.
///
/// Points are ordered lexicographically over (provider, parameters in declaration
/// order, node count); the position of a point in that order is its global index.
/// Immutable after construction.
class SearchSpace {
 public:
  /// Validates all invariants; throws DomainError on violation.
  SearchSpace(std::vector<ProviderSpace> providers, std::vector<int> node_counts);

  static SearchSpace from_json(std::string_view document);
  static SearchSpace load(const std::filesystem::path& path);
  std::string to_json() const;

  /// AWS/Azure/GCP-shaped space with 24 + 16 + 48 = 88 points over nodes {2,3,4,5}.
  static SearchSpace reference();

  const std::vector<ProviderSpace>& providers() const { return providers_; }
  const ProviderSpace& provider(std::size_t k) const;
  std::size_t provider_count() const { return providers_.size(); }
  const std::vector<int>& node_counts() const { return node_counts_; }

  /// Number of points of provider k (|nodes| * configs).
  std::size_t point_count(std::size_t k) const;
  std::size_t total_points() const { return offsets_.back(); }
  /// Global index of provider k's first point.
  std::size_t provider_offset(std::size_t k) const;

  std::size_t index_of(const ConfigPoint& p) const;
  ConfigPoint point_at(std::size_t global_index) const;
  /// Index of p's parameter assignment among provider p.provider's configs.
  std::size_t config_index(const ConfigPoint& p) const;

  bool contains(const ConfigPoint& p) const;
  /// Throws DomainError when p is not a point of this space.
  void validate(const ConfigPoint& p) const;

  std::size_t find_provider(std::string_view name) const;

  /// `k1=v1;k2=v2`
  std::string config_string(const ConfigPoint& p) const;
  /// `<provider>/k1=v1;k2=v2/n=<nodes>`
  std::string point_string(const ConfigPoint& p) const;
  ConfigPoint parse_point(std::string_view text) const;
  /// Parses the middle segment for a given provider and node count.
  ConfigPoint parse_config(std::size_t provider, std::string_view config, int nodes) const;

  /// Feature scaling of a node count into [0, 1]; 0.5 for a single-valued node set.
  double node_feature(int nodes) const;

 private:
  std::vector<ProviderSpace> providers_;
  std::vector<int> node_counts_;
  std::vector<std::size_t> offsets_;
};

std::vector<ConfigPoint> enumerate_provider(const SearchSpace& space, std::size_t k);
std::vector<ConfigPoint> enumerate_all(const SearchSpace& space);

/// Per-provider encoding: one-hot block per parameter, then the scaled node count.
EncodedPoint encode(const SearchSpace& space, const ConfigPoint& p);

/// Joint encoding for a single model over all providers: provider one-hot, every
/// provider's parameter blocks (zeros for inactive providers), then the node feature.
EncodedPoint encode_flat(const SearchSpace& space, const ConfigPoint& p);

}  // namespace mcopt
