#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mcopt/space.hpp"

namespace mcopt {

enum class Target { Time, Cost };

std::string_view to_string(Target t);
Target parse_target(std::string_view text);

struct Measurement {
  double runtime_s = 0.0;
  double cost_usd = 0.0;
};

/// Price per node-hour for every (provider, parameter assignment).
class PriceList {
 public:
  explicit PriceList(const SearchSpace& space);

  double price(const ConfigPoint& p) const;
  void set_price(const ConfigPoint& p, double price_per_hour);
  /// True when every provider configuration has a positive price.
  bool complete() const;

  std::string to_csv() const;
  static PriceList from_csv(const SearchSpace& space, std::string_view text);

 private:
  SearchSpace space_;
  // Indexed [provider][config_index]; 0 marks unset.
  std::vector<std::vector<double>> prices_;
};

/// Complete offline lookup table standing in for the per-provider objectives.
/// Immutable after construction.
class ObjectiveTable {
 public:
  /// entries[w][global point index]; validates completeness and positivity.
  ObjectiveTable(SearchSpace space, std::vector<std::string> workloads,
                 std::vector<std::vector<Measurement>> entries);

  const SearchSpace& space() const { return space_; }
  const std::vector<std::string>& workloads() const { return workloads_; }
  std::size_t workload_index(std::string_view name) const;

  double lookup(std::size_t workload, const ConfigPoint& p, Target t) const;
  double lookup(std::string_view workload, const ConfigPoint& p, Target t) const;
  const Measurement& measurement(std::size_t workload, std::size_t global_index) const;

  /// Target values of one workload in canonical point order.
  std::vector<double> values(std::size_t workload, Target t) const;

 private:
  SearchSpace space_;
  std::vector<std::string> workloads_;
  std::vector<std::vector<Measurement>> entries_;
};

double value_of(const Measurement& m, Target t);

/// runtime_s / 3600 * price * nodes; throws DomainError on non-positive input.
double derive_cost(double runtime_s, double price_per_hour, int nodes);

ObjectiveTable read_csv(const SearchSpace& space, std::string_view text);
ObjectiveTable load_csv(const SearchSpace& space, const std::filesystem::path& path);
std::string write_csv(const ObjectiveTable& table);

/// Synthetic scenario knobs.
struct Scenario {
  enum class Kind { Neutral, Dominant, ErnestExact };
  Kind kind = Kind::Neutral;
  std::size_t dominant_provider = 0;
  double factor = 1.0;

  static Scenario neutral() { return {}; }
  static Scenario dominant(std::size_t provider, double factor) {
    return {Kind::Dominant, provider, factor};
  }
  static Scenario ernest_exact() { return {Kind::ErnestExact, 0, 1.0}; }

  /// `neutral`, `dominant:<k>:<factor>` or `ernest_exact`.
  static Scenario parse(std::string_view text);
};

struct SyntheticDataset {
  ObjectiveTable table;
  PriceList prices;
};

/// Generates a complete table from the runtime law
/// r(n) = t0 + t1/n + t2*log(n) + t3*n with positive coefficients, optionally
/// perturbed by a truncated log-normal factor, and costs from a generated price list.
SyntheticDataset generate_synthetic(const SearchSpace& space, std::size_t n_workloads,
                                    std::uint64_t seed, const Scenario& scenario);

}  // namespace mcopt
