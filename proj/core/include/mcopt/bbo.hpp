#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcopt/rng.hpp"
#include "mcopt/space.hpp"

namespace mcopt {

enum class BboKind { RandomSearch, CherryPickBO, BilalCostBO, BilalTimeBO, RbfOpt, Exhaustive };

std::string_view to_string(BboKind kind);
/// Accepts `random`/`rs`, `cherrypick`, `bilal-cost`, `bilal-time`, `rbfopt`, `exhaustive`.
BboKind parse_bbo_kind(std::string_view text);
/// Kinds that never repeat a point (everything except RandomSearch).
bool samples_without_replacement(BboKind kind);
bool uses_surrogate(BboKind kind);

/// Finite, ordered candidate domain with per-candidate encodings and labels.
/// Immutable; the evaluated mask lives in the optimizer.
class CandidateSet {
 public:
  CandidateSet(std::vector<ConfigPoint> points, std::vector<EncodedPoint> encodings,
               std::vector<std::string> labels);

  /// Provider k's enumeration, encoded with encode().
  static CandidateSet for_provider(const SearchSpace& space, std::size_t k);
  /// All providers' points, encoded with encode_flat().
  static CandidateSet flattened(const SearchSpace& space);

  std::size_t size() const { return points_.size(); }
  const ConfigPoint& point(std::size_t i) const { return points_.at(i); }
  const EncodedPoint& encoding(std::size_t i) const { return encodings_.at(i); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  std::optional<std::size_t> find(const ConfigPoint& p) const;

 private:
  std::vector<ConfigPoint> points_;
  std::vector<EncodedPoint> encodings_;
  std::vector<std::string> labels_;
};

struct TraceEntry {
  std::size_t step = 0;  // 1-based
  ConfigPoint point;
  double value = 0.0;
  double cum_expense = 0.0;
  double best_value = 0.0;
};

/// Ordered evaluations with running best; best is non-increasing by construction.
class SearchTrace {
 public:
  void record(const ConfigPoint& p, double value);

  const std::vector<TraceEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  /// Throws DomainError on an empty trace.
  const ConfigPoint& best_point() const;
  double best_value() const;
  double expense() const { return entries_.empty() ? 0.0 : entries_.back().cum_expense; }

  /// `step,provider,config,nodes,value,cum_expense,best_value`
  std::string to_csv(const SearchSpace& space) const;

 private:
  std::vector<TraceEntry> entries_;
  std::size_t best_index_ = 0;
};

struct BboOptions {
  /// Random (without replacement) evaluations before the surrogate takes over.
  std::size_t init_design = 3;
  double lcb_kappa = 1.96;
  std::size_t forest_trees = 50;
};

/// Suggest/observe black-box optimizer over a finite candidate set.
///
/// suggest() returns std::nullopt once a non-repeating optimizer has exhausted
/// its candidates (saturation). observe() must be called with a point that was
/// suggested and not yet observed.
class Optimizer {
 public:
  Optimizer(BboKind kind, CandidateSet candidates, std::uint64_t seed, BboOptions options = {});

  std::optional<ConfigPoint> suggest();
  void observe(const ConfigPoint& p, double value);

  BboKind kind() const { return kind_; }
  const CandidateSet& candidates() const { return candidates_; }
  const SearchTrace& trace() const { return trace_; }
  bool saturated() const;

 private:
  std::optional<std::size_t> next_index();
  std::size_t model_guided_index();
  std::size_t first_open() const;
  std::size_t explore_index() const;
  bool open(std::size_t i) const { return !evaluated_[i] && !pending_mask_[i]; }

  BboKind kind_;
  CandidateSet candidates_;
  BboOptions options_;
  std::uint64_t seed_;
  Rng rng_;

  std::vector<bool> evaluated_;
  std::vector<bool> pending_mask_;
  std::vector<std::size_t> pending_;
  std::vector<std::size_t> init_order_;
  std::size_t init_issued_ = 0;
  std::size_t model_steps_ = 0;
  std::size_t next_exhaustive_ = 0;

  std::vector<std::size_t> observed_index_;
  std::vector<double> observed_value_;
  SearchTrace trace_;
};

using Objective = std::function<double(const ConfigPoint&)>;

/// Runs suggest/observe until `budget` evaluations or saturation.
/// Objective failures are rethrown as ObjectiveError carrying step and point.
SearchTrace run_bbo(BboKind kind, const CandidateSet& candidates, const Objective& objective,
                    std::size_t budget, std::uint64_t seed, const BboOptions& options = {});

}  // namespace mcopt
