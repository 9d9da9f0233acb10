#include "mcopt/bbo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mcopt/acquisition.hpp"
#include "mcopt/csv.hpp"
#include "mcopt/errors.hpp"
#include "mcopt/forest.hpp"
#include "mcopt/gp.hpp"
#include "mcopt/rbf.hpp"

namespace mcopt {

std::string_view to_string(BboKind kind) {
  switch (kind) {
    case BboKind::RandomSearch: return "random";
    case BboKind::CherryPickBO: return "cherrypick";
    case BboKind::BilalCostBO: return "bilal-cost";
    case BboKind::BilalTimeBO: return "bilal-time";
    case BboKind::RbfOpt: return "rbfopt";
    case BboKind::Exhaustive: return "exhaustive";
  }
  return "unknown";
}

BboKind parse_bbo_kind(std::string_view text) {
  if (text == "random" || text == "rs") return BboKind::RandomSearch;
  if (text == "cherrypick") return BboKind::CherryPickBO;
  if (text == "bilal-cost") return BboKind::BilalCostBO;
  if (text == "bilal-time") return BboKind::BilalTimeBO;
  if (text == "rbfopt") return BboKind::RbfOpt;
  if (text == "exhaustive") return BboKind::Exhaustive;
  throw DomainError("unknown optimizer '" + std::string(text) + "'");
}

bool samples_without_replacement(BboKind kind) { return kind != BboKind::RandomSearch; }

bool uses_surrogate(BboKind kind) {
  return kind != BboKind::RandomSearch && kind != BboKind::Exhaustive;
}

// CandidateSet -----------------------------------------------------------------

CandidateSet::CandidateSet(std::vector<ConfigPoint> points, std::vector<EncodedPoint> encodings,
                           std::vector<std::string> labels)
    : points_(std::move(points)), encodings_(std::move(encodings)), labels_(std::move(labels)) {
  if (points_.empty()) throw DomainError("candidate set is empty");
  if (encodings_.size() != points_.size() || labels_.size() != points_.size())
    throw DomainError("candidate encodings/labels do not match points");
}

CandidateSet CandidateSet::for_provider(const SearchSpace& space, std::size_t k) {
  auto points = enumerate_provider(space, k);
  std::vector<EncodedPoint> enc;
  std::vector<std::string> labels;
  for (const auto& p : points) {
    enc.push_back(encode(space, p));
    labels.push_back(space.point_string(p));
  }
  return CandidateSet(std::move(points), std::move(enc), std::move(labels));
}

CandidateSet CandidateSet::flattened(const SearchSpace& space) {
  auto points = enumerate_all(space);
  std::vector<EncodedPoint> enc;
  std::vector<std::string> labels;
  for (const auto& p : points) {
    enc.push_back(encode_flat(space, p));
    labels.push_back(space.point_string(p));
  }
  return CandidateSet(std::move(points), std::move(enc), std::move(labels));
}

std::optional<std::size_t> CandidateSet::find(const ConfigPoint& p) const {
  const auto it = std::find(points_.begin(), points_.end(), p);
  if (it == points_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - points_.begin());
}

// SearchTrace ------------------------------------------------------------------

void SearchTrace::record(const ConfigPoint& p, double value) {
  TraceEntry e;
  e.step = entries_.size() + 1;
  e.point = p;
  e.value = value;
  e.cum_expense = expense() + value;
  if (entries_.empty() || value < entries_[best_index_].value) best_index_ = entries_.size();
  e.best_value = entries_.empty() ? value : std::min(value, entries_.back().best_value);
  entries_.push_back(std::move(e));
}

const ConfigPoint& SearchTrace::best_point() const {
  if (entries_.empty()) throw DomainError("empty trace has no best point");
  return entries_[best_index_].point;
}

double SearchTrace::best_value() const {
  if (entries_.empty()) throw DomainError("empty trace has no best value");
  return entries_[best_index_].value;
}

std::string SearchTrace::to_csv(const SearchSpace& space) const {
  std::ostringstream out;
  out << "step,provider,config,nodes,value,cum_expense,best_value\n";
  for (const auto& e : entries_) {
    out << e.step << ',' << space.provider(e.point.provider).name << ',' << space.config_string(e.point)
        << ',' << e.point.nodes << ',' << csv::format_number(e.value) << ','
        << csv::format_number(e.cum_expense) << ',' << csv::format_number(e.best_value) << '\n';
  }
  return out.str();
}

// Optimizer ----------------------------------------------------------------------

Optimizer::Optimizer(BboKind kind, CandidateSet candidates, std::uint64_t seed, BboOptions options)
    : kind_(kind),
      candidates_(std::move(candidates)),
      options_(options),
      seed_(seed),
      rng_(seed),
      evaluated_(candidates_.size(), false),
      pending_mask_(candidates_.size(), false) {
  if (uses_surrogate(kind_)) {
    if (options_.init_design < 1)
      throw DomainError("surrogate optimizers need an initial design of at least 1");
    if (options_.init_design > candidates_.size())
      throw DomainError("initial design of " + std::to_string(options_.init_design) +
                        " exceeds " + std::to_string(candidates_.size()) + " candidates");
    init_order_ = rng_.sample_without_replacement(candidates_.size(), options_.init_design);
  }
}

bool Optimizer::saturated() const {
  if (!samples_without_replacement(kind_)) return false;
  for (std::size_t i = 0; i < candidates_.size(); ++i)
    if (open(i)) return false;
  return true;
}

std::size_t Optimizer::first_open() const {
  for (std::size_t i = 0; i < candidates_.size(); ++i)
    if (open(i)) return i;
  return candidates_.size();
}

std::optional<ConfigPoint> Optimizer::suggest() {
  const auto idx = next_index();
  if (!idx) return std::nullopt;
  pending_.push_back(*idx);
  if (samples_without_replacement(kind_)) pending_mask_[*idx] = true;
  return candidates_.point(*idx);
}

std::optional<std::size_t> Optimizer::next_index() {
  if (kind_ == BboKind::RandomSearch) return rng_.index(candidates_.size());

  if (kind_ == BboKind::Exhaustive) {
    while (next_exhaustive_ < candidates_.size() && !open(next_exhaustive_)) ++next_exhaustive_;
    if (next_exhaustive_ == candidates_.size()) return std::nullopt;
    return next_exhaustive_;
  }

  if (saturated()) return std::nullopt;
  while (init_issued_ < init_order_.size()) {
    const std::size_t idx = init_order_[init_issued_++];
    if (open(idx)) return idx;
  }
  if (observed_index_.empty()) {
    // Every initial point is still pending; keep sampling at random.
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < candidates_.size(); ++i)
      if (open(i)) free.push_back(i);
    return free[rng_.index(free.size())];
  }
  return model_guided_index();
}

std::size_t Optimizer::explore_index() const {
  std::size_t best = candidates_.size();
  double best_distance = -1.0;
  for (std::size_t i = 0; i < candidates_.size(); ++i) {
    if (!open(i)) continue;
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < candidates_.size(); ++j) {
      if (!evaluated_[j] && !pending_mask_[j]) continue;
      double d2 = 0.0;
      const auto& a = candidates_.encoding(i);
      const auto& b = candidates_.encoding(j);
      for (std::size_t f = 0; f < a.size(); ++f) d2 += (a[f] - b[f]) * (a[f] - b[f]);
      nearest = std::min(nearest, d2);
    }
    if (nearest > best_distance) {
      best_distance = nearest;
      best = i;
    }
  }
  return best;
}

std::size_t Optimizer::model_guided_index() {
  const std::size_t step = model_steps_++;
  std::vector<EncodedPoint> X;
  X.reserve(observed_index_.size());
  for (auto i : observed_index_) X.push_back(candidates_.encoding(i));
  const double best_value = *std::min_element(observed_value_.begin(), observed_value_.end());

  auto argmax_open = [&](auto&& score) {
    std::size_t best = candidates_.size();
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      if (!open(i)) continue;
      const double s = score(candidates_.encoding(i));
      if (best == candidates_.size() || s > best_score) {
        best = i;
        best_score = s;
      }
    }
    return best;
  };

  switch (kind_) {
    case BboKind::CherryPickBO:
    case BboKind::BilalCostBO: {
      const GpModel gp = GpModel::fit(X, observed_value_);
      const Acquisition acq{kind_ == BboKind::CherryPickBO ? AcquisitionKind::ExpectedImprovement
                                                           : AcquisitionKind::LowerConfidenceBound,
                            options_.lcb_kappa};
      return argmax_open([&](const EncodedPoint& x) {
        const Prediction p = gp.predict(x);
        return acq.score(p.mean, p.std, best_value);
      });
    }
    case BboKind::BilalTimeBO: {
      ForestOptions fopt;
      fopt.n_trees = options_.forest_trees;
      const ForestModel forest = ForestModel::fit(X, observed_value_, fopt, derive_seed(seed_, {step}));
      const Acquisition acq{AcquisitionKind::ProbabilityOfImprovement, options_.lcb_kappa};
      return argmax_open([&](const EncodedPoint& x) {
        const Prediction p = forest.predict(x);
        return acq.score(p.mean, p.std, best_value);
      });
    }
    case BboKind::RbfOpt: {
      // Cycle of four model-guided steps: three exploit, one explore.
      if (step % 4 == 3) return explore_index();
      std::vector<double> log_values;
      log_values.reserve(observed_value_.size());
      for (double v : observed_value_) log_values.push_back(std::log(v));
      std::optional<RbfModel> rbf;
      try {
        rbf = RbfModel::fit(X, log_values);
      } catch (const NumericError&) {
        return explore_index();
      }
      return argmax_open([&](const EncodedPoint& x) { return -rbf->predict(x); });
    }
    case BboKind::RandomSearch:
    case BboKind::Exhaustive:
      break;
  }
  return first_open();
}

void Optimizer::observe(const ConfigPoint& p, double value) {
  const auto idx = candidates_.find(p);
  if (!idx) throw ProtocolError("observed point is not a candidate");
  const auto it = std::find(pending_.begin(), pending_.end(), *idx);
  if (it == pending_.end())
    throw ProtocolError("observed point " + candidates_.label(*idx) + " was not suggested or already observed");
  if (!(std::isfinite(value) && value > 0.0))
    throw DomainError("observed value must be positive and finite for " + candidates_.label(*idx));
  pending_.erase(it);
  if (samples_without_replacement(kind_)) {
    pending_mask_[*idx] = false;
    evaluated_[*idx] = true;
  }
  observed_index_.push_back(*idx);
  observed_value_.push_back(value);
  trace_.record(p, value);
}

SearchTrace run_bbo(BboKind kind, const CandidateSet& candidates, const Objective& objective,
                    std::size_t budget, std::uint64_t seed, const BboOptions& options) {
  if (budget < 1) throw BudgetError("search budget must be at least 1");
  Optimizer opt(kind, candidates, seed, options);
  for (std::size_t step = 0; step < budget; ++step) {
    const auto point = opt.suggest();
    if (!point) break;
    double value = 0.0;
    try {
      value = objective(*point);
    } catch (const std::exception& e) {
      const auto idx = candidates.find(*point);
      throw ObjectiveError("objective failed at step " + std::to_string(step + 1) + " for " +
                           (idx ? candidates.label(*idx) : std::string("?")) + ": " + e.what());
    }
    opt.observe(*point, value);
  }
  return opt.trace();
}

}  // namespace mcopt
