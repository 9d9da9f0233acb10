#include "mcopt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "mcopt/csv.hpp"
#include "mcopt/errors.hpp"
#include "mcopt/rng.hpp"

namespace mcopt {

namespace {

constexpr std::string_view kDatasetHeader = "workload,provider,config,nodes,runtime_s,cost_usd";
constexpr std::string_view kPriceHeader = "provider,config,price_per_hour";

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    auto line = text.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = pos + 1;
  }
  return lines;
}

}  // namespace

std::string_view to_string(Target t) { return t == Target::Time ? "time" : "cost"; }

Target parse_target(std::string_view text) {
  if (text == "time" || text == "runtime") return Target::Time;
  if (text == "cost") return Target::Cost;
  throw DomainError("unknown target '" + std::string(text) + "' (expected time or cost)");
}

double value_of(const Measurement& m, Target t) {
  return t == Target::Time ? m.runtime_s : m.cost_usd;
}

double derive_cost(double runtime_s, double price_per_hour, int nodes) {
  if (!positive_finite(runtime_s) || !positive_finite(price_per_hour) || nodes < 1)
    throw DomainError("derive_cost requires positive runtime, price and node count");
  return runtime_s / 3600.0 * price_per_hour * static_cast<double>(nodes);
}

// PriceList ------------------------------------------------------------------

PriceList::PriceList(const SearchSpace& space) : space_(space) {
  prices_.resize(space_.provider_count());
  for (std::size_t k = 0; k < space_.provider_count(); ++k)
    prices_[k].assign(space_.provider(k).config_count(), 0.0);
}

double PriceList::price(const ConfigPoint& p) const {
  const double v = prices_[p.provider][space_.config_index(p)];
  if (v <= 0.0) throw DomainError("no price for " + space_.point_string(p));
  return v;
}

void PriceList::set_price(const ConfigPoint& p, double price_per_hour) {
  if (!positive_finite(price_per_hour))
    throw ValueError("price must be positive for " + space_.point_string(p));
  prices_[p.provider][space_.config_index(p)] = price_per_hour;
}

bool PriceList::complete() const {
  for (const auto& row : prices_)
    for (double v : row)
      if (v <= 0.0) return false;
  return true;
}

std::string PriceList::to_csv() const {
  std::string out(kPriceHeader);
  out += '\n';
  const std::size_t stride = space_.node_counts().size();
  for (std::size_t k = 0; k < space_.provider_count(); ++k) {
    for (std::size_t c = 0; c < prices_[k].size(); ++c) {
      const ConfigPoint p = space_.point_at(space_.provider_offset(k) + c * stride);
      out += space_.provider(k).name;
      out += ',';
      out += space_.config_string(p);
      out += ',';
      out += csv::format_number(prices_[k][c]);
      out += '\n';
    }
  }
  return out;
}

PriceList PriceList::from_csv(const SearchSpace& space, std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines.front() != kPriceHeader)
    throw ParseError("price CSV header must be '" + std::string(kPriceHeader) + "'");
  PriceList list(space);
  std::vector<std::vector<bool>> seen(space.provider_count());
  for (std::size_t k = 0; k < space.provider_count(); ++k)
    seen[k].assign(space.provider(k).config_count(), false);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto fields = csv::split_fields(lines[i]);
    const std::string ctx = "price CSV line " + std::to_string(i + 1);
    if (fields.size() != 3) throw ParseError(ctx + ": expected 3 fields");
    const std::size_t k = space.find_provider(fields[0]);
    const ConfigPoint p = space.parse_config(k, fields[1], space.node_counts().front());
    const std::size_t c = space.config_index(p);
    if (seen[k][c]) throw DuplicateError(ctx + ": duplicate price for " + std::string(fields[1]));
    seen[k][c] = true;
    list.set_price(p, csv::parse_number(fields[2], ctx));
  }
  if (!list.complete()) throw CompletenessError("price CSV does not cover every configuration");
  return list;
}

// ObjectiveTable ---------------------------------------------------------------

ObjectiveTable::ObjectiveTable(SearchSpace space, std::vector<std::string> workloads,
                               std::vector<std::vector<Measurement>> entries)
    : space_(std::move(space)), workloads_(std::move(workloads)), entries_(std::move(entries)) {
  if (workloads_.empty()) throw CompletenessError("table has no workloads");
  if (entries_.size() != workloads_.size())
    throw CompletenessError("table rows do not match workload list");
  for (std::size_t w = 0; w < workloads_.size(); ++w) {
    if (workloads_[w].empty() || workloads_[w].find_first_of(",\n\r") != std::string::npos)
      throw DomainError("invalid workload name '" + workloads_[w] + "'");
    for (std::size_t v = 0; v < w; ++v)
      if (workloads_[v] == workloads_[w]) throw DuplicateError("duplicate workload '" + workloads_[w] + "'");
    if (entries_[w].size() != space_.total_points())
      throw CompletenessError("workload '" + workloads_[w] + "' does not cover every point");
    for (std::size_t i = 0; i < entries_[w].size(); ++i) {
      const auto& m = entries_[w][i];
      if (!positive_finite(m.runtime_s) || !positive_finite(m.cost_usd))
        throw ValueError("non-positive value for workload '" + workloads_[w] + "' at " +
                         space_.point_string(space_.point_at(i)));
    }
  }
}

std::size_t ObjectiveTable::workload_index(std::string_view name) const {
  for (std::size_t w = 0; w < workloads_.size(); ++w)
    if (workloads_[w] == name) return w;
  throw DomainError("unknown workload '" + std::string(name) + "'");
}

const Measurement& ObjectiveTable::measurement(std::size_t workload, std::size_t global_index) const {
  if (workload >= workloads_.size())
    throw DomainError("workload index " + std::to_string(workload) + " out of range");
  if (global_index >= space_.total_points())
    throw DomainError("point index " + std::to_string(global_index) + " out of range");
  return entries_[workload][global_index];
}

double ObjectiveTable::lookup(std::size_t workload, const ConfigPoint& p, Target t) const {
  return value_of(measurement(workload, space_.index_of(p)), t);
}

double ObjectiveTable::lookup(std::string_view workload, const ConfigPoint& p, Target t) const {
  return lookup(workload_index(workload), p, t);
}

std::vector<double> ObjectiveTable::values(std::size_t workload, Target t) const {
  if (workload >= workloads_.size())
    throw DomainError("workload index " + std::to_string(workload) + " out of range");
  std::vector<double> out;
  out.reserve(entries_[workload].size());
  for (const auto& m : entries_[workload]) out.push_back(value_of(m, t));
  return out;
}

// CSV ------------------------------------------------------------------------

ObjectiveTable read_csv(const SearchSpace& space, std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError("dataset CSV is empty");
  if (lines.front() != kDatasetHeader)
    throw ParseError("dataset CSV header must be '" + std::string(kDatasetHeader) + "'");

  std::vector<std::string> workloads;
  std::map<std::string, std::size_t, std::less<>> workload_ids;
  std::vector<std::vector<Measurement>> entries;
  std::vector<std::vector<bool>> seen;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string ctx = "dataset CSV line " + std::to_string(i + 1);
    const auto f = csv::split_fields(lines[i]);
    if (f.size() != 6)
      throw ParseError(ctx + ": expected 6 fields, found " + std::to_string(f.size()));
    if (f[0].empty()) throw ParseError(ctx + ": empty workload");

    auto it = workload_ids.find(f[0]);
    if (it == workload_ids.end()) {
      it = workload_ids.emplace(std::string(f[0]), workloads.size()).first;
      workloads.emplace_back(f[0]);
      entries.emplace_back(space.total_points());
      seen.emplace_back(space.total_points(), false);
    }
    const std::size_t w = it->second;

    const long long nodes = csv::parse_integer(f[3], ctx);
    const std::size_t k = space.find_provider(f[1]);
    const ConfigPoint p = space.parse_config(k, f[2], static_cast<int>(nodes));
    const std::size_t idx = space.index_of(p);
    if (seen[w][idx])
      throw DuplicateError(ctx + ": duplicate row for workload '" + workloads[w] + "' at " +
                           space.point_string(p));
    seen[w][idx] = true;

    Measurement m{csv::parse_number(f[4], ctx), csv::parse_number(f[5], ctx)};
    if (!positive_finite(m.runtime_s) || !positive_finite(m.cost_usd))
      throw ValueError(ctx + ": runtime_s and cost_usd must be positive and finite");
    entries[w][idx] = m;
  }
  if (workloads.empty()) throw CompletenessError("dataset CSV has no rows");
  for (std::size_t w = 0; w < workloads.size(); ++w)
    for (std::size_t idx = 0; idx < space.total_points(); ++idx)
      if (!seen[w][idx])
        throw CompletenessError("workload '" + workloads[w] + "' is missing point " +
                                space.point_string(space.point_at(idx)));
  return ObjectiveTable(space, std::move(workloads), std::move(entries));
}

ObjectiveTable load_csv(const SearchSpace& space, const std::filesystem::path& path) {
  return read_csv(space, csv::read_text(path));
}

std::string write_csv(const ObjectiveTable& table) {
  const auto& space = table.space();
  std::ostringstream out;
  out << kDatasetHeader << '\n';
  for (std::size_t w = 0; w < table.workloads().size(); ++w) {
    for (std::size_t idx = 0; idx < space.total_points(); ++idx) {
      const ConfigPoint p = space.point_at(idx);
      const auto& m = table.measurement(w, idx);
      out << table.workloads()[w] << ',' << space.provider(p.provider).name << ','
          << space.config_string(p) << ',' << p.nodes << ',' << csv::format_number(m.runtime_s)
          << ',' << csv::format_number(m.cost_usd) << '\n';
    }
  }
  return out.str();
}

// Synthetic generation -----------------------------------------------------------

Scenario Scenario::parse(std::string_view text) {
  if (text == "neutral") return neutral();
  if (text == "ernest_exact" || text == "ernest-exact") return ernest_exact();
  if (text.substr(0, 9) == "dominant:") {
    const auto rest = text.substr(9);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos)
      throw DomainError("dominant scenario must be 'dominant:<provider>:<factor>'");
    long long k = 0;
    double factor = 0.0;
    try {
      k = csv::parse_integer(rest.substr(0, colon), "scenario");
      factor = csv::parse_number(rest.substr(colon + 1), "scenario");
    } catch (const ParseError& e) {
      throw DomainError(e.what());
    }
    if (k < 0) throw DomainError("dominant provider index must be non-negative");
    return dominant(static_cast<std::size_t>(k), factor);
  }
  throw DomainError("unknown scenario '" + std::string(text) + "'");
}

SyntheticDataset generate_synthetic(const SearchSpace& space, std::size_t n_workloads,
                                    std::uint64_t seed, const Scenario& scenario) {
  if (n_workloads < 1) throw DomainError("generate_synthetic needs at least one workload");
  if (scenario.kind == Scenario::Kind::Dominant) {
    if (scenario.dominant_provider >= space.provider_count())
      throw DomainError("dominant provider index out of range");
    if (!positive_finite(scenario.factor))
      throw DomainError("dominant factor must be positive and finite");
  }

  // Coefficient and price ranges are narrow enough that, within one workload, the
  // largest runtime and the largest cost stay below 10x the smallest; a dominant
  // factor of 0.1 therefore puts the dominant provider strictly below all others.
  Rng price_rng(derive_seed(seed, {0x70726963ULL}));
  PriceList prices(space);
  const std::size_t stride = space.node_counts().size();
  for (std::size_t k = 0; k < space.provider_count(); ++k) {
    for (std::size_t c = 0; c < space.provider(k).config_count(); ++c) {
      const ConfigPoint p = space.point_at(space.provider_offset(k) + c * stride);
      prices.set_price(p, 0.1 * price_rng.uniform(0.8, 1.25));
    }
  }

  std::vector<std::string> names;
  std::vector<std::vector<Measurement>> entries;
  const bool perturb = scenario.kind != Scenario::Kind::ErnestExact;
  constexpr double kNoiseSigma = 0.03;

  for (std::size_t w = 0; w < n_workloads; ++w) {
    names.push_back("w" + std::to_string(w));
    Rng rng(derive_seed(seed, {0x776b6cULL, w}));
    const double base = std::exp(rng.uniform(std::log(30.0), std::log(600.0)));
    std::vector<Measurement> row(space.total_points());
    for (std::size_t k = 0; k < space.provider_count(); ++k) {
      const double provider_effect = rng.uniform(0.9, 1.15);
      const double scale =
          (scenario.kind == Scenario::Kind::Dominant && k == scenario.dominant_provider)
              ? scenario.factor
              : 1.0;
      for (std::size_t c = 0; c < space.provider(k).config_count(); ++c) {
        const double s = base * provider_effect * rng.uniform(0.83, 1.17);
        const double t0 = s * rng.uniform(0.1, 0.2);
        const double t1 = s * rng.uniform(0.8, 1.2);
        const double t2 = s * rng.uniform(0.0, 0.05);
        const double t3 = s * rng.uniform(0.005, 0.02);
        for (std::size_t j = 0; j < stride; ++j) {
          const std::size_t idx = space.provider_offset(k) + c * stride + j;
          const ConfigPoint p = space.point_at(idx);
          const double n = static_cast<double>(p.nodes);
          double runtime = t0 + t1 / n + t2 * std::log(n) + t3 * n;
          if (perturb) {
            double z = rng.normal();
            z = std::clamp(z, -2.0, 2.0);
            runtime *= std::exp(kNoiseSigma * z);
          }
          runtime *= scale;
          row[idx] = Measurement{runtime, derive_cost(runtime, prices.price(p), p.nodes)};
        }
      }
    }
    entries.push_back(std::move(row));
  }
  return SyntheticDataset{ObjectiveTable(space, std::move(names), std::move(entries)), std::move(prices)};
}

}  // namespace mcopt
