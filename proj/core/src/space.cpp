#include "mcopt/space.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mcopt/errors.hpp"

namespace mcopt {

namespace {

using ordered_json = nlohmann::ordered_json;

bool is_identifier_safe(std::string_view s) {
  // Characters used as separators in the canonical point string and CSV.
  return !s.empty() && s.find_first_of("/;=,\"\n\r") == std::string_view::npos;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::size_t ProviderSpace::config_count() const {
  std::size_t count = 1;
  for (const auto& p : params) count *= p.values.size();
  return count;
}

std::size_t ProviderSpace::one_hot_width() const {
  std::size_t width = 0;
  for (const auto& p : params) width += p.values.size();
  return width;
}

SearchSpace::SearchSpace(std::vector<ProviderSpace> providers, std::vector<int> node_counts)
    : providers_(std::move(providers)), node_counts_(std::move(node_counts)) {
  if (providers_.empty()) throw DomainError("search space needs at least one provider");
  std::set<std::string> names;
  for (const auto& prov : providers_) {
    if (!is_identifier_safe(prov.name))
      throw DomainError("invalid provider name '" + prov.name + "'");
    if (!names.insert(prov.name).second)
      throw DomainError("duplicate provider name '" + prov.name + "'");
    if (prov.params.empty())
      throw DomainError("provider '" + prov.name + "' has no parameters");
    std::set<std::string> param_names;
    for (const auto& param : prov.params) {
      if (!is_identifier_safe(param.name))
        throw DomainError("invalid parameter name '" + param.name + "' in provider '" + prov.name + "'");
      if (!param_names.insert(param.name).second)
        throw DomainError("duplicate parameter '" + param.name + "' in provider '" + prov.name + "'");
      if (param.values.empty())
        throw DomainError("parameter '" + param.name + "' of provider '" + prov.name + "' has no values");
      std::set<std::string> values;
      for (const auto& v : param.values) {
        if (!is_identifier_safe(v))
          throw DomainError("invalid value '" + v + "' for parameter '" + param.name + "'");
        if (!values.insert(v).second)
          throw DomainError("duplicate value '" + v + "' for parameter '" + param.name + "'");
      }
    }
  }
  if (node_counts_.empty()) throw DomainError("node count set is empty");
  for (std::size_t i = 0; i < node_counts_.size(); ++i) {
    if (node_counts_[i] < 1) throw DomainError("node counts must be >= 1");
    if (i > 0 && node_counts_[i] <= node_counts_[i - 1])
      throw DomainError("node counts must be strictly increasing");
  }
  offsets_.reserve(providers_.size() + 1);
  offsets_.push_back(0);
  for (const auto& prov : providers_)
    offsets_.push_back(offsets_.back() + prov.config_count() * node_counts_.size());
}

SearchSpace SearchSpace::from_json(std::string_view document) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("space file: ") + e.what());
  }
  try {
    std::vector<ProviderSpace> providers;
    for (const auto& jp : doc.at("providers")) {
      ProviderSpace prov;
      prov.name = jp.at("name").get<std::string>();
      for (const auto& [pname, jvalues] : jp.at("params").items()) {
        Parameter param{pname, {}};
        for (const auto& v : jvalues) {
          // Numeric values such as cpu sizes are accepted and kept in their textual form.
          param.values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        }
        prov.params.push_back(std::move(param));
      }
      providers.push_back(std::move(prov));
    }
    auto nodes = doc.at("nodes").get<std::vector<int>>();
    return SearchSpace(std::move(providers), std::move(nodes));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("space file: ") + e.what());
  }
}

SearchSpace SearchSpace::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open space file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string SearchSpace::to_json() const {
  ordered_json doc;
  doc["providers"] = ordered_json::array();
  for (const auto& prov : providers_) {
    ordered_json jp;
    jp["name"] = prov.name;
    jp["params"] = ordered_json::object();
    for (const auto& param : prov.params) jp["params"][param.name] = param.values;
    doc["providers"].push_back(std::move(jp));
  }
  doc["nodes"] = node_counts_;
  return doc.dump(2) + "\n";
}

SearchSpace SearchSpace::reference() {
  return SearchSpace(
      {
          {"aws", {{"family", {"m4", "r4", "c4"}}, {"size", {"large", "xlarge"}}}},
          {"azure", {{"family", {"D_v2", "D_v3"}}, {"cpu_size", {"2", "4"}}}},
          {"gcp",
           {{"family", {"e2", "n1"}},
            {"type", {"standard", "highmem", "highcpu"}},
            {"vcpu", {"2", "4"}}}},
      },
      {2, 3, 4, 5});
}

const ProviderSpace& SearchSpace::provider(std::size_t k) const {
  if (k >= providers_.size())
    throw DomainError("provider index " + std::to_string(k) + " out of range");
  return providers_[k];
}

std::size_t SearchSpace::point_count(std::size_t k) const {
  return provider(k).config_count() * node_counts_.size();
}

std::size_t SearchSpace::provider_offset(std::size_t k) const {
  provider(k);
  return offsets_[k];
}

bool SearchSpace::contains(const ConfigPoint& p) const {
  if (p.provider >= providers_.size()) return false;
  const auto& prov = providers_[p.provider];
  if (p.assignment.size() != prov.params.size()) return false;
  for (std::size_t i = 0; i < p.assignment.size(); ++i)
    if (p.assignment[i] >= prov.params[i].values.size()) return false;
  return std::binary_search(node_counts_.begin(), node_counts_.end(), p.nodes);
}

void SearchSpace::validate(const ConfigPoint& p) const {
  if (p.provider >= providers_.size())
    throw DomainError("provider index " + std::to_string(p.provider) + " out of range");
  const auto& prov = providers_[p.provider];
  if (p.assignment.size() != prov.params.size())
    throw DomainError("point for provider '" + prov.name + "' has " +
                      std::to_string(p.assignment.size()) + " values, expected " +
                      std::to_string(prov.params.size()));
  for (std::size_t i = 0; i < p.assignment.size(); ++i)
    if (p.assignment[i] >= prov.params[i].values.size())
      throw DomainError("value index out of range for parameter '" + prov.params[i].name + "'");
  if (!std::binary_search(node_counts_.begin(), node_counts_.end(), p.nodes))
    throw DomainError("node count " + std::to_string(p.nodes) + " not in space");
}

std::size_t SearchSpace::config_index(const ConfigPoint& p) const {
  validate(p);
  const auto& prov = providers_[p.provider];
  std::size_t idx = 0;
  for (std::size_t i = 0; i < prov.params.size(); ++i)
    idx = idx * prov.params[i].values.size() + p.assignment[i];
  return idx;
}

std::size_t SearchSpace::index_of(const ConfigPoint& p) const {
  const std::size_t cfg = config_index(p);
  const auto node_pos = static_cast<std::size_t>(
      std::lower_bound(node_counts_.begin(), node_counts_.end(), p.nodes) - node_counts_.begin());
  return offsets_[p.provider] + cfg * node_counts_.size() + node_pos;
}

ConfigPoint SearchSpace::point_at(std::size_t global_index) const {
  if (global_index >= total_points())
    throw DomainError("point index " + std::to_string(global_index) + " out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global_index);
  const auto k = static_cast<std::size_t>(it - offsets_.begin()) - 1;
  std::size_t local = global_index - offsets_[k];
  ConfigPoint p;
  p.provider = k;
  p.nodes = node_counts_[local % node_counts_.size()];
  std::size_t cfg = local / node_counts_.size();
  const auto& params = providers_[k].params;
  p.assignment.resize(params.size());
  for (std::size_t i = params.size(); i-- > 0;) {
    p.assignment[i] = cfg % params[i].values.size();
    cfg /= params[i].values.size();
  }
  return p;
}

std::size_t SearchSpace::find_provider(std::string_view name) const {
  for (std::size_t k = 0; k < providers_.size(); ++k)
    if (providers_[k].name == name) return k;
  throw DomainError("unknown provider '" + std::string(name) + "'");
}

std::string SearchSpace::config_string(const ConfigPoint& p) const {
  validate(p);
  const auto& prov = providers_[p.provider];
  std::string out;
  for (std::size_t i = 0; i < prov.params.size(); ++i) {
    if (i > 0) out += ';';
    out += prov.params[i].name;
    out += '=';
    out += prov.params[i].values[p.assignment[i]];
  }
  return out;
}

std::string SearchSpace::point_string(const ConfigPoint& p) const {
  return providers_.at(p.provider).name + "/" + config_string(p) + "/n=" + std::to_string(p.nodes);
}

ConfigPoint SearchSpace::parse_config(std::size_t provider_index, std::string_view config,
                                      int nodes) const {
  const auto& prov = provider(provider_index);
  const auto pairs = split(config, ';');
  if (pairs.size() != prov.params.size())
    throw DomainError("config '" + std::string(config) + "' does not match parameters of provider '" +
                      prov.name + "'");
  ConfigPoint p;
  p.provider = provider_index;
  p.nodes = nodes;
  p.assignment.resize(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto eq = pairs[i].find('=');
    if (eq == std::string_view::npos)
      throw DomainError("malformed config entry '" + std::string(pairs[i]) + "'");
    const auto key = pairs[i].substr(0, eq);
    const auto value = pairs[i].substr(eq + 1);
    const auto& param = prov.params[i];
    if (key != param.name)
      throw DomainError("expected parameter '" + param.name + "' at position " + std::to_string(i) +
                        ", found '" + std::string(key) + "'");
    const auto it = std::find(param.values.begin(), param.values.end(), value);
    if (it == param.values.end())
      throw DomainError("value '" + std::string(value) + "' not allowed for parameter '" + param.name + "'");
    p.assignment[i] = static_cast<std::size_t>(it - param.values.begin());
  }
  validate(p);
  return p;
}

ConfigPoint SearchSpace::parse_point(std::string_view text) const {
  const auto parts = split(text, '/');
  if (parts.size() != 3 || parts[2].substr(0, 2) != "n=")
    throw DomainError("malformed point string '" + std::string(text) + "'");
  const std::size_t k = find_provider(parts[0]);
  const auto digits = parts[2].substr(2);
  int nodes = 0;
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string_view::npos)
    throw DomainError("malformed node count in '" + std::string(text) + "'");
  try {
    nodes = std::stoi(std::string(digits));
  } catch (const std::exception&) {
    throw DomainError("malformed node count in '" + std::string(text) + "'");
  }
  return parse_config(k, parts[1], nodes);
}

double SearchSpace::node_feature(int nodes) const {
  const int lo = node_counts_.front();
  const int hi = node_counts_.back();
  if (lo == hi) return 0.5;
  return static_cast<double>(nodes - lo) / static_cast<double>(hi - lo);
}

std::vector<ConfigPoint> enumerate_provider(const SearchSpace& space, std::size_t k) {
  const std::size_t count = space.point_count(k);
  const std::size_t offset = space.provider_offset(k);
  std::vector<ConfigPoint> points;
  points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) points.push_back(space.point_at(offset + i));
  return points;
}

std::vector<ConfigPoint> enumerate_all(const SearchSpace& space) {
  std::vector<ConfigPoint> points;
  points.reserve(space.total_points());
  for (std::size_t i = 0; i < space.total_points(); ++i) points.push_back(space.point_at(i));
  return points;
}

EncodedPoint encode(const SearchSpace& space, const ConfigPoint& p) {
  space.validate(p);
  const auto& prov = space.provider(p.provider);
  EncodedPoint x(prov.one_hot_width() + 1, 0.0);
  std::size_t offset = 0;
  for (std::size_t i = 0; i < prov.params.size(); ++i) {
    x[offset + p.assignment[i]] = 1.0;
    offset += prov.params[i].values.size();
  }
  x[offset] = space.node_feature(p.nodes);
  return x;
}

EncodedPoint encode_flat(const SearchSpace& space, const ConfigPoint& p) {
  space.validate(p);
  const std::size_t K = space.provider_count();
  std::size_t width = K + 1;
  for (const auto& prov : space.providers()) width += prov.one_hot_width();
  EncodedPoint x(width, 0.0);
  x[p.provider] = 1.0;
  std::size_t offset = K;
  for (std::size_t k = 0; k < K; ++k) {
    const auto& prov = space.provider(k);
    if (k == p.provider) {
      std::size_t inner = offset;
      for (std::size_t i = 0; i < prov.params.size(); ++i) {
        x[inner + p.assignment[i]] = 1.0;
        inner += prov.params[i].values.size();
      }
    }
    offset += prov.one_hot_width();
  }
  x[offset] = space.node_feature(p.nodes);
  return x;
}

}  // namespace mcopt
