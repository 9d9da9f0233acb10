#include "mcopt/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "mcopt/csv.hpp"
#include "mcopt/errors.hpp"

namespace mcopt {

namespace {

constexpr std::string_view kRegretHeader = "workload,algorithm,target,budget,seed,found,fstar,regret";
constexpr std::string_view kSavingsHeader = "workload,algorithm,target,budget,N,C_opt,R_opt,R_rand,S";

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<std::string_view> data_lines(std::string_view text, std::string_view header, std::string_view what) {
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
  if (lines.empty() || lines.front() != header)
    throw ParseError(std::string(what) + " header must be '" + std::string(header) + "'");
  lines.erase(lines.begin());
  std::erase_if(lines, [](std::string_view l) { return l.empty(); });
  return lines;
}

struct Frame {
  double width = 760;
  double height = 440;
  double left = 70;
  double right = 190;
  double top = 40;
  double bottom = 60;
  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
};

void svg_open(std::ostringstream& out, const Frame& f, std::string_view title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
      << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << f.width << "\" height=\"" << f.height << "\" fill=\"white\"/>\n"
      << "<text x=\"" << f.left << "\" y=\"24\" font-size=\"15\">" << xml_escape(title) << "</text>\n";
}

void y_axis(std::ostringstream& out, const Frame& f, double lo, double hi, std::string_view label) {
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double v = lo + (hi - lo) * i / ticks;
    const double y = f.top + f.plot_h() * (1.0 - static_cast<double>(i) / ticks);
    out << "<line x1=\"" << f.left << "\" y1=\"" << fixed(y) << "\" x2=\"" << f.left + f.plot_w() << "\" y2=\""
        << fixed(y) << "\" stroke=\"#e0e0e0\"/>\n"
        << "<text x=\"" << f.left - 6 << "\" y=\"" << fixed(y + 4) << "\" text-anchor=\"end\">" << fixed(v, 3)
        << "</text>\n";
  }
  out << "<line x1=\"" << f.left << "\" y1=\"" << f.top << "\" x2=\"" << f.left << "\" y2=\"" << f.top + f.plot_h()
      << "\" stroke=\"black\"/>\n"
      << "<text transform=\"translate(16," << fixed(f.top + f.plot_h() / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << xml_escape(label) << "</text>\n";
}

}  // namespace

// CSV ------------------------------------------------------------------------

std::string regret_csv(const std::vector<RegretRecord>& records) {
  std::ostringstream out;
  out << kRegretHeader << '\n';
  for (const auto& r : records)
    out << r.workload << ',' << r.algorithm << ',' << to_string(r.target) << ',' << r.budget << ',' << r.seed << ','
        << csv::format_number(r.found) << ',' << csv::format_number(r.fstar) << ',' << csv::format_number(r.regret)
        << '\n';
  return out.str();
}

std::string savings_csv(const std::vector<SavingsRecord>& records) {
  std::ostringstream out;
  out << kSavingsHeader << '\n';
  for (const auto& r : records)
    out << r.workload << ',' << r.algorithm << ',' << to_string(r.target) << ',' << r.budget << ','
        << r.production_runs << ',' << csv::format_number(r.search_expense) << ','
        << csv::format_number(r.run_expense) << ',' << csv::format_number(r.random_expense) << ','
        << csv::format_number(r.savings) << '\n';
  return out.str();
}

std::vector<RegretRecord> parse_regret_csv(std::string_view text) {
  std::vector<RegretRecord> out;
  for (auto line : data_lines(text, kRegretHeader, "regret CSV")) {
    const auto f = csv::split_fields(line);
    if (f.size() != 8) throw ParseError("regret CSV: expected 8 fields in '" + std::string(line) + "'");
    RegretRecord r;
    r.workload = std::string(f[0]);
    r.algorithm = std::string(f[1]);
    r.target = parse_target(f[2]);
    r.budget = static_cast<std::size_t>(csv::parse_integer(f[3], "regret CSV budget"));
    r.seed = static_cast<std::size_t>(csv::parse_integer(f[4], "regret CSV seed"));
    r.found = csv::parse_number(f[5], "regret CSV found");
    r.fstar = csv::parse_number(f[6], "regret CSV fstar");
    r.regret = csv::parse_number(f[7], "regret CSV regret");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SavingsRecord> parse_savings_csv(std::string_view text) {
  std::vector<SavingsRecord> out;
  for (auto line : data_lines(text, kSavingsHeader, "savings CSV")) {
    const auto f = csv::split_fields(line);
    if (f.size() != 9) throw ParseError("savings CSV: expected 9 fields in '" + std::string(line) + "'");
    SavingsRecord r;
    r.workload = std::string(f[0]);
    r.algorithm = std::string(f[1]);
    r.target = parse_target(f[2]);
    r.budget = static_cast<std::size_t>(csv::parse_integer(f[3], "savings CSV budget"));
    r.production_runs = static_cast<std::size_t>(csv::parse_integer(f[4], "savings CSV N"));
    r.search_expense = csv::parse_number(f[5], "savings CSV C_opt");
    r.run_expense = csv::parse_number(f[6], "savings CSV R_opt");
    r.random_expense = csv::parse_number(f[7], "savings CSV R_rand");
    r.savings = csv::parse_number(f[8], "savings CSV S");
    out.push_back(std::move(r));
  }
  return out;
}

// Charts -------------------------------------------------------------------------

std::string regret_chart_svg(const std::vector<MeanRegretRow>& rows, Target target) {
  std::map<std::string, std::vector<std::pair<std::size_t, double>>> series;
  std::set<std::size_t> budgets;
  double max_regret = 0.0;
  for (const auto& r : rows) {
    if (r.target != target) continue;
    series[r.algorithm].emplace_back(r.budget, r.mean_regret);
    budgets.insert(r.budget);
    max_regret = std::max(max_regret, r.mean_regret);
  }
  if (series.empty()) throw DomainError("no regret rows for target " + std::string(to_string(target)));
  const Frame f;
  const double y_hi = max_regret > 0.0 ? max_regret * 1.1 : 1.0;
  const double b_lo = budgets.empty() ? 0.0 : static_cast<double>(*budgets.begin());
  const double b_hi = budgets.empty() ? 1.0 : static_cast<double>(*budgets.rbegin());
  auto x_of = [&](double b) {
    if (b_hi == b_lo) return f.left + f.plot_w() / 2;
    return f.left + f.plot_w() * (b - b_lo) / (b_hi - b_lo);
  };
  auto y_of = [&](double v) { return f.top + f.plot_h() * (1.0 - v / y_hi); };

  std::ostringstream out;
  svg_open(out, f, "Mean regret vs search budget (" + std::string(to_string(target)) + ")");
  y_axis(out, f, 0.0, y_hi, "mean regret");
  out << "<line x1=\"" << f.left << "\" y1=\"" << f.top + f.plot_h() << "\" x2=\"" << f.left + f.plot_w()
      << "\" y2=\"" << f.top + f.plot_h() << "\" stroke=\"black\"/>\n";
  for (auto b : budgets)
    out << "<text x=\"" << fixed(x_of(static_cast<double>(b))) << "\" y=\"" << f.top + f.plot_h() + 18
        << "\" text-anchor=\"middle\">" << b << "</text>\n";
  out << "<text x=\"" << fixed(f.left + f.plot_w() / 2) << "\" y=\"" << f.height - 16
      << "\" text-anchor=\"middle\">search budget B</text>\n";

  std::size_t color = 0;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const char* stroke = kPalette[color % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i > 0) out << ' ';
      out << fixed(x_of(static_cast<double>(pts[i].first))) << ',' << fixed(y_of(pts[i].second));
    }
    out << "\"/>\n";
    const double ly = f.top + 10 + 18.0 * static_cast<double>(color);
    const double lx = f.left + f.plot_w() + 16;
    out << "<line x1=\"" << lx << "\" y1=\"" << fixed(ly) << "\" x2=\"" << lx + 20 << "\" y2=\"" << fixed(ly)
        << "\" stroke=\"" << stroke << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << lx + 26 << "\" y=\"" << fixed(ly + 4) << "\">" << xml_escape(name) << "</text>\n";
    ++color;
  }
  out << "</svg>\n";
  return out.str();
}

std::string savings_chart_svg(const std::vector<SavingsBoxRow>& rows, Target target) {
  std::vector<const SavingsBoxRow*> boxes;
  double lo = 0.0;
  double hi = 0.0;
  for (const auto& r : rows) {
    if (r.target != target) continue;
    boxes.push_back(&r);
    lo = std::min(lo, r.stats.whisker_low);
    hi = std::max(hi, r.stats.whisker_high);
  }
  if (boxes.empty()) throw DomainError("no savings rows for target " + std::string(to_string(target)));
  if (hi == lo) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  Frame f;
  f.right = 30;
  auto y_of = [&](double v) { return f.top + f.plot_h() * (hi - v) / (hi - lo); };
  const double slot = boxes.empty() ? f.plot_w() : f.plot_w() / static_cast<double>(boxes.size());

  std::ostringstream out;
  svg_open(out, f, "Savings across workloads (" + std::string(to_string(target)) + ")");
  y_axis(out, f, lo, hi, "savings S");
  out << "<line x1=\"" << f.left << "\" y1=\"" << fixed(y_of(0.0)) << "\" x2=\"" << f.left + f.plot_w()
      << "\" y2=\"" << fixed(y_of(0.0)) << "\" stroke=\"black\" stroke-dasharray=\"4,3\"/>\n";
  std::set<std::size_t> budgets;
  for (const auto* b : boxes) budgets.insert(b->budget);

  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& s = boxes[i]->stats;
    const double cx = f.left + slot * (static_cast<double>(i) + 0.5);
    const double half = std::min(30.0, slot * 0.3);
    const char* fill = kPalette[i % std::size(kPalette)];
    out << "<g>\n"
        << "<line x1=\"" << fixed(cx) << "\" y1=\"" << fixed(y_of(s.whisker_high)) << "\" x2=\"" << fixed(cx)
        << "\" y2=\"" << fixed(y_of(s.q75)) << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << fixed(cx) << "\" y1=\"" << fixed(y_of(s.q25)) << "\" x2=\"" << fixed(cx)
        << "\" y2=\"" << fixed(y_of(s.whisker_low)) << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << fixed(cx - half / 2) << "\" y1=\"" << fixed(y_of(s.whisker_high)) << "\" x2=\""
        << fixed(cx + half / 2) << "\" y2=\"" << fixed(y_of(s.whisker_high)) << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << fixed(cx - half / 2) << "\" y1=\"" << fixed(y_of(s.whisker_low)) << "\" x2=\""
        << fixed(cx + half / 2) << "\" y2=\"" << fixed(y_of(s.whisker_low)) << "\" stroke=\"black\"/>\n"
        << "<rect x=\"" << fixed(cx - half) << "\" y=\"" << fixed(y_of(s.q75)) << "\" width=\"" << fixed(2 * half)
        << "\" height=\"" << fixed(std::max(y_of(s.q25) - y_of(s.q75), 1.0)) << "\" fill=\"" << fill
        << "\" fill-opacity=\"0.5\" stroke=\"black\"/>\n"
        << "<line x1=\"" << fixed(cx - half) << "\" y1=\"" << fixed(y_of(s.median)) << "\" x2=\"" << fixed(cx + half)
        << "\" y2=\"" << fixed(y_of(s.median)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << fixed(cx) << "\" y=\"" << f.top + f.plot_h() + 18 << "\" text-anchor=\"middle\">"
        << xml_escape(boxes[i]->algorithm);
    if (budgets.size() > 1) out << " @" << boxes[i]->budget;
    out << "</text>\n</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

// Text summaries ---------------------------------------------------------------

std::string summary_table(const std::vector<MeanRegretRow>& rows) {
  std::ostringstream out;
  for (Target t : {Target::Cost, Target::Time}) {
    std::set<std::size_t> budgets;
    std::map<std::string, std::map<std::size_t, double>> grid;
    for (const auto& r : rows) {
      if (r.target != t) continue;
      budgets.insert(r.budget);
      grid[r.algorithm][r.budget] = r.mean_regret;
    }
    if (grid.empty()) continue;
    std::size_t width = 9;
    for (const auto& [name, _] : grid) width = std::max(width, name.size());
    out << "mean regret (" << to_string(t) << ")\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%-*s", static_cast<int>(width), "algorithm");
    out << buf;
    for (auto b : budgets) {
      std::snprintf(buf, sizeof(buf), " %9zu", b);
      out << buf;
    }
    out << '\n';
    for (const auto& [name, cells] : grid) {
      std::snprintf(buf, sizeof(buf), "%-*s", static_cast<int>(width), name.c_str());
      out << buf;
      for (auto b : budgets) {
        const auto it = cells.find(b);
        if (it == cells.end()) std::snprintf(buf, sizeof(buf), " %9s", "-");
        else std::snprintf(buf, sizeof(buf), " %9.4f", it->second);
        out << buf;
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string savings_summary(const std::vector<SavingsBoxRow>& rows) {
  std::ostringstream out;
  out << "target algorithm budget workloads whisker_low q25 median q75 whisker_high\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s %s %zu %zu %.4f %.4f %.4f %.4f %.4f\n",
                  std::string(to_string(r.target)).c_str(), r.algorithm.c_str(), r.budget, r.count,
                  r.stats.whisker_low, r.stats.q25, r.stats.median, r.stats.q75, r.stats.whisker_high);
    out << buf;
  }
  return out.str();
}

// Files ------------------------------------------------------------------------

namespace {

std::vector<std::filesystem::path> write_charts(const std::vector<RegretRecord>& regret,
                                                const std::vector<SavingsRecord>& savings,
                                                const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  const auto mean_rows = mean_regret_table(regret);
  const auto box_rows = savings.empty() ? std::vector<SavingsBoxRow>{} : savings_box_table(savings);
  std::set<Target> regret_targets;
  std::set<Target> savings_targets;
  for (const auto& r : regret) regret_targets.insert(r.target);
  for (const auto& r : savings) savings_targets.insert(r.target);
  for (Target t : regret_targets) {
    auto path = dir / ("regret_" + std::string(to_string(t)) + ".svg");
    csv::write_text_atomic(path, regret_chart_svg(mean_rows, t));
    written.push_back(path);
  }
  for (Target t : savings_targets) {
    auto path = dir / ("savings_" + std::string(to_string(t)) + ".svg");
    csv::write_text_atomic(path, savings_chart_svg(box_rows, t));
    written.push_back(path);
  }
  return written;
}

}  // namespace

std::vector<std::filesystem::path> emit_report(const PlanResults& results, const std::filesystem::path& out_dir) {
  if (results.regret.empty()) throw DomainError("no records to report");
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  csv::write_text_atomic(out_dir / "regret.csv", regret_csv(results.regret));
  written.push_back(out_dir / "regret.csv");
  csv::write_text_atomic(out_dir / "savings.csv", savings_csv(results.savings));
  written.push_back(out_dir / "savings.csv");
  for (auto& p : write_charts(results.regret, results.savings, out_dir)) written.push_back(std::move(p));
  return written;
}

std::vector<std::filesystem::path> rebuild_charts(const std::filesystem::path& dir) {
  const auto regret = parse_regret_csv(csv::read_text(dir / "regret.csv"));
  const auto savings = parse_savings_csv(csv::read_text(dir / "savings.csv"));
  if (regret.empty()) throw DomainError("regret.csv has no records");
  return write_charts(regret, savings, dir);
}

}  // namespace mcopt
