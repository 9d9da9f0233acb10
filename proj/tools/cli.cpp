#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "mcopt/csv.hpp"
#include "mcopt/mcopt.hpp"

namespace mcopt::cli {

namespace {

namespace fs = std::filesystem;

std::shared_ptr<spdlog::logger> make_logger() {
  auto logger = std::make_shared<spdlog::logger>("mcopt", std::make_shared<spdlog::sinks::stderr_sink_mt>());
  logger->set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::err;
  if (const char* env = std::getenv("MCOPT_LOG")) {
    const std::string v(env);
    if (v == "debug") level = spdlog::level::debug;
    else if (v == "info") level = spdlog::level::info;
    else if (v == "error") level = spdlog::level::err;
  }
  logger->set_level(level);
  return logger;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::size_t> parse_budgets(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(text)) {
    const long long v = csv::parse_integer(item, "--budgets");
    if (v < 1) throw DomainError("budgets must be positive");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw DomainError("--budgets is empty");
  return out;
}

std::vector<Target> parse_targets(const std::string& text) {
  std::vector<Target> out;
  for (const auto& item : split_list(text)) out.push_back(parse_target(item));
  if (out.empty()) throw DomainError("--targets is empty");
  return out;
}

std::vector<AlgorithmSpec> parse_algorithms(const std::string& text) {
  std::vector<AlgorithmSpec> out;
  for (const auto& item : split_list(text)) out.push_back(AlgorithmSpec::parse(item));
  if (out.empty()) throw DomainError("--algos is empty");
  return out;
}

void require_file(const std::string& path, std::string_view flag) {
  if (!fs::is_regular_file(path)) throw ParseError(std::string(flag) + ": no such file '" + path + "'");
}

void require_writable_parent(const fs::path& path, std::string_view flag) {
  const fs::path parent = path.has_parent_path() ? path.parent_path() : fs::path(".");
  if (!fs::is_directory(parent))
    throw DomainError(std::string(flag) + ": directory '" + parent.string() + "' does not exist");
}

SearchSpace load_space(const std::string& path) {
  if (path.empty()) return SearchSpace::reference();
  require_file(path, "--space");
  return SearchSpace::load(path);
}

struct Common {
  std::string data;
  std::string space;
  std::uint64_t seed = kDefaultSeed;
  double eta = 2.0;
  std::size_t init_design = 3;
};

struct GenFlags {
  std::string space;
  std::size_t workloads = 1;
  std::string scenario = "neutral";
  std::uint64_t seed = kDefaultSeed;
  std::string out;
  std::string prices;
};

struct RunFlags {
  Common common;
  std::string algo;
  std::string target = "cost";
  std::string workload;
  std::optional<std::size_t> budget;
  std::optional<std::size_t> b1;
  std::string trace;
};

struct SweepFlags {
  Common common;
  std::string algos;
  std::string budgets;
  std::size_t budget = 33;
  std::size_t seeds = 50;
  std::string targets = "cost,time";
  std::size_t production_runs = 64;
  std::size_t jobs = 1;
  std::string out;
  std::string workloads;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--data", c.data, "Dataset CSV (workload,provider,config,nodes,runtime_s,cost_usd)")->required();
  cmd->add_option("--space", c.space, "Space JSON; defaults to the built-in 3-provider, 88-point space");
  cmd->add_option("--seed", c.seed, "Global seed")->capture_default_str();
  cmd->add_option("--eta", c.eta, "CloudBandit budget growth factor")->capture_default_str();
  cmd->add_option("--init-design", c.init_design, "Random evaluations before a surrogate takes over")
      ->capture_default_str();
}

int cmd_gen(const GenFlags& f, std::ostream& out, std::ostream& err, spdlog::logger& log) {
  const SearchSpace space = load_space(f.space);
  const Scenario scenario = Scenario::parse(f.scenario);
  require_writable_parent(f.out, "--out");
  if (!f.prices.empty()) require_writable_parent(f.prices, "--prices");
  err << "mcopt gen: seed=" << f.seed << '\n';
  log.info("generating {} workloads over {} points, scenario {}", f.workloads, space.total_points(), f.scenario);
  const auto data = generate_synthetic(space, f.workloads, f.seed, scenario);
  const std::string table_csv = write_csv(data.table);
  const std::string price_csv = data.prices.to_csv();
  csv::write_text_atomic(f.out, table_csv);
  if (!f.prices.empty()) csv::write_text_atomic(f.prices, price_csv);
  out << "wrote " << f.out << " (" << data.table.workloads().size() << " workloads x " << space.total_points()
      << " points)\n";
  return 0;
}

int cmd_run(const RunFlags& f, std::ostream& out, std::ostream& err, spdlog::logger& log) {
  require_file(f.common.data, "--data");
  const SearchSpace space = load_space(f.common.space);
  const AlgorithmSpec algo = AlgorithmSpec::parse(f.algo);
  const Target target = parse_target(f.target);
  if (!f.trace.empty()) require_writable_parent(f.trace, "--trace");
  const ObjectiveTable table = load_csv(space, f.common.data);
  const std::size_t w = f.workload.empty() ? 0 : table.workload_index(f.workload);
  err << "mcopt run: seed=" << f.common.seed << '\n';

  RunSettings settings;
  settings.eta = f.common.eta;
  settings.bbo.init_design = f.common.init_design;

  MultiCloudResult result;
  if (algo.meta == MetaAlgorithm::CloudBandit && f.b1) {
    if (f.budget) throw DomainError("give either --budget or --b1, not both");
    CloudBanditOptions opt;
    opt.b1 = *f.b1;
    opt.eta = f.common.eta;
    opt.bbo = settings.bbo;
    const Objective objective = [&](const ConfigPoint& p) { return table.lookup(w, p, target); };
    result = cloudbandit(space, objective, algo.component_for(target), opt, f.common.seed);
  } else {
    const bool budget_free =
        algo.meta == MetaAlgorithm::Exhaustive || algo.meta == MetaAlgorithm::LinearPredictor;
    if (!f.budget && !budget_free)
      throw DomainError("--budget is required for '" + algo.name + "'" +
                        (algo.meta == MetaAlgorithm::CloudBandit ? " (or --b1)" : ""));
    result = run_algorithm(algo, table, w, target, f.budget.value_or(space.total_points()), f.common.seed,
                           settings);
  }
  log.info("{} evaluations, search expense {}", result.total_evals, result.search_expense);

  if (!f.trace.empty()) {
    std::string text;
    for (std::size_t i = 0; i < result.traces.size(); ++i) {
      std::string csv_text = result.traces[i].to_csv(space);
      if (i > 0) csv_text.erase(0, csv_text.find('\n') + 1);
      text += csv_text;
    }
    csv::write_text_atomic(f.trace, text);
  }
  out << result.to_json(space) << '\n';
  return 0;
}

ExperimentPlan make_plan(const SweepFlags& f, const std::vector<std::size_t>& budgets) {
  ExperimentPlan plan;
  plan.algorithms = parse_algorithms(f.algos);
  plan.targets = parse_targets(f.targets);
  plan.budgets = budgets;
  plan.seeds = f.seeds;
  plan.production_runs = f.production_runs;
  plan.seed = f.common.seed;
  plan.workloads = split_list(f.workloads);
  plan.settings.eta = f.common.eta;
  plan.settings.bbo.init_design = f.common.init_design;
  plan.jobs = f.jobs;
  plan.validate();
  return plan;
}

int cmd_sweep(const SweepFlags& f, bool savings_mode, std::ostream& out, std::ostream& err,
              spdlog::logger& log) {
  require_file(f.common.data, "--data");
  const SearchSpace space = load_space(f.common.space);
  const auto budgets = savings_mode ? std::vector<std::size_t>{f.budget} : parse_budgets(f.budgets);
  const ExperimentPlan plan = make_plan(f, budgets);
  const fs::path out_dir = f.out;
  if (fs::exists(out_dir) && !fs::is_directory(out_dir))
    throw DomainError("--out '" + f.out + "' exists and is not a directory");
  const ObjectiveTable table = load_csv(space, f.common.data);
  for (const auto& w : plan.workloads) table.workload_index(w);

  err << "mcopt " << (savings_mode ? "savings" : "sweep") << ": seed=" << plan.seed << " jobs=" << plan.jobs
      << '\n';
  log.info("{} algorithms x {} targets x {} budgets x {} seeds", plan.algorithms.size(), plan.targets.size(),
           plan.budgets.size(), plan.seeds);
  const PlanResults results = run_plan(plan, table);
  const auto written = emit_report(results, out_dir);
  for (const auto& p : written) log.info("wrote {}", p.string());

  if (savings_mode) {
    out << savings_summary(savings_box_table(results.savings));
  } else {
    out << summary_table(mean_regret_table(results.regret));
  }
  return 0;
}

int cmd_report(const std::string& dir, std::ostream& out, spdlog::logger& log) {
  require_file((fs::path(dir) / "regret.csv").string(), "--in");
  require_file((fs::path(dir) / "savings.csv").string(), "--in");
  const auto written = rebuild_charts(dir);
  for (const auto& p : written) log.info("wrote {}", p.string());
  const auto regret = parse_regret_csv(csv::read_text(fs::path(dir) / "regret.csv"));
  const auto savings = parse_savings_csv(csv::read_text(fs::path(dir) / "savings.csv"));
  out << summary_table(mean_regret_table(regret));
  if (!savings.empty()) out << savings_summary(savings_box_table(savings));
  return 0;
}

void add_plan_options(CLI::App* cmd, SweepFlags& f) {
  add_common(cmd, f.common);
  cmd->add_option("--seeds", f.seeds, "Repetitions per cell")->capture_default_str();
  cmd->add_option("--targets", f.targets, "Comma-separated targets (cost,time)")->capture_default_str();
  cmd->add_option("--N", f.production_runs, "Production runs for the savings analysis")->capture_default_str();
  cmd->add_option("--jobs", f.jobs, "Worker threads; output is identical for any value")->capture_default_str();
  cmd->add_option("--workloads", f.workloads, "Comma-separated workload subset (default: all)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto logger = make_logger();

  CLI::App app{"Multi-cloud configuration search: optimizers, CloudBandit and offline benchmarking", "mcopt"};
  app.require_subcommand(1);

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset CSV");
  gen_cmd->add_option("--space", gen.space, "Space JSON; defaults to the built-in space");
  gen_cmd->add_option("--workloads", gen.workloads, "Number of workloads")->capture_default_str();
  gen_cmd->add_option("--scenario", gen.scenario, "neutral | dominant:<k>:<factor> | ernest_exact")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output dataset CSV")->required();
  gen_cmd->add_option("--prices", gen.prices, "Optional output price CSV");

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Run one algorithm on one workload and print the result as JSON");
  add_common(run_cmd, run_flags.common);
  run_cmd->add_option("--algo", run_flags.algo, "rs | exhaustive | linear-pred | flat:<bbo> | indep:<bbo> | cb:<bbo>")
      ->required();
  run_cmd->add_option("--target", run_flags.target, "cost | time")->capture_default_str();
  run_cmd->add_option("--workload", run_flags.workload, "Workload name (default: first)");
  run_cmd->add_option("--budget", run_flags.budget, "Search budget B");
  run_cmd->add_option("--b1", run_flags.b1, "CloudBandit initial per-arm budget");
  run_cmd->add_option("--trace", run_flags.trace, "Write the evaluation trace CSV here");

  SweepFlags sweep;
  sweep.algos = "rs,cb:rbfopt,cb:cherrypick,flat:cherrypick,indep:cherrypick";
  sweep.budgets = "11,22,33,44,55,66,77,88";
  sweep.out = "report";
  auto* sweep_cmd = app.add_subcommand("sweep", "Regret sweep over budgets and seeds; writes a report directory");
  add_plan_options(sweep_cmd, sweep);
  sweep_cmd->add_option("--algos", sweep.algos, "Comma-separated algorithms")->capture_default_str();
  sweep_cmd->add_option("--budgets", sweep.budgets, "Comma-separated ascending budgets")->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "Report directory")->capture_default_str();

  SweepFlags sav;
  sav.algos = "rs,exhaustive,cb:rbfopt";
  sav.out = "savings-report";
  auto* sav_cmd = app.add_subcommand("savings", "Savings study at a single budget; writes a report directory");
  add_plan_options(sav_cmd, sav);
  sav_cmd->add_option("--algos", sav.algos, "Comma-separated algorithms")->capture_default_str();
  sav_cmd->add_option("--budget", sav.budget, "Search budget B")->capture_default_str();
  sav_cmd->add_option("--out", sav.out, "Report directory")->capture_default_str();

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "Rebuild charts and summaries from regret.csv/savings.csv");
  report_cmd->add_option("--in", report_dir, "Report directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out, err, *logger);
    if (*run_cmd) return cmd_run(run_flags, out, err, *logger);
    if (*sweep_cmd) return cmd_sweep(sweep, false, out, err, *logger);
    if (*sav_cmd) return cmd_sweep(sav, true, out, err, *logger);
    if (*report_cmd) return cmd_report(report_dir, out, *logger);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return is_user_error(e) ? 1 : 2;
  }
  return 2;
}

}  // namespace mcopt::cli
