#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "mcopt/csv.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = mcopt::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("mcopt_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("gen and run") {
  const auto dir = fresh_dir("gen");
  const auto data = (dir / "data.csv").string();
  auto r = invoke({"gen", "--workloads", "5", "--scenario", "dominant:1:0.1", "--seed", "7", "--out", data});
  CHECK(r.code == 0);
  const auto text = mcopt::csv::read_text(data);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 5 * 88);

  r = invoke({"run", "--algo", "cloudbandit:rbfopt", "--b1", "3", "--eta", "2", "--target", "cost", "--workload",
              "w0", "--data", data});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"chosen_provider\"") != std::string::npos);
  CHECK(r.err.find("seed=") != std::string::npos);
  const auto again = invoke({"run", "--algo", "cloudbandit:rbfopt", "--b1", "3", "--eta", "2", "--target", "cost",
                             "--workload", "w0", "--data", data});
  CHECK(again.out == r.out);

  const auto trace = (dir / "trace.csv").string();
  r = invoke({"run", "--algo", "flat:cherrypick", "--budget", "11", "--data", data, "--trace", trace});
  CHECK(r.code == 0);
  CHECK(fs::exists(trace));
  fs::remove_all(dir);
}

TEST_CASE("user errors exit with 1 and write nothing") {
  const auto dir = fresh_dir("errors");
  auto r = invoke({"run", "--algo", "rs", "--budget", "5"});
  CHECK(r.code == 1);
  CHECK(!r.err.empty());
  CHECK(fs::is_empty(dir));

  r = invoke({"run", "--algo", "rs", "--budget", "5", "--data", (dir / "missing.csv").string()});
  CHECK(r.code == 1);
  r = invoke({"frobnicate"});
  CHECK(r.code == 1);
  r = invoke({"gen", "--scenario", "spiky", "--out", (dir / "x.csv").string()});
  CHECK(r.code == 1);
  CHECK(!fs::exists(dir / "x.csv"));
  r = invoke({"--help"});
  CHECK(r.code == 0);
  fs::remove_all(dir);
}

TEST_CASE("sweep, savings and report") {
  const auto dir = fresh_dir("sweep");
  const auto data = (dir / "data.csv").string();
  REQUIRE(invoke({"gen", "--workloads", "2", "--seed", "3", "--out", data}).code == 0);
  const std::vector<std::string> sweep{"sweep", "--data", data, "--budgets", "11,22", "--seeds", "2", "--algos",
                                       "rs,cb:rbfopt", "--targets", "cost,time", "--out", (dir / "a").string()};
  auto r = invoke(sweep);
  CHECK(r.code == 0);
  CHECK(!r.out.empty());
  const auto regret = mcopt::csv::read_text(dir / "a" / "regret.csv");
  CHECK(std::count(regret.begin(), regret.end(), '\n') == 1 + 2 * 2 * 2 * 2 * 2);

  auto sweep_b = sweep;
  sweep_b.back() = (dir / "b").string();
  sweep_b.insert(sweep_b.end(), {"--jobs", "4"});
  CHECK(invoke(sweep_b).code == 0);
  CHECK(mcopt::csv::read_text(dir / "b" / "regret.csv") == regret);
  CHECK(mcopt::csv::read_text(dir / "b" / "savings.csv") == mcopt::csv::read_text(dir / "a" / "savings.csv"));

  r = invoke({"savings", "--data", data, "--seeds", "2", "--algos", "rs,exhaustive", "--out", (dir / "s").string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "s" / "savings.csv"));

  r = invoke({"report", "--in", (dir / "a").string()});
  CHECK(r.code == 0);
  r = invoke({"report", "--in", (dir / "nothing").string()});
  CHECK(r.code == 1);

  r = invoke({"sweep", "--data", data, "--budgets", "22,11", "--out", (dir / "c").string()});
  CHECK(r.code == 1);
  fs::remove_all(dir);
}
