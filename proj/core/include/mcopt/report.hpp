#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mcopt/experiment.hpp"

namespace mcopt {

std::string regret_csv(const std::vector<RegretRecord>& records);
std::string savings_csv(const std::vector<SavingsRecord>& records);
std::vector<RegretRecord> parse_regret_csv(std::string_view text);
std::vector<SavingsRecord> parse_savings_csv(std::string_view text);

/// Mean regret vs budget, one polyline per algorithm.
std::string regret_chart_svg(const std::vector<MeanRegretRow>& rows, Target target);
/// One box per (algorithm, budget) of savings across workloads.
std::string savings_chart_svg(const std::vector<SavingsBoxRow>& rows, Target target);

/// Plain-text mean regret table (algorithms x budgets) per target.
std::string summary_table(const std::vector<MeanRegretRow>& rows);
std::string savings_summary(const std::vector<SavingsBoxRow>& rows);

/// Writes regret.csv, savings.csv, regret_<target>.svg and savings_<target>.svg
/// into `out_dir` (created if missing). Files are written atomically.
/// Returns the written paths.
std::vector<std::filesystem::path> emit_report(const PlanResults& results, const std::filesystem::path& out_dir);

/// Regenerates the charts from existing regret.csv / savings.csv in `dir`.
std::vector<std::filesystem::path> rebuild_charts(const std::filesystem::path& dir);

}  // namespace mcopt
