#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlc/config.hpp"

namespace nlc {

struct CheckResult {
  std::string name;
  double tolerance = 0.0;
  double measured = 0.0;
  // Upper bounds pass when measured <= tolerance, lower bounds when above.
  bool upper_bound = true;
  bool passed = false;
  bool expect_pass = true;
  std::string note;

  bool as_expected() const { return passed == expect_pass; }
  std::string verdict() const;
};

CheckResult make_check(std::string name, double measured, double tolerance, bool upper_bound = true,
                       std::string note = {});

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
};

struct ExperimentResult {
  std::string experiment;
  std::vector<Table> tables;
  std::vector<CheckResult> checks;
};

// A parsed experiment; calling it performs the computation.
struct ExperimentPlan {
  std::string experiment;
  std::vector<std::string> check_names;
  std::function<ExperimentResult(int threads)> execute;
};

// Throws Error(ErrorCode::config) for anything wrong with the configuration.
ExperimentPlan plan_experiment(const Json& config, const std::filesystem::path& base_dir);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  int threads = 1;
  std::string format = "csv";
};

struct RunOutcome {
  int exit_code = 0;
  std::string status;  // ok, checks_failed, module_error, config_error
  std::string error_code;
  std::string error_message;
  ExperimentResult result;
  std::filesystem::path manifest;
};

// run writes data files and the manifest; verify writes only the manifest
// and prints the check table to `report` when given. Exit codes: 0 success,
// 1 module error, 2 configuration error, 3 (verify only) a check did not
// match its expectation.
RunOutcome run_experiment(const std::filesystem::path& config_path, const RunOptions& options,
                          std::ostream* report = nullptr);
RunOutcome verify_experiment(const std::filesystem::path& config_path, const RunOptions& options,
                             std::ostream* report = nullptr);

// NLC_THREADS, when set to a positive integer, replaces the requested count.
int effective_threads(int requested);

std::string format_number(double x);
void write_table_csv(const Table& table, std::ostream& out);
Json table_to_json(const Table& table);
std::string check_table_text(const std::vector<CheckResult>& checks);

extern const char* const kVersion;

} // namespace nlc
