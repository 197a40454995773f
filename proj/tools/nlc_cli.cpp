// Batch experiment runner: nlc run|verify <config> [--out dir] [--threads n] [--format csv|json]
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "nlc/nlc.h"

namespace {

struct Args {
  std::string config;
  std::string out = ".";
  int threads = 1;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, Args& a, bool with_format) {
  cmd->add_option("config", a.config, "experiment config (JSON)")->required();
  cmd->add_option("--out", a.out, "output directory");
  cmd->add_option("--threads", a.threads, "worker threads (NLC_THREADS overrides)")
    ->check(CLI::PositiveNumber);
  if (with_format) {
    cmd->add_option("--format", a.format, "table format")->check(CLI::IsMember({"csv", "json"}));
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal currents in locally symmetric lattices"};
  app.set_version_flag("--version", std::string(nlc_version()));
  app.require_subcommand(1);
  Args run_args, verify_args;
  CLI::App* run = app.add_subcommand("run", "run an experiment and write its tables");
  CLI::App* verify = app.add_subcommand("verify", "run an experiment's checks and print them");
  add_common(run, run_args, true);
  add_common(verify, verify_args, false);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // Usage errors are configuration errors as far as exit codes go.
    return code == 0 ? 0 : 2;
  }

  char* report = nullptr;
  int code;
  if (run->parsed()) {
    code = nlc_run_experiment(run_args.config.c_str(), run_args.out.c_str(), run_args.threads,
                              run_args.format.c_str(), &report);
  } else {
    code = nlc_verify_experiment(verify_args.config.c_str(), verify_args.out.c_str(),
                                 verify_args.threads, &report);
  }
  if (report) {
    std::fputs(report, code == 0 || code == 3 ? stdout : stderr);
    nlc_string_free(report);
  }
  return code;
}
