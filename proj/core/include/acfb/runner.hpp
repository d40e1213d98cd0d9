#pragma once

#include <string>
#include <vector>

#include "acfb/run_config.hpp"

namespace acfb {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 2 config, 3 numerical, 4 failed check
  std::vector<std::string> artifacts;
  std::vector<CheckResult> checks;
  std::string message;

  bool all_checks_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Executes one subcommand (minimize, analyze, weiss, growth, census,
// connect1d, sweep) against a parsed config. Exceptions are mapped onto exit
// codes; artifacts land in cfg.output_dir unless overridden.
RunOutcome run_subcommand(const std::string& subcommand, const RunConfig& cfg, bool check_mode,
                          const std::string& out_dir_override = "");

}  // namespace acfb
