// liplab - experiment dispatch
#ifndef LIPLAB_RUNNER_HPP
#define LIPLAB_RUNNER_HPP

#include "liplab/config.hpp"

namespace liplab {

struct RunResult {
  int exit_code = 0;  // 0 pass, 1 experiment FAIL, 2 config error
  bool pass = false;
  std::string message;
  std::string report_path;
};

/// Executes the named experiment; writes report.txt + CSV sidecars + plot data
/// into cfg.output_dir. Deterministic given config + seed.
RunResult run(const RunConfig& cfg);

std::string catalog_listing();
std::string summarize_reports(const std::string& dir);

}  // namespace liplab

#endif
