// liplab - experiment run configuration (INI-style sections, dotted keys)
#ifndef LIPLAB_CONFIG_HPP
#define LIPLAB_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace liplab {

struct RunConfig {
  // [run]
  std::string experiment;
  std::string output_dir = "out";
  std::uint64_t seed = 42;
  // [model]
  std::string model_name = "minkowski";
  std::map<std::string, double> model_params;  // dim, m1, m2, ts, kind, t0...
  // [grid]
  std::vector<std::pair<double, double>> grid_bounds;
  std::vector<int> grid_resolution;
  // [mollifier]
  std::string mollifier_profile = "standard_bump";
  std::vector<double> schedule;
  // [comparison]
  int n = 4;
  double beta = 0, rho = 0, eta = 0.25, T = 1.0, beta_slack = 0.005;
  // [friedrichs]
  std::string friedrichs_case = "kink";
  // [tau]
  int pairs = 50;

  /// every parsed key=value, in file order (echoed into reports)
  std::vector<std::pair<std::string, std::string>> raw;
};

/// Parses the INI-style config file ([section] + key = value, '#' comments).
/// Throws Error with the offending line on malformed input.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

/// Schema + cross-field diagnostics (empty = valid). Each entry names the key.
std::vector<std::string> validate(const RunConfig& cfg);

}  // namespace liplab

#endif
