#include "liplab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "liplab/linalg.hpp"

namespace liplab {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& v) {
  std::vector<double> out;
  std::istringstream is(v);
  double x;
  while (is >> x) out.push_back(x);
  return out;
}

const std::vector<std::string> kExperiments = {
    "constants",  "friedrichs_sweep", "ricci_commutator", "mean_curvature",
    "tau_convergence", "segment",     "hawking",          "geodesic"};

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw Error("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw Error("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    std::string full = section.empty() ? key : section + "." + key;
    cfg.raw.push_back({full, value});

    try {
      if (full == "run.experiment") cfg.experiment = value;
      else if (full == "run.output") cfg.output_dir = value;
      else if (full == "run.seed") cfg.seed = std::stoull(value);
      else if (full == "model.name") cfg.model_name = value;
      else if (section == "model" && key != "name") cfg.model_params[key] = std::stod(value);
      else if (full == "grid.bounds") {
        // per-axis intervals separated by ';'
        std::istringstream bs(value);
        std::string part;
        while (std::getline(bs, part, ';')) {
          auto v = parse_list(part);
          if (v.size() != 2)
            throw Error("grid.bounds: each axis needs 'lo hi'");
          cfg.grid_bounds.push_back({v[0], v[1]});
        }
      } else if (full == "grid.resolution") {
        for (double x : parse_list(value)) cfg.grid_resolution.push_back(static_cast<int>(x));
      } else if (full == "mollifier.profile") cfg.mollifier_profile = value;
      else if (full == "mollifier.schedule") cfg.schedule = parse_list(value);
      else if (full == "comparison.n") cfg.n = std::stoi(value);
      else if (full == "comparison.beta") cfg.beta = std::stod(value);
      else if (full == "comparison.rho") cfg.rho = std::stod(value);
      else if (full == "comparison.eta") cfg.eta = std::stod(value);
      else if (full == "comparison.T") cfg.T = std::stod(value);
      else if (full == "comparison.beta_slack") cfg.beta_slack = std::stod(value);
      else if (full == "friedrichs.case") cfg.friedrichs_case = value;
      else if (full == "tau.pairs") cfg.pairs = std::stoi(value);
      else throw Error("unknown key");
    } catch (const Error&) {
      throw Error("config line " + std::to_string(lineno) + ": bad key '" + full + "'");
    } catch (const std::exception&) {
      throw Error("config line " + std::to_string(lineno) + ": bad value for '" + full + "'");
    }
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

std::vector<std::string> validate(const RunConfig& cfg) {
  std::vector<std::string> diags;
  bool known = false;
  for (const auto& e : kExperiments)
    if (cfg.experiment == e) known = true;
  if (!known)
    diags.push_back("run.experiment: unknown experiment '" + cfg.experiment + "'");
  for (size_t a = 0; a < cfg.grid_resolution.size(); ++a)
    if (cfg.grid_resolution[a] < 2)
      diags.push_back("grid.resolution: axis " + std::to_string(a) + " below the floor of 2");
  for (size_t a = 0; a < cfg.grid_bounds.size(); ++a)
    if (!(cfg.grid_bounds[a].second > cfg.grid_bounds[a].first))
      diags.push_back("grid.bounds: degenerate interval on axis " + std::to_string(a));
  if (!cfg.schedule.empty()) {
    for (size_t k = 0; k + 1 < cfg.schedule.size(); ++k)
      if (!(cfg.schedule[k] > cfg.schedule[k + 1]))
        diags.push_back("mollifier.schedule: must be strictly decreasing");
    if (!cfg.grid_bounds.empty() && !cfg.grid_resolution.empty() &&
        cfg.grid_bounds.size() == cfg.grid_resolution.size()) {
      double hmax = 0;
      for (size_t a = 0; a < cfg.grid_bounds.size(); ++a)
        hmax = std::max(hmax, (cfg.grid_bounds[a].second - cfg.grid_bounds[a].first) /
                                  (cfg.grid_resolution[a] - 1));
      if (cfg.schedule.back() < 4.0 * hmax)
        diags.push_back("mollifier.schedule: smallest epsilon under-resolved (< 4 cells)");
    }
  }
  if (cfg.mollifier_profile != "standard_bump" && cfg.mollifier_profile != "polynomial_bump")
    diags.push_back("mollifier.profile: unknown profile '" + cfg.mollifier_profile + "'");
  if (cfg.rho < 0 && cfg.beta < 0) {
    if (!(std::abs(cfg.beta) > (cfg.n - 1) * std::sqrt(-cfg.rho)))
      diags.push_back("comparison.beta: rho<0 requires |beta| > (n-1) sqrt|rho| (needs |beta| > " +
                      std::to_string((cfg.n - 1) * std::sqrt(-cfg.rho)) + ")");
  }
  if (cfg.rho > 0 && std::sqrt(cfg.rho) * cfg.T > M_PI / 2)
    diags.push_back("comparison.T: rho>0 requires sqrt(rho) T <= pi/2");
  if (cfg.model_params.count("m1") && cfg.model_params.count("m2") &&
      cfg.model_params.at("m2") < cfg.model_params.at("m1"))
    diags.push_back("model.m2: must be >= m1");
  if (cfg.model_params.count("t0") && cfg.model_params.at("t0") >= 0 &&
      cfg.experiment == "hawking")
    diags.push_back("model.t0: Hawking runs need t0 < 0");
  if (cfg.experiment == "hawking" && cfg.model_name == "minkowski")
    diags.push_back("model.name: Hawking runs need a contracting model");
  return diags;
}

}  // namespace liplab
