// liplab command line: run/validate experiment configs, inspect the catalog
#include <CLI11.hpp>
#include <cstdio>

#include "liplab/report.hpp"
#include "liplab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"liplab - numerical laboratory for Lipschitz Lorentzian geometry"};
  app.require_subcommand(1);

  std::string config_path, report_dir, output_override;

  auto* run_cmd = app.add_subcommand("run", "execute an experiment config");
  run_cmd->add_option("config", config_path, "config file")->required();
  run_cmd->add_option("--output", output_override, "override output directory");

  auto* val_cmd = app.add_subcommand("validate", "check a config, print diagnostics");
  val_cmd->add_option("config", config_path, "config file")->required();

  auto* cat_cmd = app.add_subcommand("catalog", "catalog operations");
  auto* cat_list = cat_cmd->add_subcommand("list", "list model catalog");

  auto* rep_cmd = app.add_subcommand("report", "report operations");
  auto* rep_sum = rep_cmd->add_subcommand("summarize", "summarize reports under a directory");
  rep_sum->add_option("dir", report_dir, "directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      liplab::RunConfig cfg = liplab::parse_config(config_path);
      if (!output_override.empty()) cfg.output_dir = output_override;
      liplab::RunResult rr = liplab::run(cfg);
      std::printf("%s\n", rr.message.c_str());
      if (!rr.report_path.empty()) std::printf("report: %s\n", rr.report_path.c_str());
      return rr.exit_code;
    }
    if (*val_cmd) {
      liplab::RunConfig cfg = liplab::parse_config(config_path);
      auto diags = liplab::validate(cfg);
      for (const auto& d : diags) std::printf("%s\n", d.c_str());
      if (diags.empty()) std::printf("config ok\n");
      return diags.empty() ? 0 : 2;
    }
    if (*cat_list) {
      std::printf("%s", liplab::catalog_listing().c_str());
      return 0;
    }
    if (*rep_sum) {
      std::printf("%s", liplab::summarize_reports(report_dir).c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
