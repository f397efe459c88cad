#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "g2flow/scenarios.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw g2flow::ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct CliOverrides {
  std::string config_path;
  std::string out_dir = ".";
  long long seed = -1;
  int samples = -1;
  double tolerance = -1.0;
};

void attach_options(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config_path, "TOML scenario configuration file");
  cmd->add_option("--out", o.out_dir, "output directory for JSON/CSV reports");
  cmd->add_option("--seed", o.seed, "RNG seed (overrides the config)");
  cmd->add_option("--samples", o.samples, "sample count (overrides the config)");
  cmd->add_option("--tolerance", o.tolerance, "headline tolerance (overrides the config)");
}

int run(const std::string& scenario_from_cmd, const CliOverrides& o) {
  g2flow::ScenarioConfig cfg;
  if (!o.config_path.empty()) {
    cfg = g2flow::config_from_toml(g2flow::parse_toml(read_file(o.config_path)));
    if (!scenario_from_cmd.empty() && cfg.scenario != scenario_from_cmd)
      throw g2flow::ConfigError("config scenario '" + cfg.scenario +
                                "' does not match subcommand '" + scenario_from_cmd + "'");
  } else if (!scenario_from_cmd.empty()) {
    cfg.scenario = scenario_from_cmd;
  } else {
    throw g2flow::ConfigError("no scenario: pass a subcommand or --config FILE");
  }
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  if (o.samples >= 0) cfg.samples = o.samples;
  if (o.tolerance >= 0) cfg.tolerance = o.tolerance;

  g2flow::ScenarioResult res = g2flow::run_scenario(cfg);
  const g2flow::WrittenReport paths = g2flow::write_report(res, o.out_dir, cfg);
  for (const g2flow::CheckRow& c : res.checks)
    std::printf("%-34s %13.6g %s %10.4g  %s\n", c.name.c_str(), c.value, c.op.c_str(),
                c.tolerance, c.pass ? "PASS" : "FAIL");
  if (res.blown_down)
    std::printf("note: fiber length reached the floor (blow-down); expected for F != 0\n");
  std::printf("%s: %s  (report: %s)\n", res.scenario.c_str(), res.pass ? "PASS" : "FAIL",
              paths.json_path.c_str());
  return res.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"g2flow: torsion verification suites and gradient-flow experiments for "
               "S^1-invariant G2-structures"};
  app.require_subcommand(0, 1);

  CliOverrides root_opts;
  attach_options(&app, root_opts);

  const std::vector<std::string> scenarios{"verify-torsion",  "check-variation",
                                           "reduce-roundtrip", "flow-w345",
                                           "flow-gh",          "curvature-validate",
                                           "functional-signs"};
  std::vector<std::pair<CLI::App*, CliOverrides>> subs;
  subs.reserve(scenarios.size());
  for (const std::string& name : scenarios) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " scenario");
    subs.emplace_back(sub, CliOverrides{});
    attach_options(sub, subs.back().second);
  }

  std::vector<std::string> report_paths;
  CLI::App* sum = app.add_subcommand("summarize", "consolidated table over JSON reports");
  sum->add_option("reports", report_paths, "report files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors exit 2; --help exits 0
  }

  try {
    if (sum->parsed()) {
      bool all_pass = true;
      std::cout << g2flow::summarize(report_paths, all_pass);
      return all_pass ? 0 : 1;
    }
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i].first->parsed()) return run(scenarios[i], subs[i].second);
    return run("", root_opts);
  } catch (const g2flow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
