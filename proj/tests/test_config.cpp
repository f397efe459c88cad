#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <sstream>

#include "g2flow/config.hpp"
#include "g2flow/scenarios.hpp"

using namespace g2flow;

TEST_CASE("toml parsing of scalars, arrays and sections") {
  const std::string text = R"(# comment
scenario = "verify-torsion"
seed = 7
samples = 100
tolerance = 1e-10

[initial-data]
amplitude = 0.5  # trailing comment
)";
  const TomlDoc doc = parse_toml(text);
  CHECK(doc.find("", "scenario")->as_string("scenario") == "verify-torsion");
  CHECK(doc.find("", "seed")->as_int("seed") == 7);
  CHECK(doc.find("", "tolerance")->as_double("tolerance") == 1e-10);
  CHECK(doc.find("initial-data", "amplitude")->as_double("amplitude") == 0.5);
}

TEST_CASE("toml arrays including multiline") {
  const std::string text = R"(scenario = "flow-w345"
[initial-data]
theta = [0.5, -0.3, 0,
         0.2, 0, 0.1]
[grid]
axes = [1, 2]
)";
  const TomlDoc doc = parse_toml(text);
  CHECK(doc.find("initial-data", "theta")->as_double_array("theta").size() == 6);
  CHECK(doc.find("grid", "axes")->as_int_array("axes") == std::vector<std::int64_t>{1, 2});
}

TEST_CASE("toml error diagnostics carry line numbers") {
  CHECK_THROWS_WITH(parse_toml("x 3\n"), Catch::Matchers::ContainsSubstring("line 1"));
  CHECK_THROWS_WITH(parse_toml("a = 1\na = 2\n"), Catch::Matchers::ContainsSubstring("duplicate"));
  CHECK_THROWS_WITH(parse_toml("a = \"oops\n"), Catch::Matchers::ContainsSubstring("unterminated"));
  CHECK_THROWS_WITH(parse_toml("a = 12x\n"), Catch::Matchers::ContainsSubstring("malformed"));
}

TEST_CASE("schema: missing scenario is rejected with the field name") {
  CHECK_THROWS_WITH(config_from_toml(parse_toml("seed = 3\n")),
                    Catch::Matchers::ContainsSubstring("scenario"));
}

TEST_CASE("schema: unknown keys are rejected") {
  const std::string text = R"(scenario = "verify-torsion"
bogus = 12
)";
  CHECK_THROWS_WITH(config_from_toml(parse_toml(text)),
                    Catch::Matchers::ContainsSubstring("bogus"));
  const std::string text2 = R"(scenario = "verify-torsion"
[grid]
points = 32
)";
  CHECK_THROWS_WITH(config_from_toml(parse_toml(text2)),
                    Catch::Matchers::ContainsSubstring("grid.points"));
}

TEST_CASE("schema: unknown scenario is rejected") {
  CHECK_THROWS_WITH(config_from_toml(parse_toml("scenario = \"nope\"\n")),
                    Catch::Matchers::ContainsSubstring("nope"));
}

TEST_CASE("deterministic reports: identical (config, seed) give identical bytes") {
  ScenarioConfig cfg;
  cfg.scenario = "verify-torsion";
  cfg.seed = 99;
  cfg.samples = 5;
  const ScenarioResult a = run_scenario(cfg);
  const ScenarioResult b = run_scenario(cfg);
  CHECK(report_json(a).dump(2) == report_json(b).dump(2));

  ScenarioConfig flow;
  flow.scenario = "flow-w345";
  flow.lambda = 0.7;
  flow.t_end = 0.15;
  const ScenarioResult fa = run_scenario(flow);
  const ScenarioResult fb = run_scenario(flow);
  CHECK(fa.csv == fb.csv);
  CHECK_FALSE(fa.csv.empty());
}

TEST_CASE("reports record the RNG and the check table") {
  ScenarioConfig cfg;
  cfg.scenario = "functional-signs";
  cfg.samples = 20;
  const ScenarioResult res = run_scenario(cfg);
  const auto j = report_json(res);
  CHECK(j["rng"] == "mt19937_64");
  CHECK(j["checks"].is_array());
  CHECK(j["checks"].size() == res.checks.size());
  CHECK(j["pass"].is_boolean());
}

TEST_CASE("flow-w345 with zero torsion keeps the metric columns constant") {
  ScenarioConfig cfg;
  cfg.scenario = "flow-w345";
  cfg.lambda = 0.0;
  cfg.t_end = 0.1;
  const ScenarioResult res = run_scenario(cfg);
  // every row reports min_eig_g = 1 for the frozen identity metric
  std::istringstream csv(res.csv);
  std::string line;
  std::getline(csv, line);  // header
  CHECK(line == "t,functional,norm_F,h_min,h_max,min_eig_g,trT,constraint_residual");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::istringstream ls(line);
    std::string cell;
    for (int c = 0; c < 6; ++c) std::getline(ls, cell, ',');
    CHECK(std::stod(cell) == 1.0);
  }
  CHECK(rows >= 2);
}

TEST_CASE("summarize consolidates pass/fail across reports") {
  namespace fs = std::filesystem;
  const std::string dir = (fs::temp_directory_path() / "g2flow-summarize-test").string();
  fs::create_directories(dir);

  ScenarioConfig ok;
  ok.scenario = "functional-signs";
  ok.samples = 10;
  ScenarioResult rok = run_scenario(ok);
  const WrittenReport w1 = write_report(rok, dir, ok);

  // a deliberately failing report: impossible tolerance
  ScenarioConfig bad = ok;
  bad.tolerance = 1e300;  // flips the sign checks (value <= -1e300 fails)
  ScenarioResult rbad = run_scenario(bad);
  bad.out_json = "failing.json";
  const WrittenReport w2 = write_report(rbad, dir, bad);
  CHECK_FALSE(rbad.pass);

  bool all_pass = true;
  const std::string table = summarize({w1.json_path, w2.json_path}, all_pass);
  CHECK_FALSE(all_pass);
  CHECK(table.find("PASS") != std::string::npos);
  CHECK(table.find("FAIL") != std::string::npos);

  bool single_pass = false;
  summarize({w1.json_path}, single_pass);
  CHECK(single_pass);

  CHECK_THROWS_AS(summarize({}, all_pass), ConfigError);
  CHECK_THROWS_AS(summarize({dir + "/does-not-exist.json"}, all_pass), ConfigError);
}
