#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "omlab/cli.hpp"

using namespace omlab::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "omlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("omlab_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string config_error(const json& j) {
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "no error";
}

}  // namespace

TEST_CASE("preset list") {
  const CliRun r = cli({"list-presets"});
  CHECK(r.code == 0);
  CHECK(r.out == "om1d\nom2d-enhanced\nomP2\ndegeneracy3d\nwickcube-log\njoint-limit\nthird-order\noracle-suite\n");
  CHECK(preset_ids().size() == 8);
}

TEST_CASE("every preset round-trips through its JSON form") {
  for (const std::string& id : preset_ids()) {
    const json once = to_json(preset(id));
    const json twice = to_json(config_from_json(once));
    CHECK_MESSAGE(once == twice, id);
    CHECK(once["experiment"] == id);
  }
}

TEST_CASE("unknown preset lists the valid ids") {
  CHECK_THROWS_AS(preset("om4d"), ConfigError);
  const CliRun r = cli({"preset", "om4d"});
  CHECK(r.code == 1);
  CHECK(r.err.find("om4d") != std::string::npos);
  for (const std::string& id : preset_ids()) CHECK(r.err.find(id) != std::string::npos);
}

TEST_CASE("config errors name the offending field") {
  const json good = to_json(preset("om1d"));
  CHECK(config_error(good) == "no error");

  json j = good;
  j.erase("cutoff");
  CHECK(config_error(j) == "/cutoff");
  j = good;
  j["ball"]["alpha"] = "large";
  CHECK(config_error(j) == "/ball/alpha");
  j = good;
  j["ball"]["colour"] = 1;
  CHECK(config_error(j) == "/ball/colour");
  j = good;
  j["r_values"][2] = -0.1;
  CHECK(config_error(j) == "/r_values/2");
  j = good;
  j["z1"][0]["basis"] = "tan";
  CHECK(config_error(j) == "/z1/0/basis");
  j = good;
  j["procedure"] = "guess";
  CHECK(config_error(j) == "/procedure");
  j = good;
  j["sampler"]["batches"] = 1;
  CHECK(config_error(j) == "/sampler/batches");
  j = good;
  j["torus"]["dim"] = 4;
  CHECK(config_error(j) == "/torus/dim");
}

TEST_CASE("overrides") {
  json j = to_json(preset("om1d"));
  apply_override(j, "sampler.count=640");
  apply_override(j, "ball.norm=sup");
  apply_override(j, "r_values=[0.5,0.25]");
  apply_override(j, "z1.0.amplitude=0.5");
  const ExperimentConfig c = config_from_json(j);
  CHECK(c.sampler.count == 640);
  CHECK(c.ball.norm == "sup");
  CHECK(c.r_values == std::vector<double>{0.5, 0.25});
  CHECK(c.z1[0].amplitude == 0.5);
  CHECK_THROWS_AS(apply_override(j, "no-equals-sign"), ConfigError);
}

TEST_CASE("CSV layout") {
  ResultRow row;
  row.r = std::nan("");
  row.n = 4;
  row.estimate.value = 0.5;
  row.estimate.log_value = std::log(0.5);
  row.estimate.degenerate = false;
  std::ostringstream s;
  write_csv(s, "demo", {row});
  const std::string text = s.str();
  CHECK(text.rfind("experiment,r,n,estimate,stderr,ess,predicted,log_estimate,log_predicted,degenerate\n", 0) == 0);
  CHECK(text.find("\ndemo,,4,0.5,") != std::string::npos);
  CHECK(text.back() == '\n');
  CHECK(text.substr(text.size() - 3) == ",0\n");
}

TEST_CASE("run writes a table and a manifest that reproduces it") {
  const fs::path dir = scratch("oracle");
  const CliRun r = cli({"preset", "oracle-suite", "--override", "sampler.count=3200", "r_values=[0.3]", "--seed", "7",
                        "--threads", "1", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const std::string csv = slurp(dir / "oracle-suite.csv");
  CHECK(csv.rfind("experiment,r,n,estimate,stderr,ess,predicted,log_estimate,log_predicted,degenerate\n", 0) == 0);
  const json manifest = json::parse(slurp(dir / "oracle-suite.manifest.json"));
  CHECK(manifest["seed"] == 7);
  CHECK(manifest["config"]["sampler"]["count"] == 3200);
  CHECK(manifest["rows"] == 1);
  CHECK(manifest["summary"]["binomial_relative_error"].size() == 6);
  CHECK(manifest.contains("wall_time_seconds"));

  const fs::path again = scratch("oracle_again");
  fs::create_directories(again);
  json config = manifest["config"];
  config["output"]["dir"] = again.string();
  {
    std::ofstream f(again / "config.json");
    f << config.dump();
  }
  const CliRun rerun = cli({"run", (again / "config.json").string()});
  REQUIRE(rerun.code == 0);
  CHECK(slurp(again / "oracle-suite.csv") == csv);

  // The manifest itself is accepted by `run`.
  const CliRun from_manifest = cli({"run", (dir / "oracle-suite.manifest.json").string(), "--out", again.string()});
  CHECK(from_manifest.code == 0);
  CHECK(slurp(again / "oracle-suite.csv") == csv);
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("codes");
  CHECK(cli({"run", (dir / "missing.json").string()}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"preset", "om1d", "--override", "ball.kind=round"}).code == 1);

  // Nothing lands in a ball this small: the run finishes with degenerate rows.
  const CliRun degenerate = cli({"preset", "om1d", "--override", "sampler.count=64", "--override",
                                 "r_values=[0.001]", "--out", dir.string()});
  CHECK(degenerate.code == 2);
  CHECK(fs::exists(dir / "om1d.csv"));

  // The output location cannot be created.
  const CliRun broken = cli({"preset", "oracle-suite", "--override", "sampler.count=64", "r_values=[0.3]", "--out",
                             "/dev/null/impossible"});
  CHECK(broken.code == 3);
}
