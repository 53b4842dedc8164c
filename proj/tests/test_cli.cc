#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kOut = fs::temp_directory_path() / "ltesim_cli_test";

std::string fixture(const std::string& name)
{
  return std::string(LTESIM_FIXTURE_DIR) + "/" + name;
}

int ltesim(const std::string& args, const std::string& stdout_file = "")
{
  fs::create_directories(kOut);
  std::string cmd = std::string(LTESIM_CLI_PATH) + " " + args;
  cmd += stdout_file.empty() ? " > /dev/null" : " > " + (kOut / stdout_file).string();
  cmd += " 2> " + (kOut / "stderr.txt").string();
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string out(const std::string& name)
{
  return (kOut / name).string();
}

}  // namespace

TEST_CASE("run is deterministic per seed")
{
  std::string base = "run --scenario " + fixture("city_l2.json") + " --seed 5 ";
  REQUIRE(ltesim(base + "--out " + out("a.trace") + " --metrics " + out("a.json") + " --triggers " + out("a.log")) == 0);
  REQUIRE(ltesim(base + "--out " + out("b.trace") + " --metrics " + out("b.json")) == 0);
  CHECK(slurp(kOut / "a.trace") == slurp(kOut / "b.trace"));
  CHECK(slurp(kOut / "a.json") == slurp(kOut / "b.json"));
  REQUIRE(ltesim("run --scenario " + fixture("city_l2.json") + " --seed 6 --out " + out("c.trace") + " --metrics " +
                 out("c.json")) == 0);
  CHECK(slurp(kOut / "a.trace") != slurp(kOut / "c.trace"));
}

TEST_CASE("link and report reproduce the run")
{
  REQUIRE(ltesim("run --scenario " + fixture("city_l2.json") + " --seed 5 --out " + out("l.trace") + " --metrics " +
                 out("l.json") + " --triggers " + out("l.log")) == 0);
  REQUIRE(ltesim("link --trace " + out("l.trace") + " --triggers " + out("l.log"), "link.json") == 0);
  auto link = nlohmann::json::parse(slurp(kOut / "link.json"));
  auto metrics = nlohmann::json::parse(slurp(kOut / "l.json"));
  REQUIRE(metrics["cell_location"].is_object());
  CHECK(link["located_cell"] == metrics["cell_location"]["located_cell"]);

  REQUIRE(ltesim("report --trace " + out("l.trace"), "report.json") == 0);
  auto report = nlohmann::json::parse(slurp(kOut / "report.json"));
  metrics.erase("trigger_log");
  CHECK(report == metrics);
}

TEST_CASE("locate recomputes the captured fixes")
{
  REQUIRE(ltesim("run --scenario " + fixture("l3_meas.json") + " --seed 1 --out " + out("m.trace") + " --metrics " +
                 out("m.json")) == 0);
  REQUIRE(ltesim("locate --trace " + out("m.trace") + " --scenario " + fixture("l3_meas.json"), "fix.json") == 0);
  auto fixes = nlohmann::json::parse(slurp(kOut / "fix.json"));
  REQUIRE(fixes.size() == 1);
  CHECK(fixes[0]["x"].get<double>() == doctest::Approx(30).epsilon(1e-6));
  CHECK(fixes[0]["y"].get<double>() == doctest::Approx(40).epsilon(1e-6));
  CHECK(ltesim("locate --trace " + out("m.trace") + " --scenario " + fixture("minimal.json")) == 2);
}

TEST_CASE("exit codes")
{
  CHECK(ltesim("run --scenario " + fixture("invalid_attacker_cell.json") + " --seed 1 --out " + out("x.trace") +
               " --metrics " + out("x.json")) == 2);
  CHECK(slurp(kOut / "stderr.txt").find("attacker") != std::string::npos);
  CHECK(ltesim("run --scenario /nonexistent.json --seed 1 --out " + out("x.trace") + " --metrics " + out("x.json")) ==
        2);
  CHECK(ltesim("frobnicate") == 2);
  CHECK(ltesim("run --seed 1") == 2);
  CHECK(ltesim("run --scenario " + fixture("minimal.json") + " --seed 1 --out " + out("x.trace") + " --metrics " +
               out("x.json") + " --triggers " + out("x.log")) == 2);

  {
    std::ofstream bad(kOut / "bad.trace");
    bad << "t=5 cell=- dir=local src=sim dst=sim kind=NoSuchKind ip=0 ci=0\n";
  }
  CHECK(ltesim("report --trace " + out("bad.trace")) == 2);
  CHECK(ltesim("--help") == 0);
}
