#include "ltesim/analysis.h"
#include "ltesim/simulator.h"
#include "ltesim/trace_codec.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

using namespace ltesim;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitContract = 3;

nlohmann::json read_json(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw sim::ValidationError(path, "cannot open");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw sim::ValidationError(path, e.what());
  }
}

std::vector<TraceRecord> read_trace_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw sim::ValidationError(path, "cannot open");
  return read_trace(in);
}

void write_json(const std::string& path, const nlohmann::json& doc)
{
  std::ofstream out(path);
  if (!out) throw sim::ValidationError(path, "cannot write");
  out << doc.dump(2) << "\n";
}

nlohmann::json links_json(const analysis::LinkReplay& replay)
{
  nlohmann::json results = nlohmann::json::array();
  for (const auto& r : replay.results) {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& g : r.candidates) c.push_back(g.to_string());
    results.push_back({{"stage", r.stage}, {"cell", hex_string(r.cell_id, 7)}, {"trials", r.trials}, {"candidates", c}});
  }
  nlohmann::json out{{"results", results}};
  out["located_cell"] = replay.located_cell ? nlohmann::json(hex_string(*replay.located_cell, 7)) : nlohmann::json();
  return out;
}

nlohmann::json fixes_json(const std::vector<LocationFix>& fixes)
{
  nlohmann::json out = nlohmann::json::array();
  for (const auto& f : fixes) {
    out.push_back({{"x", f.position.x},
                   {"y", f.position.y},
                   {"residual_m", f.residual_m},
                   {"method", f.method == FixMethod::gps ? "gps" : "trilateration"},
                   {"source", f.source}});
  }
  return out;
}

nlohmann::json yield_json(const attack::RogueYield& y)
{
  nlohmann::json rejects = nlohmann::json::array();
  for (const auto& [link, cause] : y.rejects) rejects.push_back({{"link", link}, {"cause", cause.code}});
  return {{"measurement_reports", y.measurement_reports.size()},
          {"rlf_reports", y.rlf_reports.size()},
          {"rejects", rejects},
          {"fixes", y.fixes.size()}};
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"LTE access-network attack simulator"};
  app.require_subcommand(1);

  std::string scenario_path, trace_path, metrics_path, triggers_path;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Simulate a scenario and write its trace and metrics");
  run->add_option("--scenario", scenario_path, "Scenario document")->required();
  run->add_option("--seed", seed, "Seed, replaces the document's seed")->required();
  run->add_option("--out", trace_path, "Trace output")->required();
  run->add_option("--metrics", metrics_path, "Metrics output")->required();
  run->add_option("--triggers", triggers_path, "Trigger log output (semi-passive runs)");

  auto* link = app.add_subcommand("link", "Replay the set intersection of a semi-passive run");
  link->add_option("--trace", trace_path, "Trace file")->required();
  link->add_option("--triggers", triggers_path, "Trigger log")->required();

  auto* locate = app.add_subcommand("locate", "Recompute fixes from captured reports");
  locate->add_option("--trace", trace_path, "Trace file")->required();
  locate->add_option("--scenario", scenario_path, "Scenario document")->required();

  auto* report = app.add_subcommand("report", "Metrics of a trace");
  report->add_option("--trace", trace_path, "Trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (run->parsed()) {
      nlohmann::json doc = read_json(scenario_path);
      if (doc.is_object()) doc["seed"] = seed;
      sim::Scenario scenario = sim::load_scenario(doc);
      sim::RunResult result = sim::run(scenario);
      {
        std::ofstream out(trace_path);
        if (!out) throw sim::ValidationError(trace_path, "cannot write");
        write_trace(out, result.trace);
      }
      nlohmann::json metrics = analysis::to_json(analysis::report(result.trace));
      if (result.trigger_log) metrics["trigger_log"] = analysis::to_json(*result.trigger_log);
      if (result.rogue_yield) metrics["rogue_yield"] = yield_json(*result.rogue_yield);
      write_json(metrics_path, metrics);
      if (!triggers_path.empty()) {
        if (!result.trigger_log) throw sim::ValidationError("--triggers", "scenario has no semi-passive attacker");
        write_json(triggers_path, analysis::to_json(*result.trigger_log));
      }
    } else if (link->parsed()) {
      auto trace = read_trace_file(trace_path);
      auto log = analysis::trigger_log_from_json(read_json(triggers_path));
      std::cout << links_json(analysis::link(trace, log)).dump(2) << "\n";
    } else if (locate->parsed()) {
      auto trace = read_trace_file(trace_path);
      sim::Scenario scenario = sim::load_scenario(read_json(scenario_path));
      std::cout << fixes_json(analysis::locate(trace, scenario)).dump(2) << "\n";
    } else if (report->parsed()) {
      auto trace = read_trace_file(trace_path);
      std::cout << analysis::to_json(analysis::report(trace)).dump(2) << "\n";
    }
  } catch (const ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitContract;
  } catch (const sim::ValidationError& e) {
    std::cerr << "invalid " << e.what() << "\n";
    return kExitValidation;
  } catch (const MalformedLine& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const InvalidValue& e) {
    std::cerr << "invalid value: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
