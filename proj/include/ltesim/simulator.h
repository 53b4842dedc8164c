#pragma once

#include "ltesim/scenario.h"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ltesim::sim {

/// Actor names used in the trace.
std::string enb_actor(const CellIdentity& cell);
std::string rogue_actor(const CellIdentity& cell);

struct RunResult {
  std::vector<TraceRecord> trace;
  /// Semi-passive runs only.
  std::optional<attack::TriggerLog> trigger_log;
  /// Active runs only; empty when the rogue never started.
  std::optional<attack::RogueYield> rogue_yield;
  std::map<std::string, ue::UeState> ue_states;
  std::map<std::string, core::MmeContext> mme_contexts;
};

/// Runs the scenario to duration_ms. Throws ContractViolation when an actor
/// is driven outside its contract.
RunResult run(const Scenario& scenario);

}  // namespace ltesim::sim
