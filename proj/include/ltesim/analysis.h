#pragma once

#include "ltesim/scenario.h"

#include <json.hpp>

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace ltesim::analysis {

struct DenialInterval {
  TimeMs start_ms = 0;
  TimeMs end_ms = 0;
  int cause = 0;
  /// Still barred when the trace ends.
  bool open = false;

  TimeMs duration_ms() const { return end_ms - start_ms; }
};

struct RecoveryEvent {
  TimeMs at_ms = 0;
  RecoveryAction action = RecoveryAction::reboot;
  bool effective = false;
};

struct UeMetrics {
  std::vector<DenialInterval> denials;
  TimeMs denied_ms = 0;
  /// LTE attach or TAU requests sent while an LTE bar was in force.
  int lte_attempts_while_barred = 0;
  int voice_mo_ok = 0;
  int voice_mo_failed = 0;
  int voice_mt_ok = 0;
  int voice_mt_failed = 0;
  int sms_delivered = 0;
  int sms_sent = 0;
  int emergency_ok = 0;
  int emergency_failed = 0;
  int attach_aborts = 0;
  int reports_withheld = 0;
  std::vector<RecoveryEvent> recoveries;
  /// Distinct GUTIs assigned to the UE, in order of first assignment.
  std::vector<Guti> gutis;
  std::optional<UeStatus> final_status;
  TimeMs final_status_ms = 0;
};

struct CellOutcome {
  TimeMs at_ms = 0;
  std::uint32_t located_cell = 0;
  std::uint32_t true_cell = 0;
  bool success = false;
  int triggers_used = 0;
  double area_km2 = 0.0;
  std::vector<LinkResult> link_results;
};

struct FixOutcome {
  TimeMs at_ms = 0;
  std::string subject;
  std::string source;
  FixMethod method = FixMethod::trilateration;
  Position estimate;
  Position truth;
  double error_m = 0.0;
  double area_km2 = 0.0;
};

struct LinkingOutcome {
  int links = 0;
  int correct = 0;
  double accuracy() const { return links == 0 ? 0.0 : static_cast<double>(correct) / links; }
};

struct PagingViolation {
  TimeMs at_ms = 0;
  std::string subject;
  std::string detail;
};

struct PagingCheck {
  int triggers_checked = 0;
  int page_sets_checked = 0;
  std::vector<PagingViolation> violations;
};

struct RunMetrics {
  std::map<std::string, UeMetrics> ues;
  std::optional<CellOutcome> cell_outcome;
  std::vector<FixOutcome> fixes;
  int reports_captured = 0;
  int reports_withheld = 0;
  std::optional<LinkingOutcome> linking;
  int rejects_sent = 0;
  PagingCheck paging;
  TimeMs end_ms = 0;
};

/// Cells of every tracking area seen anywhere in the trace.
std::map<std::uint16_t, std::set<std::uint32_t>> observed_tracking_areas(std::span<const TraceRecord> trace);

/// First page after each app trigger carries exactly the last cell the UE
/// used for push and SMS, the whole tracking area for VoLTE. Every later
/// page set is either that single cell or the whole area.
PagingCheck check_paging(std::span<const TraceRecord> trace,
                         const std::map<std::uint16_t, std::set<std::uint32_t>>& tracking_areas);

/// Pure function of the trace.
RunMetrics report(std::span<const TraceRecord> trace);

nlohmann::json to_json(const RunMetrics& metrics);

// ---------------------------------------------------------------------------
// Offline replays.

nlohmann::json to_json(const attack::TriggerLog& log);
attack::TriggerLog trigger_log_from_json(const nlohmann::json& doc);

struct LinkReplay {
  std::vector<LinkResult> results;
  std::optional<std::uint32_t> located_cell;
};

/// Re-runs the set intersection of every stage over the trace.
LinkReplay link(std::span<const TraceRecord> trace, const attack::TriggerLog& log);

/// LinkResult and CellLocated records the in-run attacker wrote.
LinkReplay recorded_link(std::span<const TraceRecord> trace);

/// Recomputes a fix for every report the rogue eNodeB captured. Throws
/// ValidationError when the trace does not belong to the scenario.
std::vector<LocationFix> locate(std::span<const TraceRecord> trace, const sim::Scenario& scenario);

std::vector<LocationFix> recorded_fixes(std::span<const TraceRecord> trace);

}  // namespace ltesim::analysis
