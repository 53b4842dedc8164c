#pragma once

#include "ltesim/locator.h"
#include "ltesim/mme.h"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace ltesim::attack {

// ---------------------------------------------------------------------------
// Passive primitives

struct Observation {
  TimeMs timestamp_ms = 0;
  MobileIdentity identity;
};

struct SnifferLog {
  std::uint32_t cell_id = 0;
  TimeMs t0 = 0;
  TimeMs t1 = 0;
  std::vector<Observation> observations;

  std::set<Guti> gutis() const;
};

/// Paging identities broadcast in cell during [t0, t1], in trace order.
/// trace must be sorted by timestamp.
SnifferLog sniff(std::span<const TraceRecord> trace, std::uint32_t cell_id, TimeMs t0, TimeMs t1);

struct LinkOutcome {
  std::set<Guti> candidates;
  std::vector<std::size_t> sizes_per_trial;
  /// Empty result: some trigger's page missed its window.
  bool delivery_failure = false;
};

LinkOutcome intersect_link(std::span<const SnifferLog> trials);

/// Removes the voice preference and asks for SMS only. Security algorithms
/// stay as sent.
AttachRequest strip_capabilities(AttachRequest req);

// ---------------------------------------------------------------------------
// Application triggers

struct TriggerSemantics {
  core::Service service = core::Service::ip_push;
  bool silent = true;
};

/// A VoLTE call hung up within 3 s never rings.
TriggerSemantics trigger_semantics(TriggerKind kind, TimeMs volte_hangup_ms);

/// Victim-side facts an application trigger depends on.
struct AppFacts {
  std::set<std::string> apps;
  bool whatsapp_visible_to_attacker = true;
};

bool trigger_possible(TriggerKind kind, const AppFacts& facts);

// ---------------------------------------------------------------------------
// Semi-passive attacker: application triggers plus paging sniffing.

struct SemiPassiveConfig {
  std::string victim_social_id;
  TimeMs start_ms = 30 * kSecond;
  TriggerKind ta_trigger = TriggerKind::volte_call;
  TriggerKind cell_trigger = TriggerKind::facebook_other_message;
  int max_triggers_per_stage = 10;
  int max_triggers_total = 20;
  TimeMs trigger_interval_ms = 15 * kSecond;
  TimeMs window_ms = 2 * kSecond;
  TimeMs volte_hangup_ms = 2 * kSecond;
};

/// Trigger times per stage, enough to replay the linking offline.
struct StageLog {
  std::string name;
  std::vector<std::uint32_t> cells;
  std::vector<TimeMs> trigger_times;
};

struct TriggerLog {
  TimeMs window_ms = 0;
  std::vector<StageLog> stages;
};

/// Per-cell intersections of one stage, as the attacker reports them.
std::vector<LinkResult> stage_results(std::span<const TraceRecord> trace, const StageLog& stage, TimeMs window_ms);

/// Stage verdict: exactly one cell with a single candidate.
std::optional<std::uint32_t> unique_cell(const std::vector<LinkResult>& results);

class SemiPassiveEnvironment {
 public:
  virtual ~SemiPassiveEnvironment() = default;
  virtual TimeMs now() const = 0;
  virtual void schedule(TimeMs at, std::function<void()> fn) = 0;
  virtual void fire_trigger(TriggerKind kind, const std::string& target) = 0;
  virtual std::span<const TraceRecord> trace() const = 0;
  virtual void note(MessageBody event) = 0;
  /// Writes the victim's ground truth next to the conclusion.
  virtual void record_truth() = 0;
};

class SemiPassiveAttacker {
 public:
  SemiPassiveAttacker(SemiPassiveConfig config, const core::CellTopology& topology);

  void start(SemiPassiveEnvironment& env);

  const TriggerLog& trigger_log() const { return log_; }
  bool finished() const { return finished_; }
  std::optional<std::uint32_t> located_cell() const { return located_; }
  int triggers_used() const { return triggers_used_; }

 private:
  void begin_stage(std::string name, std::vector<std::uint32_t> cells, TriggerKind kind);
  void fire();
  void evaluate();
  void conclude(std::optional<std::uint32_t> cell);

  SemiPassiveConfig config_;
  const core::CellTopology& topology_;
  SemiPassiveEnvironment* env_ = nullptr;
  TriggerLog log_;
  TriggerKind stage_trigger_ = TriggerKind::volte_call;
  int stage_triggers_ = 0;
  int triggers_used_ = 0;
  bool finished_ = false;
  std::optional<std::uint32_t> located_;
};

// ---------------------------------------------------------------------------
// Passive linker: compares the identities paged in one cell during two
// observation windows.

struct PassiveConfig {
  std::uint32_t cell_id = 0;
  std::vector<std::pair<TimeMs, TimeMs>> windows;
};

/// For every identity of the first window: itself when it reappears in the
/// last window, otherwise a uniform guess among the last window's identities.
std::vector<PassiveLink> passive_link(std::span<const TraceRecord> trace, const PassiveConfig& config,
                                      radio::Rng& rng);

// ---------------------------------------------------------------------------
// Active attacker: rogue eNodeB.

struct L3MeasReport {
  std::vector<std::uint32_t> requested_cells;
};
struct L3RlfReport {};
struct DenyLte {};
struct DenyAll {};
struct CapabilityStrip {};

using AttackKind = std::variant<L3MeasReport, L3RlfReport, DenyLte, DenyAll, CapabilityStrip>;

std::string_view attack_name(const AttackKind& kind);

struct RogueTransmitter {
  Position position;
  double tx_power_dbm = 20.0;
};

struct RogueEnbConfig {
  std::uint32_t host_cell_id = 0;
  std::uint32_t cell_id = 0xFFF01;
  std::uint16_t tac = 0xFFF0;
  double frequency_mhz = 2655.0;
  int priority = 7;
  std::vector<RogueTransmitter> transmitters;
  /// Subscriber identities the attack applies to; everyone else gets cause 12.
  std::optional<std::set<MobileIdentity>> allowlist;
  AttackKind attack = DenyLte{};
  TimeMs start_ms = 0;
  TimeMs stop_ms = 0;  // 0: stays on
  TimeMs guard_ms = kSecond;
  /// Path-loss exponent the attacker assumes; unset means the true one.
  std::optional<double> assumed_exponent;
};

/// Throws InvalidValue when the rogue could be confused with the real
/// network or the attack needs a different number of transmitters.
void validate(const RogueEnbConfig& config, const core::CellTopology& topology);

/// Rogue cell identities: host operator codes, own TAC, max priority.
std::vector<CellIdentity> rogue_cells(const RogueEnbConfig& config, const core::CellTopology& topology);

/// Rogue cells paired with their transmitter placement.
std::vector<radio::Transmitter> rogue_transmitters(const RogueEnbConfig& config, const core::CellTopology& topology);

class RogueEnvironment {
 public:
  virtual ~RogueEnvironment() = default;
  virtual TimeMs now() const = 0;
  virtual void schedule(TimeMs at, std::function<void()> fn) = 0;
  virtual void send(const CellIdentity& rogue_cell, core::LinkId ue, ProtocolMessage msg) = 0;
  virtual void set_transmitter(std::size_t index, bool on) = 0;
  /// Forwards NAS to the real MME through the host cell.
  virtual void relay_uplink(core::LinkId ue, const NasBody& nas) = 0;
  virtual void note(MessageBody event) = 0;
  virtual void record_truth(core::LinkId ue) = 0;
  /// Known transmitter of a cell id (real or rogue), for trilateration anchors.
  virtual std::optional<radio::Transmitter> anchor(std::uint32_t cell_id) const = 0;
  virtual const radio::PathLossModel& model() const = 0;
};

using AnchorLookup = std::function<std::optional<radio::Transmitter>(std::uint32_t cell_id)>;

/// GPS when the report carries it, otherwise trilateration over the anchors
/// the lookup knows. nullopt when the geometry does not allow a fix.
std::optional<locate::PositionFix> fix_from_report(const std::vector<CellMeasurement>& measurements,
                                                   const std::optional<Position>& gps, const AnchorLookup& anchor,
                                                   radio::PathLossModel model, std::optional<double> assumed_exponent);

struct RogueYield {
  std::vector<MeasurementReport> measurement_reports;
  std::vector<RlfReport> rlf_reports;
  std::vector<std::pair<core::LinkId, EmmCause>> rejects;
  std::vector<locate::PositionFix> fixes;
};

class RogueEnb {
 public:
  RogueEnb(RogueEnbConfig config, std::vector<CellIdentity> cells);

  const RogueEnbConfig& config() const { return config_; }
  const std::vector<CellIdentity>& cells() const { return cells_; }
  const RogueYield& yield() const { return yield_; }

  void start(RogueEnvironment& env);
  void stop();

  void on_uplink(core::LinkId ue, const CellIdentity& cell, const ProtocolMessage& msg);
  void on_relay_downlink(core::LinkId ue, const NasBody& nas);

 private:
  enum class Phase { fresh, awaiting_measurement, awaiting_rlf_tau, awaiting_rlf_report, relaying, done };
  struct Session {
    CellIdentity cell;
    Phase phase = Phase::fresh;
    NasBody request;
    std::uint64_t generation = 0;
  };

  void on_nas(core::LinkId ue, const CellIdentity& cell, const NasBody& nas);
  bool allowed(const NasBody& nas) const;
  void reject(core::LinkId ue, const NasBody& request, EmmCause cause);
  void dismiss(core::LinkId ue);
  void arm_guard(core::LinkId ue);
  void locate_from(core::LinkId ue, const std::vector<CellMeasurement>& measurements,
                   const std::optional<Position>& gps, const char* source);
  void send(core::LinkId ue, MessageBody body, bool protected_nas = false);

  RogueEnbConfig config_;
  std::vector<CellIdentity> cells_;
  RogueEnvironment* env_ = nullptr;
  bool active_ = false;
  std::map<core::LinkId, Session> sessions_;
  RogueYield yield_;
};

}  // namespace ltesim::attack
