#pragma once

#include "ltesim/attacker.h"
#include "ltesim/ue.h"

#include <json.hpp>

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ltesim::sim {

/// Scenario document problem; field() is the JSON path, e.g. "subscribers[0].imsi".
class ValidationError : public InvalidValue {
 public:
  ValidationError(std::string field, const std::string& detail) :
    InvalidValue(field + ": " + detail), field_(std::move(field))
  {
  }
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Independent stream for one actor: mt19937_64 seeded from splitmix64(seed ^ fnv1a(actor)).
radio::Rng actor_stream(std::uint64_t seed, std::string_view actor);

struct Waypoint {
  Position position;
  double speed_mps = 1.4;  // speed on the leg that ends here
  TimeMs dwell_ms = 0;
};

enum class EventKind {
  reboot,
  reinsert_usim,
  flight_mode_toggle,
  move_new_ta,
  move_to,
  power_off,
  power_on,
  voice_call_in,
  voice_call_out,
  sms_in,
  sms_out,
  push_in,
  emergency_call,
  network_purge_guti,
};

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view text);

struct ScenarioEvent {
  TimeMs at_ms = 0;
  EventKind kind = EventKind::reboot;
  std::optional<Position> to;
};

struct SubscriberSpec {
  std::string name;
  Imsi imsi;
  std::string social_id;
  /// Unset: drawn uniformly inside the topology's bounding box.
  std::optional<Position> home;
  /// Looped waypoint path; the first waypoint replaces home.
  std::vector<Waypoint> path;
  attack::AppFacts apps;
  ue::UeProfile profile;
  ue::UeTimers timers;
  std::set<std::uint16_t> allowed_tacs;
  TimeMs power_on_ms = 0;
  TimeMs attach_detach_period_ms = 0;
  TimeMs off_duration_ms = kMinute;
  TimeMs incoming_push_period_ms = 0;
  std::vector<ScenarioEvent> events;
};

struct RadioSpec {
  radio::PathLossModel model = radio::street_level_model();
  double floor_dbm = radio::kDefaultSensitivityDbm;
};

struct NetworkSpec {
  core::MmeConfig mme;
  TimeMs inactivity_ms = 10 * kSecond;
  TimeMs app_latency_ms = 500;
  TimeMs app_jitter_ms = 0;
  TimeMs hop_ms = 1;
  TimeMs mobility_tick_ms = kSecond;
  TimeMs sib_period_ms = 0;
};

struct BackgroundSpec {
  int subscribers_per_cell = 0;
  double lambda_per_window = 0.0;
  TimeMs window_ms = 2 * kSecond;
  std::vector<std::uint32_t> cells;                   // empty: every LTE cell
  std::vector<std::pair<TimeMs, TimeMs>> windows;     // empty: the whole run
};

struct Countermeasures {
  bool guti_fresh_on_tau = false;
  bool reports_require_security = false;
  std::optional<double> t3245_minutes;
  bool echo_network_capabilities = false;
};

struct SemiPassiveSpec {
  std::string victim;
  attack::SemiPassiveConfig config;
};

struct PassiveSpec {
  attack::PassiveConfig config;
};

struct ActiveSpec {
  attack::RogueEnbConfig config;
  /// Subscriber names; resolved to identities when the rogue starts.
  std::optional<std::vector<std::string>> allowlist;
};

using AttackerSpec = std::variant<std::monostate, SemiPassiveSpec, PassiveSpec, ActiveSpec>;

struct Scenario {
  core::CellTopology topology;
  bool city = false;
  RadioSpec radio;
  std::vector<SubscriberSpec> subscribers;
  NetworkSpec network;
  AttackerSpec attacker;
  Countermeasures countermeasures;
  BackgroundSpec background;
  std::uint64_t seed = 0;
  TimeMs duration_ms = 0;

  const SubscriberSpec* subscriber(std::string_view name) const;
};

/// Validates the document and resolves every cross-reference. Countermeasures
/// are folded into the network and profile settings.
Scenario load_scenario(const nlohmann::json& doc);
Scenario load_scenario_file(const std::string& path);

}  // namespace ltesim::sim
