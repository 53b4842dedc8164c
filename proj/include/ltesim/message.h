#pragma once

#include "ltesim/identity.h"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ltesim {

/// EMM reject cause. Codes outside the modeled set are carried verbatim and
/// treated as inert.
struct EmmCause {
  static constexpr int kLteNotAllowed = 7;
  static constexpr int kAllServicesNotAllowed = 8;
  static constexpr int kTrackingAreaNotAllowed = 12;
  /// Used by the MME when turning down a voice request for a voice-less profile.
  static constexpr int kVoiceNotAvailable = 18;

  int code = 0;

  bool known() const
  {
    return code == kLteNotAllowed || code == kAllServicesNotAllowed || code == kTrackingAreaNotAllowed;
  }

  bool operator==(const EmmCause&) const = default;
};

struct DenialAction {
  bool bar_lte = false;
  bool bar_all = false;
  bool leave_ta = false;
  bool persistent_until_recovery = false;
  bool ignored = false;

  bool operator==(const DenialAction&) const = default;
};

/// Fixed semantics of the reject causes the UE acts on.
DenialAction cause_action(EmmCause cause);

/// The part of the capability list that the network may echo back.
struct NetworkCapabilities {
  std::vector<Rat> rats_supported;
  bool voice_domain_preference = false;
  bool sms_only = false;

  bool operator==(const NetworkCapabilities&) const = default;
};

struct UeCapabilities {
  std::vector<Rat> rats_supported{Rat::lte, Rat::utran, Rat::gsm};
  std::vector<std::string> security_algorithms{"eea0", "eea1", "eea2", "eia1", "eia2"};
  bool voice_domain_preference = true;
  bool sms_only = false;
  bool location_info_r10 = false;

  /// sms_only excludes a voice domain preference.
  void validate() const;
  bool supports(Rat rat) const;
  NetworkCapabilities network_part() const { return {rats_supported, voice_domain_preference, sms_only}; }

  bool operator==(const UeCapabilities&) const = default;
};

struct CellMeasurement {
  CellIdentity cell;
  double rsrp_dbm = 0.0;

  bool operator==(const CellMeasurement&) const = default;
};

struct RlfReport {
  CellIdentity last_serving;
  std::vector<CellMeasurement> neighbor_measurements;
  std::optional<Position> gps;

  bool operator==(const RlfReport&) const = default;
};

// ---------------------------------------------------------------------------
// NAS messages

struct AttachRequest {
  static constexpr std::string_view kind = "AttachRequest";
  MobileIdentity identity;
  UeCapabilities capabilities;
  bool operator==(const AttachRequest&) const = default;
};

struct AttachAccept {
  static constexpr std::string_view kind = "AttachAccept";
  Guti guti;
  std::uint16_t tac = 0;
  std::vector<std::string> echoed_security_algorithms;
  std::optional<NetworkCapabilities> echoed_network_capabilities;
  bool operator==(const AttachAccept&) const = default;
};

struct AttachComplete {
  static constexpr std::string_view kind = "AttachComplete";
  bool operator==(const AttachComplete&) const = default;
};

struct AttachReject {
  static constexpr std::string_view kind = "AttachReject";
  EmmCause cause;
  bool operator==(const AttachReject&) const = default;
};

struct TauRequest {
  static constexpr std::string_view kind = "TauRequest";
  Guti guti;
  std::uint16_t tac_seen = 0;
  bool rlf_available = false;
  bool operator==(const TauRequest&) const = default;
};

struct TauAccept {
  static constexpr std::string_view kind = "TauAccept";
  std::optional<Guti> guti;
  std::uint16_t tac = 0;
  bool operator==(const TauAccept&) const = default;
};

struct TauReject {
  static constexpr std::string_view kind = "TauReject";
  EmmCause cause;
  bool operator==(const TauReject&) const = default;
};

enum class ServicePurpose { mt_response, mo_data, mo_sms, mo_voice, emergency };
std::string_view to_string(ServicePurpose purpose);
ServicePurpose service_purpose_from_string(std::string_view text);

struct ServiceRequest {
  static constexpr std::string_view kind = "ServiceRequest";
  Guti guti;
  ServicePurpose purpose = ServicePurpose::mt_response;
  bool operator==(const ServiceRequest&) const = default;
};

struct ServiceAccept {
  static constexpr std::string_view kind = "ServiceAccept";
  ServicePurpose purpose = ServicePurpose::mt_response;
  bool operator==(const ServiceAccept&) const = default;
};

struct ServiceReject {
  static constexpr std::string_view kind = "ServiceReject";
  ServicePurpose purpose = ServicePurpose::mt_response;
  EmmCause cause;
  bool operator==(const ServiceReject&) const = default;
};

struct GutiReallocationCommand {
  static constexpr std::string_view kind = "GutiReallocationCommand";
  Guti guti;
  bool operator==(const GutiReallocationCommand&) const = default;
};

struct IdentityRequest {
  static constexpr std::string_view kind = "IdentityRequest";
  bool operator==(const IdentityRequest&) const = default;
};

struct IdentityResponse {
  static constexpr std::string_view kind = "IdentityResponse";
  Imsi imsi;
  bool operator==(const IdentityResponse&) const = default;
};

struct DetachRequest {
  static constexpr std::string_view kind = "DetachRequest";
  Guti guti;
  bool switch_off = true;
  bool operator==(const DetachRequest&) const = default;
};

using NasBody = std::variant<AttachRequest, AttachAccept, AttachComplete, AttachReject, TauRequest, TauAccept,
                             TauReject, ServiceRequest, ServiceAccept, ServiceReject, GutiReallocationCommand,
                             IdentityRequest, IdentityResponse, DetachRequest>;

// ---------------------------------------------------------------------------
// RRC messages

struct RrcPaging {
  static constexpr std::string_view kind = "RrcPaging";
  std::vector<MobileIdentity> records;
  bool operator==(const RrcPaging&) const = default;
};

struct RrcConnectionRequest {
  static constexpr std::string_view kind = "RrcConnectionRequest";
  bool operator==(const RrcConnectionRequest&) const = default;
};

struct RrcConnectionSetup {
  static constexpr std::string_view kind = "RrcConnectionSetup";
  bool operator==(const RrcConnectionSetup&) const = default;
};

struct RrcConnectionSetupComplete {
  static constexpr std::string_view kind = "RrcConnectionSetupComplete";
  NasBody nas;
  bool operator==(const RrcConnectionSetupComplete&) const = default;
};

struct RrcConnectionReconfiguration {
  static constexpr std::string_view kind = "RrcConnectionReconfiguration";
  std::vector<CellIdentity> meas_targets;
  bool operator==(const RrcConnectionReconfiguration&) const = default;
};

struct MeasurementReport {
  static constexpr std::string_view kind = "MeasurementReport";
  std::vector<CellMeasurement> measurements;
  std::optional<Position> gps;
  bool operator==(const MeasurementReport&) const = default;
};

struct UeInformationRequest {
  static constexpr std::string_view kind = "UeInformationRequest";
  bool operator==(const UeInformationRequest&) const = default;
};

struct UeInformationResponse {
  static constexpr std::string_view kind = "UeInformationResponse";
  RlfReport rlf_report;
  bool operator==(const UeInformationResponse&) const = default;
};

struct RrcConnectionRelease {
  static constexpr std::string_view kind = "RrcConnectionRelease";
  bool operator==(const RrcConnectionRelease&) const = default;
};

struct Sib1 {
  static constexpr std::string_view kind = "Sib1";
  CellIdentity cell;
  bool operator==(const Sib1&) const = default;
};

struct SibPriority {
  static constexpr std::string_view kind = "SibPriority";
  std::map<double, int> priorities;  // frequency MHz -> reselection priority
  bool operator==(const SibPriority&) const = default;
};

// ---------------------------------------------------------------------------
// Local observations. These never cross the air interface; they record
// application events, state transitions and attacker conclusions so that
// metrics can be recomputed from the trace alone.

enum class TriggerKind { volte_call, facebook_other_message, whatsapp_typing, silent_sms };
std::string_view to_string(TriggerKind kind);
TriggerKind trigger_kind_from_string(std::string_view text);

struct AppTrigger {
  static constexpr std::string_view kind = "AppTrigger";
  TriggerKind trigger = TriggerKind::volte_call;
  std::string target;        // social identity of the victim
  bool delivered = true;     // false when the app precondition failed
  bool operator==(const AppTrigger&) const = default;
};

struct Notification {
  static constexpr std::string_view kind = "Notification";
  std::string what;
  bool operator==(const Notification&) const = default;
};

enum class CallDirection { mo, mt };

struct VoiceCall {
  static constexpr std::string_view kind = "VoiceCall";
  CallDirection direction = CallDirection::mt;
  bool accepted = false;
  EmmCause cause;
  bool operator==(const VoiceCall&) const = default;
};

struct SmsDelivered {
  static constexpr std::string_view kind = "SmsDelivered";
  bool operator==(const SmsDelivered&) const = default;
};

enum class EmmState { registered, deregistered, eu3_roaming_not_allowed };
std::string_view to_string(EmmState state);
EmmState emm_state_from_string(std::string_view text);

enum class RrcState { idle, connected };

struct UeStatus {
  static constexpr std::string_view kind = "UeStatus";
  EmmState emm = EmmState::deregistered;
  RrcState rrc = RrcState::idle;
  Rat camped = Rat::none;
  bool usim_valid_lte = true;
  bool usim_valid_any = true;
  std::string reason;
  bool operator==(const UeStatus&) const = default;
};

enum class RecoveryAction { reboot, reinsert_usim, flight_mode_toggle, move_new_ta, t3245_expiry };
std::string_view to_string(RecoveryAction action);
RecoveryAction recovery_action_from_string(std::string_view text);

struct Recovery {
  static constexpr std::string_view kind = "Recovery";
  RecoveryAction action = RecoveryAction::reboot;
  bool effective = false;
  bool operator==(const Recovery&) const = default;
};

struct ReportWithheld {
  static constexpr std::string_view kind = "ReportWithheld";
  std::string report;  // "measurement" or "rlf"
  bool operator==(const ReportWithheld&) const = default;
};

struct AttachAborted {
  static constexpr std::string_view kind = "AttachAborted";
  std::string reason;
  bool operator==(const AttachAborted&) const = default;
};

struct EmergencyCall {
  static constexpr std::string_view kind = "EmergencyCall";
  bool success = false;
  bool operator==(const EmergencyCall&) const = default;
};

struct TransmitterState {
  static constexpr std::string_view kind = "TransmitterState";
  bool on = false;
  bool operator==(const TransmitterState&) const = default;
};

struct LinkResult {
  static constexpr std::string_view kind = "LinkResult";
  std::string stage;
  std::uint32_t cell_id = 0;
  int trials = 0;
  std::vector<Guti> candidates;
  bool operator==(const LinkResult&) const = default;
};

struct CellLocated {
  static constexpr std::string_view kind = "CellLocated";
  std::uint32_t cell_id = 0;
  std::uint16_t tac = 0;
  double area_km2 = 0.0;
  int triggers_used = 0;
  bool operator==(const CellLocated&) const = default;
};

enum class FixMethod { gps, trilateration };

struct LocationFix {
  static constexpr std::string_view kind = "LocationFix";
  Position position;
  double residual_m = 0.0;
  FixMethod method = FixMethod::trilateration;
  std::string source;  // "measurement" or "rlf"
  bool operator==(const LocationFix&) const = default;
};

struct PassiveLink {
  static constexpr std::string_view kind = "PassiveLink";
  Guti earlier;
  Guti linked;
  bool guessed = false;
  bool operator==(const PassiveLink&) const = default;
};

/// Simulator ground truth, written next to attacker conclusions for scoring.
struct Truth {
  static constexpr std::string_view kind = "Truth";
  std::string subject;
  Position position;
  std::uint32_t cell_id = 0;
  std::optional<Guti> guti;
  bool operator==(const Truth&) const = default;
};

struct SimulationEnd {
  static constexpr std::string_view kind = "SimulationEnd";
  bool operator==(const SimulationEnd&) const = default;
};

using MessageBody =
    std::variant<RrcPaging, RrcConnectionRequest, RrcConnectionSetup, RrcConnectionSetupComplete,
                 RrcConnectionReconfiguration, MeasurementReport, UeInformationRequest, UeInformationResponse,
                 RrcConnectionRelease, Sib1, SibPriority, AttachRequest, AttachAccept, AttachComplete, AttachReject,
                 TauRequest, TauAccept, TauReject, ServiceRequest, ServiceAccept, ServiceReject,
                 GutiReallocationCommand, IdentityRequest, IdentityResponse, DetachRequest, AppTrigger, Notification,
                 VoiceCall, SmsDelivered, UeStatus, Recovery, ReportWithheld, AttachAborted, EmergencyCall,
                 TransmitterState, LinkResult, CellLocated, LocationFix, PassiveLink, Truth, SimulationEnd>;

struct Envelope {
  bool integrity_protected = false;
  bool ciphered = false;
  bool operator==(const Envelope&) const = default;
};

struct ProtocolMessage {
  Envelope envelope;
  MessageBody body;

  bool operator==(const ProtocolMessage&) const = default;
};

/// Wraps a body in the envelope it carries on the air: paging, SIBs and
/// rejects unprotected, post-security NAS integrity protected.
ProtocolMessage make_message(MessageBody body, bool security_context_active = false);
MessageBody to_body(const NasBody& nas);

std::string_view kind_of(const MessageBody& body);
/// True for kinds that must always travel without integrity protection.
bool always_unprotected(const MessageBody& body);
bool is_local(const MessageBody& body);

template <typename T>
const T* get_if(const ProtocolMessage& msg)
{
  return std::get_if<T>(&msg.body);
}

enum class Direction { downlink, uplink, local };

struct TraceRecord {
  TimeMs timestamp_ms = 0;
  std::optional<CellIdentity> cell;
  Direction direction = Direction::local;
  std::string src;
  std::string dst;
  ProtocolMessage message;

  bool operator==(const TraceRecord&) const = default;
};

}  // namespace ltesim
