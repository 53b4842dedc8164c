#pragma once

#include "ltesim/mme.h"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ltesim::ue {

struct UeProfile {
  UeCapabilities capabilities;
  bool sends_meas_report_without_security = true;
  bool sends_rlf_report_without_security = true;
  bool recovery_supports_flight_mode = true;
  bool t3245_enabled = false;
  TimeMs t3245_ms = 24 * kHour;
};

struct UeTimers {
  TimeMs t310_ms = 1000;
  /// Attach retry after an aborted or ignored attempt.
  TimeMs t3411_ms = 10 * kSecond;
  /// Periodic TAU; 0 disables it.
  TimeMs t3412_ms = 54 * kMinute;
};

enum class Timer { t310, t3245, t3411, t3412 };

/// What the UE may ask of the world it lives in. The simulator implements
/// it; tests use a scripted fake.
class UeEnvironment {
 public:
  virtual ~UeEnvironment() = default;
  virtual TimeMs now() const = 0;
  virtual Position position() const = 0;
  /// Cells heard at the current position, strongest first, mean levels.
  virtual std::vector<CellMeasurement> scan() = 0;
  /// One reported measurement of cell, nullopt if it is not heard.
  virtual std::optional<double> measure(const CellIdentity& cell) = 0;
  virtual void send(const CellIdentity& via, ProtocolMessage msg) = 0;
  virtual void start_timer(Timer timer, TimeMs delay) = 0;
  virtual void stop_timer(Timer timer) = 0;
  /// Local observation for the trace (status change, notification, ...).
  virtual void note(MessageBody event) = 0;
};

struct UeState {
  bool powered = false;
  RrcState rrc = RrcState::idle;
  EmmState emm = EmmState::deregistered;
  bool usim_valid_lte = true;
  bool usim_valid_any = true;
  std::optional<CellIdentity> serving_cell;
  Rat camped = Rat::none;
  std::optional<Guti> guti;
  std::optional<std::uint16_t> registered_tac;
  bool security_context = false;
  /// AS security on the current connection; only a real network sets it.
  bool as_security = false;
  std::optional<RlfReport> pending_rlf_report;
  std::set<std::uint16_t> forbidden_tacs;
  bool t3245_running = false;
  bool t310_running = false;
};

/// LTE cells need a valid LTE USIM and a TA not on the forbidden list;
/// 2G/3G cells need any valid USIM. Among allowed cells: LTE before UTRAN
/// before GSM, then higher reselection priority, then stronger signal,
/// then lower cell id.
std::optional<CellIdentity> select_cell(const std::vector<CellMeasurement>& visible, const UeState& state,
                                        const UeCapabilities& caps);

/// Delivery the network completed towards this UE.
enum class Delivery { notify_push, silent_push, sms, silent_sms, voice_ring, voice_silent };

class Ue {
 public:
  Ue(std::string name, Imsi imsi, UeProfile profile, UeTimers timers, UeEnvironment& env);

  const std::string& name() const { return name_; }
  const Imsi& imsi() const { return imsi_; }
  const UeProfile& profile() const { return profile_; }
  const UeState& state() const { return state_; }

  void power_on();
  /// Sends a switch-off detach when registered, then goes dark.
  void power_off();

  void on_downlink(const ProtocolMessage& msg, const CellIdentity& from);
  void on_timer(Timer timer);
  /// Periodic check: idle reselection, or radio link supervision when connected.
  void tick();

  void handle_paging(const RrcPaging& paging);
  void handle_reject(EmmCause cause, const char* reason);
  /// Returns the report it sent, or nullopt after refusing.
  std::optional<MeasurementReport> handle_rrc_reconfiguration(const RrcConnectionReconfiguration& msg);
  void radio_link_monitor();
  void recover(RecoveryAction action);

  void deliver(Delivery what);
  void dial_voice();
  void send_sms();
  void emergency_call();

  /// Re-evaluates the best cell and camps on it, starting attach or TAU as needed.
  void reselect(const char* reason);

 private:
  enum class Procedure { none, attach, tau, service, detach };

  void start_nas(NasBody nas, Procedure proc);
  bool request_service(ServicePurpose purpose);
  void send_rrc(MessageBody body);
  void send_nas(NasBody nas);
  void attach();
  void tau();
  void go_idle();
  void clear_eps_context();
  void status(const std::string& reason);
  void on_attach_accept(const AttachAccept& accept);
  void on_service_reject(const ServiceReject& reject);
  void finish_power_off();
  void full_reset();

  std::string name_;
  Imsi imsi_;
  UeProfile profile_;
  UeTimers timers_;
  UeEnvironment& env_;
  UeState state_;

  Procedure procedure_ = Procedure::none;
  std::optional<NasBody> queued_nas_;  // waits for RrcConnectionSetup
  bool awaiting_setup_ = false;
  bool power_off_after_detach_ = false;
  bool rlf_tau_pending_ = false;
  bool attach_backoff_ = false;
  std::optional<ServicePurpose> service_purpose_;
  UeStatus last_status_;
  bool status_noted_ = false;
};

}  // namespace ltesim::ue
