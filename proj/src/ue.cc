#include "ltesim/ue.h"

#include <tuple>

namespace ltesim::ue {

namespace {

int rat_rank(Rat rat)
{
  switch (rat) {
    case Rat::lte:
      return 3;
    case Rat::utran:
      return 2;
    case Rat::gsm:
      return 1;
    case Rat::none:
      return 0;
  }
  return 0;
}

bool implicitly_detached(EmmCause cause)
{
  return cause.code == 9 || cause.code == 10;
}

}  // namespace

std::optional<CellIdentity> select_cell(const std::vector<CellMeasurement>& visible, const UeState& state,
                                        const UeCapabilities& caps)
{
  const CellMeasurement* best = nullptr;
  auto key = [](const CellMeasurement& m) {
    return std::make_tuple(rat_rank(m.cell.rat), m.cell.reselection_priority, m.rsrp_dbm,
                           -static_cast<std::int64_t>(m.cell.cell_id));
  };
  for (const auto& m : visible) {
    if (!state.usim_valid_any || !caps.supports(m.cell.rat)) continue;
    if (m.cell.rat == Rat::lte && (!state.usim_valid_lte || state.forbidden_tacs.count(m.cell.tac) != 0)) continue;
    if (best == nullptr || key(m) > key(*best)) best = &m;
  }
  if (best == nullptr) return std::nullopt;
  return best->cell;
}

Ue::Ue(std::string name, Imsi imsi, UeProfile profile, UeTimers timers, UeEnvironment& env) :
  name_(std::move(name)), imsi_(std::move(imsi)), profile_(std::move(profile)), timers_(timers), env_(env)
{
  profile_.capabilities.validate();
}

void Ue::status(const std::string& reason)
{
  UeStatus s{state_.emm, state_.rrc, state_.camped, state_.usim_valid_lte, state_.usim_valid_any, reason};
  UeStatus cmp = s;
  cmp.reason = last_status_.reason;
  if (status_noted_ && cmp == last_status_) return;
  status_noted_ = true;
  last_status_ = s;
  env_.note(s);
}

void Ue::power_on()
{
  if (state_.powered) return;
  state_.powered = true;
  state_.rrc = RrcState::idle;
  state_.emm = state_.usim_valid_lte && state_.usim_valid_any ? EmmState::deregistered : state_.emm;
  reselect("power_on");
}

void Ue::power_off()
{
  if (!state_.powered) return;
  if (state_.emm == EmmState::registered && state_.camped == Rat::lte && state_.guti && state_.serving_cell) {
    power_off_after_detach_ = true;
    start_nas(DetachRequest{*state_.guti, true}, Procedure::detach);
    if (state_.rrc == RrcState::connected) finish_power_off();
    return;
  }
  finish_power_off();
}

void Ue::finish_power_off()
{
  go_idle();
  power_off_after_detach_ = false;
  procedure_ = Procedure::none;
  service_purpose_.reset();
  state_.powered = false;
  state_.serving_cell.reset();
  state_.camped = Rat::none;
  if (state_.emm == EmmState::registered) state_.emm = EmmState::deregistered;
  state_.registered_tac.reset();
  env_.stop_timer(Timer::t3411);
  env_.stop_timer(Timer::t3412);
  attach_backoff_ = false;
  status("power_off");
}

void Ue::send_rrc(MessageBody body)
{
  env_.send(*state_.serving_cell, make_message(std::move(body), state_.as_security));
}

void Ue::send_nas(NasBody nas)
{
  env_.send(*state_.serving_cell, make_message(to_body(nas), state_.security_context));
}

void Ue::start_nas(NasBody nas, Procedure proc)
{
  if (!state_.serving_cell) return;
  procedure_ = proc;
  if (state_.rrc == RrcState::connected) {
    send_nas(std::move(nas));
    return;
  }
  queued_nas_ = std::move(nas);
  awaiting_setup_ = true;
  send_rrc(RrcConnectionRequest{});
}

void Ue::attach()
{
  if (!state_.serving_cell || state_.camped != Rat::lte) return;
  AttachRequest req;
  if (state_.guti) {
    req.identity = *state_.guti;
  } else {
    req.identity = imsi_;
  }
  req.capabilities = profile_.capabilities;
  start_nas(req, Procedure::attach);
}

void Ue::tau()
{
  if (!state_.guti) {
    attach();
    return;
  }
  TauRequest req{*state_.guti, state_.serving_cell->tac, state_.pending_rlf_report.has_value()};
  rlf_tau_pending_ = false;
  start_nas(req, Procedure::tau);
}

bool Ue::request_service(ServicePurpose purpose)
{
  if (!state_.serving_cell || state_.camped != Rat::lte) return false;
  if (purpose != ServicePurpose::emergency && (state_.emm != EmmState::registered || !state_.guti)) return false;
  service_purpose_ = purpose;
  start_nas(ServiceRequest{state_.guti.value_or(Guti{}), purpose}, Procedure::service);
  return true;
}

void Ue::go_idle()
{
  awaiting_setup_ = false;
  queued_nas_.reset();
  state_.as_security = false;
  if (state_.t310_running) {
    state_.t310_running = false;
    env_.stop_timer(Timer::t310);
  }
  state_.rrc = RrcState::idle;
}

void Ue::clear_eps_context()
{
  state_.guti.reset();
  state_.registered_tac.reset();
  state_.security_context = false;
  env_.stop_timer(Timer::t3412);
}

void Ue::reselect(const char* reason)
{
  if (!state_.powered || state_.rrc == RrcState::connected || awaiting_setup_) return;
  std::optional<CellIdentity> chosen;
  if (state_.usim_valid_any) {
    chosen = select_cell(env_.scan(), state_, profile_.capabilities);
  }
  if (!chosen) {
    state_.serving_cell.reset();
    state_.camped = Rat::none;
    status(reason);
    return;
  }
  bool changed = !(state_.serving_cell == chosen);
  state_.serving_cell = chosen;
  state_.camped = chosen->rat;
  status(reason);
  if (state_.camped != Rat::lte || procedure_ != Procedure::none) return;
  if (state_.emm == EmmState::registered) {
    if (changed && (state_.registered_tac != chosen->tac || rlf_tau_pending_)) tau();
  } else if (!attach_backoff_) {
    attach();
  }
}

void Ue::tick()
{
  if (!state_.powered) return;
  if (state_.rrc == RrcState::idle) {
    reselect("tick");
  } else {
    radio_link_monitor();
  }
}

void Ue::radio_link_monitor()
{
  if (state_.rrc != RrcState::connected || !state_.serving_cell) return;
  bool heard = false;
  for (const auto& m : env_.scan()) {
    if (m.cell == *state_.serving_cell) {
      heard = true;
      break;
    }
  }
  if (!heard && !state_.t310_running) {
    state_.t310_running = true;
    env_.start_timer(Timer::t310, timers_.t310_ms);
  } else if (heard && state_.t310_running) {
    state_.t310_running = false;
    env_.stop_timer(Timer::t310);
  }
}

void Ue::on_timer(Timer timer)
{
  if (!state_.powered && timer != Timer::t3245) return;
  switch (timer) {
    case Timer::t310: {
      if (!state_.t310_running || state_.rrc != RrcState::connected) return;
      state_.t310_running = false;
      RlfReport report;
      report.last_serving = *state_.serving_cell;
      for (const auto& m : env_.scan()) {
        if (m.cell == report.last_serving) continue;
        if (auto level = env_.measure(m.cell)) report.neighbor_measurements.push_back({m.cell, *level});
      }
      if (profile_.capabilities.location_info_r10) report.gps = env_.position();
      state_.pending_rlf_report = report;
      rlf_tau_pending_ = true;
      go_idle();
      procedure_ = Procedure::none;
      service_purpose_.reset();
      state_.serving_cell.reset();
      reselect("rlf");
      return;
    }
    case Timer::t3245:
      state_.t3245_running = false;
      recover(RecoveryAction::t3245_expiry);
      return;
    case Timer::t3411:
      attach_backoff_ = false;
      if (state_.emm != EmmState::registered) reselect("retry");
      return;
    case Timer::t3412:
      if (state_.emm == EmmState::registered && state_.camped == Rat::lte) {
        if (state_.rrc == RrcState::idle && procedure_ == Procedure::none) tau();
        if (timers_.t3412_ms > 0) env_.start_timer(Timer::t3412, timers_.t3412_ms);
      }
      return;
  }
}

void Ue::handle_paging(const RrcPaging& paging)
{
  if (state_.rrc != RrcState::idle || awaiting_setup_ || state_.camped != Rat::lte) return;
  for (const auto& id : paging.records) {
    if (const auto* g = std::get_if<Guti>(&id)) {
      if (state_.guti && *g == *state_.guti && state_.emm == EmmState::registered) {
        request_service(ServicePurpose::mt_response);
        return;
      }
    } else if (std::get<Imsi>(id) == imsi_) {
      clear_eps_context();
      state_.emm = EmmState::deregistered;
      procedure_ = Procedure::none;
      attach();
      return;
    }
  }
}

void Ue::on_attach_accept(const AttachAccept& accept)
{
  if (procedure_ != Procedure::attach) return;
  procedure_ = Procedure::none;
  const auto& sent = profile_.capabilities;
  bool mismatch = accept.echoed_security_algorithms != sent.security_algorithms ||
                  (accept.echoed_network_capabilities && *accept.echoed_network_capabilities != sent.network_part());
  if (mismatch) {
    env_.note(AttachAborted{"capability_mismatch"});
    go_idle();
    attach_backoff_ = true;
    env_.start_timer(Timer::t3411, timers_.t3411_ms);
    status("attach_aborted");
    return;
  }
  state_.guti = accept.guti;
  state_.registered_tac = accept.tac;
  state_.security_context = true;
  state_.as_security = true;
  state_.emm = EmmState::registered;
  send_nas(AttachComplete{});
  if (timers_.t3412_ms > 0) env_.start_timer(Timer::t3412, timers_.t3412_ms);
  status("attached");
}

void Ue::handle_reject(EmmCause cause, const char* reason)
{
  procedure_ = Procedure::none;
  service_purpose_.reset();
  DenialAction action = cause_action(cause);
  if (implicitly_detached(cause)) {
    state_.emm = EmmState::deregistered;
    state_.security_context = false;
    state_.registered_tac.reset();
    go_idle();
    reselect(reason);
    return;
  }
  if (action.ignored) {
    attach_backoff_ = true;
    env_.start_timer(Timer::t3411, timers_.t3411_ms);
    return;
  }
  if (action.bar_all) {
    state_.emm = EmmState::deregistered;
    state_.usim_valid_lte = false;
    state_.usim_valid_any = false;
    clear_eps_context();
    go_idle();
    state_.serving_cell.reset();
    state_.camped = Rat::none;
  } else if (action.bar_lte) {
    state_.emm = EmmState::eu3_roaming_not_allowed;
    state_.usim_valid_lte = false;
    clear_eps_context();
    go_idle();
    state_.serving_cell.reset();
  } else if (action.leave_ta) {
    if (state_.serving_cell) state_.forbidden_tacs.insert(state_.serving_cell->tac);
    go_idle();
    state_.serving_cell.reset();
  }
  if (action.persistent_until_recovery && profile_.t3245_enabled && !state_.t3245_running) {
    state_.t3245_running = true;
    env_.start_timer(Timer::t3245, profile_.t3245_ms);
  }
  std::string why = std::string("cause") + std::to_string(cause.code);
  if (!state_.powered || state_.rrc == RrcState::connected || awaiting_setup_) {
    status(why);
  } else {
    reselect(why.c_str());
  }
  (void)reason;
}

void Ue::on_service_reject(const ServiceReject& reject)
{
  procedure_ = Procedure::none;
  if (reject.purpose == ServicePurpose::mo_voice) {
    env_.note(VoiceCall{CallDirection::mo, false, reject.cause});
  } else if (reject.purpose == ServicePurpose::emergency) {
    env_.note(EmergencyCall{false});
  }
  service_purpose_.reset();
  if (reject.cause.known() || implicitly_detached(reject.cause)) {
    handle_reject(reject.cause, "service_reject");
  }
}

std::optional<MeasurementReport> Ue::handle_rrc_reconfiguration(const RrcConnectionReconfiguration& msg)
{
  if (state_.rrc != RrcState::connected) return std::nullopt;
  if (!profile_.sends_meas_report_without_security && !state_.as_security) {
    env_.note(ReportWithheld{"measurement"});
    return std::nullopt;
  }
  MeasurementReport report;
  for (const auto& target : msg.meas_targets) {
    if (auto level = env_.measure(target)) report.measurements.push_back({target, *level});
  }
  if (profile_.capabilities.location_info_r10) report.gps = env_.position();
  send_rrc(report);
  return report;
}

void Ue::on_downlink(const ProtocolMessage& msg, const CellIdentity& from)
{
  if (!state_.powered) return;
  if (!state_.serving_cell || !(*state_.serving_cell == from)) return;

  if (get_if<RrcConnectionSetup>(msg)) {
    if (!awaiting_setup_ || !queued_nas_) return;
    awaiting_setup_ = false;
    state_.rrc = RrcState::connected;
    NasBody nas = std::move(*queued_nas_);
    queued_nas_.reset();
    send_rrc(RrcConnectionSetupComplete{std::move(nas)});
    if (power_off_after_detach_) {
      finish_power_off();
      return;
    }
    status("connected");
  } else if (get_if<RrcConnectionRelease>(msg)) {
    if (service_purpose_ == ServicePurpose::emergency) env_.note(EmergencyCall{false});
    service_purpose_.reset();
    bool was_attaching = procedure_ == Procedure::attach;
    procedure_ = Procedure::none;
    go_idle();
    if (was_attaching) {
      attach_backoff_ = true;
      env_.start_timer(Timer::t3411, timers_.t3411_ms);
    }
    status("released");
    reselect("released");
  } else if (const auto* p = get_if<RrcPaging>(msg)) {
    handle_paging(*p);
  } else if (const auto* r = get_if<RrcConnectionReconfiguration>(msg)) {
    handle_rrc_reconfiguration(*r);
  } else if (get_if<UeInformationRequest>(msg)) {
    if (!state_.pending_rlf_report || state_.rrc != RrcState::connected) return;
    if (profile_.sends_rlf_report_without_security || state_.as_security) {
      send_rrc(UeInformationResponse{*state_.pending_rlf_report});
      state_.pending_rlf_report.reset();
    } else {
      env_.note(ReportWithheld{"rlf"});
    }
  } else if (const auto* a = get_if<AttachAccept>(msg)) {
    on_attach_accept(*a);
  } else if (const auto* r = get_if<AttachReject>(msg)) {
    if (procedure_ == Procedure::attach) handle_reject(r->cause, "attach_reject");
  } else if (const auto* t = get_if<TauAccept>(msg)) {
    if (procedure_ != Procedure::tau) return;
    procedure_ = Procedure::none;
    if (t->guti) state_.guti = *t->guti;
    state_.registered_tac = t->tac;
    state_.as_security = msg.envelope.integrity_protected;
    if (timers_.t3412_ms > 0) env_.start_timer(Timer::t3412, timers_.t3412_ms);
  } else if (const auto* r = get_if<TauReject>(msg)) {
    if (procedure_ == Procedure::tau) handle_reject(r->cause, "tau_reject");
  } else if (const auto* s = get_if<ServiceAccept>(msg)) {
    procedure_ = Procedure::none;
    state_.as_security = msg.envelope.integrity_protected;
    if (s->purpose == ServicePurpose::mo_voice) {
      env_.note(VoiceCall{CallDirection::mo, true, EmmCause{}});
    } else if (s->purpose == ServicePurpose::emergency) {
      env_.note(EmergencyCall{true});
    } else if (s->purpose == ServicePurpose::mo_sms) {
      env_.note(Notification{"sms_sent"});
    }
    service_purpose_.reset();
  } else if (const auto* r = get_if<ServiceReject>(msg)) {
    on_service_reject(*r);
  } else if (const auto* g = get_if<GutiReallocationCommand>(msg)) {
    state_.guti = g->guti;
  } else if (get_if<IdentityRequest>(msg)) {
    if (state_.rrc == RrcState::connected) send_nas(IdentityResponse{imsi_});
  }
}

void Ue::full_reset()
{
  go_idle();
  procedure_ = Procedure::none;
  service_purpose_.reset();
  attach_backoff_ = false;
  env_.stop_timer(Timer::t3411);
  if (state_.t3245_running) {
    state_.t3245_running = false;
    env_.stop_timer(Timer::t3245);
  }
  state_.usim_valid_lte = true;
  state_.usim_valid_any = true;
  state_.emm = EmmState::deregistered;
  state_.forbidden_tacs.clear();
  state_.security_context = false;
  state_.registered_tac.reset();
  state_.pending_rlf_report.reset();
  rlf_tau_pending_ = false;
  state_.serving_cell.reset();
  state_.camped = Rat::none;
}

void Ue::recover(RecoveryAction action)
{
  bool effective = false;
  switch (action) {
    case RecoveryAction::reboot:
    case RecoveryAction::reinsert_usim:
      full_reset();
      effective = true;
      break;
    case RecoveryAction::flight_mode_toggle:
      if (profile_.recovery_supports_flight_mode) {
        full_reset();
        effective = true;
      } else {
        go_idle();
        procedure_ = Procedure::none;
        state_.serving_cell.reset();
        effective = state_.usim_valid_lte && state_.usim_valid_any;
      }
      break;
    case RecoveryAction::move_new_ta:
      state_.forbidden_tacs.clear();
      go_idle();
      procedure_ = Procedure::none;
      state_.serving_cell.reset();
      if (state_.emm == EmmState::registered) {
        // Re-register from scratch so the network learns the true capabilities.
        state_.emm = EmmState::deregistered;
        state_.registered_tac.reset();
      }
      effective = state_.usim_valid_lte && state_.usim_valid_any;
      break;
    case RecoveryAction::t3245_expiry:
      if (!state_.usim_valid_lte || !state_.usim_valid_any) {
        state_.usim_valid_lte = true;
        state_.usim_valid_any = true;
        state_.emm = EmmState::deregistered;
        attach_backoff_ = false;
        effective = true;
      }
      break;
  }
  env_.note(Recovery{action, effective});
  if (state_.powered) {
    status(std::string(to_string(action)));
    reselect(std::string(to_string(action)).c_str());
  }
}

void Ue::deliver(Delivery what)
{
  if (!state_.powered) return;
  switch (what) {
    case Delivery::notify_push:
      env_.note(Notification{"push"});
      break;
    case Delivery::sms:
      env_.note(SmsDelivered{});
      env_.note(Notification{"sms"});
      break;
    case Delivery::voice_ring:
      env_.note(VoiceCall{CallDirection::mt, true, EmmCause{}});
      env_.note(Notification{"call"});
      break;
    case Delivery::silent_push:
    case Delivery::silent_sms:
    case Delivery::voice_silent:
      break;
  }
}

void Ue::dial_voice()
{
  if (!state_.powered) return;
  if (state_.camped == Rat::utran || state_.camped == Rat::gsm) {
    // Circuit-switched call on the legacy RAT.
    env_.note(VoiceCall{CallDirection::mo, true, EmmCause{}});
    return;
  }
  if (!request_service(ServicePurpose::mo_voice)) {
    env_.note(VoiceCall{CallDirection::mo, false, EmmCause{}});
  }
}

void Ue::send_sms()
{
  if (!state_.powered) return;
  if (state_.camped == Rat::utran || state_.camped == Rat::gsm) {
    env_.note(Notification{"sms_sent"});
    return;
  }
  request_service(ServicePurpose::mo_sms);
}

void Ue::emergency_call()
{
  if (!state_.powered || state_.camped == Rat::none || !state_.serving_cell) {
    env_.note(EmergencyCall{false});
    return;
  }
  if (state_.camped != Rat::lte) {
    env_.note(EmergencyCall{true});
    return;
  }
  request_service(ServicePurpose::emergency);
}

}  // namespace ltesim::ue
