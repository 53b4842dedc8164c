#include "ltesim/message.h"

#include <algorithm>

namespace ltesim {

DenialAction cause_action(EmmCause cause)
{
  DenialAction a;
  switch (cause.code) {
    case EmmCause::kLteNotAllowed:
      a.bar_lte = true;
      a.persistent_until_recovery = true;
      break;
    case EmmCause::kAllServicesNotAllowed:
      a.bar_lte = true;
      a.bar_all = true;
      a.persistent_until_recovery = true;
      break;
    case EmmCause::kTrackingAreaNotAllowed:
      a.leave_ta = true;
      break;
    default:
      a.ignored = true;
      break;
  }
  return a;
}

void UeCapabilities::validate() const
{
  if (sms_only && voice_domain_preference) {
    throw InvalidValue("capabilities: sms_only excludes a voice domain preference");
  }
  for (Rat r : rats_supported) {
    if (r == Rat::none) {
      throw InvalidValue("capabilities: 'none' is not a supported RAT");
    }
  }
}

bool UeCapabilities::supports(Rat rat) const
{
  return std::find(rats_supported.begin(), rats_supported.end(), rat) != rats_supported.end();
}

std::string_view to_string(ServicePurpose purpose)
{
  switch (purpose) {
    case ServicePurpose::mt_response:
      return "mt";
    case ServicePurpose::mo_data:
      return "mo_data";
    case ServicePurpose::mo_sms:
      return "mo_sms";
    case ServicePurpose::mo_voice:
      return "mo_voice";
    case ServicePurpose::emergency:
      return "emergency";
  }
  return "mt";
}

ServicePurpose service_purpose_from_string(std::string_view text)
{
  if (text == "mt") return ServicePurpose::mt_response;
  if (text == "mo_data") return ServicePurpose::mo_data;
  if (text == "mo_sms") return ServicePurpose::mo_sms;
  if (text == "mo_voice") return ServicePurpose::mo_voice;
  if (text == "emergency") return ServicePurpose::emergency;
  throw InvalidValue("unknown service purpose '" + std::string(text) + "'");
}

std::string_view to_string(TriggerKind kind)
{
  switch (kind) {
    case TriggerKind::volte_call:
      return "volte_call";
    case TriggerKind::facebook_other_message:
      return "facebook_other_message";
    case TriggerKind::whatsapp_typing:
      return "whatsapp_typing";
    case TriggerKind::silent_sms:
      return "silent_sms";
  }
  return "volte_call";
}

TriggerKind trigger_kind_from_string(std::string_view text)
{
  if (text == "volte_call") return TriggerKind::volte_call;
  if (text == "facebook_other_message") return TriggerKind::facebook_other_message;
  if (text == "whatsapp_typing") return TriggerKind::whatsapp_typing;
  if (text == "silent_sms") return TriggerKind::silent_sms;
  throw InvalidValue("unknown trigger kind '" + std::string(text) + "'");
}

std::string_view to_string(EmmState state)
{
  switch (state) {
    case EmmState::registered:
      return "registered";
    case EmmState::deregistered:
      return "deregistered";
    case EmmState::eu3_roaming_not_allowed:
      return "eu3";
  }
  return "deregistered";
}

EmmState emm_state_from_string(std::string_view text)
{
  if (text == "registered") return EmmState::registered;
  if (text == "deregistered") return EmmState::deregistered;
  if (text == "eu3") return EmmState::eu3_roaming_not_allowed;
  throw InvalidValue("unknown EMM state '" + std::string(text) + "'");
}

std::string_view to_string(RecoveryAction action)
{
  switch (action) {
    case RecoveryAction::reboot:
      return "reboot";
    case RecoveryAction::reinsert_usim:
      return "reinsert_usim";
    case RecoveryAction::flight_mode_toggle:
      return "flight_mode_toggle";
    case RecoveryAction::move_new_ta:
      return "move_new_ta";
    case RecoveryAction::t3245_expiry:
      return "t3245_expiry";
  }
  return "reboot";
}

RecoveryAction recovery_action_from_string(std::string_view text)
{
  if (text == "reboot") return RecoveryAction::reboot;
  if (text == "reinsert_usim") return RecoveryAction::reinsert_usim;
  if (text == "flight_mode_toggle") return RecoveryAction::flight_mode_toggle;
  if (text == "move_new_ta") return RecoveryAction::move_new_ta;
  if (text == "t3245_expiry") return RecoveryAction::t3245_expiry;
  throw InvalidValue("unknown recovery action '" + std::string(text) + "'");
}

std::string_view kind_of(const MessageBody& body)
{
  return std::visit([](const auto& m) { return std::decay_t<decltype(m)>::kind; }, body);
}

bool always_unprotected(const MessageBody& body)
{
  return std::holds_alternative<RrcPaging>(body) || std::holds_alternative<Sib1>(body) ||
         std::holds_alternative<SibPriority>(body) || std::holds_alternative<AttachReject>(body) ||
         std::holds_alternative<TauReject>(body);
}

bool is_local(const MessageBody& body)
{
  return body.index() >= MessageBody(AppTrigger{}).index();
}

MessageBody to_body(const NasBody& nas)
{
  return std::visit([](const auto& m) -> MessageBody { return m; }, nas);
}

ProtocolMessage make_message(MessageBody body, bool security_context_active)
{
  ProtocolMessage msg{{}, std::move(body)};
  if (is_local(msg.body) || always_unprotected(msg.body)) {
    return msg;
  }
  if (std::holds_alternative<AttachAccept>(msg.body)) {
    msg.envelope = {true, true};
    return msg;
  }
  if (security_context_active) {
    msg.envelope.integrity_protected = true;
    // Initial NAS messages are integrity protected only, so the serving
    // eNodeB can read them.
    bool initial = std::holds_alternative<TauRequest>(msg.body) ||
                   std::holds_alternative<ServiceRequest>(msg.body) ||
                   std::holds_alternative<AttachRequest>(msg.body) ||
                   std::holds_alternative<DetachRequest>(msg.body);
    msg.envelope.ciphered = !initial;
  }
  return msg;
}

}  // namespace ltesim
