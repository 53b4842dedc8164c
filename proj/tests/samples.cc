#include "samples.h"

#include <string>

namespace ltesim::testing {

namespace {

template <typename T>
T pick(std::mt19937_64& rng, std::initializer_list<T> items)
{
  std::uniform_int_distribution<std::size_t> d(0, items.size() - 1);
  return *(items.begin() + d(rng));
}

bool coin(std::mt19937_64& rng) { return (rng() & 1u) != 0; }

double any_double(std::mt19937_64& rng)
{
  // Mix "nice" decimals with raw bit-noise doubles to stress shortest round-trip formatting.
  if (coin(rng)) {
    return std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
  }
  return static_cast<double>(static_cast<std::int64_t>(rng() % 2000001) - 1000000) / 1000.0;
}

std::string digits(std::mt19937_64& rng, std::size_t n)
{
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>('0' + rng() % 10));
  return s;
}

Imsi random_imsi(std::mt19937_64& rng)
{
  std::size_t mnc = coin(rng) ? 2 : 3;
  return Imsi(digits(rng, 3), digits(rng, mnc), digits(rng, 15 - 3 - mnc));
}

Guti random_guti(std::mt19937_64& rng)
{
  return Guti{static_cast<std::uint16_t>(rng()), static_cast<std::uint32_t>(rng())};
}

MobileIdentity random_identity(std::mt19937_64& rng)
{
  if (coin(rng)) return random_imsi(rng);
  return random_guti(rng);
}

CellIdentity random_cell(std::mt19937_64& rng)
{
  CellIdentity c;
  c.mcc = digits(rng, 3);
  c.mnc = digits(rng, coin(rng) ? 2 : 3);
  c.tac = static_cast<std::uint16_t>(rng());
  c.cell_id = static_cast<std::uint32_t>(rng() & 0x0fffffff);
  c.enodeb_id = static_cast<std::uint32_t>(rng() & 0xfffff);
  c.frequency_mhz = static_cast<double>(1 + rng() % 30000) / 10.0;
  c.reselection_priority = static_cast<int>(rng() % 8);
  c.rat = pick(rng, {Rat::lte, Rat::utran, Rat::gsm});
  return c;
}

std::vector<Rat> random_rats(std::mt19937_64& rng)
{
  std::vector<Rat> out;
  for (Rat r : {Rat::lte, Rat::utran, Rat::gsm}) {
    if (coin(rng)) out.push_back(r);
  }
  return out;
}

std::string random_token(std::mt19937_64& rng)
{
  static const std::string alphabet = "abcXYZ019_.:-";
  std::string s;
  std::size_t n = 1 + rng() % 12;
  for (std::size_t i = 0; i < n; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
  return s;
}

UeCapabilities random_caps(std::mt19937_64& rng)
{
  UeCapabilities c;
  c.rats_supported = random_rats(rng);
  c.security_algorithms.clear();
  for (auto a : {"eea0", "eea1", "eea2", "eia1", "eia2"}) {
    if (coin(rng)) c.security_algorithms.emplace_back(a);
  }
  c.voice_domain_preference = coin(rng);
  c.sms_only = coin(rng);
  c.location_info_r10 = coin(rng);
  return c;
}

std::vector<CellMeasurement> random_meas(std::mt19937_64& rng)
{
  std::vector<CellMeasurement> out(rng() % 4);
  for (auto& m : out) m = {random_cell(rng), any_double(rng)};
  return out;
}

std::optional<Position> random_gps(std::mt19937_64& rng)
{
  if (coin(rng)) return std::nullopt;
  return Position{any_double(rng), any_double(rng)};
}

EmmCause random_cause(std::mt19937_64& rng)
{
  return EmmCause{static_cast<int>(rng() % 256)};
}

ServicePurpose random_purpose(std::mt19937_64& rng)
{
  return pick(rng, {ServicePurpose::mt_response, ServicePurpose::mo_data, ServicePurpose::mo_sms,
                    ServicePurpose::mo_voice, ServicePurpose::emergency});
}

NasBody random_nas(std::mt19937_64& rng, std::size_t which)
{
  switch (which % std::variant_size_v<NasBody>) {
    case 0:
      return AttachRequest{random_identity(rng), random_caps(rng)};
    case 1: {
      AttachAccept a{random_guti(rng), static_cast<std::uint16_t>(rng()), random_caps(rng).security_algorithms,
                     std::nullopt};
      if (coin(rng)) a.echoed_network_capabilities = random_caps(rng).network_part();
      return a;
    }
    case 2:
      return AttachComplete{};
    case 3:
      return AttachReject{random_cause(rng)};
    case 4:
      return TauRequest{random_guti(rng), static_cast<std::uint16_t>(rng()), coin(rng)};
    case 5:
      return TauAccept{coin(rng) ? std::optional<Guti>(random_guti(rng)) : std::nullopt,
                       static_cast<std::uint16_t>(rng())};
    case 6:
      return TauReject{random_cause(rng)};
    case 7:
      return ServiceRequest{random_guti(rng), random_purpose(rng)};
    case 8:
      return ServiceAccept{random_purpose(rng)};
    case 9:
      return ServiceReject{random_purpose(rng), random_cause(rng)};
    case 10:
      return GutiReallocationCommand{random_guti(rng)};
    case 11:
      return IdentityRequest{};
    case 12:
      return IdentityResponse{random_imsi(rng)};
    default:
      return DetachRequest{random_guti(rng), coin(rng)};
  }
}

MessageBody random_body(std::mt19937_64& rng)
{
  std::size_t which = rng() % std::variant_size_v<MessageBody>;
  switch (which) {
    case 0: {
      RrcPaging p;
      std::size_t n = rng() % 17;
      for (std::size_t i = 0; i < n; ++i) p.records.push_back(random_identity(rng));
      return p;
    }
    case 1:
      return RrcConnectionRequest{};
    case 2:
      return RrcConnectionSetup{};
    case 3:
      return RrcConnectionSetupComplete{random_nas(rng, rng())};
    case 4: {
      RrcConnectionReconfiguration r;
      r.meas_targets.resize(rng() % 4);
      for (auto& c : r.meas_targets) c = random_cell(rng);
      return r;
    }
    case 5:
      return MeasurementReport{random_meas(rng), random_gps(rng)};
    case 6:
      return UeInformationRequest{};
    case 7:
      return UeInformationResponse{RlfReport{random_cell(rng), random_meas(rng), random_gps(rng)}};
    case 8:
      return RrcConnectionRelease{};
    case 9:
      return Sib1{random_cell(rng)};
    case 10: {
      SibPriority s;
      std::size_t n = rng() % 4;
      for (std::size_t i = 0; i < n; ++i) s.priorities[static_cast<double>(rng() % 3000)] = static_cast<int>(rng() % 8);
      return s;
    }
    case 25:
      return AppTrigger{pick(rng, {TriggerKind::volte_call, TriggerKind::facebook_other_message,
                                   TriggerKind::whatsapp_typing, TriggerKind::silent_sms}),
                        random_token(rng), coin(rng)};
    case 26:
      return Notification{random_token(rng)};
    case 27:
      return VoiceCall{coin(rng) ? CallDirection::mo : CallDirection::mt, coin(rng), random_cause(rng)};
    case 28:
      return SmsDelivered{};
    case 29:
      return UeStatus{pick(rng, {EmmState::registered, EmmState::deregistered, EmmState::eu3_roaming_not_allowed}),
                      coin(rng) ? RrcState::idle : RrcState::connected,
                      pick(rng, {Rat::lte, Rat::utran, Rat::gsm, Rat::none}),
                      coin(rng),
                      coin(rng),
                      random_token(rng)};
    case 30:
      return Recovery{pick(rng, {RecoveryAction::reboot, RecoveryAction::reinsert_usim,
                                 RecoveryAction::flight_mode_toggle, RecoveryAction::move_new_ta,
                                 RecoveryAction::t3245_expiry}),
                      coin(rng)};
    case 31:
      return ReportWithheld{random_token(rng)};
    case 32:
      return AttachAborted{random_token(rng)};
    case 33:
      return EmergencyCall{coin(rng)};
    case 34:
      return TransmitterState{coin(rng)};
    case 35: {
      LinkResult l{random_token(rng), static_cast<std::uint32_t>(rng() & 0x0fffffff), static_cast<int>(rng() % 50), {}};
      l.candidates.resize(rng() % 5);
      for (auto& g : l.candidates) g = random_guti(rng);
      return l;
    }
    case 36:
      return CellLocated{static_cast<std::uint32_t>(rng() & 0x0fffffff), static_cast<std::uint16_t>(rng()),
                         any_double(rng), static_cast<int>(rng() % 50)};
    case 37:
      return LocationFix{Position{any_double(rng), any_double(rng)}, any_double(rng),
                         coin(rng) ? FixMethod::gps : FixMethod::trilateration, random_token(rng)};
    case 38:
      return PassiveLink{random_guti(rng), random_guti(rng), coin(rng)};
    case 39:
      return Truth{random_token(rng), Position{any_double(rng), any_double(rng)},
                   static_cast<std::uint32_t>(rng() & 0x0fffffff),
                   coin(rng) ? std::optional<Guti>(random_guti(rng)) : std::nullopt};
    case 40:
      return SimulationEnd{};
    default:
      return to_body(random_nas(rng, which - 11));
  }
}

}  // namespace

std::vector<MessageBody> one_of_each()
{
  std::mt19937_64 rng(7);
  std::vector<MessageBody> out(std::variant_size_v<MessageBody>);
  std::vector<bool> seen(out.size(), false);
  std::size_t missing = out.size();
  while (missing > 0) {
    MessageBody b = random_body(rng);
    if (!seen[b.index()]) {
      seen[b.index()] = true;
      out[b.index()] = std::move(b);
      --missing;
    }
  }
  return out;
}

TraceRecord random_record(std::mt19937_64& rng)
{
  TraceRecord r;
  r.timestamp_ms = static_cast<TimeMs>(rng() % (100 * kDay));
  if (coin(rng)) r.cell = random_cell(rng);
  r.direction = pick(rng, {Direction::downlink, Direction::uplink, Direction::local});
  r.src = random_token(rng);
  r.dst = random_token(rng);
  r.message.body = random_body(rng);
  r.message.envelope = Envelope{coin(rng), coin(rng)};
  return r;
}

}  // namespace ltesim::testing
