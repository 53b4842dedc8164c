#include "ltesim/trace_codec.h"

#include "ltesim/text.h"

#include <istream>
#include <ostream>

namespace ltesim {

namespace {

class Writer {
 public:
  explicit Writer(std::string& out, std::string prefix = {}) : out_(out), prefix_(std::move(prefix)) {}

  void put(std::string_view key, std::string_view value)
  {
    if (!out_.empty()) {
      out_.push_back(' ');
    }
    out_ += prefix_;
    out_ += key;
    out_.push_back('=');
    out_ += value;
  }
  void put(std::string_view key, bool value) { put(key, value ? std::string_view("1") : std::string_view("0")); }
  void put(std::string_view key, double value) { put(key, std::string_view(text::format_double(value))); }
  void put_int(std::string_view key, long long value) { put(key, std::string_view(std::to_string(value))); }

  Writer nested(std::string_view sub) const { return Writer(out_, prefix_ + std::string(sub) + "."); }

 private:
  std::string& out_;
  std::string prefix_;
};

class Reader {
 public:
  Reader(const std::vector<std::pair<std::string_view, std::string_view>>& fields, std::size_t& pos,
         std::string prefix = {}) :
    fields_(fields), pos_(pos), prefix_(std::move(prefix))
  {
  }

  bool peek(std::string_view key) const
  {
    return pos_ < fields_.size() && fields_[pos_].first == prefix_ + std::string(key);
  }

  std::string_view take(std::string_view key)
  {
    std::string full = prefix_ + std::string(key);
    if (pos_ >= fields_.size()) {
      throw MalformedLine(full, "line ends early");
    }
    if (fields_[pos_].first != full) {
      throw MalformedLine(full, "expected key, found '" + std::string(fields_[pos_].first) + "'");
    }
    return fields_[pos_++].second;
  }

  bool take_bool(std::string_view key)
  {
    auto v = take(key);
    if (v == "1") return true;
    if (v == "0") return false;
    throw MalformedLine(prefix_ + std::string(key), "expected 0 or 1");
  }

  double take_double(std::string_view key)
  {
    double d = 0;
    if (!text::parse_double(take(key), d)) {
      throw MalformedLine(prefix_ + std::string(key), "expected a number");
    }
    return d;
  }

  long long take_int(std::string_view key)
  {
    long long v = 0;
    if (!text::parse_int(take(key), v)) {
      throw MalformedLine(prefix_ + std::string(key), "expected an integer");
    }
    return v;
  }

  std::string take_token(std::string_view key)
  {
    auto v = take(key);
    if (!text::is_token(v)) {
      throw MalformedLine(prefix_ + std::string(key), "bad token");
    }
    return std::string(v);
  }

  /// Runs a parser over the value of key; converts value errors into a
  /// malformed-line error naming the key.
  template <typename F>
  auto parse(std::string_view key, F&& fn)
  {
    auto v = take(key);
    try {
      return fn(v);
    } catch (const InvalidValue& e) {
      throw MalformedLine(prefix_ + std::string(key), e.what());
    }
  }

  Reader nested(std::string_view sub) const
  {
    return Reader(fields_, pos_, prefix_ + std::string(sub) + ".");
  }

  const std::string& prefix() const { return prefix_; }

 private:
  const std::vector<std::pair<std::string_view, std::string_view>>& fields_;
  std::size_t& pos_;
  std::string prefix_;
};

// --- field helpers ---------------------------------------------------------

std::string rats_string(const std::vector<Rat>& rats)
{
  if (rats.empty()) return "-";
  std::vector<std::string> parts;
  for (Rat r : rats) parts.emplace_back(to_string(r));
  return text::join(parts, '|');
}

std::vector<Rat> parse_rats(std::string_view v)
{
  std::vector<Rat> out;
  if (v == "-") return out;
  for (auto p : text::split(v, '|')) out.push_back(rat_from_string(p));
  return out;
}

std::string strings_string(const std::vector<std::string>& items)
{
  if (items.empty()) return "-";
  return text::join(items, '|');
}

std::vector<std::string> parse_strings(std::string_view v)
{
  std::vector<std::string> out;
  if (v == "-") return out;
  for (auto p : text::split(v, '|')) {
    if (!text::is_token(p)) throw InvalidValue("bad list item");
    out.emplace_back(p);
  }
  return out;
}

std::string cells_string(const std::vector<CellIdentity>& cells)
{
  if (cells.empty()) return "-";
  std::vector<std::string> parts;
  for (const auto& c : cells) parts.push_back(c.to_string());
  return text::join(parts, '|');
}

std::vector<CellIdentity> parse_cells(std::string_view v)
{
  std::vector<CellIdentity> out;
  if (v == "-") return out;
  for (auto p : text::split(v, '|')) out.push_back(CellIdentity::parse(p));
  return out;
}

std::string meas_string(const std::vector<CellMeasurement>& ms)
{
  if (ms.empty()) return "-";
  std::vector<std::string> parts;
  for (const auto& m : ms) parts.push_back(m.cell.to_string() + ":" + text::format_double(m.rsrp_dbm));
  return text::join(parts, '|');
}

std::vector<CellMeasurement> parse_meas(std::string_view v)
{
  std::vector<CellMeasurement> out;
  if (v == "-") return out;
  for (auto p : text::split(v, '|')) {
    auto colon = p.rfind(':');
    if (colon == std::string_view::npos) throw InvalidValue("measurement without rsrp");
    CellMeasurement m;
    m.cell = CellIdentity::parse(p.substr(0, colon));
    if (!text::parse_double(p.substr(colon + 1), m.rsrp_dbm)) throw InvalidValue("bad rsrp");
    out.push_back(m);
  }
  return out;
}

std::string gps_string(const std::optional<Position>& p)
{
  if (!p) return "-";
  return text::format_double(p->x) + "," + text::format_double(p->y);
}

std::optional<Position> parse_gps(std::string_view v)
{
  if (v == "-") return std::nullopt;
  auto parts = text::split(v, ',');
  Position p;
  if (parts.size() != 2 || !text::parse_double(parts[0], p.x) || !text::parse_double(parts[1], p.y)) {
    throw InvalidValue("bad position");
  }
  return p;
}

std::string identity_string(const MobileIdentity& id)
{
  if (const auto* imsi = std::get_if<Imsi>(&id)) return "imsi:" + imsi->to_string();
  return "guti:" + std::get<Guti>(id).to_string();
}

MobileIdentity parse_identity(std::string_view v)
{
  if (v.starts_with("imsi:")) return Imsi::parse(v.substr(5));
  if (v.starts_with("guti:")) return Guti::parse(v.substr(5));
  throw InvalidValue("identity must start with imsi: or guti:");
}

std::string gutis_string(const std::vector<Guti>& gs)
{
  if (gs.empty()) return "-";
  std::vector<std::string> parts;
  for (const auto& g : gs) parts.push_back(g.to_string());
  return text::join(parts, '|');
}

std::vector<Guti> parse_gutis(std::string_view v)
{
  std::vector<Guti> out;
  if (v == "-") return out;
  for (auto p : text::split(v, '|')) out.push_back(Guti::parse(p));
  return out;
}

std::string optional_guti_string(const std::optional<Guti>& g)
{
  return g ? g->to_string() : std::string("-");
}

std::optional<Guti> parse_optional_guti(std::string_view v)
{
  if (v == "-") return std::nullopt;
  return Guti::parse(v);
}

EmmCause parse_cause(std::string_view v)
{
  long long code = 0;
  if (!text::parse_int(v, code) || code < 0 || code > 255) throw InvalidValue("cause must be 0..255");
  return EmmCause{static_cast<int>(code)};
}

std::uint16_t parse_tac(std::string_view v)
{
  return static_cast<std::uint16_t>(parse_hex(v, 4));
}

std::uint32_t parse_cell_id(std::string_view v)
{
  return static_cast<std::uint32_t>(parse_hex(v, 7));
}

std::string cell_id_string(std::uint32_t id)
{
  std::string s = hex_string(id, 7);
  auto nz = s.find_first_not_of('0');
  return nz == std::string::npos ? "0" : s.substr(nz);
}

// --- per-kind encoders -------------------------------------------------------
// Each pair must stay mirror images: decode reads exactly the keys encode
// writes, in the same order.

void enc(const UeCapabilities& c, Writer& w)
{
  w.put("rats", std::string_view(rats_string(c.rats_supported)));
  w.put("sec", std::string_view(strings_string(c.security_algorithms)));
  w.put("voice", c.voice_domain_preference);
  w.put("sms_only", c.sms_only);
  w.put("loc_r10", c.location_info_r10);
}

UeCapabilities dec_caps(Reader& r)
{
  UeCapabilities c;
  c.rats_supported = r.parse("rats", parse_rats);
  c.security_algorithms = r.parse("sec", parse_strings);
  c.voice_domain_preference = r.take_bool("voice");
  c.sms_only = r.take_bool("sms_only");
  c.location_info_r10 = r.take_bool("loc_r10");
  return c;
}

void enc(const AttachRequest& m, Writer& w)
{
  w.put("id", std::string_view(identity_string(m.identity)));
  enc(m.capabilities, w);
}
void dec(Reader& r, AttachRequest& m)
{
  m.identity = r.parse("id", parse_identity);
  m.capabilities = dec_caps(r);
}

void enc(const AttachAccept& m, Writer& w)
{
  w.put("guti", std::string_view(m.guti.to_string()));
  w.put("tac", std::string_view(hex_string(m.tac, 4)));
  w.put("echo_sec", std::string_view(strings_string(m.echoed_security_algorithms)));
  w.put("echo_net", m.echoed_network_capabilities.has_value());
  if (m.echoed_network_capabilities) {
    w.put("echo_rats", std::string_view(rats_string(m.echoed_network_capabilities->rats_supported)));
    w.put("echo_voice", m.echoed_network_capabilities->voice_domain_preference);
    w.put("echo_sms_only", m.echoed_network_capabilities->sms_only);
  }
}
void dec(Reader& r, AttachAccept& m)
{
  m.guti = r.parse("guti", Guti::parse);
  m.tac = r.parse("tac", parse_tac);
  m.echoed_security_algorithms = r.parse("echo_sec", parse_strings);
  if (r.take_bool("echo_net")) {
    NetworkCapabilities n;
    n.rats_supported = r.parse("echo_rats", parse_rats);
    n.voice_domain_preference = r.take_bool("echo_voice");
    n.sms_only = r.take_bool("echo_sms_only");
    m.echoed_network_capabilities = n;
  }
}

void enc(const AttachComplete&, Writer&) {}
void dec(Reader&, AttachComplete&) {}

void enc(const AttachReject& m, Writer& w) { w.put_int("cause", m.cause.code); }
void dec(Reader& r, AttachReject& m) { m.cause = r.parse("cause", parse_cause); }

void enc(const TauRequest& m, Writer& w)
{
  w.put("guti", std::string_view(m.guti.to_string()));
  w.put("tac_seen", std::string_view(hex_string(m.tac_seen, 4)));
  w.put("rlf", m.rlf_available);
}
void dec(Reader& r, TauRequest& m)
{
  m.guti = r.parse("guti", Guti::parse);
  m.tac_seen = r.parse("tac_seen", parse_tac);
  m.rlf_available = r.take_bool("rlf");
}

void enc(const TauAccept& m, Writer& w)
{
  w.put("guti", std::string_view(optional_guti_string(m.guti)));
  w.put("tac", std::string_view(hex_string(m.tac, 4)));
}
void dec(Reader& r, TauAccept& m)
{
  m.guti = r.parse("guti", parse_optional_guti);
  m.tac = r.parse("tac", parse_tac);
}

void enc(const TauReject& m, Writer& w) { w.put_int("cause", m.cause.code); }
void dec(Reader& r, TauReject& m) { m.cause = r.parse("cause", parse_cause); }

void enc(const ServiceRequest& m, Writer& w)
{
  w.put("guti", std::string_view(m.guti.to_string()));
  w.put("purpose", to_string(m.purpose));
}
void dec(Reader& r, ServiceRequest& m)
{
  m.guti = r.parse("guti", Guti::parse);
  m.purpose = r.parse("purpose", service_purpose_from_string);
}

void enc(const ServiceAccept& m, Writer& w) { w.put("purpose", to_string(m.purpose)); }
void dec(Reader& r, ServiceAccept& m) { m.purpose = r.parse("purpose", service_purpose_from_string); }

void enc(const ServiceReject& m, Writer& w)
{
  w.put("purpose", to_string(m.purpose));
  w.put_int("cause", m.cause.code);
}
void dec(Reader& r, ServiceReject& m)
{
  m.purpose = r.parse("purpose", service_purpose_from_string);
  m.cause = r.parse("cause", parse_cause);
}

void enc(const GutiReallocationCommand& m, Writer& w) { w.put("guti", std::string_view(m.guti.to_string())); }
void dec(Reader& r, GutiReallocationCommand& m) { m.guti = r.parse("guti", Guti::parse); }

void enc(const IdentityRequest&, Writer&) {}
void dec(Reader&, IdentityRequest&) {}

void enc(const IdentityResponse& m, Writer& w) { w.put("imsi", std::string_view(m.imsi.to_string())); }
void dec(Reader& r, IdentityResponse& m) { m.imsi = r.parse("imsi", Imsi::parse); }

void enc(const DetachRequest& m, Writer& w)
{
  w.put("guti", std::string_view(m.guti.to_string()));
  w.put("switch_off", m.switch_off);
}
void dec(Reader& r, DetachRequest& m)
{
  m.guti = r.parse("guti", Guti::parse);
  m.switch_off = r.take_bool("switch_off");
}

void enc(const RrcPaging& m, Writer& w)
{
  w.put_int("n", static_cast<long long>(m.records.size()));
  for (const auto& id : m.records) {
    if (const auto* imsi = std::get_if<Imsi>(&id)) {
      w.put("imsi", std::string_view(imsi->to_string()));
    } else {
      w.put("stmsi", std::string_view(std::get<Guti>(id).to_string()));
    }
  }
}
void dec(Reader& r, RrcPaging& m)
{
  auto n = r.take_int("n");
  if (n < 0 || n > 16) {
    throw MalformedLine(r.prefix() + "n", "paging record count outside 0..16");
  }
  for (long long i = 0; i < n; ++i) {
    if (r.peek("imsi")) {
      m.records.emplace_back(r.parse("imsi", Imsi::parse));
    } else {
      m.records.emplace_back(r.parse("stmsi", Guti::parse));
    }
  }
}

void enc(const RrcConnectionRequest&, Writer&) {}
void dec(Reader&, RrcConnectionRequest&) {}
void enc(const RrcConnectionSetup&, Writer&) {}
void dec(Reader&, RrcConnectionSetup&) {}

void enc_nas(const NasBody& nas, Writer& w);
NasBody dec_nas(Reader& r);

void enc(const RrcConnectionSetupComplete& m, Writer& w) { enc_nas(m.nas, w); }
void dec(Reader& r, RrcConnectionSetupComplete& m) { m.nas = dec_nas(r); }

void enc(const RrcConnectionReconfiguration& m, Writer& w)
{
  w.put("targets", std::string_view(cells_string(m.meas_targets)));
}
void dec(Reader& r, RrcConnectionReconfiguration& m) { m.meas_targets = r.parse("targets", parse_cells); }

void enc(const MeasurementReport& m, Writer& w)
{
  w.put("meas", std::string_view(meas_string(m.measurements)));
  w.put("gps", std::string_view(gps_string(m.gps)));
}
void dec(Reader& r, MeasurementReport& m)
{
  m.measurements = r.parse("meas", parse_meas);
  m.gps = r.parse("gps", parse_gps);
}

void enc(const UeInformationRequest&, Writer&) {}
void dec(Reader&, UeInformationRequest&) {}

void enc(const UeInformationResponse& m, Writer& w)
{
  w.put("last", std::string_view(m.rlf_report.last_serving.to_string()));
  w.put("meas", std::string_view(meas_string(m.rlf_report.neighbor_measurements)));
  w.put("gps", std::string_view(gps_string(m.rlf_report.gps)));
}
void dec(Reader& r, UeInformationResponse& m)
{
  m.rlf_report.last_serving = r.parse("last", CellIdentity::parse);
  m.rlf_report.neighbor_measurements = r.parse("meas", parse_meas);
  m.rlf_report.gps = r.parse("gps", parse_gps);
}

void enc(const RrcConnectionRelease&, Writer&) {}
void dec(Reader&, RrcConnectionRelease&) {}

void enc(const Sib1& m, Writer& w) { w.put("sib_cell", std::string_view(m.cell.to_string())); }
void dec(Reader& r, Sib1& m) { m.cell = r.parse("sib_cell", CellIdentity::parse); }

void enc(const SibPriority& m, Writer& w)
{
  std::vector<std::string> parts;
  for (const auto& [f, p] : m.priorities) parts.push_back(text::format_double(f) + ":" + std::to_string(p));
  w.put("prio", std::string_view(parts.empty() ? std::string("-") : text::join(parts, '|')));
}
void dec(Reader& r, SibPriority& m)
{
  m.priorities = r.parse("prio", [](std::string_view v) {
    std::map<double, int> out;
    if (v == "-") return out;
    for (auto p : text::split(v, '|')) {
      auto parts = text::split(p, ':');
      double f = 0;
      long long prio = 0;
      if (parts.size() != 2 || !text::parse_double(parts[0], f) || !text::parse_int(parts[1], prio) || prio < 0 ||
          prio > 7) {
        throw InvalidValue("bad frequency:priority pair");
      }
      out[f] = static_cast<int>(prio);
    }
    return out;
  });
}

void enc(const AppTrigger& m, Writer& w)
{
  w.put("trigger", to_string(m.trigger));
  w.put("target", std::string_view(m.target));
  w.put("delivered", m.delivered);
}
void dec(Reader& r, AppTrigger& m)
{
  m.trigger = r.parse("trigger", trigger_kind_from_string);
  m.target = r.take_token("target");
  m.delivered = r.take_bool("delivered");
}

void enc(const Notification& m, Writer& w) { w.put("what", std::string_view(m.what)); }
void dec(Reader& r, Notification& m) { m.what = r.take_token("what"); }

void enc(const VoiceCall& m, Writer& w)
{
  w.put("call", m.direction == CallDirection::mo ? std::string_view("mo") : std::string_view("mt"));
  w.put("accepted", m.accepted);
  w.put_int("cause", m.cause.code);
}
void dec(Reader& r, VoiceCall& m)
{
  auto d = r.take("call");
  if (d == "mo") {
    m.direction = CallDirection::mo;
  } else if (d == "mt") {
    m.direction = CallDirection::mt;
  } else {
    throw MalformedLine(r.prefix() + "call", "expected mo or mt");
  }
  m.accepted = r.take_bool("accepted");
  m.cause = r.parse("cause", parse_cause);
}

void enc(const SmsDelivered&, Writer&) {}
void dec(Reader&, SmsDelivered&) {}

void enc(const UeStatus& m, Writer& w)
{
  w.put("emm", to_string(m.emm));
  w.put("rrc", m.rrc == RrcState::connected ? std::string_view("connected") : std::string_view("idle"));
  w.put("rat", to_string(m.camped));
  w.put("usim_lte", m.usim_valid_lte);
  w.put("usim_any", m.usim_valid_any);
  w.put("reason", std::string_view(m.reason));
}
void dec(Reader& r, UeStatus& m)
{
  m.emm = r.parse("emm", emm_state_from_string);
  auto rrc = r.take("rrc");
  if (rrc == "connected") {
    m.rrc = RrcState::connected;
  } else if (rrc == "idle") {
    m.rrc = RrcState::idle;
  } else {
    throw MalformedLine(r.prefix() + "rrc", "expected idle or connected");
  }
  m.camped = r.parse("rat", rat_from_string);
  m.usim_valid_lte = r.take_bool("usim_lte");
  m.usim_valid_any = r.take_bool("usim_any");
  m.reason = r.take_token("reason");
}

void enc(const Recovery& m, Writer& w)
{
  w.put("action", to_string(m.action));
  w.put("effective", m.effective);
}
void dec(Reader& r, Recovery& m)
{
  m.action = r.parse("action", recovery_action_from_string);
  m.effective = r.take_bool("effective");
}

void enc(const ReportWithheld& m, Writer& w) { w.put("report", std::string_view(m.report)); }
void dec(Reader& r, ReportWithheld& m) { m.report = r.take_token("report"); }

void enc(const AttachAborted& m, Writer& w) { w.put("reason", std::string_view(m.reason)); }
void dec(Reader& r, AttachAborted& m) { m.reason = r.take_token("reason"); }

void enc(const EmergencyCall& m, Writer& w) { w.put("success", m.success); }
void dec(Reader& r, EmergencyCall& m) { m.success = r.take_bool("success"); }

void enc(const TransmitterState& m, Writer& w) { w.put("on", m.on); }
void dec(Reader& r, TransmitterState& m) { m.on = r.take_bool("on"); }

void enc(const LinkResult& m, Writer& w)
{
  w.put("stage", std::string_view(m.stage));
  w.put("link_cell", std::string_view(cell_id_string(m.cell_id)));
  w.put_int("trials", m.trials);
  w.put("cands", std::string_view(gutis_string(m.candidates)));
}
void dec(Reader& r, LinkResult& m)
{
  m.stage = r.take_token("stage");
  m.cell_id = r.parse("link_cell", parse_cell_id);
  m.trials = static_cast<int>(r.take_int("trials"));
  m.candidates = r.parse("cands", parse_gutis);
}

void enc(const CellLocated& m, Writer& w)
{
  w.put("located_cell", std::string_view(cell_id_string(m.cell_id)));
  w.put("tac", std::string_view(hex_string(m.tac, 4)));
  w.put("area_km2", m.area_km2);
  w.put_int("triggers", m.triggers_used);
}
void dec(Reader& r, CellLocated& m)
{
  m.cell_id = r.parse("located_cell", parse_cell_id);
  m.tac = r.parse("tac", parse_tac);
  m.area_km2 = r.take_double("area_km2");
  m.triggers_used = static_cast<int>(r.take_int("triggers"));
}

void enc(const LocationFix& m, Writer& w)
{
  w.put("x", m.position.x);
  w.put("y", m.position.y);
  w.put("residual", m.residual_m);
  w.put("method", m.method == FixMethod::gps ? std::string_view("gps") : std::string_view("trilateration"));
  w.put("source", std::string_view(m.source));
}
void dec(Reader& r, LocationFix& m)
{
  m.position.x = r.take_double("x");
  m.position.y = r.take_double("y");
  m.residual_m = r.take_double("residual");
  auto method = r.take("method");
  if (method == "gps") {
    m.method = FixMethod::gps;
  } else if (method == "trilateration") {
    m.method = FixMethod::trilateration;
  } else {
    throw MalformedLine(r.prefix() + "method", "expected gps or trilateration");
  }
  m.source = r.take_token("source");
}

void enc(const PassiveLink& m, Writer& w)
{
  w.put("earlier", std::string_view(m.earlier.to_string()));
  w.put("linked", std::string_view(m.linked.to_string()));
  w.put("guessed", m.guessed);
}
void dec(Reader& r, PassiveLink& m)
{
  m.earlier = r.parse("earlier", Guti::parse);
  m.linked = r.parse("linked", Guti::parse);
  m.guessed = r.take_bool("guessed");
}

void enc(const Truth& m, Writer& w)
{
  w.put("subject", std::string_view(m.subject));
  w.put("x", m.position.x);
  w.put("y", m.position.y);
  w.put("true_cell", std::string_view(cell_id_string(m.cell_id)));
  w.put("guti", std::string_view(optional_guti_string(m.guti)));
}
void dec(Reader& r, Truth& m)
{
  m.subject = r.take_token("subject");
  m.position.x = r.take_double("x");
  m.position.y = r.take_double("y");
  m.cell_id = r.parse("true_cell", parse_cell_id);
  m.guti = r.parse("guti", parse_optional_guti);
}

void enc(const SimulationEnd&, Writer&) {}
void dec(Reader&, SimulationEnd&) {}

// --- dispatch ----------------------------------------------------------------

template <typename Variant, std::size_t I = 0>
Variant decode_by_kind(std::string_view kind, Reader& r, const std::string& field)
{
  if constexpr (I == std::variant_size_v<Variant>) {
    throw MalformedLine(field, "unknown kind '" + std::string(kind) + "'");
  } else {
    using T = std::variant_alternative_t<I, Variant>;
    if (T::kind == kind) {
      T value{};
      dec(r, value);
      return Variant(std::move(value));
    }
    return decode_by_kind<Variant, I + 1>(kind, r, field);
  }
}

void enc_nas(const NasBody& nas, Writer& w)
{
  Writer nested = w.nested("nas");
  std::visit(
      [&](const auto& m) {
        nested.put("kind", std::decay_t<decltype(m)>::kind);
        enc(m, nested);
      },
      nas);
}

NasBody dec_nas(Reader& r)
{
  Reader nested = r.nested("nas");
  auto kind = nested.take("kind");
  return decode_by_kind<NasBody>(kind, nested, nested.prefix() + "kind");
}

std::string direction_string(Direction d)
{
  switch (d) {
    case Direction::downlink:
      return "dl";
    case Direction::uplink:
      return "ul";
    case Direction::local:
      return "local";
  }
  return "local";
}

}  // namespace

std::string encode_record(const TraceRecord& record)
{
  std::string out;
  Writer w(out);
  w.put_int("t", record.timestamp_ms);
  w.put("cell", std::string_view(record.cell ? record.cell->to_string() : std::string("-")));
  w.put("dir", std::string_view(direction_string(record.direction)));
  w.put("src", std::string_view(record.src));
  w.put("dst", std::string_view(record.dst));
  w.put("kind", kind_of(record.message.body));
  w.put("ip", record.message.envelope.integrity_protected);
  w.put("ci", record.message.envelope.ciphered);
  std::visit([&](const auto& m) { enc(m, w); }, record.message.body);
  return out;
}

TraceRecord decode_record(std::string_view line)
{
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) {
    line.remove_suffix(1);
  }
  std::vector<std::pair<std::string_view, std::string_view>> fields;
  if (!line.empty()) {
    for (auto tok : text::split(line, ' ')) {
      auto eq = tok.find('=');
      if (eq == std::string_view::npos) {
        throw MalformedLine(std::string(tok), "token without '='");
      }
      fields.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
  }

  std::size_t pos = 0;
  Reader r(fields, pos);
  TraceRecord rec;
  rec.timestamp_ms = r.take_int("t");
  if (rec.timestamp_ms < 0) {
    throw MalformedLine("t", "negative timestamp");
  }
  rec.cell = r.parse("cell", [](std::string_view v) -> std::optional<CellIdentity> {
    if (v == "-") return std::nullopt;
    return CellIdentity::parse(v);
  });
  auto dir = r.take("dir");
  if (dir == "dl") {
    rec.direction = Direction::downlink;
  } else if (dir == "ul") {
    rec.direction = Direction::uplink;
  } else if (dir == "local") {
    rec.direction = Direction::local;
  } else {
    throw MalformedLine("dir", "expected dl, ul or local");
  }
  rec.src = r.take_token("src");
  rec.dst = r.take_token("dst");
  auto kind = r.take("kind");
  Envelope env;
  env.integrity_protected = r.take_bool("ip");
  env.ciphered = r.take_bool("ci");
  rec.message.envelope = env;
  rec.message.body = decode_by_kind<MessageBody>(kind, r, "kind");
  if (pos != fields.size()) {
    throw MalformedLine(std::string(fields[pos].first), "unexpected trailing field");
  }
  return rec;
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& records)
{
  for (const auto& r : records) {
    out << encode_record(r) << '\n';
  }
}

std::vector<TraceRecord> read_trace(std::istream& in)
{
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) {
      continue;
    }
    try {
      out.push_back(decode_record(line));
    } catch (const MalformedLine& e) {
      throw MalformedLine(e.field(), "line " + std::to_string(n) + ": " + e.what());
    }
    if (out.size() > 1 && out.back().timestamp_ms < out[out.size() - 2].timestamp_ms) {
      throw MalformedLine("t", "line " + std::to_string(n) + ": timestamps decrease");
    }
  }
  return out;
}

}  // namespace ltesim
