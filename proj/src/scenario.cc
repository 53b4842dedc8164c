#include "ltesim/scenario.h"

#include "ltesim/text.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>

namespace ltesim::sim {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// A JSON value together with its path, so every error names its field.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const json& raw() const { return value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& detail) const { throw ValidationError(path_, detail); }

  void expect_object() const
  {
    if (!value_.is_object()) fail("expected an object");
  }

  void allow(std::initializer_list<std::string_view> keys) const
  {
    expect_object();
    for (const auto& [key, v] : value_.items()) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        throw ValidationError(child_path(key), "unknown key");
      }
    }
  }

  bool has(std::string_view key) const { return value_.is_object() && value_.contains(std::string(key)); }

  Node at(std::string_view key) const
  {
    expect_object();
    auto it = value_.find(std::string(key));
    if (it == value_.end()) throw ValidationError(child_path(key), "required");
    return Node(*it, child_path(key));
  }

  std::optional<Node> opt(std::string_view key) const
  {
    if (!has(key)) return std::nullopt;
    return at(key);
  }

  std::vector<Node> items() const
  {
    if (!value_.is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < value_.size(); ++i) {
      out.emplace_back(value_[i], path_ + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  double number() const
  {
    if (!value_.is_number()) fail("expected a number");
    return value_.get<double>();
  }

  std::int64_t integer() const
  {
    if (!value_.is_number_integer()) fail("expected an integer");
    if (value_.is_number_unsigned() && value_.get<std::uint64_t>() > std::numeric_limits<std::int64_t>::max()) {
      fail("out of range");
    }
    return value_.get<std::int64_t>();
  }

  std::int64_t integer(std::int64_t lo, std::int64_t hi) const
  {
    std::int64_t v = integer();
    if (v < lo || v > hi) fail("must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }

  TimeMs duration() const { return integer(0, std::numeric_limits<std::int64_t>::max()); }

  bool boolean() const
  {
    if (!value_.is_boolean()) fail("expected true or false");
    return value_.get<bool>();
  }

  std::string string() const
  {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

  /// Identifiers are integers or "0x"-prefixed hex strings.
  std::uint64_t id(int max_hex_digits) const
  {
    std::uint64_t limit = max_hex_digits >= 16 ? ~0ULL : (1ULL << (4 * max_hex_digits)) - 1;
    std::uint64_t v = 0;
    if (value_.is_string()) {
      std::string s = value_.get<std::string>();
      if (s.size() < 3 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X')) fail("expected 0x-prefixed hex");
      for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      try {
        v = parse_hex(std::string_view(s).substr(2), max_hex_digits);
      } catch (const InvalidValue& e) {
        fail(e.what());
      }
    } else {
      std::int64_t i = integer();
      if (i < 0) fail("must be non-negative");
      v = static_cast<std::uint64_t>(i);
    }
    if (v > limit) fail("out of range");
    return v;
  }

  Position position() const
  {
    if (!value_.is_array() || value_.size() != 2 || !value_[0].is_number() || !value_[1].is_number()) {
      fail("expected [x, y]");
    }
    Position p{value_[0].get<double>(), value_[1].get<double>()};
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) fail("coordinates must be finite");
    return p;
  }

  template <typename F>
  auto parse_with(F&& f) const
  {
    try {
      return f(string());
    } catch (const ValidationError&) {
      throw;
    } catch (const InvalidValue& e) {
      fail(e.what());
    }
  }

 private:
  std::string child_path(std::string_view key) const
  {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json& value_;
  std::string path_;
};

template <typename T>
void read_opt(const Node& n, std::string_view key, T& out);

template <>
void read_opt(const Node& n, std::string_view key, double& out)
{
  if (auto v = n.opt(key)) out = v->number();
}

template <>
void read_opt(const Node& n, std::string_view key, bool& out)
{
  if (auto v = n.opt(key)) out = v->boolean();
}

template <>
void read_opt(const Node& n, std::string_view key, std::int64_t& out)
{
  if (auto v = n.opt(key)) out = v->duration();
}

template <>
void read_opt(const Node& n, std::string_view key, int& out)
{
  if (auto v = n.opt(key)) out = static_cast<int>(v->integer(0, std::numeric_limits<int>::max()));
}

radio::PathLossModel parse_model(const Node& n)
{
  if (n.raw().is_string()) {
    std::string name = n.string();
    if (name == "street_level") return radio::street_level_model();
    if (name == "mast") return radio::mast_model();
    n.fail("unknown model '" + name + "'");
  }
  n.allow({"log_distance", "cost231_hata"});
  radio::PathLossModel model;
  if (auto ld = n.opt("log_distance")) {
    ld->allow({"pl0_db", "d0_m", "exponent", "sigma_db"});
    radio::LogDistance m;
    read_opt(*ld, "pl0_db", m.pl0_db);
    read_opt(*ld, "d0_m", m.d0_m);
    read_opt(*ld, "exponent", m.exponent_n);
    read_opt(*ld, "sigma_db", m.shadowing_sigma_db);
    model = m;
  } else if (auto h = n.opt("cost231_hata")) {
    h->allow({"freq_mhz", "hb_m", "hm_m", "metro_correction_db"});
    radio::Cost231Hata m;
    read_opt(*h, "freq_mhz", m.freq_mhz);
    read_opt(*h, "hb_m", m.hb_m);
    read_opt(*h, "hm_m", m.hm_m);
    read_opt(*h, "metro_correction_db", m.metro_correction_db);
    model = m;
  } else {
    n.fail("expected log_distance or cost231_hata");
  }
  try {
    radio::validate(model);
  } catch (const InvalidValue& e) {
    n.fail(e.what());
  }
  return model;
}

core::GridSpec parse_grid(const Node& n, core::GridSpec g)
{
  n.allow({"rows", "cols", "spacing_m", "ta_rows", "ta_cols", "tx_power_dbm", "antenna_height_m", "frequency_mhz",
           "priority", "mcc", "mnc", "first_tac", "first_cell_id", "origin"});
  if (auto v = n.opt("rows")) g.rows = static_cast<int>(v->integer(1, 1000));
  if (auto v = n.opt("cols")) g.cols = static_cast<int>(v->integer(1, 1000));
  read_opt(n, "spacing_m", g.spacing_m);
  if (auto v = n.opt("ta_rows")) g.ta_rows = static_cast<int>(v->integer(1, 1000));
  if (auto v = n.opt("ta_cols")) g.ta_cols = static_cast<int>(v->integer(1, 1000));
  read_opt(n, "tx_power_dbm", g.tx_power_dbm);
  read_opt(n, "antenna_height_m", g.antenna_height_m);
  read_opt(n, "frequency_mhz", g.frequency_mhz);
  if (auto v = n.opt("priority")) g.priority = static_cast<int>(v->integer(0, 7));
  if (auto v = n.opt("mcc")) g.mcc = v->string();
  if (auto v = n.opt("mnc")) g.mnc = v->string();
  if (auto v = n.opt("first_tac")) g.first_tac = static_cast<std::uint16_t>(v->id(4));
  if (auto v = n.opt("first_cell_id")) g.first_cell_id = static_cast<std::uint32_t>(v->id(7));
  if (auto v = n.opt("origin")) g.origin = v->position();
  if (!(g.spacing_m > 0.0)) n.at("spacing_m").fail("must be positive");
  return g;
}

core::CellSite parse_cell(const Node& n)
{
  n.allow({"cell_id", "tac", "mcc", "mnc", "enodeb_id", "frequency_mhz", "priority", "rat", "position", "tx_power_dbm",
           "antenna_height_m", "geometry"});
  core::CellSite site;
  CellIdentity& c = site.identity;
  c.cell_id = static_cast<std::uint32_t>(n.at("cell_id").id(7));
  if (c.cell_id > 0xFFFFFFF) n.at("cell_id").fail("exceeds 28 bits");
  if (auto v = n.opt("tac")) c.tac = static_cast<std::uint16_t>(v->id(4));
  if (auto v = n.opt("mcc")) c.mcc = v->string();
  if (auto v = n.opt("mnc")) c.mnc = v->string();
  c.enodeb_id = n.has("enodeb_id") ? static_cast<std::uint32_t>(n.at("enodeb_id").id(5)) : (c.cell_id & 0xfffff);
  c.frequency_mhz = n.at("frequency_mhz").number();
  c.reselection_priority = static_cast<int>(n.at("priority").integer(0, 7));
  if (auto v = n.opt("rat")) c.rat = v->parse_with([](const std::string& s) { return rat_from_string(s); });
  if (c.rat == Rat::none) n.at("rat").fail("a cell needs a radio technology");
  site.transmitter.cell = c;
  site.transmitter.position = n.at("position").position();
  read_opt(n, "tx_power_dbm", site.transmitter.tx_power_dbm);
  read_opt(n, "antenna_height_m", site.transmitter.antenna_height_m);
  Node geo = n.at("geometry");
  geo.allow({"disc_radius_m", "polygon"});
  if (auto r = geo.opt("disc_radius_m")) {
    double radius = r->number();
    if (!(radius > 0.0)) r->fail("must be positive");
    site.geometry = core::Disc{site.transmitter.position, radius};
  } else if (auto p = geo.opt("polygon")) {
    core::Polygon poly;
    for (const auto& v : p->items()) poly.vertices.push_back(v.position());
    if (poly.vertices.size() < 3) p->fail("needs at least 3 vertices");
    site.geometry = poly;
  } else {
    geo.fail("expected disc_radius_m or polygon");
  }
  return site;
}

void parse_topology(const Node& n, Scenario& s)
{
  n.allow({"preset", "grid", "cells", "radio"});
  std::optional<core::GridSpec> grid;
  if (auto p = n.opt("preset")) {
    if (p->string() != "city") p->fail("unknown preset");
    s.city = true;
    grid = core::city_preset();
  }
  if (auto g = n.opt("grid")) grid = parse_grid(*g, grid.value_or(core::GridSpec{}));
  if (grid) s.topology = core::make_grid(*grid);
  if (auto cells = n.opt("cells")) {
    for (const auto& c : cells->items()) {
      try {
        c.expect_object();
        s.topology.add(parse_cell(c));
      } catch (const ValidationError&) {
        throw;
      } catch (const InvalidValue& e) {
        c.fail(e.what());
      }
    }
  }
  if (s.topology.sites().empty()) n.fail("no cells");
  if (s.city) {
    try {
      core::check_city_dimensions(s.topology);
    } catch (const InvalidValue& e) {
      n.fail(e.what());
    }
  }
  if (auto r = n.opt("radio")) {
    r->allow({"model", "floor_dbm"});
    if (auto m = r->opt("model")) s.radio.model = parse_model(*m);
    read_opt(*r, "floor_dbm", s.radio.floor_dbm);
  }
}

std::pair<Position, Position> bounding_box(const core::CellTopology& topology)
{
  Position lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  Position hi{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  auto grow = [&](const Position& p) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  };
  for (const auto& site : topology.sites()) {
    if (site.identity.rat != Rat::lte) continue;
    if (const auto* d = std::get_if<core::Disc>(&site.geometry)) {
      grow({d->center.x - d->radius_m, d->center.y - d->radius_m});
      grow({d->center.x + d->radius_m, d->center.y + d->radius_m});
    } else {
      for (const auto& v : std::get<core::Polygon>(site.geometry).vertices) grow(v);
    }
  }
  return {lo, hi};
}

ue::UeProfile parse_profile(const Node& n)
{
  n.allow({"rats", "security_algorithms", "voice_domain_preference", "sms_only", "location_info_r10",
           "sends_meas_report_without_security", "sends_rlf_report_without_security",
           "recovery_supports_flight_mode", "t3245_enabled", "t3245_ms"});
  ue::UeProfile p;
  UeCapabilities& c = p.capabilities;
  if (auto rats = n.opt("rats")) {
    c.rats_supported.clear();
    for (const auto& r : rats->items()) {
      c.rats_supported.push_back(r.parse_with([](const std::string& s) { return rat_from_string(s); }));
    }
  }
  if (auto algs = n.opt("security_algorithms")) {
    c.security_algorithms.clear();
    for (const auto& a : algs->items()) {
      std::string alg = a.string();
      if (!text::is_token(alg)) a.fail("not a token");
      c.security_algorithms.push_back(alg);
    }
  }
  read_opt(n, "voice_domain_preference", c.voice_domain_preference);
  read_opt(n, "sms_only", c.sms_only);
  if (c.sms_only && !n.has("voice_domain_preference")) c.voice_domain_preference = false;
  read_opt(n, "location_info_r10", c.location_info_r10);
  read_opt(n, "sends_meas_report_without_security", p.sends_meas_report_without_security);
  read_opt(n, "sends_rlf_report_without_security", p.sends_rlf_report_without_security);
  read_opt(n, "recovery_supports_flight_mode", p.recovery_supports_flight_mode);
  read_opt(n, "t3245_enabled", p.t3245_enabled);
  read_opt(n, "t3245_ms", p.t3245_ms);
  try {
    c.validate();
  } catch (const InvalidValue& e) {
    n.fail(e.what());
  }
  return p;
}

SubscriberSpec parse_subscriber(const Node& n, const Scenario& s)
{
  n.allow({"name", "imsi", "social_id", "home", "path", "apps", "whatsapp_visible", "profile", "timers",
           "allowed_tacs", "power_on_ms", "attach_detach_period_ms", "off_duration_ms", "incoming_push_period_ms",
           "events"});
  SubscriberSpec sub;
  sub.name = n.at("name").string();
  if (!text::is_token(sub.name)) n.at("name").fail("names may use letters, digits and _-.: only");
  Node imsi = n.at("imsi");
  sub.imsi = imsi.parse_with([](const std::string& t) {
    return t.find('-') != std::string::npos ? Imsi::parse(t) : Imsi::from_digits(t);
  });
  sub.social_id = n.has("social_id") ? n.at("social_id").string() : sub.name;
  if (!text::is_token(sub.social_id)) n.at("social_id").fail("not a token");
  if (auto h = n.opt("home")) {
    if (h->raw().is_string()) {
      if (h->string() != "random") h->fail("expected [x, y] or \"random\"");
    } else {
      sub.home = h->position();
    }
  } else if (!n.has("path")) {
    n.at("home");
  }
  if (auto path = n.opt("path")) {
    for (const auto& w : path->items()) {
      w.allow({"position", "speed_mps", "dwell_ms"});
      Waypoint wp;
      wp.position = w.at("position").position();
      read_opt(w, "speed_mps", wp.speed_mps);
      read_opt(w, "dwell_ms", wp.dwell_ms);
      if (!(wp.speed_mps > 0.0)) w.at("speed_mps").fail("must be positive");
      sub.path.push_back(wp);
    }
    if (sub.path.empty()) path->fail("needs at least one waypoint");
    sub.home = sub.path.front().position;
  }
  if (auto apps = n.opt("apps")) {
    for (const auto& a : apps->items()) sub.apps.apps.insert(a.string());
  }
  read_opt(n, "whatsapp_visible", sub.apps.whatsapp_visible_to_attacker);
  if (auto p = n.opt("profile")) sub.profile = parse_profile(*p);
  if (auto t = n.opt("timers")) {
    t->allow({"t310_ms", "t3411_ms", "t3412_ms"});
    read_opt(*t, "t310_ms", sub.timers.t310_ms);
    read_opt(*t, "t3411_ms", sub.timers.t3411_ms);
    read_opt(*t, "t3412_ms", sub.timers.t3412_ms);
  }
  if (auto tacs = n.opt("allowed_tacs")) {
    for (const auto& t : tacs->items()) {
      auto tac = static_cast<std::uint16_t>(t.id(4));
      if (!s.topology.has_tac(tac)) t.fail("unknown tracking area");
      sub.allowed_tacs.insert(tac);
    }
  }
  read_opt(n, "power_on_ms", sub.power_on_ms);
  read_opt(n, "attach_detach_period_ms", sub.attach_detach_period_ms);
  read_opt(n, "off_duration_ms", sub.off_duration_ms);
  read_opt(n, "incoming_push_period_ms", sub.incoming_push_period_ms);
  if (sub.attach_detach_period_ms > 0 && sub.off_duration_ms >= sub.attach_detach_period_ms) {
    n.at("off_duration_ms").fail("must be shorter than attach_detach_period_ms");
  }
  if (auto events = n.opt("events")) {
    for (const auto& e : events->items()) {
      e.allow({"at_ms", "kind", "to"});
      ScenarioEvent ev;
      ev.at_ms = e.at("at_ms").duration();
      ev.kind = e.at("kind").parse_with([](const std::string& t) { return event_kind_from_string(t); });
      if (auto to = e.opt("to")) ev.to = to->position();
      if ((ev.kind == EventKind::move_new_ta || ev.kind == EventKind::move_to) && !ev.to) e.at("to");
      sub.events.push_back(ev);
    }
  }
  return sub;
}

void parse_network(const Node& n, NetworkSpec& net)
{
  n.allow({"mme_id", "guti_policy", "guti_period_ms", "paging", "t3413_ms", "power_cycle_threshold_ms",
           "inactivity_ms", "app_latency_ms", "app_jitter_ms", "hop_ms", "mobility_tick_ms", "sib_period_ms"});
  if (auto v = n.opt("mme_id")) net.mme.mme_id = static_cast<std::uint16_t>(v->id(4));
  if (auto v = n.opt("guti_policy")) {
    std::string p = v->string();
    if (p == "sticky") {
      net.mme.policy = core::Sticky{};
    } else if (p == "fresh_on_tau") {
      net.mme.policy = core::FreshOnTau{};
    } else if (p == "periodic") {
      core::Periodic periodic;
      read_opt(n, "guti_period_ms", periodic.interval_ms);
      if (periodic.interval_ms <= 0) n.at("guti_period_ms").fail("must be positive");
      net.mme.policy = periodic;
    } else if (p == "sequential_on_power_cycle") {
      net.mme.policy = core::SequentialOnPowerCycle{};
    } else {
      v->fail("unknown policy '" + p + "'");
    }
  }
  if (auto v = n.opt("paging")) {
    std::string p = v->string();
    if (p == "smart") {
      net.mme.paging = core::PagingStrategy::smart;
    } else if (p == "ta_wide") {
      net.mme.paging = core::PagingStrategy::ta_wide;
    } else {
      v->fail("expected smart or ta_wide");
    }
  }
  read_opt(n, "t3413_ms", net.mme.t3413_ms);
  read_opt(n, "power_cycle_threshold_ms", net.mme.power_cycle_threshold_ms);
  read_opt(n, "inactivity_ms", net.inactivity_ms);
  read_opt(n, "app_latency_ms", net.app_latency_ms);
  read_opt(n, "app_jitter_ms", net.app_jitter_ms);
  read_opt(n, "hop_ms", net.hop_ms);
  read_opt(n, "mobility_tick_ms", net.mobility_tick_ms);
  read_opt(n, "sib_period_ms", net.sib_period_ms);
  if (net.hop_ms < 1) n.at("hop_ms").fail("must be at least 1");
  if (net.mobility_tick_ms < 1) n.at("mobility_tick_ms").fail("must be at least 1");
  if (net.mme.t3413_ms < 1) n.at("t3413_ms").fail("must be at least 1");
  if (net.inactivity_ms < 1) n.at("inactivity_ms").fail("must be at least 1");
}

TriggerKind parse_trigger(const Node& n)
{
  return n.parse_with([](const std::string& t) { return trigger_kind_from_string(t); });
}

attack::AttackKind parse_attack(const Node& n, const Scenario& s)
{
  bool object = !n.raw().is_string();
  if (object) n.allow({"kind", "requested_cells"});
  std::string kind = object ? n.at("kind").string() : n.string();
  if (kind == "l3_meas_report") {
    if (!object) n.fail("l3_meas_report needs requested_cells");
    attack::L3MeasReport m;
    for (const auto& c : n.at("requested_cells").items()) {
      auto id = static_cast<std::uint32_t>(c.id(7));
      if (s.topology.find(id) == nullptr) c.fail("no such cell");
      m.requested_cells.push_back(id);
    }
    return m;
  }
  if (object && n.has("requested_cells")) n.at("requested_cells").fail("only for l3_meas_report");
  if (kind == "l3_rlf_report") return attack::L3RlfReport{};
  if (kind == "d1_deny_lte") return attack::DenyLte{};
  if (kind == "d2_deny_all") return attack::DenyAll{};
  if (kind == "d3_capability_strip") return attack::CapabilityStrip{};
  if (object) n.at("kind").fail("unknown attack '" + kind + "'");
  n.fail("unknown attack '" + kind + "'");
}

void parse_attacker(const Node& n, Scenario& s)
{
  n.expect_object();
  std::string type = n.at("type").string();
  if (type == "semi_passive") {
    n.allow({"type", "victim", "start_ms", "ta_trigger", "cell_trigger", "max_triggers_per_stage",
             "max_triggers_total", "trigger_interval_ms", "window_ms", "volte_hangup_ms"});
    SemiPassiveSpec sp;
    sp.victim = n.at("victim").string();
    const SubscriberSpec* victim = s.subscriber(sp.victim);
    if (victim == nullptr) n.at("victim").fail("no such subscriber");
    auto& c = sp.config;
    c.victim_social_id = victim->social_id;
    read_opt(n, "start_ms", c.start_ms);
    if (auto v = n.opt("ta_trigger")) c.ta_trigger = parse_trigger(*v);
    if (auto v = n.opt("cell_trigger")) c.cell_trigger = parse_trigger(*v);
    read_opt(n, "max_triggers_per_stage", c.max_triggers_per_stage);
    read_opt(n, "max_triggers_total", c.max_triggers_total);
    read_opt(n, "trigger_interval_ms", c.trigger_interval_ms);
    read_opt(n, "window_ms", c.window_ms);
    read_opt(n, "volte_hangup_ms", c.volte_hangup_ms);
    if (c.max_triggers_per_stage < 1) n.at("max_triggers_per_stage").fail("must be at least 1");
    if (c.max_triggers_total < 1) n.at("max_triggers_total").fail("must be at least 1");
    if (c.trigger_interval_ms <= c.window_ms) n.at("trigger_interval_ms").fail("must exceed window_ms");
    s.attacker = sp;
  } else if (type == "passive") {
    n.allow({"type", "cell_id", "windows"});
    PassiveSpec p;
    p.config.cell_id = static_cast<std::uint32_t>(n.at("cell_id").id(7));
    if (s.topology.find(p.config.cell_id) == nullptr) n.at("cell_id").fail("no such cell");
    for (const auto& w : n.at("windows").items()) {
      auto bounds = w.items();
      if (bounds.size() != 2) w.fail("expected [t0, t1]");
      TimeMs t0 = bounds[0].duration();
      TimeMs t1 = bounds[1].duration();
      if (t1 <= t0) w.fail("window must end after it starts");
      if (!p.config.windows.empty() && t0 <= p.config.windows.back().second) w.fail("windows must be ordered");
      p.config.windows.emplace_back(t0, t1);
    }
    if (p.config.windows.size() < 2) n.at("windows").fail("needs at least two windows");
    s.attacker = p;
  } else if (type == "rogue_enb") {
    n.allow({"type", "host_cell", "cell_id", "tac", "frequency_mhz", "priority", "transmitters", "allowlist",
             "attack", "start_ms", "stop_ms", "guard_ms", "assumed_exponent"});
    ActiveSpec a;
    auto& c = a.config;
    c.host_cell_id = static_cast<std::uint32_t>(n.at("host_cell").id(7));
    if (auto v = n.opt("cell_id")) c.cell_id = static_cast<std::uint32_t>(v->id(7));
    if (auto v = n.opt("tac")) c.tac = static_cast<std::uint16_t>(v->id(4));
    read_opt(n, "frequency_mhz", c.frequency_mhz);
    if (auto v = n.opt("priority")) c.priority = static_cast<int>(v->integer(0, 7));
    for (const auto& t : n.at("transmitters").items()) {
      t.allow({"position", "tx_power_dbm"});
      attack::RogueTransmitter tx;
      tx.position = t.at("position").position();
      read_opt(t, "tx_power_dbm", tx.tx_power_dbm);
      c.transmitters.push_back(tx);
    }
    if (auto allow = n.opt("allowlist")) {
      a.allowlist.emplace();
      for (const auto& name : allow->items()) {
        std::string who = name.string();
        if (s.subscriber(who) == nullptr) name.fail("no such subscriber");
        a.allowlist->push_back(who);
      }
    }
    c.attack = parse_attack(n.at("attack"), s);
    read_opt(n, "start_ms", c.start_ms);
    read_opt(n, "stop_ms", c.stop_ms);
    read_opt(n, "guard_ms", c.guard_ms);
    if (auto v = n.opt("assumed_exponent")) {
      double e = v->number();
      if (!(e >= 1.0)) v->fail("must be >= 1");
      c.assumed_exponent = e;
    }
    try {
      attack::validate(c, s.topology);
    } catch (const InvalidValue& e) {
      n.fail(e.what());
    }
    s.attacker = a;
  } else {
    n.at("type").fail("expected semi_passive, passive or rogue_enb");
  }
}

void parse_background(const Node& n, Scenario& s)
{
  n.allow({"subscribers_per_cell", "lambda_per_window", "window_ms", "cells", "windows"});
  auto& b = s.background;
  read_opt(n, "subscribers_per_cell", b.subscribers_per_cell);
  read_opt(n, "lambda_per_window", b.lambda_per_window);
  read_opt(n, "window_ms", b.window_ms);
  if (b.lambda_per_window < 0.0) n.at("lambda_per_window").fail("must be non-negative");
  if (b.window_ms < 1) n.at("window_ms").fail("must be positive");
  if (b.lambda_per_window > 0.0 && b.subscribers_per_cell == 0) {
    n.at("subscribers_per_cell").fail("pages need a background population");
  }
  if (auto cells = n.opt("cells")) {
    for (const auto& c : cells->items()) {
      auto id = static_cast<std::uint32_t>(c.id(7));
      const auto* site = s.topology.find(id);
      if (site == nullptr || site->identity.rat != Rat::lte) c.fail("no such LTE cell");
      b.cells.push_back(id);
    }
  }
  if (auto windows = n.opt("windows")) {
    for (const auto& w : windows->items()) {
      auto bounds = w.items();
      if (bounds.size() != 2) w.fail("expected [t0, t1]");
      TimeMs t0 = bounds[0].duration();
      TimeMs t1 = bounds[1].duration();
      if (t1 <= t0) w.fail("window must end after it starts");
      b.windows.emplace_back(t0, t1);
    }
  }
}

void parse_countermeasures(const Node& n, Countermeasures& c)
{
  n.allow({"guti_fresh_on_tau", "reports_require_security", "t3245_minutes", "echo_network_capabilities"});
  read_opt(n, "guti_fresh_on_tau", c.guti_fresh_on_tau);
  read_opt(n, "reports_require_security", c.reports_require_security);
  if (auto v = n.opt("t3245_minutes")) {
    if (!v->raw().is_null()) {
      double minutes = v->number();
      if (!(minutes > 0.0)) v->fail("must be positive");
      c.t3245_minutes = minutes;
    }
  }
  read_opt(n, "echo_network_capabilities", c.echo_network_capabilities);
}

void apply_countermeasures(Scenario& s)
{
  const auto& c = s.countermeasures;
  if (c.guti_fresh_on_tau) s.network.mme.policy = core::FreshOnTau{};
  if (c.echo_network_capabilities) s.network.mme.echo_network_capabilities = true;
  for (auto& sub : s.subscribers) {
    if (c.reports_require_security) {
      sub.profile.sends_meas_report_without_security = false;
      sub.profile.sends_rlf_report_without_security = false;
    }
    if (c.t3245_minutes) {
      sub.profile.t3245_enabled = true;
      sub.profile.t3245_ms = static_cast<TimeMs>(std::llround(*c.t3245_minutes * kMinute));
    }
  }
}

}  // namespace

radio::Rng actor_stream(std::uint64_t seed, std::string_view actor)
{
  return radio::Rng(splitmix64(seed ^ fnv1a(actor)));
}

std::string_view to_string(EventKind kind)
{
  switch (kind) {
    case EventKind::reboot:
      return "reboot";
    case EventKind::reinsert_usim:
      return "reinsert_usim";
    case EventKind::flight_mode_toggle:
      return "flight_mode_toggle";
    case EventKind::move_new_ta:
      return "move_new_ta";
    case EventKind::move_to:
      return "move_to";
    case EventKind::power_off:
      return "power_off";
    case EventKind::power_on:
      return "power_on";
    case EventKind::voice_call_in:
      return "voice_call_in";
    case EventKind::voice_call_out:
      return "voice_call_out";
    case EventKind::sms_in:
      return "sms_in";
    case EventKind::sms_out:
      return "sms_out";
    case EventKind::push_in:
      return "push_in";
    case EventKind::emergency_call:
      return "emergency_call";
    case EventKind::network_purge_guti:
      return "network_purge_guti";
  }
  return "reboot";
}

EventKind event_kind_from_string(std::string_view text)
{
  for (int i = 0; i <= static_cast<int>(EventKind::network_purge_guti); ++i) {
    auto k = static_cast<EventKind>(i);
    if (to_string(k) == text) return k;
  }
  throw InvalidValue("unknown event kind '" + std::string(text) + "'");
}

const SubscriberSpec* Scenario::subscriber(std::string_view name) const
{
  for (const auto& s : subscribers) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

Scenario load_scenario(const json& doc)
{
  Node root(doc, "");
  if (!doc.is_object()) throw ValidationError("document", "expected a JSON object");
  root.allow({"topology", "subscribers", "network", "attacker", "countermeasures", "background", "seed", "duration_ms"});

  Scenario s;
  Node seed = root.at("seed");
  if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<std::int64_t>() >= 0)) {
    seed.fail("expected a non-negative integer");
  }
  s.seed = doc["seed"].get<std::uint64_t>();
  s.duration_ms = root.at("duration_ms").duration();
  if (s.duration_ms <= 0) root.at("duration_ms").fail("must be positive");

  parse_topology(root.at("topology"), s);
  if (auto n = root.opt("network")) parse_network(*n, s.network);

  auto box = bounding_box(s.topology);
  std::set<std::string> names;
  std::set<std::string> socials;
  std::set<Imsi> imsis;
  for (const auto& n : root.at("subscribers").items()) {
    SubscriberSpec sub = parse_subscriber(n, s);
    if (!names.insert(sub.name).second) n.at("name").fail("duplicate subscriber name");
    if (!socials.insert(sub.social_id).second) n.at("social_id").fail("duplicate social id");
    if (!imsis.insert(sub.imsi).second) n.at("imsi").fail("duplicate IMSI");
    if (!sub.home) {
      radio::Rng rng = actor_stream(s.seed, "placement." + sub.name);
      std::uniform_real_distribution<double> ux(box.first.x, box.second.x);
      std::uniform_real_distribution<double> uy(box.first.y, box.second.y);
      double x = ux(rng);
      sub.home = Position{x, uy(rng)};
    }
    for (std::size_t i = 0; i < sub.events.size(); ++i) {
      if (sub.events[i].at_ms > s.duration_ms) {
        n.at("events").items()[i].at("at_ms").fail("after the end of the run");
      }
    }
    s.subscribers.push_back(std::move(sub));
  }

  if (auto n = root.opt("background")) parse_background(*n, s);
  if (auto n = root.opt("attacker")) {
    if (!n->raw().is_null()) parse_attacker(*n, s);
  }
  if (auto n = root.opt("countermeasures")) parse_countermeasures(*n, s.countermeasures);
  apply_countermeasures(s);
  return s;
}

Scenario load_scenario_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw ValidationError("scenario", "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("scenario", std::string("not valid JSON: ") + e.what());
  }
  return load_scenario(doc);
}

}  // namespace ltesim::sim
