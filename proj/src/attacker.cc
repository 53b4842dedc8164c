#include "ltesim/attacker.h"

#include <algorithm>

namespace ltesim::attack {

namespace {

template <typename T, typename Variant>
struct is_alternative;

template <typename T, typename... Ts>
struct is_alternative<T, std::variant<Ts...>> : std::bool_constant<(std::is_same_v<T, Ts> || ...)> {
};

std::optional<NasBody> as_nas(const MessageBody& body)
{
  return std::visit(
      [](const auto& m) -> std::optional<NasBody> {
        using T = std::decay_t<decltype(m)>;
        if constexpr (is_alternative<T, NasBody>::value) {
          return NasBody(m);
        } else {
          return std::nullopt;
        }
      },
      body);
}

}  // namespace

std::set<Guti> SnifferLog::gutis() const
{
  std::set<Guti> out;
  for (const auto& o : observations) {
    if (const auto* g = std::get_if<Guti>(&o.identity)) out.insert(*g);
  }
  return out;
}

SnifferLog sniff(std::span<const TraceRecord> trace, std::uint32_t cell_id, TimeMs t0, TimeMs t1)
{
  SnifferLog log;
  log.cell_id = cell_id;
  log.t0 = t0;
  log.t1 = t1;
  auto it = std::lower_bound(trace.begin(), trace.end(), t0,
                             [](const TraceRecord& r, TimeMs t) { return r.timestamp_ms < t; });
  for (; it != trace.end() && it->timestamp_ms <= t1; ++it) {
    if (it->direction != Direction::downlink || !it->cell || it->cell->cell_id != cell_id) continue;
    const auto* p = get_if<RrcPaging>(it->message);
    if (p == nullptr) continue;
    for (const auto& id : p->records) log.observations.push_back({it->timestamp_ms, id});
  }
  return log;
}

LinkOutcome intersect_link(std::span<const SnifferLog> trials)
{
  LinkOutcome out;
  bool first = true;
  for (const auto& trial : trials) {
    std::set<Guti> seen = trial.gutis();
    if (first) {
      out.candidates = std::move(seen);
      first = false;
    } else {
      std::set<Guti> kept;
      std::set_intersection(out.candidates.begin(), out.candidates.end(), seen.begin(), seen.end(),
                            std::inserter(kept, kept.begin()));
      out.candidates = std::move(kept);
    }
    out.sizes_per_trial.push_back(out.candidates.size());
  }
  out.delivery_failure = out.candidates.empty();
  return out;
}

AttachRequest strip_capabilities(AttachRequest req)
{
  req.capabilities.voice_domain_preference = false;
  req.capabilities.sms_only = true;
  return req;
}

TriggerSemantics trigger_semantics(TriggerKind kind, TimeMs volte_hangup_ms)
{
  switch (kind) {
    case TriggerKind::volte_call:
      return {core::Service::volte, volte_hangup_ms <= 3 * kSecond};
    case TriggerKind::facebook_other_message:
    case TriggerKind::whatsapp_typing:
      return {core::Service::ip_push, true};
    case TriggerKind::silent_sms:
      return {core::Service::sms, true};
  }
  return {};
}

bool trigger_possible(TriggerKind kind, const AppFacts& facts)
{
  switch (kind) {
    case TriggerKind::volte_call:
    case TriggerKind::silent_sms:
      return true;
    case TriggerKind::facebook_other_message:
      return facts.apps.count("facebook") != 0;
    case TriggerKind::whatsapp_typing:
      return facts.apps.count("whatsapp") != 0 && facts.whatsapp_visible_to_attacker;
  }
  return false;
}

std::vector<LinkResult> stage_results(std::span<const TraceRecord> trace, const StageLog& stage, TimeMs window_ms)
{
  std::vector<LinkResult> out;
  for (auto cell : stage.cells) {
    std::vector<SnifferLog> logs;
    for (auto t : stage.trigger_times) logs.push_back(sniff(trace, cell, t, t + window_ms));
    LinkOutcome o = intersect_link(logs);
    out.push_back(LinkResult{stage.name, cell, static_cast<int>(logs.size()),
                             std::vector<Guti>(o.candidates.begin(), o.candidates.end())});
  }
  return out;
}

std::optional<std::uint32_t> unique_cell(const std::vector<LinkResult>& results)
{
  const LinkResult* hit = nullptr;
  for (const auto& r : results) {
    if (r.candidates.empty()) continue;
    if (hit != nullptr) return std::nullopt;
    hit = &r;
  }
  if (hit == nullptr || hit->candidates.size() != 1) return std::nullopt;
  return hit->cell_id;
}

SemiPassiveAttacker::SemiPassiveAttacker(SemiPassiveConfig config, const core::CellTopology& topology) :
  config_(std::move(config)), topology_(topology)
{
  log_.window_ms = config_.window_ms;
}

void SemiPassiveAttacker::start(SemiPassiveEnvironment& env)
{
  env_ = &env;
  env_->schedule(config_.start_ms, [this] {
    const auto& tas = topology_.tracking_areas();
    if (tas.size() == 1) {
      const auto& cells = tas.begin()->second;
      begin_stage("cell", std::vector<std::uint32_t>(cells.begin(), cells.end()), config_.cell_trigger);
      return;
    }
    std::vector<std::uint32_t> probes;
    for (const auto& [tac, cells] : tas) probes.push_back(*cells.begin());
    begin_stage("ta", probes, config_.ta_trigger);
  });
}

void SemiPassiveAttacker::begin_stage(std::string name, std::vector<std::uint32_t> cells, TriggerKind kind)
{
  log_.stages.push_back(StageLog{std::move(name), std::move(cells), {}});
  stage_trigger_ = kind;
  stage_triggers_ = 0;
  fire();
}

void SemiPassiveAttacker::fire()
{
  TimeMs t = env_->now();
  log_.stages.back().trigger_times.push_back(t);
  ++stage_triggers_;
  ++triggers_used_;
  env_->fire_trigger(stage_trigger_, config_.victim_social_id);
  // One past the window, so every record stamped inside it is already traced.
  env_->schedule(t + config_.window_ms + 1, [this] { evaluate(); });
}

void SemiPassiveAttacker::evaluate()
{
  const StageLog& stage = log_.stages.back();
  auto results = stage_results(env_->trace(), stage, config_.window_ms);
  auto verdict = unique_cell(results);
  bool all_empty = std::all_of(results.begin(), results.end(), [](const LinkResult& r) { return r.candidates.empty(); });
  bool exhausted = stage_triggers_ >= config_.max_triggers_per_stage || triggers_used_ >= config_.max_triggers_total;

  if (!verdict && !all_empty && !exhausted) {
    env_->schedule(stage.trigger_times.back() + config_.trigger_interval_ms, [this] { fire(); });
    return;
  }
  for (auto& r : results) env_->note(r);
  if (!verdict) {
    conclude(std::nullopt);
    return;
  }
  if (stage.name == "ta") {
    std::uint16_t tac = topology_.at(*verdict).identity.tac;
    const auto& cells = topology_.tracking_areas().at(tac);
    std::vector<std::uint32_t> ids(cells.begin(), cells.end());
    env_->schedule(stage.trigger_times.back() + config_.trigger_interval_ms,
                   [this, ids] { begin_stage("cell", ids, config_.cell_trigger); });
    return;
  }
  conclude(verdict);
}

void SemiPassiveAttacker::conclude(std::optional<std::uint32_t> cell)
{
  finished_ = true;
  located_ = cell;
  if (cell) {
    const auto& site = topology_.at(*cell);
    env_->note(CellLocated{*cell, site.identity.tac, core::area_km2(site.geometry), triggers_used_});
  }
  env_->record_truth();
}

std::vector<PassiveLink> passive_link(std::span<const TraceRecord> trace, const PassiveConfig& config,
                                      radio::Rng& rng)
{
  std::vector<PassiveLink> out;
  if (config.windows.size() < 2) return out;
  const auto& w1 = config.windows.front();
  const auto& w2 = config.windows.back();
  auto first = sniff(trace, config.cell_id, w1.first, w1.second).gutis();
  auto last_set = sniff(trace, config.cell_id, w2.first, w2.second).gutis();
  std::vector<Guti> last(last_set.begin(), last_set.end());
  for (const auto& g : first) {
    if (last_set.count(g) != 0) {
      out.push_back(PassiveLink{g, g, false});
    } else if (!last.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, last.size() - 1);
      out.push_back(PassiveLink{g, last[pick(rng)], true});
    }
  }
  return out;
}

std::string_view attack_name(const AttackKind& kind)
{
  switch (kind.index()) {
    case 0:
      return "l3_meas_report";
    case 1:
      return "l3_rlf_report";
    case 2:
      return "d1_deny_lte";
    case 3:
      return "d2_deny_all";
    default:
      return "d3_capability_strip";
  }
}

void validate(const RogueEnbConfig& config, const core::CellTopology& topology)
{
  if (topology.find(config.host_cell_id) == nullptr) {
    throw InvalidValue("attacker.host_cell: no cell " + hex_string(config.host_cell_id, 7));
  }
  if (topology.has_tac(config.tac)) {
    throw InvalidValue("attacker.tac: " + hex_string(config.tac, 4) + " is a real tracking area");
  }
  if (config.priority > 7 || config.priority <= topology.max_priority()) {
    throw InvalidValue("attacker.priority: must exceed every legitimate priority and be at most 7");
  }
  bool rlf = std::holds_alternative<L3RlfReport>(config.attack);
  if (rlf && config.transmitters.size() != 2) {
    throw InvalidValue("attacker.transmitters: RLF extraction needs exactly two");
  }
  if (config.transmitters.empty()) {
    throw InvalidValue("attacker.transmitters: at least one is required");
  }
  for (std::size_t i = 0; i < config.transmitters.size(); ++i) {
    if (topology.find(config.cell_id + static_cast<std::uint32_t>(i)) != nullptr) {
      throw InvalidValue("attacker.cell_id: collides with a real cell");
    }
  }
  if (const auto* m = std::get_if<L3MeasReport>(&config.attack); m != nullptr && m->requested_cells.empty()) {
    throw InvalidValue("attacker.requested_cells: empty");
  }
  if (config.stop_ms != 0 && config.stop_ms <= config.start_ms) {
    throw InvalidValue("attacker.stop_ms: must follow start_ms");
  }
}

std::vector<CellIdentity> rogue_cells(const RogueEnbConfig& config, const core::CellTopology& topology)
{
  const CellIdentity& host = topology.at(config.host_cell_id).identity;
  std::vector<CellIdentity> out;
  for (std::size_t i = 0; i < config.transmitters.size(); ++i) {
    CellIdentity c;
    c.mcc = host.mcc;
    c.mnc = host.mnc;
    c.tac = config.tac;
    c.cell_id = config.cell_id + static_cast<std::uint32_t>(i);
    c.enodeb_id = c.cell_id & 0xfffff;
    c.frequency_mhz = config.frequency_mhz;
    c.reselection_priority = config.priority;
    c.rat = Rat::lte;
    c.validate();
    out.push_back(c);
  }
  return out;
}

RogueEnb::RogueEnb(RogueEnbConfig config, std::vector<CellIdentity> cells) :
  config_(std::move(config)), cells_(std::move(cells))
{
}

void RogueEnb::start(RogueEnvironment& env)
{
  env_ = &env;
  active_ = true;
  bool rlf = std::holds_alternative<L3RlfReport>(config_.attack);
  for (std::size_t i = 0; i < cells_.size(); ++i) env_->set_transmitter(i, !rlf || i == 0);
}

void RogueEnb::stop()
{
  if (!active_) return;
  active_ = false;
  for (std::size_t i = 0; i < cells_.size(); ++i) env_->set_transmitter(i, false);
}

void RogueEnb::send(core::LinkId ue, MessageBody body, bool protected_nas)
{
  env_->send(sessions_.at(ue).cell, ue, make_message(std::move(body), protected_nas));
}

bool RogueEnb::allowed(const NasBody& nas) const
{
  if (!config_.allowlist) return true;
  std::optional<MobileIdentity> id;
  if (const auto* a = std::get_if<AttachRequest>(&nas)) {
    id = a->identity;
  } else if (const auto* t = std::get_if<TauRequest>(&nas)) {
    id = t->guti;
  } else if (const auto* s = std::get_if<ServiceRequest>(&nas)) {
    id = s->guti;
  }
  return !id || config_.allowlist->count(*id) != 0;
}

void RogueEnb::reject(core::LinkId ue, const NasBody& request, EmmCause cause)
{
  if (std::holds_alternative<AttachRequest>(request)) {
    send(ue, AttachReject{cause});
  } else if (const auto* s = std::get_if<ServiceRequest>(&request)) {
    send(ue, ServiceReject{s->purpose, cause});
  } else {
    send(ue, TauReject{cause});
  }
  send(ue, RrcConnectionRelease{});
  yield_.rejects.emplace_back(ue, cause);
  sessions_.at(ue).phase = Phase::done;
}

void RogueEnb::dismiss(core::LinkId ue)
{
  reject(ue, sessions_.at(ue).request, EmmCause{EmmCause::kTrackingAreaNotAllowed});
}

void RogueEnb::arm_guard(core::LinkId ue)
{
  Session& s = sessions_.at(ue);
  std::uint64_t gen = ++s.generation;
  env_->schedule(env_->now() + config_.guard_ms, [this, ue, gen] {
    auto it = sessions_.find(ue);
    if (it == sessions_.end() || it->second.generation != gen) return;
    if (it->second.phase == Phase::awaiting_measurement || it->second.phase == Phase::awaiting_rlf_report) {
      dismiss(ue);
    }
  });
}

void RogueEnb::on_uplink(core::LinkId ue, const CellIdentity& cell, const ProtocolMessage& msg)
{
  if (!active_) return;
  if (get_if<RrcConnectionRequest>(msg)) {
    Session& s = sessions_[ue];
    s.cell = cell;
    if (s.phase == Phase::done || s.phase == Phase::awaiting_measurement || s.phase == Phase::awaiting_rlf_report) {
      s.phase = Phase::fresh;
    }
    send(ue, RrcConnectionSetup{});
    return;
  }
  auto it = sessions_.find(ue);
  if (it == sessions_.end()) return;
  it->second.cell = cell;
  if (const auto* c = get_if<RrcConnectionSetupComplete>(msg)) {
    on_nas(ue, cell, c->nas);
  } else if (const auto* m = get_if<MeasurementReport>(msg)) {
    if (it->second.phase != Phase::awaiting_measurement) return;
    it->second.phase = Phase::done;
    yield_.measurement_reports.push_back(*m);
    locate_from(ue, m->measurements, m->gps, "measurement");
    dismiss(ue);
  } else if (const auto* r = get_if<UeInformationResponse>(msg)) {
    if (it->second.phase != Phase::awaiting_rlf_report) return;
    it->second.phase = Phase::done;
    yield_.rlf_reports.push_back(r->rlf_report);
    locate_from(ue, r->rlf_report.neighbor_measurements, r->rlf_report.gps, "rlf");
    dismiss(ue);
  } else if (auto nas = as_nas(msg.body)) {
    on_nas(ue, cell, *nas);
  }
}

void RogueEnb::on_nas(core::LinkId ue, const CellIdentity& cell, const NasBody& nas)
{
  Session& s = sessions_.at(ue);
  if (const auto* sr = std::get_if<ServiceRequest>(&nas); sr != nullptr && sr->purpose == ServicePurpose::emergency) {
    send(ue, RrcConnectionRelease{});
    return;
  }
  if (s.phase == Phase::relaying) {
    env_->relay_uplink(ue, nas);
    return;
  }
  bool initial = std::holds_alternative<AttachRequest>(nas) || std::holds_alternative<TauRequest>(nas) ||
                 std::holds_alternative<ServiceRequest>(nas);
  if (!initial) return;
  s.request = nas;
  if (!allowed(nas)) {
    reject(ue, nas, EmmCause{EmmCause::kTrackingAreaNotAllowed});
    return;
  }

  if (std::holds_alternative<DenyLte>(config_.attack)) {
    reject(ue, nas, EmmCause{EmmCause::kLteNotAllowed});
  } else if (std::holds_alternative<DenyAll>(config_.attack)) {
    reject(ue, nas, EmmCause{EmmCause::kAllServicesNotAllowed});
  } else if (std::holds_alternative<CapabilityStrip>(config_.attack)) {
    s.phase = Phase::relaying;
    if (const auto* a = std::get_if<AttachRequest>(&nas)) {
      env_->relay_uplink(ue, strip_capabilities(*a));
    } else {
      env_->relay_uplink(ue, nas);
    }
  } else if (const auto* meas = std::get_if<L3MeasReport>(&config_.attack)) {
    RrcConnectionReconfiguration reconf;
    for (auto id : meas->requested_cells) {
      if (auto a = env_->anchor(id)) reconf.meas_targets.push_back(a->cell);
    }
    s.phase = Phase::awaiting_measurement;
    send(ue, reconf);
    arm_guard(ue);
  } else {
    const auto* tau = std::get_if<TauRequest>(&nas);
    if (tau != nullptr && tau->rlf_available) {
      s.phase = Phase::awaiting_rlf_report;
      send(ue, UeInformationRequest{});
      arm_guard(ue);
    } else if (s.phase == Phase::fresh && cell == cells_.front()) {
      // Drop the first cell under the victim to force a radio link failure.
      s.phase = Phase::awaiting_rlf_tau;
      env_->set_transmitter(0, false);
      env_->set_transmitter(1, true);
    } else {
      dismiss(ue);
    }
  }
}

void RogueEnb::on_relay_downlink(core::LinkId ue, const NasBody& nas)
{
  if (!active_ || sessions_.count(ue) == 0) return;
  send(ue, to_body(nas), true);
}

std::vector<radio::Transmitter> rogue_transmitters(const RogueEnbConfig& config, const core::CellTopology& topology)
{
  auto cells = rogue_cells(config, topology);
  std::vector<radio::Transmitter> out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    radio::Transmitter tx;
    tx.position = config.transmitters[i].position;
    tx.tx_power_dbm = config.transmitters[i].tx_power_dbm;
    tx.antenna_height_m = 1.5;
    tx.cell = cells[i];
    out.push_back(tx);
  }
  return out;
}

std::optional<locate::PositionFix> fix_from_report(const std::vector<CellMeasurement>& measurements,
                                                   const std::optional<Position>& gps, const AnchorLookup& anchor,
                                                   radio::PathLossModel model, std::optional<double> assumed_exponent)
{
  if (gps) return locate::gps_fix(*gps);
  if (auto* ld = std::get_if<radio::LogDistance>(&model); ld != nullptr && assumed_exponent) {
    ld->exponent_n = *assumed_exponent;
  }
  std::vector<locate::DistanceEstimate> estimates;
  for (const auto& m : measurements) {
    auto a = anchor(m.cell.cell_id);
    if (!a) continue;
    try {
      estimates.push_back(locate::estimate(m, *a, model));
    } catch (const radio::DomainError&) {
    }
  }
  try {
    return locate::trilaterate(estimates);
  } catch (const radio::DomainError&) {
    return std::nullopt;
  }
}

void RogueEnb::locate_from(core::LinkId ue, const std::vector<CellMeasurement>& measurements,
                           const std::optional<Position>& gps, const char* source)
{
  auto lookup = [this](std::uint32_t id) { return env_->anchor(id); };
  auto fix = fix_from_report(measurements, gps, lookup, env_->model(), config_.assumed_exponent);
  if (!fix) return;
  yield_.fixes.push_back(*fix);
  env_->note(LocationFix{fix->position, fix->residual_m, fix->method, source});
  env_->record_truth(ue);
}

}  // namespace ltesim::attack
