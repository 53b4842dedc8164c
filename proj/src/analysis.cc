#include "ltesim/analysis.h"

#include "ltesim/simulator.h"

#include <algorithm>
#include <cmath>

namespace ltesim::analysis {

namespace {

bool is_service_actor(const std::string& name)
{
  return name == "mme" || name == "sim" || name == "attacker";
}

bool starts_with(const std::string& s, std::string_view prefix)
{
  return s.size() >= prefix.size() && std::string_view(s).substr(0, prefix.size()) == prefix;
}

/// NAS content of an uplink: the piggybacked message or the bare NAS body.
const MessageBody* nas_kind_holder(const TraceRecord& r, MessageBody& scratch)
{
  if (const auto* c = get_if<RrcConnectionSetupComplete>(r.message)) {
    scratch = to_body(c->nas);
    return &scratch;
  }
  return &r.message.body;
}

bool carries_nas(const TraceRecord& r)
{
  if (get_if<RrcConnectionSetupComplete>(r.message)) return true;
  return std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        return std::is_same_v<T, AttachRequest> || std::is_same_v<T, AttachComplete> ||
               std::is_same_v<T, TauRequest> || std::is_same_v<T, ServiceRequest> ||
               std::is_same_v<T, IdentityResponse> || std::is_same_v<T, DetachRequest>;
      },
      r.message.body);
}

nlohmann::json position_json(const Position& p)
{
  return nlohmann::json::array({p.x, p.y});
}

}  // namespace

std::map<std::uint16_t, std::set<std::uint32_t>> observed_tracking_areas(std::span<const TraceRecord> trace)
{
  std::map<std::uint16_t, std::set<std::uint32_t>> out;
  for (const auto& r : trace) {
    if (!r.cell || r.cell->rat != Rat::lte || !starts_with(r.src, "enb.")) continue;
    out[r.cell->tac].insert(r.cell->cell_id);
  }
  return out;
}

PagingCheck check_paging(std::span<const TraceRecord> trace,
                         const std::map<std::uint16_t, std::set<std::uint32_t>>& tracking_areas)
{
  PagingCheck out;
  struct UeTrack {
    std::optional<Guti> guti;
    std::optional<CellIdentity> last_seen;
    std::optional<core::Service> awaiting;  // first page after a trigger
    TimeMs trigger_ms = 0;
  };
  std::map<std::string, UeTrack> ues;
  std::map<Guti, std::string> owner;

  auto verify = [&](const std::string& name, UeTrack& ue, TimeMs at, const std::set<std::uint32_t>& cells) {
    ++out.page_sets_checked;
    if (!ue.last_seen) return;
    std::set<std::uint32_t> single{ue.last_seen->cell_id};
    std::set<std::uint32_t> area;
    if (auto it = tracking_areas.find(ue.last_seen->tac); it != tracking_areas.end()) area = it->second;
    if (ue.awaiting) {
      ++out.triggers_checked;
      const auto& expected = *ue.awaiting == core::Service::volte ? area : single;
      if (cells != expected) {
        out.violations.push_back({at, name,
                                  std::string("first page for ") + std::string(core::to_string(*ue.awaiting)) +
                                      " covered " + std::to_string(cells.size()) + " cells, expected " +
                                      std::to_string(expected.size())});
      }
      ue.awaiting.reset();
      return;
    }
    if (cells != single && cells != area) {
      out.violations.push_back({at, name, "page set is neither the last cell nor the tracking area"});
    }
  };

  std::size_t i = 0;
  while (i < trace.size()) {
    const TraceRecord& r = trace[i];
    // Pages of one dispatch share a timestamp.
    if (get_if<RrcPaging>(r.message) && starts_with(r.src, "enb.")) {
      std::map<std::string, std::set<std::uint32_t>> sets;
      std::size_t j = i;
      for (; j < trace.size() && trace[j].timestamp_ms == r.timestamp_ms; ++j) {
        const auto* p = get_if<RrcPaging>(trace[j].message);
        if (p == nullptr || !starts_with(trace[j].src, "enb.") || !trace[j].cell) break;
        for (const auto& id : p->records) {
          const auto* g = std::get_if<Guti>(&id);
          if (g == nullptr) continue;
          if (auto o = owner.find(*g); o != owner.end()) sets[o->second].insert(trace[j].cell->cell_id);
        }
      }
      for (const auto& [name, cells] : sets) verify(name, ues[name], r.timestamp_ms, cells);
      i = j;
      continue;
    }
    if (r.direction == Direction::downlink && !is_service_actor(r.dst) && r.dst != "bcast") {
      std::optional<Guti> g;
      if (const auto* a = get_if<AttachAccept>(r.message)) g = a->guti;
      if (const auto* t = get_if<TauAccept>(r.message); t != nullptr && t->guti) g = t->guti;
      if (const auto* c = get_if<GutiReallocationCommand>(r.message)) g = c->guti;
      if (g && !starts_with(r.dst, "rogue.")) {
        ues[r.dst].guti = *g;
        owner[*g] = r.dst;
      }
    }
    if (r.direction == Direction::uplink && r.cell && !starts_with(r.src, "rogue.")) {
      if (starts_with(r.dst, "rogue.")) {
        ues[r.src].last_seen.reset();
      } else if (carries_nas(r)) {
        ues[r.src].last_seen = *r.cell;
      }
    }
    if (const auto* t = get_if<AppTrigger>(r.message); t != nullptr && t->delivered && r.src == "attacker") {
      auto& ue = ues[r.dst];
      ue.awaiting = attack::trigger_semantics(t->trigger, 0).service;
      ue.trigger_ms = r.timestamp_ms;
    }
    ++i;
  }
  return out;
}

RunMetrics report(std::span<const TraceRecord> trace)
{
  RunMetrics m;
  struct Barring {
    bool barred = false;
    bool lte_barred = false;
    std::optional<std::size_t> open;
  };
  std::map<std::string, Barring> bars;
  std::vector<LinkResult> pending_links;
  std::optional<CellLocated> located;
  int triggers = 0;
  std::vector<std::map<std::string, Truth>> truth_groups;
  TimeMs truth_group_ms = -1;
  std::vector<PassiveLink> passive;

  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceRecord& r = trace[i];
    m.end_ms = r.timestamp_ms;
    const MessageBody& body = r.message.body;

    if (r.direction == Direction::local) {
      const std::string& subject = is_service_actor(r.src) ? r.dst : r.src;
      if (const auto* s = std::get_if<UeStatus>(&body)) {
        UeMetrics& ue = m.ues[subject];
        Barring& b = bars[subject];
        bool denial = s->reason == "cause7" || s->reason == "cause8";
        if (denial && !b.open) {
          ue.denials.push_back({r.timestamp_ms, r.timestamp_ms, s->reason == "cause7" ? 7 : 8, true});
          b.open = ue.denials.size() - 1;
        }
        if (denial) {
          b.barred = true;
          b.lte_barred = true;
        }
        if (b.open && !denial && s->emm == EmmState::registered && s->camped == Rat::lte) {
          auto& d = ue.denials[*b.open];
          d.end_ms = r.timestamp_ms;
          d.open = false;
          b.open.reset();
        }
        ue.final_status = *s;
        ue.final_status_ms = r.timestamp_ms;
      } else if (const auto* v = std::get_if<VoiceCall>(&body)) {
        UeMetrics& ue = m.ues[subject];
        if (v->direction == CallDirection::mo) {
          (v->accepted ? ue.voice_mo_ok : ue.voice_mo_failed)++;
        } else {
          (v->accepted ? ue.voice_mt_ok : ue.voice_mt_failed)++;
        }
      } else if (std::holds_alternative<SmsDelivered>(body)) {
        m.ues[subject].sms_delivered++;
      } else if (const auto* n = std::get_if<Notification>(&body)) {
        if (n->what == "sms_sent") m.ues[subject].sms_sent++;
      } else if (const auto* e = std::get_if<EmergencyCall>(&body)) {
        (e->success ? m.ues[subject].emergency_ok : m.ues[subject].emergency_failed)++;
      } else if (std::holds_alternative<AttachAborted>(body)) {
        m.ues[subject].attach_aborts++;
      } else if (std::holds_alternative<ReportWithheld>(body)) {
        m.ues[subject].reports_withheld++;
        m.reports_withheld++;
      } else if (const auto* rc = std::get_if<Recovery>(&body)) {
        m.ues[subject].recoveries.push_back({r.timestamp_ms, rc->action, rc->effective});
        if (rc->effective) {
          bars[subject].barred = false;
          bars[subject].lte_barred = false;
        }
      } else if (std::holds_alternative<AppTrigger>(body)) {
        ++triggers;
      } else if (const auto* l = std::get_if<LinkResult>(&body)) {
        pending_links.push_back(*l);
      } else if (const auto* c = std::get_if<CellLocated>(&body)) {
        located = *c;
      } else if (const auto* pl = std::get_if<PassiveLink>(&body)) {
        passive.push_back(*pl);
      } else if (const auto* f = std::get_if<LocationFix>(&body)) {
        const Truth* truth = nullptr;
        if (i + 1 < trace.size()) truth = std::get_if<Truth>(&trace[i + 1].message.body);
        if (truth != nullptr) {
          locate::PositionFix fix{f->position, f->residual_m, f->method};
          auto rep = locate::localization_report(fix, truth->position);
          m.fixes.push_back({r.timestamp_ms, truth->subject, f->source, f->method, f->position, truth->position,
                             rep.error_m, rep.area_km2});
        }
      } else if (const auto* t = std::get_if<Truth>(&body)) {
        if (!pending_links.empty()) {
          CellOutcome o;
          o.at_ms = r.timestamp_ms;
          o.true_cell = t->cell_id;
          o.triggers_used = triggers;
          o.link_results = std::move(pending_links);
          pending_links.clear();
          if (located) {
            o.located_cell = located->cell_id;
            o.area_km2 = located->area_km2;
            o.success = located->cell_id == t->cell_id;
          }
          m.cell_outcome = std::move(o);
        }
        if (r.timestamp_ms != truth_group_ms) {
          truth_groups.emplace_back();
          truth_group_ms = r.timestamp_ms;
        }
        truth_groups.back()[t->subject] = *t;
      }
      continue;
    }

    if (r.direction == Direction::downlink) {
      if (starts_with(r.src, "rogue.") &&
          (std::holds_alternative<AttachReject>(body) || std::holds_alternative<TauReject>(body))) {
        ++m.rejects_sent;
      }
      std::optional<Guti> g;
      if (const auto* a = std::get_if<AttachAccept>(&body)) g = a->guti;
      if (const auto* ta = std::get_if<TauAccept>(&body); ta != nullptr && ta->guti) g = ta->guti;
      if (const auto* c = std::get_if<GutiReallocationCommand>(&body)) g = c->guti;
      if (g && !starts_with(r.dst, "rogue.") && r.dst != "bcast") {
        auto& list = m.ues[r.dst].gutis;
        if (std::find(list.begin(), list.end(), *g) == list.end()) list.push_back(*g);
      }
      continue;
    }

    // Uplink.
    if (starts_with(r.dst, "rogue.") &&
        (std::holds_alternative<MeasurementReport>(body) || std::holds_alternative<UeInformationResponse>(body))) {
      ++m.reports_captured;
    }
    auto bit = bars.find(r.src);
    if (bit != bars.end() && bit->second.lte_barred && r.cell && r.cell->rat == Rat::lte) {
      MessageBody scratch;
      const MessageBody* nas = nas_kind_holder(r, scratch);
      if (std::holds_alternative<AttachRequest>(*nas) || std::holds_alternative<TauRequest>(*nas)) {
        m.ues[r.src].lte_attempts_while_barred++;
      }
    }
  }

  for (auto& [name, ue] : m.ues) {
    for (auto& d : ue.denials) {
      if (d.open) d.end_ms = m.end_ms;
      ue.denied_ms += d.duration_ms();
    }
  }

  if (!passive.empty() && truth_groups.size() >= 2) {
    const auto& first = truth_groups.front();
    const auto& last = truth_groups.back();
    LinkingOutcome lo;
    for (const auto& link : passive) {
      for (const auto& [subject, t] : first) {
        if (!t.guti || !(*t.guti == link.earlier)) continue;
        ++lo.links;
        auto it = last.find(subject);
        if (it != last.end() && it->second.guti && *it->second.guti == link.linked) ++lo.correct;
      }
    }
    m.linking = lo;
  }

  m.paging = check_paging(trace, observed_tracking_areas(trace));
  return m;
}

nlohmann::json to_json(const RunMetrics& m)
{
  using nlohmann::json;
  json out;
  out["end_ms"] = m.end_ms;
  json ues = json::object();
  for (const auto& [name, ue] : m.ues) {
    json u;
    json denials = json::array();
    for (const auto& d : ue.denials) {
      denials.push_back({{"start_ms", d.start_ms}, {"end_ms", d.end_ms}, {"cause", d.cause}, {"open", d.open}});
    }
    u["denials"] = denials;
    u["denied_ms"] = ue.denied_ms;
    u["lte_attempts_while_barred"] = ue.lte_attempts_while_barred;
    u["voice"] = {{"mo_ok", ue.voice_mo_ok},
                  {"mo_failed", ue.voice_mo_failed},
                  {"mt_ok", ue.voice_mt_ok},
                  {"mt_failed", ue.voice_mt_failed}};
    u["sms"] = {{"delivered", ue.sms_delivered}, {"sent", ue.sms_sent}};
    u["emergency"] = {{"ok", ue.emergency_ok}, {"failed", ue.emergency_failed}};
    u["attach_aborts"] = ue.attach_aborts;
    u["reports_withheld"] = ue.reports_withheld;
    json rec = json::array();
    for (const auto& r : ue.recoveries) {
      rec.push_back({{"at_ms", r.at_ms}, {"action", to_string(r.action)}, {"effective", r.effective}});
    }
    u["recoveries"] = rec;
    json gutis = json::array();
    for (const auto& g : ue.gutis) gutis.push_back(g.to_string());
    u["gutis"] = gutis;
    if (ue.final_status) {
      u["final_status"] = {{"at_ms", ue.final_status_ms},
                           {"emm", to_string(ue.final_status->emm)},
                           {"camped_rat", to_string(ue.final_status->camped)},
                           {"usim_valid_lte", ue.final_status->usim_valid_lte},
                           {"usim_valid_any", ue.final_status->usim_valid_any}};
    }
    ues[name] = u;
  }
  out["ues"] = ues;
  if (m.cell_outcome) {
    const auto& o = *m.cell_outcome;
    json stages = json::array();
    for (const auto& l : o.link_results) {
      json c = json::array();
      for (const auto& g : l.candidates) c.push_back(g.to_string());
      stages.push_back({{"stage", l.stage}, {"cell", hex_string(l.cell_id, 7)}, {"trials", l.trials}, {"candidates", c}});
    }
    out["cell_location"] = {{"success", o.success},
                            {"located_cell", hex_string(o.located_cell, 7)},
                            {"true_cell", hex_string(o.true_cell, 7)},
                            {"triggers_used", o.triggers_used},
                            {"area_km2", o.area_km2},
                            {"link_results", stages}};
  }
  json fixes = json::array();
  for (const auto& f : m.fixes) {
    fixes.push_back({{"at_ms", f.at_ms},
                     {"subject", f.subject},
                     {"source", f.source},
                     {"method", f.method == FixMethod::gps ? "gps" : "trilateration"},
                     {"estimate", position_json(f.estimate)},
                     {"truth", position_json(f.truth)},
                     {"error_m", f.error_m},
                     {"area_km2", f.area_km2}});
  }
  out["fixes"] = fixes;
  out["reports_captured"] = m.reports_captured;
  out["reports_withheld"] = m.reports_withheld;
  out["rejects_sent"] = m.rejects_sent;
  if (m.linking) {
    out["linking"] = {{"links", m.linking->links}, {"correct", m.linking->correct}, {"accuracy", m.linking->accuracy()}};
  }
  json violations = json::array();
  for (const auto& v : m.paging.violations) {
    violations.push_back({{"at_ms", v.at_ms}, {"subject", v.subject}, {"detail", v.detail}});
  }
  out["paging"] = {{"triggers_checked", m.paging.triggers_checked},
                   {"page_sets_checked", m.paging.page_sets_checked},
                   {"violations", violations}};
  return out;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const attack::TriggerLog& log)
{
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : log.stages) {
    nlohmann::json cells = nlohmann::json::array();
    for (auto c : s.cells) cells.push_back(hex_string(c, 7));
    stages.push_back({{"name", s.name}, {"cells", cells}, {"triggers_ms", s.trigger_times}});
  }
  return {{"window_ms", log.window_ms}, {"stages", stages}};
}

attack::TriggerLog trigger_log_from_json(const nlohmann::json& doc)
{
  attack::TriggerLog log;
  try {
    log.window_ms = doc.at("window_ms").get<TimeMs>();
    if (log.window_ms <= 0) throw sim::ValidationError("window_ms", "must be positive");
    for (const auto& s : doc.at("stages")) {
      attack::StageLog stage;
      stage.name = s.at("name").get<std::string>();
      for (const auto& c : s.at("cells")) {
        stage.cells.push_back(static_cast<std::uint32_t>(parse_hex(c.get<std::string>(), 7)));
      }
      stage.trigger_times = s.at("triggers_ms").get<std::vector<TimeMs>>();
      log.stages.push_back(std::move(stage));
    }
  } catch (const nlohmann::json::exception& e) {
    throw sim::ValidationError("triggers", e.what());
  } catch (const sim::ValidationError&) {
    throw;
  } catch (const InvalidValue& e) {
    throw sim::ValidationError("triggers", e.what());
  }
  return log;
}

LinkReplay link(std::span<const TraceRecord> trace, const attack::TriggerLog& log)
{
  LinkReplay out;
  for (const auto& stage : log.stages) {
    auto results = attack::stage_results(trace, stage, log.window_ms);
    out.located_cell = stage.name == "cell" ? attack::unique_cell(results) : std::nullopt;
    out.results.insert(out.results.end(), results.begin(), results.end());
  }
  return out;
}

LinkReplay recorded_link(std::span<const TraceRecord> trace)
{
  LinkReplay out;
  for (const auto& r : trace) {
    if (r.src != "attacker") continue;
    if (const auto* l = get_if<LinkResult>(r.message)) out.results.push_back(*l);
    if (const auto* c = get_if<CellLocated>(r.message)) out.located_cell = c->cell_id;
  }
  return out;
}

std::vector<LocationFix> locate(std::span<const TraceRecord> trace, const sim::Scenario& scenario)
{
  const auto* active = std::get_if<sim::ActiveSpec>(&scenario.attacker);
  if (active == nullptr) throw sim::ValidationError("attacker", "scenario has no rogue eNodeB");
  auto rogue = attack::rogue_transmitters(active->config, scenario.topology);
  auto anchor = [&](std::uint32_t id) -> std::optional<radio::Transmitter> {
    if (const auto* site = scenario.topology.find(id)) return site->transmitter;
    for (const auto& tx : rogue) {
      if (tx.cell.cell_id == id) return tx;
    }
    return std::nullopt;
  };
  auto is_rogue_cell = [&](const CellIdentity& c) {
    return std::any_of(rogue.begin(), rogue.end(), [&](const radio::Transmitter& tx) { return tx.cell == c; });
  };

  std::vector<LocationFix> out;
  for (const auto& r : trace) {
    if (r.cell && starts_with(r.src, "rogue.") && !is_rogue_cell(*r.cell) && r.direction != Direction::uplink) {
      throw sim::ValidationError("trace", "rogue cell " + r.cell->to_string() + " is not in the scenario");
    }
    if (r.cell && starts_with(r.src, "enb.") && scenario.topology.find(r.cell->cell_id) == nullptr) {
      throw sim::ValidationError("trace", "cell " + r.cell->to_string() + " is not in the scenario");
    }
    if (r.direction != Direction::uplink || !starts_with(r.dst, "rogue.")) continue;
    std::optional<locate::PositionFix> fix;
    std::string source;
    if (const auto* mr = get_if<MeasurementReport>(r.message)) {
      fix = attack::fix_from_report(mr->measurements, mr->gps, anchor, scenario.radio.model,
                                    active->config.assumed_exponent);
      source = "measurement";
    } else if (const auto* ui = get_if<UeInformationResponse>(r.message)) {
      fix = attack::fix_from_report(ui->rlf_report.neighbor_measurements, ui->rlf_report.gps, anchor,
                                    scenario.radio.model, active->config.assumed_exponent);
      source = "rlf";
    }
    if (fix) out.push_back(LocationFix{fix->position, fix->residual_m, fix->method, source});
  }
  return out;
}

std::vector<LocationFix> recorded_fixes(std::span<const TraceRecord> trace)
{
  std::vector<LocationFix> out;
  for (const auto& r : trace) {
    if (const auto* f = get_if<LocationFix>(r.message)) out.push_back(*f);
  }
  return out;
}

}  // namespace ltesim::analysis
