#include "ltesim/simulator.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <memory>
#include <set>
#include <type_traits>

namespace ltesim::sim {

namespace {

std::string trimmed_hex(std::uint32_t id)
{
  std::string out = hex_string(id, 7);
  auto nz = out.find_first_not_of('0');
  return nz == std::string::npos ? "0" : out.substr(nz);
}

/// Piecewise-linear waypoint loop.
class Mobility {
 public:
  explicit Mobility(const SubscriberSpec& spec) : home_(spec.home.value_or(Position{}))
  {
    const auto& path = spec.path;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const Waypoint& next = path[(i + 1) % path.size()];
      Leg leg{path[i].position, next.position, path[i].dwell_ms, 0.0};
      leg.travel_ms = distance(leg.from, leg.to) / next.speed_mps * 1000.0;
      cycle_ms_ += static_cast<double>(leg.dwell_ms) + leg.travel_ms;
      legs_.push_back(leg);
    }
  }

  Position at(TimeMs t) const
  {
    if (override_) return *override_;
    if (legs_.empty() || cycle_ms_ <= 0.0) return legs_.empty() ? home_ : legs_.front().from;
    double rem = std::fmod(static_cast<double>(t), cycle_ms_);
    for (const auto& leg : legs_) {
      if (rem < static_cast<double>(leg.dwell_ms)) return leg.from;
      rem -= static_cast<double>(leg.dwell_ms);
      if (rem < leg.travel_ms) {
        double f = rem / leg.travel_ms;
        return Position{leg.from.x + f * (leg.to.x - leg.from.x), leg.from.y + f * (leg.to.y - leg.from.y)};
      }
      rem -= leg.travel_ms;
    }
    return legs_.front().from;
  }

  void move_to(Position p) { override_ = p; }

 private:
  struct Leg {
    Position from;
    Position to;
    TimeMs dwell_ms;
    double travel_ms;
  };
  Position home_;
  std::vector<Leg> legs_;
  double cycle_ms_ = 0.0;
  std::optional<Position> override_;
};

template <typename T, typename V>
struct is_alternative;
template <typename T, typename... Ts>
struct is_alternative<T, std::variant<Ts...>> : std::disjunction<std::is_same<T, Ts>...> {};

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

struct PendingDelivery {
  core::Service service;
  ue::Delivery delivery;
};

class World;

class UeHost final : public ue::UeEnvironment {
 public:
  UeHost(World& world, std::size_t index, const SubscriberSpec& spec, radio::Rng rng);

  TimeMs now() const override;
  Position position() const override;
  std::vector<CellMeasurement> scan() override;
  std::optional<double> measure(const CellIdentity& cell) override;
  void send(const CellIdentity& via, ProtocolMessage msg) override;
  void start_timer(ue::Timer timer, TimeMs delay) override;
  void stop_timer(ue::Timer timer) override { ++timer_generation_[timer]; }
  void note(MessageBody event) override;

  World& world;
  std::size_t index;
  const SubscriberSpec& spec;
  radio::Rng rng;
  Mobility mobility;
  std::unique_ptr<ue::Ue> ue;
  std::map<ue::Timer, std::uint64_t> timer_generation_;
  std::deque<PendingDelivery> pending;
  std::uint64_t current_page = 0;
};

class SemiPassiveHost final : public attack::SemiPassiveEnvironment {
 public:
  SemiPassiveHost(World& world, std::size_t victim) : world_(world), victim_(victim) {}
  TimeMs now() const override;
  void schedule(TimeMs at, std::function<void()> fn) override;
  void fire_trigger(TriggerKind kind, const std::string& target) override;
  std::span<const TraceRecord> trace() const override;
  void note(MessageBody event) override;
  void record_truth() override;

 private:
  World& world_;
  std::size_t victim_;
};

class RogueHost final : public attack::RogueEnvironment {
 public:
  explicit RogueHost(World& world) : world_(world) {}
  TimeMs now() const override;
  void schedule(TimeMs at, std::function<void()> fn) override;
  void send(const CellIdentity& rogue_cell, core::LinkId ue, ProtocolMessage msg) override;
  void set_transmitter(std::size_t index, bool on) override;
  void relay_uplink(core::LinkId ue, const NasBody& nas) override;
  void note(MessageBody event) override;
  void record_truth(core::LinkId ue) override;
  std::optional<radio::Transmitter> anchor(std::uint32_t cell_id) const override;
  const radio::PathLossModel& model() const override;

 private:
  World& world_;
};

class World {
 public:
  explicit World(const Scenario& s);
  RunResult run();

  TimeMs now() const { return now_; }
  void schedule(TimeMs at, std::function<void()> fn);
  void record(std::optional<CellIdentity> cell, Direction dir, std::string src, std::string dst, ProtocolMessage msg);
  void note(std::string src, std::string dst, MessageBody body);

  std::vector<CellMeasurement> scan(const Position& p) const;
  std::optional<double> measure(const Position& p, const CellIdentity& cell, radio::Rng& rng) const;
  void uplink(std::size_t ue, const CellIdentity& via, ProtocolMessage msg);
  void record_truth(std::size_t ue);
  void fire_trigger(TriggerKind kind, const std::string& target);

  // Rogue side.
  void rogue_send(const CellIdentity& cell, std::size_t ue, ProtocolMessage msg);
  void set_rogue_transmitter(std::size_t index, bool on);
  void relay_uplink(std::size_t ue, const NasBody& nas);
  std::optional<radio::Transmitter> anchor(std::uint32_t cell_id) const;

  const Scenario& scenario;
  std::vector<TraceRecord> trace;

 private:
  struct Event {
    TimeMs t;
    std::uint64_t seq;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const { return std::tie(a.t, a.seq) > std::tie(b.t, b.seq); }
  };
  struct Connection {
    CellIdentity cell;
    bool relayed = false;
    std::uint64_t generation = 0;
  };

  void setup_subscriber(std::size_t i);
  void schedule_event(std::size_t i, const ScenarioEvent& e);
  void schedule_power_cycle(std::size_t i, TimeMs at);
  void schedule_push(std::size_t i, TimeMs at);
  void schedule_tick(TimeMs at);
  void schedule_sib(TimeMs at);
  void setup_background();
  void schedule_background(std::size_t cell_index);
  void setup_attacker();
  void start_rogue();

  void tick_all();
  void rebuild_transmitters();
  const radio::Transmitter* active_transmitter(const CellIdentity& cell) const;
  std::optional<std::size_t> rogue_index(const CellIdentity& cell) const;

  void ran_uplink(std::size_t ue, const CellIdentity& cell, const ProtocolMessage& msg);
  void mme_uplink(std::size_t ue, const NasBody& nas);
  void downlink(std::size_t ue, const NasBody& nas);
  void air_downlink(std::size_t ue, const CellIdentity& cell, MessageBody body, bool protect);
  void touch(std::size_t ue);
  void release(std::size_t ue);
  void deliver(std::size_t ue, const std::vector<core::Service>& services);

  void terminate(std::size_t ue, core::Service service, ue::Delivery delivery);
  void emit_paging(std::size_t ue, const core::PageDispatch& dispatch);
  void on_paging_timeout(std::size_t ue, std::uint64_t page_id);
  void abandon_pending(std::size_t ue);

  TimeMs now_ = 0;
  std::uint64_t seq_ = 0;
  std::vector<Event> queue_;

  core::Mme mme_;
  std::vector<radio::Transmitter> legit_tx_;
  std::vector<radio::Transmitter> active_tx_;
  std::vector<std::unique_ptr<UeHost>> ues_;
  std::map<core::LinkId, Connection> connections_;
  radio::Rng app_rng_;

  struct BackgroundCell {
    CellIdentity cell;
    std::vector<Guti> population;
    radio::Rng rng;
    double clock_ms = 0.0;
  };
  std::vector<BackgroundCell> background_;

  std::unique_ptr<SemiPassiveHost> semi_host_;
  std::unique_ptr<attack::SemiPassiveAttacker> semi_;
  std::unique_ptr<RogueHost> rogue_host_;
  std::unique_ptr<attack::RogueEnb> rogue_;
  std::vector<bool> rogue_on_;
  std::vector<radio::Transmitter> rogue_tx_;
};

// ---------------------------------------------------------------------------

UeHost::UeHost(World& w, std::size_t i, const SubscriberSpec& s, radio::Rng r) :
  world(w), index(i), spec(s), rng(r), mobility(s)
{
  ue = std::make_unique<ue::Ue>(s.name, s.imsi, s.profile, s.timers, *this);
}

TimeMs UeHost::now() const
{
  return world.now();
}

Position UeHost::position() const
{
  return mobility.at(world.now());
}

std::vector<CellMeasurement> UeHost::scan()
{
  return world.scan(position());
}

std::optional<double> UeHost::measure(const CellIdentity& cell)
{
  return world.measure(position(), cell, rng);
}

void UeHost::send(const CellIdentity& via, ProtocolMessage msg)
{
  world.uplink(index, via, std::move(msg));
}

void UeHost::start_timer(ue::Timer timer, TimeMs delay)
{
  std::uint64_t gen = ++timer_generation_[timer];
  world.schedule(world.now() + delay, [this, timer, gen] {
    if (timer_generation_[timer] == gen) ue->on_timer(timer);
  });
}

void UeHost::note(MessageBody event)
{
  world.note(spec.name, spec.name, std::move(event));
}

TimeMs SemiPassiveHost::now() const
{
  return world_.now();
}

void SemiPassiveHost::schedule(TimeMs at, std::function<void()> fn)
{
  world_.schedule(at, std::move(fn));
}

void SemiPassiveHost::fire_trigger(TriggerKind kind, const std::string& target)
{
  world_.fire_trigger(kind, target);
}

std::span<const TraceRecord> SemiPassiveHost::trace() const
{
  return world_.trace;
}

void SemiPassiveHost::note(MessageBody event)
{
  world_.note("attacker", "attacker", std::move(event));
}

void SemiPassiveHost::record_truth()
{
  world_.record_truth(victim_);
}

TimeMs RogueHost::now() const
{
  return world_.now();
}

void RogueHost::schedule(TimeMs at, std::function<void()> fn)
{
  world_.schedule(at, std::move(fn));
}

void RogueHost::send(const CellIdentity& rogue_cell, core::LinkId ue, ProtocolMessage msg)
{
  world_.rogue_send(rogue_cell, ue, std::move(msg));
}

void RogueHost::set_transmitter(std::size_t index, bool on)
{
  world_.set_rogue_transmitter(index, on);
}

void RogueHost::relay_uplink(core::LinkId ue, const NasBody& nas)
{
  world_.relay_uplink(ue, nas);
}

void RogueHost::note(MessageBody event)
{
  world_.note("attacker", "attacker", std::move(event));
}

void RogueHost::record_truth(core::LinkId ue)
{
  world_.record_truth(ue);
}

std::optional<radio::Transmitter> RogueHost::anchor(std::uint32_t cell_id) const
{
  return world_.anchor(cell_id);
}

const radio::PathLossModel& RogueHost::model() const
{
  return world_.scenario.radio.model;
}

// ---------------------------------------------------------------------------

World::World(const Scenario& s) :
  scenario(s),
  mme_(s.network.mme, s.topology, actor_stream(s.seed, "mme")),
  legit_tx_(s.topology.transmitters()),
  app_rng_(actor_stream(s.seed, "app"))
{
  for (std::size_t i = 0; i < s.subscribers.size(); ++i) {
    const auto& sub = s.subscribers[i];
    mme_.provision(core::Subscription{sub.imsi, sub.allowed_tacs});
    ues_.push_back(std::make_unique<UeHost>(*this, i, sub, actor_stream(s.seed, "ue." + sub.name)));
  }
  rebuild_transmitters();
}

void World::schedule(TimeMs at, std::function<void()> fn)
{
  if (at < now_) throw ContractViolation("event scheduled in the past");
  queue_.push_back(Event{at, seq_++, std::move(fn)});
  std::push_heap(queue_.begin(), queue_.end(), Later{});
}

void World::record(std::optional<CellIdentity> cell, Direction dir, std::string src, std::string dst,
                   ProtocolMessage msg)
{
  TraceRecord r;
  r.timestamp_ms = now_;
  r.cell = std::move(cell);
  r.direction = dir;
  r.src = std::move(src);
  r.dst = std::move(dst);
  r.message = std::move(msg);
  trace.push_back(std::move(r));
}

void World::note(std::string src, std::string dst, MessageBody body)
{
  record(std::nullopt, Direction::local, std::move(src), std::move(dst), make_message(std::move(body)));
}

void World::rebuild_transmitters()
{
  active_tx_ = legit_tx_;
  for (std::size_t i = 0; i < rogue_tx_.size(); ++i) {
    if (rogue_on_[i]) active_tx_.push_back(rogue_tx_[i]);
  }
}

const radio::Transmitter* World::active_transmitter(const CellIdentity& cell) const
{
  for (const auto& tx : active_tx_) {
    if (tx.cell == cell) return &tx;
  }
  return nullptr;
}

std::optional<std::size_t> World::rogue_index(const CellIdentity& cell) const
{
  for (std::size_t i = 0; i < rogue_tx_.size(); ++i) {
    if (rogue_tx_[i].cell == cell) return i;
  }
  return std::nullopt;
}

std::vector<CellMeasurement> World::scan(const Position& p) const
{
  return radio::visible_cells(p, active_tx_, scenario.radio.model, scenario.radio.floor_dbm);
}

std::optional<double> World::measure(const Position& p, const CellIdentity& cell, radio::Rng& rng) const
{
  const radio::Transmitter* tx = active_transmitter(cell);
  if (tx == nullptr) return std::nullopt;
  double d = std::max(distance(tx->position, p), 0.01);
  double level = tx->tx_power_dbm - radio::path_loss(scenario.radio.model, d, &rng);
  if (level < scenario.radio.floor_dbm) return std::nullopt;
  return level;
}

void World::tick_all()
{
  for (auto& host : ues_) host->ue->tick();
}

void World::record_truth(std::size_t i)
{
  const UeHost& host = *ues_.at(i);
  const ue::UeState& st = host.ue->state();
  Truth t;
  t.subject = host.spec.name;
  t.position = host.position();
  t.cell_id = st.serving_cell ? st.serving_cell->cell_id : 0;
  t.guti = st.guti;
  note("sim", host.spec.name, t);
}

// ---------------------------------------------------------------------------
// Radio access: uplink routing, the legitimate eNodeBs and the MME glue.

void World::uplink(std::size_t ue, const CellIdentity& via, ProtocolMessage msg)
{
  record(via, Direction::uplink, ues_[ue]->spec.name, rogue_index(via) ? rogue_actor(via) : enb_actor(via), msg);
  schedule(now_ + scenario.network.hop_ms, [this, ue, via, msg = std::move(msg)] {
    if (active_transmitter(via) == nullptr) return;
    if (rogue_index(via)) {
      if (rogue_) rogue_->on_uplink(ue, via, msg);
      return;
    }
    ran_uplink(ue, via, msg);
  });
}

void World::ran_uplink(std::size_t ue, const CellIdentity& cell, const ProtocolMessage& msg)
{
  if (get_if<RrcConnectionRequest>(msg)) {
    if (connections_.count(ue) != 0) {
      connections_.erase(ue);
      mme_.on_connection_released(ue);
    }
    connections_[ue] = Connection{cell, false, 0};
    air_downlink(ue, cell, RrcConnectionSetup{}, false);
    touch(ue);
    return;
  }
  auto it = connections_.find(ue);
  if (it == connections_.end() || it->second.relayed || !(it->second.cell == cell)) return;
  if (const auto* c = get_if<RrcConnectionSetupComplete>(msg)) {
    mme_uplink(ue, c->nas);
    return;
  }
  if (auto nas = as_nas(msg.body)) mme_uplink(ue, *nas);
}

void World::mme_uplink(std::size_t ue, const NasBody& nas)
{
  Connection& conn = connections_.at(ue);
  touch(ue);
  if (std::holds_alternative<DetachRequest>(nas)) ues_[ue]->pending.clear();
  core::MmeReply reply = mme_.handle_uplink(ue, nas, conn.cell, now_);
  bool release_after = std::holds_alternative<DetachRequest>(nas);
  for (const auto& d : reply.downlink) {
    downlink(ue, d);
    if (std::holds_alternative<AttachReject>(d) || std::holds_alternative<TauReject>(d) ||
        std::holds_alternative<ServiceReject>(d)) {
      release_after = true;
    }
  }
  deliver(ue, reply.deliver);
  if (release_after) release(ue);
}

void World::downlink(std::size_t ue, const NasBody& nas)
{
  const Connection& conn = connections_.at(ue);
  bool protect = !std::holds_alternative<IdentityRequest>(nas);
  if (!conn.relayed) {
    air_downlink(ue, conn.cell, to_body(nas), protect);
    return;
  }
  const auto& rogue_cell = rogue_->cells().front();
  record(conn.cell, Direction::downlink, enb_actor(conn.cell), rogue_actor(rogue_cell),
         make_message(to_body(nas), protect));
  schedule(now_ + scenario.network.hop_ms, [this, ue, nas] {
    if (rogue_) rogue_->on_relay_downlink(ue, nas);
  });
}

void World::air_downlink(std::size_t ue, const CellIdentity& cell, MessageBody body, bool protect)
{
  ProtocolMessage msg = make_message(std::move(body), protect);
  record(cell, Direction::downlink, enb_actor(cell), ues_[ue]->spec.name, msg);
  schedule(now_ + scenario.network.hop_ms, [this, ue, cell, msg = std::move(msg)] {
    ues_[ue]->ue->on_downlink(msg, cell);
  });
}

void World::touch(std::size_t ue)
{
  Connection& conn = connections_.at(ue);
  std::uint64_t gen = ++conn.generation;
  schedule(now_ + scenario.network.inactivity_ms, [this, ue, gen] {
    auto it = connections_.find(ue);
    if (it != connections_.end() && it->second.generation == gen) release(ue);
  });
}

void World::release(std::size_t ue)
{
  auto it = connections_.find(ue);
  if (it == connections_.end()) return;
  Connection conn = it->second;
  connections_.erase(it);
  mme_.on_connection_released(ue);
  if (!conn.relayed) {
    air_downlink(ue, conn.cell, RrcConnectionRelease{}, true);
    return;
  }
  // The rogue passes the network's release on over its own cell.
  const auto& serving = ues_[ue]->ue->state().serving_cell;
  if (serving && rogue_index(*serving)) rogue_send(*serving, ue, make_message(RrcConnectionRelease{}));
}

void World::deliver(std::size_t ue, const std::vector<core::Service>& services)
{
  UeHost& host = *ues_[ue];
  for (auto service : services) {
    auto it = std::find_if(host.pending.begin(), host.pending.end(),
                           [&](const PendingDelivery& p) { return p.service == service; });
    if (it == host.pending.end()) continue;
    ue::Delivery d = it->delivery;
    host.pending.erase(it);
    host.ue->deliver(d);
  }
}

// ---------------------------------------------------------------------------
// Terminating traffic and paging.

void World::terminate(std::size_t ue, core::Service service, ue::Delivery delivery)
{
  UeHost& host = *ues_[ue];
  const ue::UeState& st = host.ue->state();
  if (st.powered && st.usim_valid_any && (st.camped == Rat::utran || st.camped == Rat::gsm)) {
    // Legacy core: reaches the UE without LTE paging.
    host.ue->deliver(delivery);
    return;
  }
  core::TerminatingOutcome out = mme_.terminate(host.spec.imsi, service, now_);
  switch (out.kind) {
    case core::TerminatingOutcome::Kind::paged:
      host.pending.push_back({service, delivery});
      host.current_page = out.dispatch.page_id;
      emit_paging(ue, out.dispatch);
      break;
    case core::TerminatingOutcome::Kind::deliver_now:
      host.ue->deliver(delivery);
      break;
    case core::TerminatingOutcome::Kind::rejected:
    case core::TerminatingOutcome::Kind::unreachable:
      if (delivery == ue::Delivery::voice_ring) {
        note("mme", host.spec.name, VoiceCall{CallDirection::mt, false, out.cause});
      }
      break;
  }
}

void World::emit_paging(std::size_t ue, const core::PageDispatch& dispatch)
{
  for (const auto& e : dispatch.emissions) {
    ProtocolMessage msg = make_message(e.paging);
    record(e.cell, Direction::downlink, enb_actor(e.cell), "bcast", msg);
    schedule(now_ + scenario.network.hop_ms, [this, cell = e.cell, msg] {
      for (auto& host : ues_) host->ue->on_downlink(msg, cell);
    });
  }
  if (dispatch.timeout_at_ms) {
    std::uint64_t id = dispatch.page_id;
    schedule(*dispatch.timeout_at_ms, [this, ue, id] { on_paging_timeout(ue, id); });
  }
}

void World::on_paging_timeout(std::size_t ue, std::uint64_t page_id)
{
  UeHost& host = *ues_[ue];
  core::PageDispatch retry = mme_.on_paging_timeout(host.spec.imsi, page_id, now_);
  if (!retry.emissions.empty()) {
    emit_paging(ue, retry);
    return;
  }
  if (page_id == host.current_page) abandon_pending(ue);
}

void World::abandon_pending(std::size_t ue)
{
  UeHost& host = *ues_[ue];
  for (const auto& p : host.pending) {
    if (p.delivery == ue::Delivery::voice_ring) {
      note("mme", host.spec.name, VoiceCall{CallDirection::mt, false, EmmCause{}});
    }
  }
  host.pending.clear();
}

void World::fire_trigger(TriggerKind kind, const std::string& target)
{
  std::optional<std::size_t> victim;
  for (const auto& host : ues_) {
    if (host->spec.social_id == target) victim = host->index;
  }
  bool possible = victim && attack::trigger_possible(kind, ues_[*victim]->spec.apps);
  note("attacker", victim ? ues_[*victim]->spec.name : target, AppTrigger{kind, target, possible});
  if (!possible) return;
  TimeMs hangup = 0;
  if (const auto* sp = std::get_if<SemiPassiveSpec>(&scenario.attacker)) hangup = sp->config.volte_hangup_ms;
  attack::TriggerSemantics sem = attack::trigger_semantics(kind, hangup);
  ue::Delivery d = ue::Delivery::silent_push;
  switch (sem.service) {
    case core::Service::volte:
      d = sem.silent ? ue::Delivery::voice_silent : ue::Delivery::voice_ring;
      break;
    case core::Service::ip_push:
      d = sem.silent ? ue::Delivery::silent_push : ue::Delivery::notify_push;
      break;
    case core::Service::sms:
      d = sem.silent ? ue::Delivery::silent_sms : ue::Delivery::sms;
      break;
  }
  TimeMs latency = scenario.network.app_latency_ms;
  if (scenario.network.app_jitter_ms > 0) {
    latency += std::uniform_int_distribution<TimeMs>(0, scenario.network.app_jitter_ms)(app_rng_);
  }
  std::size_t i = *victim;
  schedule(now_ + latency, [this, i, sem, d] { terminate(i, sem.service, d); });
}

// ---------------------------------------------------------------------------
// Rogue eNodeB plumbing.

void World::rogue_send(const CellIdentity& cell, std::size_t ue, ProtocolMessage msg)
{
  auto idx = rogue_index(cell);
  if (!idx || !rogue_on_[*idx]) return;
  record(cell, Direction::downlink, rogue_actor(cell), ues_[ue]->spec.name, msg);
  schedule(now_ + scenario.network.hop_ms, [this, ue, cell, msg = std::move(msg)] {
    ues_[ue]->ue->on_downlink(msg, cell);
  });
}

void World::set_rogue_transmitter(std::size_t index, bool on)
{
  if (rogue_on_.at(index) == on) return;
  rogue_on_[index] = on;
  const CellIdentity& cell = rogue_tx_[index].cell;
  record(cell, Direction::local, rogue_actor(cell), "bcast", make_message(TransmitterState{on}));
  rebuild_transmitters();
  schedule(now_, [this] { tick_all(); });
}

void World::relay_uplink(std::size_t ue, const NasBody& nas)
{
  const CellIdentity& host = scenario.topology.at(rogue_->config().host_cell_id).identity;
  bool protect = !std::holds_alternative<AttachRequest>(nas) && !std::holds_alternative<IdentityResponse>(nas);
  record(host, Direction::uplink, rogue_actor(rogue_->cells().front()), enb_actor(host),
         make_message(to_body(nas), protect));
  schedule(now_ + scenario.network.hop_ms, [this, ue, host, nas] {
    auto it = connections_.find(ue);
    if (it == connections_.end() || !it->second.relayed) {
      if (it != connections_.end()) mme_.on_connection_released(ue);
      connections_[ue] = Connection{host, true, 0};
    }
    mme_uplink(ue, nas);
  });
}

std::optional<radio::Transmitter> World::anchor(std::uint32_t cell_id) const
{
  if (const auto* site = scenario.topology.find(cell_id)) return site->transmitter;
  for (const auto& tx : rogue_tx_) {
    if (tx.cell.cell_id == cell_id) return tx;
  }
  return std::nullopt;
}

void World::start_rogue()
{
  const auto& spec = std::get<ActiveSpec>(scenario.attacker);
  attack::RogueEnbConfig config = spec.config;
  if (spec.allowlist) {
    std::set<MobileIdentity> ids;
    for (const auto& name : *spec.allowlist) {
      for (const auto& host : ues_) {
        if (host->spec.name != name) continue;
        ids.insert(host->spec.imsi);
        if (const auto* ctx = mme_.context(host->spec.imsi); ctx != nullptr && ctx->guti) ids.insert(*ctx->guti);
      }
    }
    config.allowlist = std::move(ids);
  }
  rogue_tx_ = attack::rogue_transmitters(config, scenario.topology);
  rogue_on_.assign(rogue_tx_.size(), false);
  std::vector<CellIdentity> cells;
  for (const auto& tx : rogue_tx_) cells.push_back(tx.cell);
  rogue_ = std::make_unique<attack::RogueEnb>(config, cells);
  rogue_host_ = std::make_unique<RogueHost>(*this);
  rogue_->start(*rogue_host_);
}

// ---------------------------------------------------------------------------
// Setup.

void World::schedule_event(std::size_t i, const ScenarioEvent& e)
{
  schedule(e.at_ms, [this, i, e] {
    UeHost& host = *ues_[i];
    ue::Ue& u = *host.ue;
    switch (e.kind) {
      case EventKind::reboot:
        u.recover(RecoveryAction::reboot);
        break;
      case EventKind::reinsert_usim:
        u.recover(RecoveryAction::reinsert_usim);
        break;
      case EventKind::flight_mode_toggle:
        u.recover(RecoveryAction::flight_mode_toggle);
        break;
      case EventKind::move_new_ta:
        host.mobility.move_to(*e.to);
        u.recover(RecoveryAction::move_new_ta);
        break;
      case EventKind::move_to:
        host.mobility.move_to(*e.to);
        u.tick();
        break;
      case EventKind::power_off:
        u.power_off();
        break;
      case EventKind::power_on:
        u.power_on();
        break;
      case EventKind::voice_call_in:
        terminate(i, core::Service::volte, ue::Delivery::voice_ring);
        break;
      case EventKind::voice_call_out:
        u.dial_voice();
        break;
      case EventKind::sms_in:
        terminate(i, core::Service::sms, ue::Delivery::sms);
        break;
      case EventKind::sms_out:
        u.send_sms();
        break;
      case EventKind::push_in:
        terminate(i, core::Service::ip_push, ue::Delivery::notify_push);
        break;
      case EventKind::emergency_call:
        u.emergency_call();
        break;
      case EventKind::network_purge_guti:
        mme_.purge_guti(host.spec.imsi);
        break;
    }
  });
}

void World::setup_subscriber(std::size_t i)
{
  const SubscriberSpec& spec = ues_[i]->spec;
  schedule(spec.power_on_ms, [this, i] { ues_[i]->ue->power_on(); });
  if (spec.attach_detach_period_ms > 0) schedule_power_cycle(i, spec.power_on_ms + spec.attach_detach_period_ms);
  if (spec.incoming_push_period_ms > 0) schedule_push(i, spec.power_on_ms + spec.incoming_push_period_ms);
  for (const auto& e : spec.events) schedule_event(i, e);
}

void World::schedule_power_cycle(std::size_t i, TimeMs at)
{
  schedule(at, [this, i, at] {
    const SubscriberSpec& s = ues_[i]->spec;
    ues_[i]->ue->power_off();
    schedule(now_ + s.off_duration_ms, [this, i] { ues_[i]->ue->power_on(); });
    schedule_power_cycle(i, at + s.attach_detach_period_ms);
  });
}

void World::schedule_push(std::size_t i, TimeMs at)
{
  schedule(at, [this, i, at] {
    terminate(i, core::Service::ip_push, ue::Delivery::notify_push);
    schedule_push(i, at + ues_[i]->spec.incoming_push_period_ms);
  });
}

void World::schedule_tick(TimeMs at)
{
  schedule(at, [this, at] {
    tick_all();
    schedule_tick(at + scenario.network.mobility_tick_ms);
  });
}

void World::schedule_sib(TimeMs at)
{
  schedule(at, [this, at] {
    for (const auto& tx : active_tx_) {
      if (tx.cell.rat != Rat::lte) continue;
      std::string src = rogue_index(tx.cell) ? rogue_actor(tx.cell) : enb_actor(tx.cell);
      record(tx.cell, Direction::downlink, src, "bcast", make_message(Sib1{tx.cell}));
    }
    schedule_sib(at + scenario.network.sib_period_ms);
  });
}

void World::setup_background()
{
  const auto& b = scenario.background;
  if (b.subscribers_per_cell <= 0 || b.lambda_per_window <= 0.0) return;
  std::vector<std::uint32_t> ids = b.cells;
  if (ids.empty()) {
    for (const auto& site : scenario.topology.sites()) {
      if (site.identity.rat == Rat::lte) ids.push_back(site.identity.cell_id);
    }
  }
  for (auto id : ids) {
    BackgroundCell bc{scenario.topology.at(id).identity, {}, actor_stream(scenario.seed, "background." + trimmed_hex(id))};
    for (int k = 0; k < b.subscribers_per_cell; ++k) bc.population.push_back(mme_.pool().draw_fresh());
    background_.push_back(std::move(bc));
  }
  for (std::size_t c = 0; c < background_.size(); ++c) schedule_background(c);
}

void World::schedule_background(std::size_t c)
{
  const auto& b = scenario.background;
  BackgroundCell& bc = background_[c];
  double rate = b.lambda_per_window / static_cast<double>(b.window_ms);
  std::exponential_distribution<double> gap(rate);
  std::vector<std::pair<TimeMs, TimeMs>> windows = b.windows;
  if (windows.empty()) windows.emplace_back(0, scenario.duration_ms);
  double t = bc.clock_ms;
  for (const auto& [w0, w1] : windows) {
    if (t > static_cast<double>(w1)) continue;
    t = std::max(t, static_cast<double>(w0));
    double next = t + gap(bc.rng);
    if (next <= static_cast<double>(w1)) {
      bc.clock_ms = next;
      schedule(static_cast<TimeMs>(std::ceil(next)), [this, c] {
        BackgroundCell& cell = background_[c];
        std::uniform_int_distribution<std::size_t> pick(0, cell.population.size() - 1);
        RrcPaging p;
        p.records.emplace_back(cell.population[pick(cell.rng)]);
        record(cell.cell, Direction::downlink, enb_actor(cell.cell), "bcast", make_message(p));
        schedule_background(c);
      });
      return;
    }
    t = static_cast<double>(w1) + 1.0;
  }
}

void World::setup_attacker()
{
  if (const auto* sp = std::get_if<SemiPassiveSpec>(&scenario.attacker)) {
    std::size_t victim = 0;
    for (const auto& host : ues_) {
      if (host->spec.name == sp->victim) victim = host->index;
    }
    semi_host_ = std::make_unique<SemiPassiveHost>(*this, victim);
    semi_ = std::make_unique<attack::SemiPassiveAttacker>(sp->config, scenario.topology);
    semi_->start(*semi_host_);
  } else if (const auto* p = std::get_if<PassiveSpec>(&scenario.attacker)) {
    for (const auto& [w0, w1] : p->config.windows) {
      schedule(w1, [this] {
        for (std::size_t i = 0; i < ues_.size(); ++i) record_truth(i);
      });
    }
    schedule(p->config.windows.back().second + 1, [this, cfg = p->config] {
      radio::Rng rng = actor_stream(scenario.seed, "attacker");
      for (const auto& link : attack::passive_link(trace, cfg, rng)) note("attacker", "attacker", link);
    });
  } else if (const auto* a = std::get_if<ActiveSpec>(&scenario.attacker)) {
    schedule(a->config.start_ms, [this] { start_rogue(); });
    if (a->config.stop_ms > 0) {
      schedule(a->config.stop_ms, [this] {
        if (rogue_) rogue_->stop();
      });
    }
  }
}

RunResult World::run()
{
  for (std::size_t i = 0; i < ues_.size(); ++i) setup_subscriber(i);
  setup_background();
  setup_attacker();
  const auto& net = scenario.network;
  if (const auto* periodic = std::get_if<core::Periodic>(&net.mme.policy)) {
    for (TimeMs t = periodic->interval_ms; t <= scenario.duration_ms; t += periodic->interval_ms) {
      schedule(t, [this] { mme_.periodic_tick(); });
    }
  }
  schedule_tick(net.mobility_tick_ms);
  if (net.sib_period_ms > 0) schedule_sib(0);

  while (!queue_.empty()) {
    std::pop_heap(queue_.begin(), queue_.end(), Later{});
    Event e = std::move(queue_.back());
    queue_.pop_back();
    if (e.t > scenario.duration_ms) break;
    now_ = e.t;
    e.fn();
  }
  now_ = scenario.duration_ms;
  note("sim", "sim", SimulationEnd{});

  RunResult out;
  out.trace = std::move(trace);
  if (semi_) out.trigger_log = semi_->trigger_log();
  if (std::holds_alternative<ActiveSpec>(scenario.attacker)) {
    out.rogue_yield = rogue_ ? rogue_->yield() : attack::RogueYield{};
  }
  for (const auto& host : ues_) {
    out.ue_states[host->spec.name] = host->ue->state();
    if (const auto* ctx = mme_.context(host->spec.imsi)) out.mme_contexts[host->spec.name] = *ctx;
  }
  return out;
}

}  // namespace

std::string enb_actor(const CellIdentity& cell)
{
  return "enb." + trimmed_hex(cell.cell_id);
}

std::string rogue_actor(const CellIdentity& cell)
{
  return "rogue." + trimmed_hex(cell.cell_id);
}

RunResult run(const Scenario& scenario)
{
  World world(scenario);
  return world.run();
}

}  // namespace ltesim::sim
