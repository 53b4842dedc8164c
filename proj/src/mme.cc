#include "ltesim/mme.h"

namespace ltesim::core {

std::string_view policy_name(const GutiPolicy& policy)
{
  switch (policy.index()) {
    case 0:
      return "sticky";
    case 1:
      return "fresh_on_tau";
    case 2:
      return "periodic";
    default:
      return "sequential_on_power_cycle";
  }
}

std::string_view to_string(Service service)
{
  switch (service) {
    case Service::volte:
      return "volte";
    case Service::ip_push:
      return "ip_push";
    case Service::sms:
      return "sms";
  }
  return "ip_push";
}

void GutiPool::reserve(Guti guti)
{
  if (guti.mme_id != mme_id_) {
    throw InvalidValue("GUTI " + guti.to_string() + " belongs to another MME");
  }
  if (!live_.insert(guti.s_tmsi).second) {
    throw InvalidValue("S-TMSI " + hex_string(guti.s_tmsi, 8) + " already live");
  }
}

void GutiPool::release(Guti guti)
{
  live_.erase(guti.s_tmsi);
}

Guti GutiPool::draw_fresh()
{
  for (;;) {
    auto candidate = static_cast<std::uint32_t>(rng_());
    if (live_.insert(candidate).second) {
      return Guti{mme_id_, candidate};
    }
  }
}

namespace {

Guti sequential_successor(Guti old, GutiPool& pool)
{
  for (int nibble = 0; nibble < 8; ++nibble) {
    std::uint32_t shift = 4u * static_cast<std::uint32_t>(nibble);
    std::uint32_t digit = (old.s_tmsi >> shift) & 0xfu;
    for (std::uint32_t k = 1; k < 16; ++k) {
      std::uint32_t next = (old.s_tmsi & ~(0xfu << shift)) | (((digit + k) & 0xfu) << shift);
      if (!pool.live(next)) {
        Guti g{old.mme_id, next};
        pool.reserve(g);
        return g;
      }
    }
  }
  return pool.draw_fresh();
}

}  // namespace

Guti allocate_guti(const GutiPolicy& policy, std::optional<Guti> old, GutiEvent event, GutiPool& pool)
{
  bool fresh = false;
  bool sequential = false;
  if (std::holds_alternative<FreshOnTau>(policy)) {
    fresh = event != GutiEvent::periodic_tick;
  } else if (std::holds_alternative<Periodic>(policy)) {
    fresh = event == GutiEvent::periodic_tick || event == GutiEvent::power_cycle;
  } else if (std::holds_alternative<SequentialOnPowerCycle>(policy)) {
    sequential = event == GutiEvent::power_cycle;
  }
  if (!old) {
    return pool.draw_fresh();
  }
  if (sequential) {
    return sequential_successor(*old, pool);
  }
  if (fresh) {
    return pool.draw_fresh();
  }
  return *old;
}

Mme::Mme(MmeConfig config, const CellTopology& topology, radio::Rng rng) :
  config_(std::move(config)), topology_(topology), pool_(config_.mme_id, rng)
{
}

void Mme::provision(Subscription sub)
{
  if (contexts_.count(sub.imsi) != 0) {
    throw InvalidValue("IMSI " + sub.imsi.to_string() + " provisioned twice");
  }
  MmeContext ctx;
  ctx.imsi = sub.imsi;
  ctx.allowed_tacs = std::move(sub.allowed_tacs);
  contexts_.emplace(ctx.imsi, std::move(ctx));
}

MmeContext* Mme::find(const Imsi& imsi)
{
  auto it = contexts_.find(imsi);
  return it == contexts_.end() ? nullptr : &it->second;
}

MmeContext* Mme::find_by_guti(const Guti& guti)
{
  auto it = by_guti_.find(guti);
  return it == by_guti_.end() ? nullptr : find(it->second);
}

const MmeContext* Mme::context(const Imsi& imsi) const
{
  auto it = contexts_.find(imsi);
  return it == contexts_.end() ? nullptr : &it->second;
}

const MmeContext* Mme::context_by_guti(const Guti& guti) const
{
  auto it = by_guti_.find(guti);
  return it == by_guti_.end() ? nullptr : context(it->second);
}

bool Mme::voice_capable(const Imsi& imsi) const
{
  const MmeContext* ctx = context(imsi);
  return ctx != nullptr && ctx->emm_registered && ctx->capabilities.voice_domain_preference &&
         !ctx->capabilities.sms_only;
}

void Mme::associate(LinkId link, MmeContext& ctx, const CellIdentity& cell)
{
  links_[link] = ctx.imsi;
  ctx.ecm_connected = true;
  ctx.last_seen_cell = cell;
}

bool Mme::tac_allowed(const MmeContext& ctx, std::uint16_t tac) const
{
  return ctx.allowed_tacs.empty() || ctx.allowed_tacs.count(tac) != 0;
}

void Mme::set_guti(MmeContext& ctx, Guti guti)
{
  if (ctx.guti && *ctx.guti != guti) {
    pool_.release(*ctx.guti);
    by_guti_.erase(*ctx.guti);
  }
  ctx.guti = guti;
  by_guti_[guti] = ctx.imsi;
}

AttachOutcome Mme::process_attach(LinkId link, const AttachRequest& req, const CellIdentity& cell, TimeMs now)
{
  MmeContext* ctx = nullptr;
  if (const auto* imsi = std::get_if<Imsi>(&req.identity)) {
    ctx = find(*imsi);
    if (ctx == nullptr) {
      return AttachReject{EmmCause{3}};
    }
  } else {
    ctx = find_by_guti(std::get<Guti>(req.identity));
    if (ctx == nullptr) {
      awaiting_identity_[link] = req;
      return IdentityRequest{};
    }
  }
  return attach_known(link, *ctx, req, cell, now);
}

AttachOutcome Mme::attach_known(LinkId link, MmeContext& ctx, const AttachRequest& req, const CellIdentity& cell,
                                TimeMs now)
{
  associate(link, ctx, cell);
  if (!tac_allowed(ctx, cell.tac)) {
    return AttachReject{EmmCause{EmmCause::kTrackingAreaNotAllowed}};
  }
  if (auto it = pending_attach_.find(link); it != pending_attach_.end()) {
    if (it->second.guti != ctx.guti && by_guti_.count(it->second.guti) == 0) {
      pool_.release(it->second.guti);
    }
    pending_attach_.erase(it);
  }
  GutiEvent event = GutiEvent::attach;
  if (ctx.detached_at_ms >= 0 && now - ctx.detached_at_ms >= config_.power_cycle_threshold_ms) {
    event = GutiEvent::power_cycle;
  }
  Guti guti = allocate_guti(config_.policy, ctx.guti, event, pool_);
  pending_attach_[link] = PendingAttach{ctx.imsi, req, guti, cell};

  AttachAccept accept;
  accept.guti = guti;
  accept.tac = cell.tac;
  accept.echoed_security_algorithms = req.capabilities.security_algorithms;
  if (config_.echo_network_capabilities) {
    accept.echoed_network_capabilities = req.capabilities.network_part();
  }
  return accept;
}

TauOutcome Mme::process_tau(LinkId link, const TauRequest& req, const CellIdentity& cell, TimeMs)
{
  MmeContext* ctx = find_by_guti(req.guti);
  if (ctx == nullptr) {
    awaiting_identity_[link] = req;
    return IdentityRequest{};
  }
  associate(link, *ctx, cell);
  return tau_known(*ctx, cell);
}

TauOutcome Mme::tau_known(MmeContext& ctx, const CellIdentity& cell)
{
  if (!ctx.emm_registered) {
    return TauReject{EmmCause{10}};
  }
  if (!tac_allowed(ctx, cell.tac)) {
    return TauReject{EmmCause{EmmCause::kTrackingAreaNotAllowed}};
  }
  GutiEvent event = ctx.guti_reallocation_due ? GutiEvent::periodic_tick : GutiEvent::tau;
  ctx.guti_reallocation_due = false;
  std::optional<Guti> old = ctx.guti;
  Guti guti = allocate_guti(config_.policy, old, event, pool_);
  set_guti(ctx, guti);
  TauAccept accept;
  accept.tac = cell.tac;
  if (!old || *old != guti) {
    accept.guti = guti;
  }
  return accept;
}

std::vector<Service> Mme::take_pending(const Imsi& imsi)
{
  std::vector<Service> out;
  auto it = pages_.find(imsi);
  if (it != pages_.end()) {
    out.assign(it->second.services.begin(), it->second.services.end());
    pages_.erase(it);
  }
  return out;
}

MmeReply Mme::handle_uplink(LinkId link, const NasBody& msg, const CellIdentity& cell, TimeMs now)
{
  MmeReply reply;
  auto push = [&](auto outcome) { std::visit([&](auto&& m) { reply.downlink.emplace_back(m); }, outcome); };

  if (const auto* m = std::get_if<AttachRequest>(&msg)) {
    push(process_attach(link, *m, cell, now));
  } else if (const auto* m = std::get_if<TauRequest>(&msg)) {
    push(process_tau(link, *m, cell, now));
  } else if (std::holds_alternative<AttachComplete>(msg)) {
    auto it = pending_attach_.find(link);
    if (it != pending_attach_.end()) {
      MmeContext* ctx = find(it->second.imsi);
      ctx->capabilities = it->second.request.capabilities;
      ctx->emm_registered = true;
      ctx->security_context = true;
      ctx->detached_at_ms = -1;
      ctx->guti_reallocation_due = false;
      set_guti(*ctx, it->second.guti);
      pending_attach_.erase(it);
    }
  } else if (const auto* m = std::get_if<IdentityResponse>(&msg)) {
    auto it = awaiting_identity_.find(link);
    if (it != awaiting_identity_.end()) {
      AwaitingIdentity awaiting = std::move(it->second);
      awaiting_identity_.erase(it);
      MmeContext* ctx = find(m->imsi);
      bool attach = std::holds_alternative<AttachRequest>(awaiting);
      if (ctx == nullptr) {
        if (attach) {
          reply.downlink.emplace_back(AttachReject{EmmCause{3}});
        } else {
          reply.downlink.emplace_back(TauReject{EmmCause{3}});
        }
      } else if (attach) {
        push(attach_known(link, *ctx, std::get<AttachRequest>(awaiting), cell, now));
      } else {
        associate(link, *ctx, cell);
        push(tau_known(*ctx, cell));
      }
    }
  } else if (const auto* m = std::get_if<ServiceRequest>(&msg)) {
    if (m->purpose == ServicePurpose::emergency) {
      reply.downlink.emplace_back(ServiceAccept{m->purpose});
      return reply;
    }
    MmeContext* ctx = find_by_guti(m->guti);
    if (ctx == nullptr) {
      reply.downlink.emplace_back(ServiceReject{m->purpose, EmmCause{10}});
      return reply;
    }
    associate(link, *ctx, cell);
    if (!ctx->emm_registered) {
      reply.downlink.emplace_back(ServiceReject{m->purpose, EmmCause{10}});
      return reply;
    }
    if (m->purpose == ServicePurpose::mo_voice && !voice_capable(ctx->imsi)) {
      reply.downlink.emplace_back(ServiceReject{m->purpose, EmmCause{EmmCause::kVoiceNotAvailable}});
    } else {
      reply.downlink.emplace_back(ServiceAccept{m->purpose});
    }
    if (ctx->guti_reallocation_due) {
      ctx->guti_reallocation_due = false;
      Guti g = allocate_guti(config_.policy, ctx->guti, GutiEvent::periodic_tick, pool_);
      if (g != ctx->guti) {
        set_guti(*ctx, g);
        reply.downlink.emplace_back(GutiReallocationCommand{g});
      }
    }
    reply.deliver = take_pending(ctx->imsi);
  } else if (const auto* m = std::get_if<DetachRequest>(&msg)) {
    MmeContext* ctx = find_by_guti(m->guti);
    if (ctx != nullptr) {
      ctx->emm_registered = false;
      ctx->ecm_connected = false;
      ctx->detached_at_ms = now;
      ctx->last_seen_cell = cell;
      pages_.erase(ctx->imsi);
      links_.erase(link);
    }
  }
  return reply;
}

std::vector<CellIdentity> Mme::paging_cells(const MmeContext& ctx, Service, bool ta_wide) const
{
  if (ta_wide) {
    return topology_.cells_in_ta(ctx.last_seen_cell->tac);
  }
  return {*ctx.last_seen_cell};
}

PagingEmission Mme::emission(const MmeContext& ctx, const CellIdentity& cell) const
{
  PagingEmission e;
  e.cell = cell;
  if (ctx.guti) {
    e.paging.records.emplace_back(*ctx.guti);
  } else {
    e.paging.records.emplace_back(ctx.imsi);
  }
  return e;
}

PageDispatch Mme::page_ue(const Imsi& imsi, Service service, TimeMs now)
{
  MmeContext* ctx = find(imsi);
  if (ctx == nullptr || !ctx->last_seen_cell) {
    throw ContractViolation("paging " + imsi.to_string() + " without a known location");
  }
  if (ctx->ecm_connected) {
    throw ContractViolation("paging CONNECTED UE " + imsi.to_string());
  }
  bool ta_wide = config_.paging == PagingStrategy::ta_wide || service == Service::volte;
  PendingPage& p = pages_[imsi];
  p.services.push_back(service);
  p.page_id = next_page_id_++;
  p.ta_wide_sent = ta_wide;

  PageDispatch d;
  d.page_id = p.page_id;
  d.timeout_at_ms = now + config_.t3413_ms;
  for (const auto& cell : paging_cells(*ctx, service, ta_wide)) {
    d.emissions.push_back(emission(*ctx, cell));
  }
  return d;
}

PageDispatch Mme::on_paging_timeout(const Imsi& imsi, std::uint64_t page_id, TimeMs now)
{
  PageDispatch d;
  auto it = pages_.find(imsi);
  if (it == pages_.end() || it->second.page_id != page_id) {
    return d;
  }
  MmeContext* ctx = find(imsi);
  if (ctx == nullptr || ctx->ecm_connected || it->second.ta_wide_sent) {
    pages_.erase(it);
    return d;
  }
  it->second.ta_wide_sent = true;
  d.page_id = page_id;
  d.timeout_at_ms = now + config_.t3413_ms;
  for (const auto& cell : paging_cells(*ctx, it->second.services.front(), true)) {
    d.emissions.push_back(emission(*ctx, cell));
  }
  return d;
}

TerminatingOutcome Mme::terminate(const Imsi& imsi, Service service, TimeMs now)
{
  TerminatingOutcome out;
  MmeContext* ctx = find(imsi);
  if (ctx == nullptr || !ctx->emm_registered || !ctx->last_seen_cell) {
    out.kind = TerminatingOutcome::Kind::unreachable;
    return out;
  }
  if (service == Service::volte && !voice_capable(imsi)) {
    out.kind = TerminatingOutcome::Kind::rejected;
    out.cause = EmmCause{EmmCause::kVoiceNotAvailable};
    return out;
  }
  if (ctx->ecm_connected) {
    out.kind = TerminatingOutcome::Kind::deliver_now;
    return out;
  }
  out.kind = TerminatingOutcome::Kind::paged;
  out.dispatch = page_ue(imsi, service, now);
  return out;
}

void Mme::on_connection_released(LinkId link)
{
  if (auto it = links_.find(link); it != links_.end()) {
    if (MmeContext* ctx = find(it->second)) {
      ctx->ecm_connected = false;
    }
    links_.erase(it);
  }
  if (auto it = pending_attach_.find(link); it != pending_attach_.end()) {
    if (by_guti_.count(it->second.guti) == 0) {
      pool_.release(it->second.guti);
    }
    pending_attach_.erase(it);
  }
  awaiting_identity_.erase(link);
}

void Mme::periodic_tick()
{
  for (auto& [imsi, ctx] : contexts_) {
    ctx.guti_reallocation_due = true;
  }
}

void Mme::purge_guti(const Imsi& imsi)
{
  MmeContext* ctx = find(imsi);
  if (ctx != nullptr && ctx->guti) {
    pool_.release(*ctx->guti);
    by_guti_.erase(*ctx->guti);
    ctx->guti.reset();
  }
}

}  // namespace ltesim::core
