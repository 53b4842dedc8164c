#include "ltesim/mme.h"

#include <doctest.h>

#include <set>

using namespace ltesim;
using namespace ltesim::core;

namespace {

const Imsi kImsi("001", "01", "0000000001");

struct Network {
  CellTopology topology = make_grid(city_preset());
  Mme mme;

  explicit Network(MmeConfig config = {}) : mme(config, topology, radio::Rng(5)) { mme.provision({kImsi, {}}); }

  const CellIdentity& cell(std::uint32_t id) const { return topology.at(id).identity; }

  Guti attach(LinkId link = 0, std::uint32_t cell_id = 0x101, TimeMs now = 0)
  {
    AttachRequest req{kImsi, UeCapabilities{}};
    auto reply = mme.handle_uplink(link, req, cell(cell_id), now);
    REQUIRE(reply.downlink.size() == 1);
    const auto& accept = std::get<AttachAccept>(reply.downlink.front());
    mme.handle_uplink(link, AttachComplete{}, cell(cell_id), now);
    mme.on_connection_released(link);
    return accept.guti;
  }
};

std::set<std::uint32_t> cells_of(const PageDispatch& d)
{
  std::set<std::uint32_t> out;
  for (const auto& e : d.emissions) out.insert(e.cell.cell_id);
  return out;
}

}  // namespace

TEST_CASE("allocation table")
{
  GutiPool pool(0xA1, radio::Rng(1));
  Guti g = pool.draw_fresh();
  for (auto event : {GutiEvent::attach, GutiEvent::tau, GutiEvent::periodic_tick, GutiEvent::power_cycle}) {
    CHECK(allocate_guti(Sticky{}, g, event, pool) == g);
  }
  CHECK(allocate_guti(FreshOnTau{}, g, GutiEvent::tau, pool) != g);
  CHECK(allocate_guti(FreshOnTau{}, g, GutiEvent::attach, pool) != g);
  CHECK(allocate_guti(FreshOnTau{}, g, GutiEvent::periodic_tick, pool) == g);
  CHECK(allocate_guti(Periodic{}, g, GutiEvent::tau, pool) == g);
  CHECK(allocate_guti(Periodic{}, g, GutiEvent::periodic_tick, pool) != g);
  Guti next = allocate_guti(SequentialOnPowerCycle{}, g, GutiEvent::power_cycle, pool);
  CHECK(next != g);
  CHECK(next.mme_id == g.mme_id);
  CHECK(allocate_guti(SequentialOnPowerCycle{}, g, GutiEvent::tau, pool) == g);
  CHECK(allocate_guti(Sticky{}, std::nullopt, GutiEvent::attach, pool).mme_id == 0xA1);
}

TEST_CASE("live s_tmsi values stay unique")
{
  GutiPool pool(0xA1, radio::Rng(2));
  std::set<std::uint32_t> seen;
  for (int i = 0; i < 5000; ++i) {
    Guti g = pool.draw_fresh();
    CHECK(seen.insert(g.s_tmsi).second);
  }
  CHECK(pool.size() == 5000);
}

TEST_CASE("attach commits at AttachComplete")
{
  Network n;
  AttachRequest req{kImsi, UeCapabilities{}};
  auto reply = n.mme.handle_uplink(0, req, n.cell(0x101), 0);
  const auto& accept = std::get<AttachAccept>(reply.downlink.front());
  CHECK(accept.tac == 0x0101);
  CHECK(accept.echoed_security_algorithms == UeCapabilities{}.security_algorithms);
  CHECK_FALSE(accept.echoed_network_capabilities);
  CHECK_FALSE(n.mme.context(kImsi)->emm_registered);
  n.mme.handle_uplink(0, AttachComplete{}, n.cell(0x101), 0);
  CHECK(n.mme.context(kImsi)->emm_registered);
  CHECK(n.mme.context(kImsi)->guti == accept.guti);
}

TEST_CASE("unknown subscribers and closed tracking areas")
{
  Network n;
  Imsi stranger("001", "01", "0000000999");
  auto r = n.mme.handle_uplink(0, AttachRequest{stranger, UeCapabilities{}}, n.cell(0x101), 0);
  CHECK(std::get<AttachReject>(r.downlink.front()).cause.code == 3);

  CellTopology t = make_grid(city_preset());
  Mme restricted({}, t, radio::Rng(1));
  restricted.provision({kImsi, {0x0101}});
  auto far = restricted.handle_uplink(0, AttachRequest{kImsi, UeCapabilities{}}, t.at(0x104).identity, 0);
  CHECK(std::get<AttachReject>(far.downlink.front()).cause.code == EmmCause::kTrackingAreaNotAllowed);
}

TEST_CASE("unknown GUTI asks for the IMSI")
{
  Network n;
  auto r = n.mme.handle_uplink(0, AttachRequest{Guti{0xA1, 0x1234}, UeCapabilities{}}, n.cell(0x101), 0);
  CHECK(std::holds_alternative<IdentityRequest>(r.downlink.front()));
  auto id = n.mme.handle_uplink(0, IdentityResponse{kImsi}, n.cell(0x101), 0);
  CHECK(std::holds_alternative<AttachAccept>(id.downlink.front()));
}

TEST_CASE("smart paging: last cell first, TA-wide for VoLTE")
{
  Network n;
  n.attach(0, 0x108);
  auto push = n.mme.terminate(kImsi, Service::ip_push, 1000);
  REQUIRE(push.kind == TerminatingOutcome::Kind::paged);
  CHECK(cells_of(push.dispatch) == std::set<std::uint32_t>{0x108});
  CHECK(*push.dispatch.timeout_at_ms == 1000 + MmeConfig{}.t3413_ms);

  auto retry = n.mme.on_paging_timeout(kImsi, push.dispatch.page_id, 7000);
  CHECK(cells_of(retry).size() == 9);
  CHECK(n.mme.on_paging_timeout(kImsi, push.dispatch.page_id, 13000).emissions.empty());

  auto call = n.mme.terminate(kImsi, Service::volte, 20000);
  auto ta = n.topology.cells_in_ta(n.cell(0x108).tac);
  CHECK(cells_of(call.dispatch).size() == ta.size());

  Network wide(MmeConfig{0xA1, Sticky{}, PagingStrategy::ta_wide});
  wide.attach(0, 0x108);
  CHECK(cells_of(wide.mme.terminate(kImsi, Service::sms, 0).dispatch).size() == 9);
}

TEST_CASE("paging answered by a service request delivers pending services")
{
  Network n;
  Guti g = n.attach(0, 0x101);
  auto out = n.mme.terminate(kImsi, Service::sms, 0);
  auto reply = n.mme.handle_uplink(1, ServiceRequest{g, ServicePurpose::mt_response}, n.cell(0x101), 100);
  CHECK(std::holds_alternative<ServiceAccept>(reply.downlink.front()));
  CHECK(reply.deliver == std::vector<Service>{Service::sms});
  CHECK(n.mme.on_paging_timeout(kImsi, out.dispatch.page_id, 6000).emissions.empty());
  auto now = n.mme.terminate(kImsi, Service::ip_push, 200);
  CHECK(now.kind == TerminatingOutcome::Kind::deliver_now);
}

TEST_CASE("paging a connected UE is a contract violation")
{
  Network n;
  Guti g = n.attach();
  n.mme.handle_uplink(1, ServiceRequest{g, ServicePurpose::mo_data}, n.cell(0x101), 0);
  CHECK_THROWS_AS(n.mme.page_ue(kImsi, Service::sms, 0), ContractViolation);
  Imsi never("001", "01", "0000000777");
  n.mme.provision({never, {}});
  CHECK_THROWS_AS(n.mme.page_ue(never, Service::sms, 0), ContractViolation);
}

TEST_CASE("voice needs a voice-capable profile")
{
  Network n;
  UeCapabilities stripped;
  stripped.voice_domain_preference = false;
  stripped.sms_only = true;
  n.mme.handle_uplink(0, AttachRequest{kImsi, stripped}, n.cell(0x101), 0);
  n.mme.handle_uplink(0, AttachComplete{}, n.cell(0x101), 0);
  n.mme.on_connection_released(0);
  CHECK_FALSE(n.mme.voice_capable(kImsi));
  CHECK(n.mme.terminate(kImsi, Service::volte, 0).kind == TerminatingOutcome::Kind::rejected);
  CHECK(n.mme.terminate(kImsi, Service::sms, 0).kind == TerminatingOutcome::Kind::paged);
  Guti g = *n.mme.context(kImsi)->guti;
  auto r = n.mme.handle_uplink(1, ServiceRequest{g, ServicePurpose::mo_voice}, n.cell(0x101), 0);
  CHECK(std::get<ServiceReject>(r.downlink.front()).cause.code == EmmCause::kVoiceNotAvailable);
}

TEST_CASE("echoed capabilities on request")
{
  MmeConfig c;
  c.echo_network_capabilities = true;
  Network n(c);
  auto r = n.mme.handle_uplink(0, AttachRequest{kImsi, UeCapabilities{}}, n.cell(0x101), 0);
  const auto& accept = std::get<AttachAccept>(r.downlink.front());
  REQUIRE(accept.echoed_network_capabilities);
  CHECK(*accept.echoed_network_capabilities == UeCapabilities{}.network_part());
}

TEST_CASE("TAU keeps or renews the GUTI according to policy")
{
  Network sticky;
  Guti g = sticky.attach();
  auto r = sticky.mme.handle_uplink(1, TauRequest{g, 0x0104}, sticky.cell(0x104), 100);
  CHECK_FALSE(std::get<TauAccept>(r.downlink.front()).guti);

  MmeConfig fresh;
  fresh.policy = FreshOnTau{};
  Network f(fresh);
  Guti h = f.attach();
  auto t = f.mme.handle_uplink(1, TauRequest{h, 0x0104}, f.cell(0x104), 100);
  const auto& accept = std::get<TauAccept>(t.downlink.front());
  REQUIRE(accept.guti);
  CHECK(*accept.guti != h);
  CHECK(f.mme.context_by_guti(h) == nullptr);
}

TEST_CASE("detach erases pending pages and purge drops the GUTI")
{
  Network n;
  Guti g = n.attach();
  auto out = n.mme.terminate(kImsi, Service::ip_push, 0);
  n.mme.handle_uplink(1, DetachRequest{g, true}, n.cell(0x101), 10);
  CHECK_FALSE(n.mme.context(kImsi)->emm_registered);
  CHECK(n.mme.on_paging_timeout(kImsi, out.dispatch.page_id, 6000).emissions.empty());
  CHECK(n.mme.terminate(kImsi, Service::ip_push, 20).kind == TerminatingOutcome::Kind::unreachable);

  Network p;
  p.attach();
  p.mme.purge_guti(kImsi);
  auto page = p.mme.terminate(kImsi, Service::sms, 0);
  REQUIRE(page.kind == TerminatingOutcome::Kind::paged);
  CHECK(std::holds_alternative<Imsi>(page.dispatch.emissions.front().paging.records.front()));
}
