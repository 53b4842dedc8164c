#include "ltesim/scenario.h"

#include <doctest.h>

#include <fstream>

using namespace ltesim;
using namespace ltesim::sim;

namespace {

std::string fixture(const std::string& name)
{
  return std::string(LTESIM_FIXTURE_DIR) + "/" + name;
}

nlohmann::json read_fixture(const std::string& name)
{
  std::ifstream in(fixture(name));
  return nlohmann::json::parse(in);
}

std::string failing_field(const nlohmann::json& doc)
{
  try {
    load_scenario(doc);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal scenario loads")
{
  Scenario s = load_scenario_file(fixture("minimal.json"));
  CHECK(s.topology.sites().size() == 1);
  REQUIRE(s.subscribers.size() == 1);
  CHECK(s.subscribers[0].name == "alice");
  CHECK(s.subscribers[0].imsi == Imsi("001", "01", "0000000001"));
  CHECK(s.subscribers[0].home == Position{100, 50});
  CHECK(s.subscribers[0].events.size() == 2);
  CHECK(std::holds_alternative<std::monostate>(s.attacker));
  CHECK(s.seed == 1);
  CHECK(s.duration_ms == 60000);
  CHECK_FALSE(s.city);
}

TEST_CASE("every fixture loads")
{
  for (const char* name :
       {"city_l2.json", "d1_deny_lte.json", "d1_flight_mode.json", "d1_reinsert.json", "d1_t3245.json",
        "d2_allowlist.json", "d2_deny_all.json", "d2_t3245.json", "d3_echo.json", "d3_move_new_ta.json",
        "d3_strip.json", "l1_fresh_on_tau.json", "l1_sticky.json", "l3_meas.json", "l3_meas_noisy.json",
        "l3_meas_r10.json", "l3_meas_secure.json", "l3_rlf.json", "l3_rlf_secure.json"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_scenario_file(fixture(name)));
  }
}

TEST_CASE("city preset and countermeasures")
{
  Scenario s = load_scenario_file(fixture("city_l2.json"));
  CHECK(s.city);
  CHECK(s.topology.sites().size() == 36);
  CHECK(std::holds_alternative<radio::Cost231Hata>(s.radio.model));
  CHECK(std::holds_alternative<SemiPassiveSpec>(s.attacker));
  CHECK(s.background.subscribers_per_cell == 100);
  REQUIRE(s.subscribers[0].home);
  CHECK(s.subscribers[0].home->x >= 0);
  CHECK(s.subscribers[0].home->x <= 7200);
  CHECK(s.subscribers[0].home->y >= 0);
  CHECK(s.subscribers[0].home->y <= 7200);
  CHECK(load_scenario_file(fixture("city_l2.json")).subscribers[0].home == s.subscribers[0].home);

  Scenario fresh = load_scenario_file(fixture("l1_fresh_on_tau.json"));
  CHECK(std::holds_alternative<core::FreshOnTau>(fresh.network.mme.policy));

  Scenario t = load_scenario_file(fixture("d1_t3245.json"));
  CHECK(t.subscribers[0].profile.t3245_enabled);
  CHECK(t.subscribers[0].profile.t3245_ms == 30 * kMinute);

  Scenario secure = load_scenario_file(fixture("l3_meas_secure.json"));
  CHECK_FALSE(secure.subscribers[0].profile.sends_meas_report_without_security);
}

TEST_CASE("an attacker on a missing cell is refused")
{
  CHECK_THROWS_AS(load_scenario_file(fixture("invalid_attacker_cell.json")), ValidationError);
  CHECK(failing_field(read_fixture("invalid_attacker_cell.json")).rfind("attacker", 0) == 0);
}

TEST_CASE("malformed documents name the offending field")
{
  auto base = read_fixture("minimal.json");

  auto unknown = base;
  unknown["colour"] = "blue";
  CHECK(failing_field(unknown) == "colour");

  auto no_seed = base;
  no_seed.erase("seed");
  CHECK(failing_field(no_seed) == "seed");

  auto bad_imsi = base;
  bad_imsi["subscribers"][0]["imsi"] = "001-01-12";
  CHECK(failing_field(bad_imsi) == "subscribers[0].imsi");

  auto bad_hex = base;
  bad_hex["topology"]["cells"][0]["cell_id"] = "17";
  CHECK(failing_field(bad_hex) == "topology.cells[0].cell_id");

  auto late = base;
  late["subscribers"][0]["events"][0]["kind"] = "teleport";
  CHECK(failing_field(late).rfind("subscribers[0].events[0]", 0) == 0);

  auto dup = base;
  dup["subscribers"].push_back(base["subscribers"][0]);
  CHECK_THROWS_AS(load_scenario(dup), ValidationError);

  CHECK(failing_field(nlohmann::json::array()) == "document");
}

TEST_CASE("a city topology stays inside its envelope")
{
  auto doc = read_fixture("city_l2.json");
  doc["topology"]["ta_rows"] = 6;
  CHECK_THROWS_AS(load_scenario(doc), ValidationError);
}

TEST_CASE("actor streams are reproducible and independent")
{
  auto a = actor_stream(42, "ue.victim");
  auto b = actor_stream(42, "ue.victim");
  auto c = actor_stream(42, "mme");
  auto d = actor_stream(43, "ue.victim");
  std::uint64_t va = a(), vb = b(), vc = c(), vd = d();
  CHECK(va == vb);
  CHECK(va != vc);
  CHECK(va != vd);
}
