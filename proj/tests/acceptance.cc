// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 when any fails.

#include "ltesim/analysis.h"
#include "ltesim/simulator.h"
#include "ltesim/trace_codec.h"

#include "samples.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

using namespace ltesim;

namespace {

// Pinned tolerances.
constexpr int kL2Seeds = 100;
constexpr int kL2MinSuccesses = 95;
constexpr int kL2MaxTriggers = 20;
constexpr double kL2MaxAreaKm2 = 2.0;
constexpr double kL2MaxSeconds = 60.0;
constexpr int kSilentSmsSeeds = 10;
constexpr int kStickySeeds = 3;
constexpr int kFreshSeeds = 50;
constexpr double kFreshSlack = 0.05;
constexpr int kTrilaterationTrials = 100;
constexpr double kNoiseFreeErrorM = 1e-3;
constexpr double kNoiseFreeResidualM = 1e-6;
constexpr int kNoisySeeds = 100;
constexpr double kT3245MinMin = 29.0;
constexpr double kT3245MaxMin = 31.0;
constexpr int kD3Attempts = 10;
constexpr double kBaselineMinM = 50.0;
constexpr double kBaselineMaxM = 100.0;
constexpr double kAmplifiedMinM = 800.0;
constexpr double kOracleToleranceM = 0.1;
constexpr int kCodecRecords = 100000;
constexpr int kSoundnessTrials = 1000;

const std::vector<std::string> kFixtures{
    "city_l2.json",        "d1_deny_lte.json",    "d1_flight_mode.json", "d1_reinsert.json",   "d1_t3245.json",
    "d2_allowlist.json",   "d2_deny_all.json",    "d2_t3245.json",       "d3_echo.json",       "d3_move_new_ta.json",
    "d3_strip.json",       "l1_fresh_on_tau.json", "l1_sticky.json",     "l3_meas.json",       "l3_meas_noisy.json",
    "l3_meas_r10.json",    "l3_meas_secure.json", "l3_rlf.json",         "l3_rlf_secure.json", "minimal.json"};

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what)
  {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

nlohmann::json fixture_doc(const std::string& name)
{
  std::ifstream in(std::string(LTESIM_FIXTURE_DIR) + "/" + name);
  return nlohmann::json::parse(in);
}

sim::Scenario scenario(const std::string& name, std::optional<std::uint64_t> seed = std::nullopt,
                       const std::function<void(nlohmann::json&)>& edit = {})
{
  auto doc = fixture_doc(name);
  if (seed) doc["seed"] = *seed;
  if (edit) edit(doc);
  return sim::load_scenario(doc);
}

std::string encode(const std::vector<TraceRecord>& trace)
{
  std::ostringstream out;
  write_trace(out, trace);
  return out.str();
}

std::vector<TraceRecord> round_trip(const std::vector<TraceRecord>& trace)
{
  std::istringstream in(encode(trace));
  return read_trace(in);
}

double median(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  if (v.empty()) return NAN;
  std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Timed {
  TimeMs at_ms;
  const UeStatus* status;
};

std::vector<Timed> statuses(const std::vector<TraceRecord>& trace, const std::string& ue)
{
  std::vector<Timed> out;
  for (const auto& r : trace) {
    if (r.src != ue) continue;
    if (const auto* s = get_if<UeStatus>(r.message)) out.push_back({r.timestamp_ms, s});
  }
  return out;
}

int lte_registrations(const std::vector<TraceRecord>& trace, const std::string& ue, TimeMs from, TimeMs to)
{
  int n = 0;
  for (const auto& r : trace) {
    if (r.src != ue || r.direction != Direction::uplink || !r.cell || r.cell->rat != Rat::lte) continue;
    if (r.timestamp_ms <= from || r.timestamp_ms >= to) continue;
    const auto* c = get_if<RrcConnectionSetupComplete>(r.message);
    bool nas = c != nullptr && (std::holds_alternative<AttachRequest>(c->nas) || std::holds_alternative<TauRequest>(c->nas));
    if (nas || get_if<AttachRequest>(r.message) || get_if<TauRequest>(r.message)) ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------

struct L2Run {
  analysis::RunMetrics metrics;
};

std::vector<L2Run> g_l2_runs;
double g_l2_seconds = 0.0;

Verdict l2_granularity()
{
  Verdict v;
  auto t0 = std::chrono::steady_clock::now();
  int successes = 0, max_triggers = 0;
  double max_area = 0.0;
  for (int seed = 1; seed <= kL2Seeds; ++seed) {
    auto result = sim::run(scenario("city_l2.json", seed));
    L2Run r{analysis::report(result.trace)};
    const auto& outcome = r.metrics.cell_outcome;
    if (outcome) {
      max_triggers = std::max(max_triggers, outcome->triggers_used);
      if (outcome->success) {
        max_area = std::max(max_area, outcome->area_km2);
        if (outcome->triggers_used <= kL2MaxTriggers && outcome->area_km2 <= kL2MaxAreaKm2) ++successes;
      }
    }
    g_l2_runs.push_back(std::move(r));
  }
  g_l2_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  auto city = scenario("city_l2.json");
  bool dims = true;
  try {
    core::check_city_dimensions(city.topology);
  } catch (const InvalidValue&) {
    dims = false;
  }
  v.require(dims, "city dimensions");
  v.require(successes >= kL2MinSuccesses, "success count");
  v.require(max_triggers <= kL2MaxTriggers, "trigger budget");
  v.require(max_area <= kL2MaxAreaKm2, "area bound");
  v.require(g_l2_seconds <= kL2MaxSeconds, "runtime");
  v.note(std::to_string(successes) + "/" + std::to_string(kL2Seeds) + " exact cell, max triggers " +
         std::to_string(max_triggers) + ", max area " + fmt("%.2f", max_area) + " km2, " +
         fmt("%.1f", g_l2_seconds) + " s");
  return v;
}

Verdict smart_paging()
{
  Verdict v;
  int triggers = 0, sets = 0, violations = 0;
  for (const auto& r : g_l2_runs) {
    triggers += r.metrics.paging.triggers_checked;
    sets += r.metrics.paging.page_sets_checked;
    violations += static_cast<int>(r.metrics.paging.violations.size());
  }
  int sms_triggers = 0;
  for (int seed = 1; seed <= kSilentSmsSeeds; ++seed) {
    auto result = sim::run(scenario("city_l2.json", seed, [](nlohmann::json& d) {
      d["attacker"]["cell_trigger"] = "silent_sms";
    }));
    auto check = analysis::check_paging(result.trace, analysis::observed_tracking_areas(result.trace));
    sms_triggers += check.triggers_checked;
    sets += check.page_sets_checked;
    violations += static_cast<int>(check.violations.size());
  }
  for (const char* name : {"l1_sticky.json", "minimal.json", "d3_strip.json"}) {
    auto m = analysis::report(sim::run(scenario(name)).trace);
    sets += m.paging.page_sets_checked;
    violations += static_cast<int>(m.paging.violations.size());
  }
  v.require(triggers > 0 && sms_triggers > 0, "triggers observed");
  v.require(violations == 0, "dispatch rule");
  v.note(std::to_string(triggers + sms_triggers) + " first pages checked, " + std::to_string(sets) +
         " page sets, " + std::to_string(violations) + " violations");
  return v;
}

Verdict guti_persistence()
{
  Verdict v;
  int sticky_ok = 0, attaches = 0;
  for (int seed = 1; seed <= kStickySeeds; ++seed) {
    auto trace = sim::run(scenario("l1_sticky.json", seed)).trace;
    auto m = analysis::report(trace);
    const auto& victim = m.ues.at("victim");
    bool ok = victim.gutis.size() == 1 && m.linking && m.linking->links > 0 && m.linking->accuracy() == 1.0;
    if (ok) ++sticky_ok;
    if (seed == 1) {
      for (const auto& r : trace) {
        if (r.src != "victim") continue;
        const auto* c = get_if<RrcConnectionSetupComplete>(r.message);
        if (c != nullptr && std::holds_alternative<AttachRequest>(c->nas)) ++attaches;
      }
    }
  }
  v.require(sticky_ok == kStickySeeds, "sticky linking");
  v.require(attaches >= 70, "hourly attach cycles");

  auto fresh_doc = fixture_doc("l1_fresh_on_tau.json");
  int background = fresh_doc["background"]["subscribers_per_cell"].get<int>();
  double total = 0.0;
  int runs = 0;
  for (int seed = 1; seed <= kFreshSeeds; ++seed) {
    auto m = analysis::report(sim::run(scenario("l1_fresh_on_tau.json", seed)).trace);
    if (!m.linking || m.linking->links == 0) continue;
    total += m.linking->accuracy();
    ++runs;
  }
  double accuracy = runs == 0 ? 1.0 : total / runs;
  double bound = 1.0 / background + kFreshSlack;
  v.require(runs == kFreshSeeds, "fresh runs produced links");
  v.require(accuracy <= bound, "fresh linking bound");
  v.note("sticky " + std::to_string(sticky_ok) + "/" + std::to_string(kStickySeeds) + " at accuracy 1.0 over " +
         std::to_string(attaches) + " attaches; fresh-on-TAU accuracy " + fmt("%.3f", accuracy) + " (bound " +
         fmt("%.3f", bound) + ")");
  return v;
}

Verdict trilateration()
{
  Verdict v;
  radio::Rng rng(20240501);
  std::uniform_real_distribution<double> coord(0.0, 1000.0);
  radio::PathLossModel model = radio::street_level_model();
  double worst_error = 0.0, worst_residual = 0.0;
  int trials = 0;
  while (trials < kTrilaterationTrials) {
    std::vector<radio::Transmitter> anchors(3);
    for (std::size_t i = 0; i < 3; ++i) {
      anchors[i].position = {coord(rng), coord(rng)};
      anchors[i].tx_power_dbm = 46.0;
      anchors[i].cell.cell_id = 0x11 + static_cast<std::uint32_t>(i);
    }
    const auto& a = anchors[0].position;
    const auto& b = anchors[1].position;
    const auto& c = anchors[2].position;
    double area2 = std::abs((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
    if (area2 < 2.0 * 10000.0) continue;  // keep triangles of at least 1e4 m2
    Position truth{coord(rng), coord(rng)};
    std::vector<locate::DistanceEstimate> estimates;
    for (const auto& tx : anchors) {
      CellMeasurement m{tx.cell, radio::rssi_at(tx, model, truth)};
      estimates.push_back(locate::estimate(m, tx, model));
    }
    auto fix = locate::trilaterate(estimates);
    worst_error = std::max(worst_error, std::hypot(fix.position.x - truth.x, fix.position.y - truth.y));
    worst_residual = std::max(worst_residual, fix.residual_m);
    ++trials;
  }
  v.require(worst_error < kNoiseFreeErrorM, "noise-free error");
  v.require(worst_residual < kNoiseFreeResidualM, "noise-free residual");

  double r10_error = INFINITY;
  {
    auto m = analysis::report(sim::run(scenario("l3_meas_r10.json")).trace);
    if (m.fixes.size() == 1 && m.fixes[0].method == FixMethod::gps) r10_error = m.fixes[0].error_m;
  }
  v.require(r10_error == 0.0, "locationInfo-r10 exact");

  double sim_error = INFINITY;
  for (const char* name : {"l3_meas.json", "l3_rlf.json"}) {
    auto m = analysis::report(sim::run(scenario(name)).trace);
    if (m.fixes.size() != 1) {
      sim_error = INFINITY;
      break;
    }
    sim_error = std::isinf(sim_error) ? m.fixes[0].error_m : std::max(sim_error, m.fixes[0].error_m);
  }
  v.require(sim_error < kNoiseFreeErrorM, "simulated report fixes");

  auto noisy = scenario("l3_meas_noisy.json");
  double radius = INFINITY;
  for (const auto& site : noisy.topology.sites()) {
    if (const auto* d = std::get_if<core::Disc>(&site.geometry)) radius = std::min(radius, d->radius_m);
  }
  std::vector<double> errors;
  for (int seed = 1; seed <= kNoisySeeds; ++seed) {
    auto m = analysis::report(sim::run(scenario("l3_meas_noisy.json", seed)).trace);
    for (const auto& f : m.fixes) errors.push_back(f.error_m);
  }
  double med = median(errors);
  v.require(errors.size() >= static_cast<std::size_t>(kNoisySeeds) * 9 / 10, "noisy fixes produced");
  v.require(med < radius, "noisy median below cell radius");
  v.note("worst noise-free error " + fmt("%.2e", worst_error) + " m, residual " + fmt("%.2e", worst_residual) +
         " m; r10 error " + fmt("%.1f", r10_error) + " m; sigma 2 dB median " + fmt("%.1f", med) + " m over " +
         std::to_string(errors.size()) + " fixes (cell radius " + fmt("%.0f", radius) + " m)");
  return v;
}

Verdict denial_persistence()
{
  Verdict v;
  std::string d1_note;
  for (const char* name : {"d1_deny_lte.json", "d1_flight_mode.json", "d1_reinsert.json"}) {
    auto trace = sim::run(scenario(name)).trace;
    auto m = analysis::report(trace);
    const auto& victim = m.ues.at("victim");
    bool ok = victim.denials.size() == 1 && victim.denials[0].cause == 7 && !victim.denials[0].open;
    if (ok) {
      const auto& d = victim.denials[0];
      auto recovery = std::find_if(victim.recoveries.begin(), victim.recoveries.end(), [&](const auto& r) {
        return r.effective && r.at_ms >= d.end_ms - kSecond && r.at_ms <= d.end_ms;
      });
      TimeMs until = recovery == victim.recoveries.end() ? d.end_ms : recovery->at_ms;
      for (const auto& s : statuses(trace, "victim")) {
        if (s.at_ms < d.start_ms || s.at_ms >= until) continue;
        ok = ok && (s.status->camped == Rat::utran || s.status->camped == Rat::gsm) && !s.status->usim_valid_lte;
      }
      ok = ok && lte_registrations(trace, "victim", d.start_ms, until) == 0 && victim.lte_attempts_while_barred == 0;
      ok = ok && recovery != victim.recoveries.end() && victim.final_status && victim.final_status->camped == Rat::lte;
      d1_note += std::string(d1_note.empty() ? "" : ", ") + fmt("%.1f", d.duration_ms() / 60000.0) + " min";
    }
    v.require(ok, std::string("cause 7 bar in ") + name);
  }

  {
    auto trace = sim::run(scenario("d2_deny_all.json")).trace;
    auto m = analysis::report(trace);
    const auto& victim = m.ues.at("victim");
    bool ok = victim.denials.size() == 1 && victim.denials[0].cause == 8 && victim.denials[0].open;
    int moves = 0;
    if (ok) {
      const auto& d = victim.denials[0];
      for (const auto& s : statuses(trace, "victim")) {
        if (s.at_ms >= d.start_ms) ok = ok && s.status->camped == Rat::none;
      }
      for (const auto& r : victim.recoveries) {
        if (r.action == RecoveryAction::move_new_ta) ++moves;
        ok = ok && !r.effective;
      }
      ok = ok && m.end_ms - d.start_ms >= 24 * kHour - kMinute && lte_registrations(trace, "victim", d.start_ms, m.end_ms) == 0;
    }
    v.require(ok && moves == 3, "cause 8 bar across 3 moves");
    if (ok) v.note("D1 denials " + d1_note + "; D2 " + fmt("%.2f", (m.end_ms - victim.denials[0].start_ms) / 3.6e6) + " h camped none over " + std::to_string(moves) + " moves");
  }

  std::string t_note;
  for (const char* name : {"d1_t3245.json", "d2_t3245.json"}) {
    auto m = analysis::report(sim::run(scenario(name)).trace);
    const auto& victim = m.ues.at("victim");
    double minutes = victim.denials.size() == 1 && !victim.denials[0].open ? victim.denials[0].duration_ms() / 60000.0 : -1;
    v.require(minutes >= kT3245MinMin && minutes <= kT3245MaxMin, std::string("T3245 window in ") + name);
    t_note += std::string(t_note.empty() ? "" : ", ") + fmt("%.2f", minutes);
  }
  v.note("T3245 denials " + t_note + " min");
  return v;
}

Verdict bidding_down()
{
  Verdict v;
  {
    auto cut = sim::run(scenario("d3_strip.json", std::nullopt, [](nlohmann::json& d) {
      constexpr TimeMs kCut = 700000;
      d["duration_ms"] = kCut;
      auto& events = d["subscribers"][0]["events"];
      nlohmann::json kept = nlohmann::json::array();
      for (const auto& e : events) {
        if (e["at_ms"].get<TimeMs>() < kCut) kept.push_back(e);
      }
      events = kept;
    }));
    const auto& ctx = cut.mme_contexts.at("victim");
    v.require(!ctx.capabilities.voice_domain_preference && ctx.capabilities.sms_only, "MME holds stripped profile");
  }
  std::string note;
  for (const char* name : {"d3_strip.json", "d3_move_new_ta.json"}) {
    auto m = analysis::report(sim::run(scenario(name)).trace);
    const auto& u = m.ues.at("victim");
    bool ok = u.voice_mt_failed == kD3Attempts && u.voice_mo_failed == kD3Attempts && u.sms_delivered == kD3Attempts;
    bool restored = u.voice_mt_ok >= 1 && u.voice_mo_ok >= 1;
    v.require(ok, std::string("voice rejected, SMS delivered in ") + name);
    v.require(restored, std::string("voice restored in ") + name);
    note += std::string(note.empty() ? "" : "; ") + name + " mt " + std::to_string(u.voice_mt_failed) + "/" +
            std::to_string(kD3Attempts) + " rejected, mo " + std::to_string(u.voice_mo_failed) + "/" +
            std::to_string(kD3Attempts) + ", sms " + std::to_string(u.sms_delivered) + "/" +
            std::to_string(kD3Attempts);
  }
  {
    auto m = analysis::report(sim::run(scenario("d3_echo.json")).trace);
    const auto& u = m.ues.at("victim");
    bool ok = u.attach_aborts >= 1 && u.voice_mt_failed == 0 && u.voice_mo_failed == 0 &&
              u.voice_mt_ok == kD3Attempts && u.voice_mo_ok == kD3Attempts;
    v.require(ok, "echo countermeasure");
    note += "; echo: " + std::to_string(u.attach_aborts) + " aborts, voice " +
            std::to_string(u.voice_mt_ok + u.voice_mo_ok) + "/" + std::to_string(2 * kD3Attempts) + " ok";
  }
  v.note(note);
  return v;
}

double oracle_radius(const radio::Transmitter& tx, const radio::PathLossModel& model, double sensitivity)
{
  double lo = 1.0, hi = 1.0;
  while (radio::rssi_at(tx, model, {tx.position.x + hi, tx.position.y}) >= sensitivity) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-6; ++i) {
    double mid = 0.5 * (lo + hi);
    if (radio::rssi_at(tx, model, {tx.position.x + mid, tx.position.y}) >= sensitivity) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

Verdict amplification()
{
  Verdict v;
  radio::Transmitter base;
  base.tx_power_dbm = 20.0;
  base.antenna_height_m = 1.5;
  radio::Transmitter amp = base;
  amp.tx_power_dbm = 30.0;
  amp.antenna_height_m = 10.0;
  radio::PathLossModel street = radio::street_level_model();
  radio::PathLossModel mast = radio::mast_model();
  double r0 = radio::coverage_radius(base, street, radio::kDefaultSensitivityDbm);
  double r1 = radio::coverage_radius(amp, mast, radio::kDefaultSensitivityDbm);
  double o0 = oracle_radius(base, street, radio::kDefaultSensitivityDbm);
  double o1 = oracle_radius(amp, mast, radio::kDefaultSensitivityDbm);
  v.require(r0 >= kBaselineMinM && r0 <= kBaselineMaxM, "baseline radius");
  v.require(std::get<radio::Cost231Hata>(mast).hb_m == 10.0 && r1 >= kAmplifiedMinM, "amplified radius");
  v.require(std::abs(r0 - o0) <= kOracleToleranceM && std::abs(r1 - o1) <= kOracleToleranceM, "oracle agreement");
  v.note("20 dBm street " + fmt("%.1f", r0) + " m (oracle " + fmt("%.1f", o0) + "), +10 dB mast " +
         fmt("%.1f", r1) + " m (oracle " + fmt("%.1f", o1) + ")");
  return v;
}

Verdict infrastructure()
{
  Verdict v;
  std::mt19937_64 rng(8);
  int codec_failures = 0;
  for (int i = 0; i < kCodecRecords; ++i) {
    TraceRecord r = testing::random_record(rng);
    try {
      std::string line = encode_record(r);
      TraceRecord back = decode_record(line);
      if (!(back == r) || encode_record(back) != line) ++codec_failures;
    } catch (const std::exception&) {
      ++codec_failures;
    }
  }
  v.require(codec_failures == 0, "codec round trip");

  int nondeterministic = 0, replay_mismatch = 0, replays = 0;
  for (const auto& name : kFixtures) {
    auto s = scenario(name);
    auto first = sim::run(s);
    auto second = sim::run(s);
    std::string bytes = encode(first.trace);
    if (bytes != encode(second.trace)) ++nondeterministic;
    auto trace = round_trip(first.trace);
    if (first.trigger_log) {
      auto log = analysis::trigger_log_from_json(analysis::to_json(*first.trigger_log));
      auto offline = analysis::link(trace, log);
      auto recorded = analysis::recorded_link(trace);
      if (!(offline.results == recorded.results) || offline.located_cell != recorded.located_cell) ++replay_mismatch;
      ++replays;
    }
    if (std::holds_alternative<sim::ActiveSpec>(s.attacker)) {
      auto offline = analysis::locate(trace, s);
      auto recorded = analysis::recorded_fixes(trace);
      bool same = offline.size() == recorded.size();
      for (std::size_t i = 0; same && i < offline.size(); ++i) {
        same = offline[i].method == recorded[i].method &&
               std::abs(offline[i].position.x - recorded[i].position.x) <= 1e-9 &&
               std::abs(offline[i].position.y - recorded[i].position.y) <= 1e-9;
      }
      if (!same) ++replay_mismatch;
      ++replays;
    }
  }
  v.require(nondeterministic == 0, "determinism");
  v.require(replay_mismatch == 0, "offline replay");

  int unsound = 0;
  std::uniform_int_distribution<int> n_trials(1, 10), n_noise(0, 40);
  std::uniform_int_distribution<std::uint32_t> population(0, 120);
  for (int trial = 0; trial < kSoundnessTrials; ++trial) {
    Guti victim{0xA1, 0x10000000u + static_cast<std::uint32_t>(trial)};
    std::vector<attack::SnifferLog> logs(static_cast<std::size_t>(n_trials(rng)));
    for (auto& log : logs) {
      int noise = n_noise(rng);
      std::uniform_int_distribution<int> slot(0, noise);
      int at = slot(rng);
      for (int j = 0; j <= noise; ++j) {
        if (j == at) log.observations.push_back({j, victim});
        log.observations.push_back({j, Guti{0xA1, population(rng)}});
      }
    }
    auto out = attack::intersect_link(logs);
    if (out.candidates.count(victim) == 0 || out.delivery_failure) ++unsound;
  }
  v.require(unsound == 0, "intersection soundness");
  v.note(std::to_string(kCodecRecords) + " records, " + std::to_string(codec_failures) + " codec failures; " +
         std::to_string(kFixtures.size()) + " fixtures deterministic=" + std::to_string(kFixtures.size() - nondeterministic) +
         "; " + std::to_string(replays) + " replays, " + std::to_string(replay_mismatch) + " mismatches; " +
         std::to_string(kSoundnessTrials) + " intersection trials, " + std::to_string(unsound) + " unsound");
  return v;
}

}  // namespace

int main()
{
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"L2 cell granularity", l2_granularity},   {"smart-paging dispatch", smart_paging},
      {"GUTI persistence", guti_persistence},     {"L3 trilateration", trilateration},
      {"D1/D2 persistence", denial_persistence}, {"D3 bidding-down", bidding_down},
      {"amplification", amplification},          {"infrastructure properties", infrastructure}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    if (!v.pass) ++failures;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, criteria[i].first.c_str(), v.pass ? "PASS" : "FAIL",
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
