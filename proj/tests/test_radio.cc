#include "ltesim/radio.h"

#include <doctest.h>

#include <cmath>

using namespace ltesim;
using namespace ltesim::radio;

namespace {

Transmitter tx_at(double x, double y, double power, std::uint32_t id)
{
  Transmitter t;
  t.position = {x, y};
  t.tx_power_dbm = power;
  t.cell.cell_id = id;
  t.cell.reselection_priority = 5;
  return t;
}

// Hand evaluation of the COST-231 formula, kept separate from the library code.
double hata_oracle(double f, double hb, double hm, double c, double d_km)
{
  double lf = std::log10(f);
  double a = (1.1 * lf - 0.7) * hm - (1.56 * lf - 0.8);
  return 46.3 + 33.9 * lf - 13.82 * std::log10(hb) - a + (44.9 - 6.55 * std::log10(hb)) * std::log10(d_km) + c;
}

}  // namespace

TEST_CASE("log-distance values")
{
  LogDistance m{40, 1, 2, 0};
  CHECK(path_loss(m, 100) == doctest::Approx(80.0).epsilon(1e-12));
  CHECK(path_loss(m, 1.0) == 40.0);
  CHECK(path_loss(m, 200) - path_loss(m, 100) == doctest::Approx(20 * std::log10(2.0)));
  CHECK(rssi_at(tx_at(0, 0, 20, 1), m, {100, 0}) == doctest::Approx(-60.0));
}

TEST_CASE("cost231-hata against the formula oracle")
{
  Cost231Hata m{800, 10, 1.5, 0};
  // Frozen oracle value for C=0 at 0.8 km.
  CHECK(path_loss(m, 800) == doctest::Approx(127.167).epsilon(0.01 / 127.0));
  CHECK(path_loss(m, 800) == doctest::Approx(hata_oracle(800, 10, 1.5, 0, 0.8)).epsilon(1e-12));
  Cost231Hata metro{800, 10, 1.5, 3};
  CHECK(path_loss(metro, 800) - path_loss(m, 800) == doctest::Approx(3.0));
  CHECK(within_fitted_range(m));
  CHECK_FALSE(within_fitted_range(Cost231Hata{2600, 10, 1.5, 0}));
}

TEST_CASE("domain errors")
{
  LogDistance m{40, 1, 2, 0};
  CHECK_THROWS_AS(path_loss(m, 0), DomainError);
  CHECK_THROWS_AS(path_loss(m, -5), DomainError);
  CHECK_THROWS_AS(rssi_at(tx_at(3, 4, 20, 1), m, {3, 4}), DomainError);
  CHECK_THROWS_AS(coverage_radius(tx_at(0, 0, 20, 1), m, -19.0), DomainError);
  CHECK_THROWS_AS(validate(LogDistance{40, 1, 0.5, 0}), InvalidValue);
  CHECK_THROWS_AS(validate(Cost231Hata{800, 10, 1.5, 1}), InvalidValue);
}

TEST_CASE("path loss strictly increases with distance")
{
  std::vector<PathLossModel> models{LogDistance{40, 1, 2, 0}, street_level_model(), mast_model(),
                                    Cost231Hata{1800, 30, 1.5, 0}};
  for (const auto& model : models) {
    double prev = path_loss(model, 0.5);
    for (double d = 0.75; d < 50000; d *= 1.25) {
      double l = path_loss(model, d);
      CHECK(l > prev);
      prev = l;
    }
  }
}

TEST_CASE("rssi plus loss equals transmit power")
{
  auto model = street_level_model();
  Transmitter t = tx_at(10, -20, 17.5, 3);
  for (double x = -500; x <= 500; x += 37.5) {
    Position p{x, 13};
    double sum = rssi_at(t, model, p) + path_loss(model, distance(t.position, p));
    CHECK(sum == doctest::Approx(17.5).epsilon(1e-12));
  }
}

TEST_CASE("coverage calibration")
{
  SUBCASE("street-level SDR at 20 dBm")
  {
    double r = coverage_radius(tx_at(0, 0, 20, 1), street_level_model(), kDefaultSensitivityDbm);
    CHECK(r >= 50.0);
    CHECK(r <= 100.0);
    CHECK(rssi_at(tx_at(0, 0, 20, 1), street_level_model(), {r, 0}) ==
          doctest::Approx(kDefaultSensitivityDbm).epsilon(0.05 / 101.0));
  }
  SUBCASE("amplified, +10 dB on a 10 m mast")
  {
    double r = coverage_radius(tx_at(0, 0, 30, 1), mast_model(), kDefaultSensitivityDbm);
    CHECK(r >= 800.0);
    double at_edge = rssi_at(tx_at(0, 0, 30, 1), mast_model(), {r, 0});
    CHECK(std::abs(at_edge - kDefaultSensitivityDbm) <= 0.05);
    // Independent check: the formula oracle at the returned radius.
    CHECK(30.0 - hata_oracle(800, 10, 1.5, 3, r / 1000.0) == doctest::Approx(kDefaultSensitivityDbm).epsilon(1e-6));
  }
  SUBCASE("inversion consistency for many powers")
  {
    for (double p = -10; p <= 46; p += 4) {
      for (const PathLossModel& model : {PathLossModel(street_level_model()), PathLossModel(mast_model())}) {
        double r = coverage_radius(tx_at(0, 0, p, 1), model, kDefaultSensitivityDbm);
        CHECK(std::abs(rssi_at(tx_at(0, 0, p, 1), model, {0, r}) - kDefaultSensitivityDbm) <= 0.05);
      }
    }
  }
}

TEST_CASE("visible cells ranking")
{
  LogDistance m{40, 1, 2, 0};
  SUBCASE("single in range")
  {
    std::vector<Transmitter> txs{tx_at(0, 0, 20, 9), tx_at(100000, 0, 20, 4)};
    auto v = visible_cells({10, 0}, txs, m, -90);
    REQUIRE(v.size() == 1);
    CHECK(v[0].cell.cell_id == 9);
  }
  SUBCASE("equidistant identical cells")
  {
    std::vector<Transmitter> txs{tx_at(100, 0, 20, 8), tx_at(-100, 0, 20, 3)};
    auto v = visible_cells({0, 0}, txs, m, -120);
    REQUIRE(v.size() == 2);
    CHECK(v[0].cell.cell_id == 3);
    CHECK(v[1].cell.cell_id == 8);
  }
  SUBCASE("three-anchor layout follows distance order")
  {
    std::vector<Transmitter> txs{tx_at(0, 0, 20, 1), tx_at(100, 0, 20, 2), tx_at(0, 100, 20, 3)};
    auto v = visible_cells({30, 40}, txs, m, -200);
    REQUIRE(v.size() == 3);
    CHECK(v[0].cell.cell_id == 1);  // 50 m
    CHECK(v[1].cell.cell_id == 3);  // 67.08 m
    CHECK(v[2].cell.cell_id == 2);  // 80.62 m
    CHECK(v[0].rsrp_dbm == doctest::Approx(20 - (40 + 20 * std::log10(50.0))));
  }
}

TEST_CASE("zero shadowing matches the deterministic path")
{
  LogDistance m{40, 1, 3, 0};
  Rng rng(5);
  for (double d = 1; d < 5000; d *= 1.7) {
    CHECK(path_loss(m, d, &rng) == path_loss(m, d));
  }
  LogDistance noisy{40, 1, 3, 4};
  Rng a(11), b(11);
  CHECK(path_loss(noisy, 100, &a) == path_loss(noisy, 100, &b));
}
