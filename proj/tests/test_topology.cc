#include "ltesim/topology.h"

#include <doctest.h>

using namespace ltesim;
using namespace ltesim::core;

TEST_CASE("city preset dimensions")
{
  CellTopology t = make_grid(city_preset());
  CHECK(t.sites().size() == 36);
  CHECK(t.tracking_areas().size() == 4);
  for (const auto& [tac, cells] : t.tracking_areas()) {
    CHECK(cells.size() == 9);
    CHECK(t.ta_area_km2(tac) >= 10.0);
    CHECK(t.ta_area_km2(tac) <= 30.0);
  }
  for (const auto& site : t.sites()) CHECK(area_km2(site.geometry) <= 2.0);
  CHECK_NOTHROW(check_city_dimensions(t));
  CHECK(t.max_priority() == 5);
}

TEST_CASE("grids outside the city envelope are refused")
{
  GridSpec big = city_preset();
  big.ta_rows = 6;
  big.ta_cols = 6;
  CHECK_THROWS_AS(check_city_dimensions(make_grid(big)), InvalidValue);

  GridSpec coarse = city_preset();
  coarse.spacing_m = 1500.0;
  CHECK_THROWS_AS(check_city_dimensions(make_grid(coarse)), InvalidValue);
}

TEST_CASE("every grid point lies in exactly one cell")
{
  CellTopology t = make_grid(city_preset());
  for (double x = 10; x < 7200; x += 397) {
    for (double y = 10; y < 7200; y += 411) {
      int hits = 0;
      for (const auto& site : t.sites()) hits += contains(site.geometry, {x, y}) ? 1 : 0;
      CHECK(hits == 1);
    }
  }
}

TEST_CASE("polygon and disc areas")
{
  Polygon square{{{0, 0}, {1000, 0}, {1000, 1000}, {0, 1000}}};
  CHECK(area_km2(square) == doctest::Approx(1.0));
  Polygon reversed{{{0, 1000}, {1000, 1000}, {1000, 0}, {0, 0}}};
  CHECK(area_km2(reversed) == doctest::Approx(1.0));
  CHECK(contains(square, {500, 500}));
  CHECK_FALSE(contains(square, {1500, 500}));
  Disc d{{0, 0}, 1000};
  CHECK(area_km2(d) == doctest::Approx(3.14159265).epsilon(1e-6));
}

TEST_CASE("duplicate and mismatched sites")
{
  CellTopology t = make_grid(city_preset());
  CellSite copy = t.sites().front();
  CHECK_THROWS_AS(t.add(copy), InvalidValue);
  CellSite odd = t.sites().front();
  odd.identity.cell_id = 0x999;
  CHECK_THROWS_AS(t.add(odd), InvalidValue);
  CHECK_THROWS_AS(t.at(0xABCDE), InvalidValue);
}
