#pragma once

#include "ltesim/radio.h"

#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

namespace ltesim::core {

struct Disc {
  Position center;
  double radius_m = 0.0;
};

/// Simple polygon, vertices in order (either orientation).
struct Polygon {
  std::vector<Position> vertices;
};

using CellGeometry = std::variant<Disc, Polygon>;

double area_km2(const CellGeometry& g);
bool contains(const CellGeometry& g, const Position& p);

struct CellSite {
  CellIdentity identity;
  radio::Transmitter transmitter;
  CellGeometry geometry;
};

class CellTopology {
 public:
  /// Throws InvalidValue on duplicate cell ids or a site whose transmitter
  /// does not carry its own identity.
  void add(CellSite site);

  const std::vector<CellSite>& sites() const { return sites_; }
  const CellSite* find(std::uint32_t cell_id) const;
  const CellSite& at(std::uint32_t cell_id) const;
  bool has_tac(std::uint16_t tac) const { return tracking_areas_.count(tac) != 0; }

  const std::map<std::uint16_t, std::set<std::uint32_t>>& tracking_areas() const { return tracking_areas_; }
  std::vector<CellIdentity> cells_in_ta(std::uint16_t tac) const;
  double ta_area_km2(std::uint16_t tac) const;
  int max_priority() const;

  std::vector<radio::Transmitter> transmitters() const;

 private:
  std::vector<CellSite> sites_;
  std::map<std::uint32_t, std::size_t> index_;
  std::map<std::uint16_t, std::set<std::uint32_t>> tracking_areas_;
};

/// Square cells on a regular grid, grouped into rectangular tracking areas.
struct GridSpec {
  int rows = 1;
  int cols = 1;
  double spacing_m = 1000.0;
  int ta_rows = 1;
  int ta_cols = 1;
  double tx_power_dbm = 46.0;
  double antenna_height_m = 30.0;
  double frequency_mhz = 1815.0;
  int priority = 5;
  std::string mcc = "001";
  std::string mnc = "01";
  std::uint16_t first_tac = 0x0101;
  std::uint32_t first_cell_id = 0x101;
  Position origin;
};

CellTopology make_grid(const GridSpec& spec);

/// 6x6 grid of 1.2 km cells in 3x3-cell tracking areas: 1.44 km2 cells,
/// 12.96 km2 TAs.
GridSpec city_preset();

/// Throws InvalidValue unless every TA is 10-30 km2 and every cell at most 2 km2.
void check_city_dimensions(const CellTopology& topology);

}  // namespace ltesim::core
