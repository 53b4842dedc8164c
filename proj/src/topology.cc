#include "ltesim/topology.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ltesim::core {

double area_km2(const CellGeometry& g)
{
  if (const auto* d = std::get_if<Disc>(&g)) {
    return std::numbers::pi * d->radius_m * d->radius_m / 1e6;
  }
  const auto& v = std::get<Polygon>(g).vertices;
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& a = v[i];
    const auto& b = v[(i + 1) % v.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return std::abs(twice) / 2.0 / 1e6;
}

bool contains(const CellGeometry& g, const Position& p)
{
  if (const auto* d = std::get_if<Disc>(&g)) {
    return distance(d->center, p) <= d->radius_m;
  }
  // Even-odd ray casting.
  const auto& v = std::get<Polygon>(g).vertices;
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y) &&
        p.x < (v[j].x - v[i].x) * (p.y - v[i].y) / (v[j].y - v[i].y) + v[i].x) {
      inside = !inside;
    }
  }
  return inside;
}

void CellTopology::add(CellSite site)
{
  site.identity.validate();
  if (!(site.transmitter.cell == site.identity)) {
    throw InvalidValue("cell " + std::to_string(site.identity.cell_id) + ": transmitter identity mismatch");
  }
  if (index_.count(site.identity.cell_id) != 0) {
    throw InvalidValue("duplicate cell id " + hex_string(site.identity.cell_id, 7));
  }
  if (const auto* poly = std::get_if<Polygon>(&site.geometry); poly != nullptr && poly->vertices.size() < 3) {
    throw InvalidValue("cell polygon needs at least 3 vertices");
  }
  index_[site.identity.cell_id] = sites_.size();
  // Only LTE cells belong to tracking areas; 2G/3G cells are radio-only neighbors.
  if (site.identity.rat == Rat::lte) {
    tracking_areas_[site.identity.tac].insert(site.identity.cell_id);
  }
  sites_.push_back(std::move(site));
}

const CellSite* CellTopology::find(std::uint32_t cell_id) const
{
  auto it = index_.find(cell_id);
  return it == index_.end() ? nullptr : &sites_[it->second];
}

const CellSite& CellTopology::at(std::uint32_t cell_id) const
{
  const CellSite* s = find(cell_id);
  if (s == nullptr) {
    throw InvalidValue("unknown cell " + hex_string(cell_id, 7));
  }
  return *s;
}

std::vector<CellIdentity> CellTopology::cells_in_ta(std::uint16_t tac) const
{
  std::vector<CellIdentity> out;
  auto it = tracking_areas_.find(tac);
  if (it == tracking_areas_.end()) return out;
  for (auto id : it->second) out.push_back(at(id).identity);
  return out;
}

double CellTopology::ta_area_km2(std::uint16_t tac) const
{
  double sum = 0.0;
  auto it = tracking_areas_.find(tac);
  if (it == tracking_areas_.end()) return sum;
  for (auto id : it->second) sum += area_km2(at(id).geometry);
  return sum;
}

int CellTopology::max_priority() const
{
  int p = -1;
  for (const auto& s : sites_) p = std::max(p, s.identity.reselection_priority);
  return p;
}

std::vector<radio::Transmitter> CellTopology::transmitters() const
{
  std::vector<radio::Transmitter> out;
  out.reserve(sites_.size());
  for (const auto& s : sites_) out.push_back(s.transmitter);
  return out;
}

CellTopology make_grid(const GridSpec& spec)
{
  if (spec.rows < 1 || spec.cols < 1 || spec.ta_rows < 1 || spec.ta_cols < 1 || !(spec.spacing_m > 0)) {
    throw InvalidValue("grid: rows, cols, TA sizes and spacing must be positive");
  }
  int ta_per_row = (spec.cols + spec.ta_cols - 1) / spec.ta_cols;
  CellTopology topo;
  std::uint32_t next_id = spec.first_cell_id;
  double h = spec.spacing_m / 2.0;
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      CellSite s;
      s.identity.mcc = spec.mcc;
      s.identity.mnc = spec.mnc;
      s.identity.cell_id = next_id++;
      s.identity.enodeb_id = s.identity.cell_id & 0xfffff;
      int ta_index = (r / spec.ta_rows) * ta_per_row + (c / spec.ta_cols);
      s.identity.tac = static_cast<std::uint16_t>(spec.first_tac + ta_index);
      s.identity.frequency_mhz = spec.frequency_mhz;
      s.identity.reselection_priority = spec.priority;
      Position center{spec.origin.x + (c + 0.5) * spec.spacing_m, spec.origin.y + (r + 0.5) * spec.spacing_m};
      s.transmitter = {center, spec.tx_power_dbm, spec.antenna_height_m, s.identity};
      s.geometry = Polygon{{{center.x - h, center.y - h},
                            {center.x + h, center.y - h},
                            {center.x + h, center.y + h},
                            {center.x - h, center.y + h}}};
      topo.add(std::move(s));
    }
  }
  return topo;
}

GridSpec city_preset()
{
  GridSpec g;
  g.rows = 6;
  g.cols = 6;
  g.spacing_m = 1200.0;
  g.ta_rows = 3;
  g.ta_cols = 3;
  g.tx_power_dbm = 46.0;
  g.antenna_height_m = 30.0;
  g.frequency_mhz = 1815.0;
  g.priority = 5;
  return g;
}

void check_city_dimensions(const CellTopology& topology)
{
  for (const auto& [tac, cells] : topology.tracking_areas()) {
    double a = topology.ta_area_km2(tac);
    if (a < 10.0 || a > 30.0) {
      throw InvalidValue("tracking area " + hex_string(tac, 4) + " spans " + std::to_string(a) +
                         " km2, outside 10-30 km2");
    }
  }
  for (const auto& s : topology.sites()) {
    if (area_km2(s.geometry) > 2.0) {
      throw InvalidValue("cell " + hex_string(s.identity.cell_id, 7) + " larger than 2 km2");
    }
  }
}

}  // namespace ltesim::core
