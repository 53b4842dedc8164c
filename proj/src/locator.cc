#include "ltesim/locator.h"

#include <cmath>
#include <numbers>

namespace ltesim::locate {

double distance_from_rssi(double rssi_dbm, double tx_power_dbm, const radio::PathLossModel& model)
{
  double loss = tx_power_dbm - rssi_dbm;
  if (const auto* ld = std::get_if<radio::LogDistance>(&model)) {
    if (loss < ld->pl0_db) {
      throw radio::DomainError("rssi stronger than the reference-distance level");
    }
  }
  return radio::invert_path_loss(model, loss);
}

double confidence_band(double distance_m, const radio::PathLossModel& model)
{
  const auto* ld = std::get_if<radio::LogDistance>(&model);
  if (ld == nullptr || ld->shadowing_sigma_db == 0.0) {
    return 0.0;
  }
  return distance_m * (std::pow(10.0, ld->shadowing_sigma_db / (10.0 * ld->exponent_n)) - 1.0);
}

DistanceEstimate estimate(const CellMeasurement& m, const radio::Transmitter& anchor,
                          const radio::PathLossModel& model)
{
  DistanceEstimate e;
  e.anchor_cell = anchor.cell;
  e.anchor = anchor.position;
  e.distance_m = distance_from_rssi(m.rsrp_dbm, anchor.tx_power_dbm, model);
  e.confidence_band_m = confidence_band(e.distance_m, model);
  return e;
}

PositionFix trilaterate(std::span<const DistanceEstimate> estimates)
{
  if (estimates.size() < 3) {
    throw InsufficientAnchors("trilateration needs at least 3 anchors");
  }
  const auto& first = estimates.front();
  double x1 = first.anchor.x;
  double y1 = first.anchor.y;
  double d1 = first.distance_m;

  // Work relative to the first anchor to keep the squares small.
  double ata00 = 0, ata01 = 0, ata11 = 0, atb0 = 0, atb1 = 0;
  for (std::size_t i = 1; i < estimates.size(); ++i) {
    double xi = estimates[i].anchor.x - x1;
    double yi = estimates[i].anchor.y - y1;
    double di = estimates[i].distance_m;
    double a0 = 2.0 * xi;
    double a1 = 2.0 * yi;
    double b = d1 * d1 - di * di + xi * xi + yi * yi;
    ata00 += a0 * a0;
    ata01 += a0 * a1;
    ata11 += a1 * a1;
    atb0 += a0 * b;
    atb1 += a1 * b;
  }
  double det = ata00 * ata11 - ata01 * ata01;
  double scale = ata00 + ata11;
  if (scale == 0.0 || std::abs(det) <= 1e-12 * scale * scale) {
    throw DegenerateGeometry("anchors are collinear");
  }
  PositionFix fix;
  fix.position.x = x1 + (ata11 * atb0 - ata01 * atb1) / det;
  fix.position.y = y1 + (ata00 * atb1 - ata01 * atb0) / det;

  double sq = 0.0;
  for (const auto& e : estimates) {
    double r = distance(fix.position, e.anchor) - e.distance_m;
    sq += r * r;
  }
  fix.residual_m = std::sqrt(sq / static_cast<double>(estimates.size()));
  fix.method = FixMethod::trilateration;
  return fix;
}

PositionFix gps_fix(const Position& reported)
{
  return PositionFix{reported, 0.0, FixMethod::gps};
}

LocalizationReport localization_report(const PositionFix& fix, const Position& ground_truth)
{
  LocalizationReport r;
  r.error_m = distance(fix.position, ground_truth);
  r.area_km2 = std::numbers::pi * fix.residual_m * fix.residual_m / 1e6;
  return r;
}

LocalizationReport cell_report(const Position& cell_reference, double cell_area_km2, const Position& ground_truth)
{
  return LocalizationReport{distance(cell_reference, ground_truth), cell_area_km2};
}

}  // namespace ltesim::locate
