#include "ltesim/radio.h"

#include <algorithm>
#include <cmath>

namespace ltesim::radio {

namespace {

double hata_loss(const Cost231Hata& m, double distance_m)
{
  double logf = std::log10(m.freq_mhz);
  double loghb = std::log10(m.hb_m);
  double a_hm = (1.1 * logf - 0.7) * m.hm_m - (1.56 * logf - 0.8);
  double d_km = distance_m / 1000.0;
  return 46.3 + 33.9 * logf - 13.82 * loghb - a_hm + (44.9 - 6.55 * loghb) * std::log10(d_km) +
         m.metro_correction_db;
}

}  // namespace

void validate(const PathLossModel& model)
{
  if (const auto* ld = std::get_if<LogDistance>(&model)) {
    if (!(ld->exponent_n >= 1.0)) throw InvalidValue("log-distance: exponent must be >= 1");
    if (!(ld->d0_m > 0.0)) throw InvalidValue("log-distance: reference distance must be > 0");
    if (!std::isfinite(ld->pl0_db)) throw InvalidValue("log-distance: pl0 must be finite");
    if (!(ld->shadowing_sigma_db >= 0.0)) throw InvalidValue("log-distance: sigma must be >= 0");
    return;
  }
  const auto& h = std::get<Cost231Hata>(model);
  if (!(h.freq_mhz > 0.0) || !(h.hb_m > 0.0) || !(h.hm_m > 0.0)) {
    throw InvalidValue("cost231-hata: frequency and antenna heights must be positive");
  }
  if (h.metro_correction_db != 0.0 && h.metro_correction_db != 3.0) {
    throw InvalidValue("cost231-hata: metro correction is 0 or 3 dB");
  }
}

bool within_fitted_range(const Cost231Hata& model)
{
  return model.freq_mhz >= 150.0 && model.freq_mhz <= 2000.0;
}

double path_loss(const PathLossModel& model, double distance_m, Rng* noise)
{
  if (!(distance_m > 0.0) || !std::isfinite(distance_m)) {
    throw DomainError("path loss needs a positive distance");
  }
  if (const auto* ld = std::get_if<LogDistance>(&model)) {
    double loss = ld->pl0_db + 10.0 * ld->exponent_n * std::log10(distance_m / ld->d0_m);
    if (noise != nullptr && ld->shadowing_sigma_db > 0.0) {
      std::normal_distribution<double> shadow(0.0, ld->shadowing_sigma_db);
      loss += shadow(*noise);
    }
    return loss;
  }
  return hata_loss(std::get<Cost231Hata>(model), distance_m);
}

double rssi_at(const Transmitter& tx, const PathLossModel& model, const Position& ue_pos, Rng* noise)
{
  double d = distance(tx.position, ue_pos);
  if (d == 0.0) {
    throw DomainError("UE coincides with the transmitter");
  }
  return tx.tx_power_dbm - path_loss(model, d, noise);
}

double invert_path_loss(const PathLossModel& model, double loss_db)
{
  if (const auto* ld = std::get_if<LogDistance>(&model)) {
    return ld->d0_m * std::pow(10.0, (loss_db - ld->pl0_db) / (10.0 * ld->exponent_n));
  }
  // Loss is strictly increasing in distance; bracket then bisect.
  double lo = 1e-3;
  double hi = 1.0;
  while (path_loss(model, lo) > loss_db) {
    lo /= 10.0;
    if (lo < 1e-9) throw DomainError("path loss below the model's near-field range");
  }
  while (path_loss(model, hi) < loss_db) {
    hi *= 2.0;
    if (hi > 1e8) throw DomainError("path loss unreachable within 100000 km");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-7 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    if (path_loss(model, mid) <= loss_db) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double coverage_radius(const Transmitter& tx, const PathLossModel& model, double sensitivity_dbm)
{
  double budget = tx.tx_power_dbm - sensitivity_dbm;
  if (const auto* ld = std::get_if<LogDistance>(&model)) {
    if (!(budget > ld->pl0_db)) {
      throw DomainError("sensitivity not reachable even at the reference distance");
    }
  }
  return invert_path_loss(model, budget);
}

std::vector<CellMeasurement> visible_cells(const Position& ue_pos, std::span<const Transmitter> transmitters,
                                           const PathLossModel& model, double floor_dbm, Rng* noise)
{
  std::vector<CellMeasurement> out;
  for (const auto& tx : transmitters) {
    double d = distance(tx.position, ue_pos);
    if (d == 0.0) {
      d = 0.01;  // standing on the mast
    }
    double rssi = tx.tx_power_dbm - path_loss(model, d, noise);
    if (rssi >= floor_dbm) {
      out.push_back({tx.cell, rssi});
    }
  }
  std::sort(out.begin(), out.end(), [](const CellMeasurement& a, const CellMeasurement& b) {
    if (a.rsrp_dbm != b.rsrp_dbm) return a.rsrp_dbm > b.rsrp_dbm;
    return a.cell.cell_id < b.cell.cell_id;
  });
  return out;
}

LogDistance street_level_model()
{
  return LogDistance{40.0, 1.0, 4.2, 0.0};
}

Cost231Hata mast_model()
{
  return Cost231Hata{800.0, 10.0, 1.5, 3.0};
}

}  // namespace ltesim::radio
