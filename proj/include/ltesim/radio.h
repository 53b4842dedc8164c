#pragma once

#include "ltesim/message.h"

#include <random>
#include <span>
#include <variant>
#include <vector>

namespace ltesim::radio {

using Rng = std::mt19937_64;

/// Bad geometry or an unreachable link budget.
class DomainError : public InvalidValue {
 public:
  using InvalidValue::InvalidValue;
};

/// pl0 + 10 n log10(d / d0), optionally plus a normal draw in dB.
struct LogDistance {
  double pl0_db = 40.0;
  double d0_m = 1.0;
  double exponent_n = 2.0;
  double shadowing_sigma_db = 0.0;

  bool operator==(const LogDistance&) const = default;
};

/// COST-231 extension of the Hata model, small/medium city mobile correction.
struct Cost231Hata {
  double freq_mhz = 800.0;
  double hb_m = 10.0;
  double hm_m = 1.5;
  double metro_correction_db = 3.0;

  bool operator==(const Cost231Hata&) const = default;
};

using PathLossModel = std::variant<LogDistance, Cost231Hata>;

void validate(const PathLossModel& model);
/// The published fit covers 150-2000 MHz; outside it the formula is extrapolated.
bool within_fitted_range(const Cost231Hata& model);

struct Transmitter {
  Position position;
  double tx_power_dbm = 20.0;
  double antenna_height_m = 10.0;
  CellIdentity cell;
};

/// Loss in dB at distance_m. noise draws shadowing when the model has a
/// non-zero sigma; nullptr means the deterministic mean.
double path_loss(const PathLossModel& model, double distance_m, Rng* noise = nullptr);

double rssi_at(const Transmitter& tx, const PathLossModel& model, const Position& ue_pos, Rng* noise = nullptr);

/// Largest distance with rssi >= sensitivity, noise off.
double coverage_radius(const Transmitter& tx, const PathLossModel& model, double sensitivity_dbm);

/// Distance at which the mean path loss equals loss_db. Closed form for
/// LogDistance, bisection for COST-231-Hata.
double invert_path_loss(const PathLossModel& model, double loss_db);

/// Cells at or above floor_dbm, strongest first, ties by lower cell_id.
std::vector<CellMeasurement> visible_cells(const Position& ue_pos, std::span<const Transmitter> transmitters,
                                           const PathLossModel& model, double floor_dbm, Rng* noise = nullptr);

/// Receiver sensitivity used by the coverage calibration.
constexpr double kDefaultSensitivityDbm = -101.0;

/// Street-level SDR link: with 20 dBm output and kDefaultSensitivityDbm the
/// coverage radius lands inside 50-100 m.
LogDistance street_level_model();

/// Amplifier on a 10 m mast in an 800 MHz city deployment.
Cost231Hata mast_model();

}  // namespace ltesim::radio
