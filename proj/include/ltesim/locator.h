#pragma once

#include "ltesim/radio.h"

#include <span>

namespace ltesim::locate {

class InsufficientAnchors : public radio::DomainError {
 public:
  using radio::DomainError::DomainError;
};

class DegenerateGeometry : public radio::DomainError {
 public:
  using radio::DomainError::DomainError;
};

struct DistanceEstimate {
  CellIdentity anchor_cell;
  Position anchor;
  double distance_m = 0.0;
  double confidence_band_m = 0.0;
};

struct PositionFix {
  Position position;
  double residual_m = 0.0;  // RMS circle mismatch
  FixMethod method = FixMethod::trilateration;
};

/// Inverts the mean path loss of the shared model.
double distance_from_rssi(double rssi_dbm, double tx_power_dbm, const radio::PathLossModel& model);

/// One-sigma half width of the distance interval implied by shadowing.
double confidence_band(double distance_m, const radio::PathLossModel& model);

DistanceEstimate estimate(const CellMeasurement& m, const radio::Transmitter& anchor,
                          const radio::PathLossModel& model);

/// Linearized least squares: every circle minus the first gives a linear
/// system in (x, y), solved through its normal equations.
PositionFix trilaterate(std::span<const DistanceEstimate> estimates);

PositionFix gps_fix(const Position& reported);

struct LocalizationReport {
  double error_m = 0.0;
  double area_km2 = 0.0;
};

/// Error against ground truth; area bound pi * residual^2.
LocalizationReport localization_report(const PositionFix& fix, const Position& ground_truth);

/// Cell-level outcome: the area bound is the cell itself, error measured
/// from the cell's reference point.
LocalizationReport cell_report(const Position& cell_reference, double cell_area_km2, const Position& ground_truth);

}  // namespace ltesim::locate
