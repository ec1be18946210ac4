#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bdsfix/constellation.hpp"
#include "bdsfix/solver.hpp"

namespace bdsfix {

// Latitude rings every lat_step from -90 to 90 (a single point at each pole);
// longitudes at cell centers -180 + lon_step/2 + k lon_step.
struct GridSpec {
  double lat_step_deg = 1.0;
  double lon_step_deg = 1.0;
  std::vector<double> altitudes_m{0.0};
};

// Throws DomainError for non-positive steps or a lon_step that does not
// divide 360.
void validate(const GridSpec& grid);

// Points for one altitude, ordered by latitude then longitude.
std::vector<GeodeticPoint> grid_points(const GridSpec& grid, double altitude_m);

struct CoverageCell {
  GeodeticPoint point;
  int n_geo_visible = 0;
  std::optional<double> gdop_geo;  // only with four or more GEOs
  bool gate_pass = false;
};

// Geometry-only evaluation at one point: visible GEOs at cfg's cutoff and,
// with four or more, their GDOP against cfg.beta.
CoverageCell evaluate_cell(const Catalog& cat, const GeodeticPoint& point, UtcTime t,
                           const SolverConfig& cfg);

// Same over precomputed satellite positions (GEO entries are used).
CoverageCell evaluate_cell(const std::vector<SatellitePosition>& positions, const GeodeticPoint& point,
                           const SolverConfig& cfg);

struct Extents {
  double min_lat_deg = 0.0;
  double max_lat_deg = 0.0;
  // Western and eastern edge of the smallest longitude arc holding every
  // cell; west > east when the arc crosses the antimeridian.
  double west_lon_deg = 0.0;
  double east_lon_deg = 0.0;
};

struct Footprint {
  double altitude_m = 0.0;
  std::vector<CoverageCell> cells;  // cells with four or more GEOs
  std::optional<Extents> extents;   // absent when empty
};

std::vector<Footprint> footprint(const Catalog& cat, UtcTime t, const SolverConfig& cfg,
                                 const GridSpec& grid);

Extents extents_of(const std::vector<CoverageCell>& cells);

struct EpochProportion {
  UtcTime epoch{};
  std::size_t cells_4geo = 0;
  std::size_t cells_pass = 0;
  // cells_pass / cells_4geo; absent when no cell sees four GEOs.
  std::optional<double> proportion;
};

struct ProportionSeries {
  std::vector<EpochProportion> epochs;
  std::optional<double> max_proportion;
  std::optional<double> min_proportion;
  std::optional<double> overall;  // total passing cells / total 4-GEO cells
};

struct SweepSummary {
  std::vector<double> altitudes_m;
  std::vector<ProportionSeries> per_altitude;  // aligned with altitudes_m
  ProportionSeries all;                        // altitudes pooled per epoch
};

// Visits every evaluated cell; called in (epoch, altitude, lat, lon) order.
using CellVisitor = std::function<void(UtcTime, const CoverageCell&)>;

// Epochs start + k step for k = 0 .. floor(duration / step).
std::vector<UtcTime> sweep_epochs(UtcTime start, double duration_s, double step_s);

SweepSummary sweep(const Catalog& cat, UtcTime start, double duration_s, double step_s,
                   const GridSpec& grid, const SolverConfig& cfg, const CellVisitor& visit = {});

}  // namespace bdsfix
