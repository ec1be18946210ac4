#include "bdsfix/coverage.hpp"

#include <algorithm>
#include <cmath>

#include "bdsfix/error.hpp"

namespace bdsfix {

void validate(const GridSpec& grid) {
  if (!(grid.lat_step_deg > 0.0) || !(grid.lon_step_deg > 0.0)) {
    throw DomainError("grid steps must be positive");
  }
  const double per_turn = 360.0 / grid.lon_step_deg;
  if (std::abs(per_turn - std::round(per_turn)) > 1e-9) {
    throw DomainError("longitude step must divide 360");
  }
  if (grid.altitudes_m.empty()) throw DomainError("grid needs at least one altitude");
}

std::vector<GeodeticPoint> grid_points(const GridSpec& grid, double altitude_m) {
  validate(grid);
  const auto n_lon = static_cast<int>(std::lround(360.0 / grid.lon_step_deg));
  const auto n_lat = static_cast<int>(std::floor(180.0 / grid.lat_step_deg + 1e-9));
  std::vector<GeodeticPoint> out;
  for (int i = 0; i <= n_lat; ++i) {
    const double lat = std::min(-90.0 + i * grid.lat_step_deg, 90.0);
    if (std::abs(lat) == 90.0) {
      out.push_back({lat, 0.0, altitude_m});
      continue;
    }
    for (int k = 0; k < n_lon; ++k) {
      out.push_back({lat, -180.0 + (k + 0.5) * grid.lon_step_deg, altitude_m});
    }
  }
  return out;
}

CoverageCell evaluate_cell(const std::vector<SatellitePosition>& positions, const GeodeticPoint& point,
                           const SolverConfig& cfg) {
  validate(point);
  if (point.altitude_m < 0.0 || point.altitude_m > 2.0e6) {
    throw DomainError("coverage altitude must be within [0, 2000 km]");
  }
  const EcefVector user = geodetic_to_ecef(point);
  CoverageCell cell;
  cell.point = point;

  std::vector<EcefVector> geos;
  for (const auto& v : visible_satellites(positions, user, cfg.elevation_cutoff_deg)) {
    if (v.is_geo) geos.push_back(v.position);
  }
  cell.n_geo_visible = static_cast<int>(geos.size());
  if (geos.size() >= 4) {
    const GateResult gate = eigenvalue_gate(geo_normal_matrix(geos, user), cfg.beta);
    cell.gdop_geo = gate.gdop;
    cell.gate_pass = gate.pass;
  }
  return cell;
}

CoverageCell evaluate_cell(const Catalog& cat, const GeodeticPoint& point, UtcTime t,
                           const SolverConfig& cfg) {
  return evaluate_cell(positions_at(cat, t), point, cfg);
}

Extents extents_of(const std::vector<CoverageCell>& cells) {
  if (cells.empty()) throw DomainError("no cells to bound");
  Extents ext{90.0, -90.0, 0.0, 0.0};
  std::vector<double> lons;
  for (const auto& c : cells) {
    ext.min_lat_deg = std::min(ext.min_lat_deg, c.point.latitude_deg);
    ext.max_lat_deg = std::max(ext.max_lat_deg, c.point.latitude_deg);
    // Pole points carry no longitude information.
    if (std::abs(c.point.latitude_deg) < 90.0) lons.push_back(c.point.longitude_deg);
  }
  if (lons.empty()) {
    ext.west_lon_deg = -180.0;
    ext.east_lon_deg = 180.0;
    return ext;
  }
  std::sort(lons.begin(), lons.end());
  lons.erase(std::unique(lons.begin(), lons.end()), lons.end());

  // The complement of the largest gap between neighbours is the tightest arc.
  std::size_t gap_after = lons.size() - 1;
  double largest = lons.front() + 360.0 - lons.back();
  for (std::size_t i = 0; i + 1 < lons.size(); ++i) {
    const double gap = lons[i + 1] - lons[i];
    if (gap > largest) {
      largest = gap;
      gap_after = i;
    }
  }
  ext.east_lon_deg = lons[gap_after];
  ext.west_lon_deg = lons[(gap_after + 1) % lons.size()];
  return ext;
}

std::vector<Footprint> footprint(const Catalog& cat, UtcTime t, const SolverConfig& cfg,
                                 const GridSpec& grid) {
  validate(grid);
  const auto positions = positions_at(cat, t);
  std::vector<Footprint> out;
  for (double alt : grid.altitudes_m) {
    Footprint fp;
    fp.altitude_m = alt;
    for (const auto& p : grid_points(grid, alt)) {
      CoverageCell cell = evaluate_cell(positions, p, cfg);
      if (cell.n_geo_visible >= 4) fp.cells.push_back(std::move(cell));
    }
    if (!fp.cells.empty()) fp.extents = extents_of(fp.cells);
    out.push_back(std::move(fp));
  }
  return out;
}

std::vector<UtcTime> sweep_epochs(UtcTime start, double duration_s, double step_s) {
  if (!(step_s > 0.0)) throw DomainError("sweep step must be positive");
  if (!(duration_s >= 0.0)) throw DomainError("sweep duration must be non-negative");
  const auto count = static_cast<long long>(std::floor(duration_s / step_s + 1e-9));
  std::vector<UtcTime> out;
  out.reserve(static_cast<std::size_t>(count + 1));
  for (long long k = 0; k <= count; ++k) {
    out.push_back(add_seconds(start, static_cast<double>(k) * step_s));
  }
  return out;
}

namespace {

void finish(ProportionSeries& series) {
  std::size_t pass = 0;
  std::size_t total = 0;
  for (const auto& e : series.epochs) {
    pass += e.cells_pass;
    total += e.cells_4geo;
    if (!e.proportion) continue;
    const double p = *e.proportion;
    series.max_proportion = series.max_proportion ? std::max(*series.max_proportion, p) : p;
    series.min_proportion = series.min_proportion ? std::min(*series.min_proportion, p) : p;
  }
  if (total > 0) series.overall = static_cast<double>(pass) / static_cast<double>(total);
}

void set_proportion(EpochProportion& e) {
  if (e.cells_4geo > 0) {
    e.proportion = static_cast<double>(e.cells_pass) / static_cast<double>(e.cells_4geo);
  }
}

}  // namespace

SweepSummary sweep(const Catalog& cat, UtcTime start, double duration_s, double step_s,
                   const GridSpec& grid, const SolverConfig& cfg, const CellVisitor& visit) {
  validate(grid);
  SweepSummary summary;
  summary.altitudes_m = grid.altitudes_m;
  summary.per_altitude.resize(grid.altitudes_m.size());

  std::vector<std::vector<GeodeticPoint>> points;
  for (double alt : grid.altitudes_m) points.push_back(grid_points(grid, alt));

  for (const UtcTime t : sweep_epochs(start, duration_s, step_s)) {
    const auto positions = positions_at(cat, t);
    EpochProportion pooled{t, 0, 0, std::nullopt};
    for (std::size_t a = 0; a < points.size(); ++a) {
      EpochProportion e{t, 0, 0, std::nullopt};
      for (const auto& p : points[a]) {
        const CoverageCell cell = evaluate_cell(positions, p, cfg);
        if (cell.n_geo_visible >= 4) {
          ++e.cells_4geo;
          if (cell.gate_pass) ++e.cells_pass;
        }
        if (visit) visit(t, cell);
      }
      set_proportion(e);
      pooled.cells_4geo += e.cells_4geo;
      pooled.cells_pass += e.cells_pass;
      summary.per_altitude[a].epochs.push_back(e);
    }
    set_proportion(pooled);
    summary.all.epochs.push_back(pooled);
  }
  for (auto& s : summary.per_altitude) finish(s);
  finish(summary.all);
  return summary;
}

}  // namespace bdsfix
