#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdsfix/constellation.hpp"
#include "bdsfix/coverage.hpp"
#include "bdsfix/measurements.hpp"
#include "bdsfix/solver.hpp"

namespace bdsfix::io {

inline constexpr const char* kElementsHeader =
    "sat_id,class,semi_major_axis_m,eccentricity,inclination_deg,raan_deg,arg_perigee_deg,"
    "true_anomaly_deg,epoch_utc";

inline constexpr const char* kCoverageHeader = "epoch_utc,lat_deg,lon_deg,alt_m,n_geo,gdop_geo,gate_pass";

// Writes `content` to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// Orbital elements CSV. Errors carry the 1-based line number.
Catalog parse_elements(const std::string& text);
Catalog read_elements(const std::filesystem::path& path);
std::string format_elements(const Catalog& cat);
void write_elements(const Catalog& cat, const std::filesystem::path& path);

// Measurements JSON lines, grouped into one set per epoch in ascending epoch
// order; within an epoch, file order is kept.
std::vector<MeasurementSet> parse_measurements(const std::string& text);
std::vector<MeasurementSet> read_measurements(const std::filesystem::path& path);
std::string format_measurements(const std::vector<MeasurementSet>& sets);
void write_measurements(const std::vector<MeasurementSet>& sets, const std::filesystem::path& path);

// Result document. Position, clock and ambiguity fields appear only for a
// converged solve.
nlohmann::json result_to_json(const SolveResult& res);
void write_result(const SolveResult& res, const std::filesystem::path& path);

void write_json(const nlohmann::json& doc, const std::filesystem::path& path);

struct CoverageRow {
  UtcTime epoch{};
  CoverageCell cell;
};

// Rows are sorted by (epoch, lat, lon, alt) before formatting.
std::string format_coverage(std::vector<CoverageRow> rows);
void write_coverage(std::vector<CoverageRow> rows, const std::filesystem::path& path);

}  // namespace bdsfix::io
