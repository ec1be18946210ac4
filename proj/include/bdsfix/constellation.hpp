#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bdsfix/frames.hpp"
#include "bdsfix/time.hpp"

namespace bdsfix {

enum class SatClass { Geo, Igso, Meo };

std::string_view to_string(SatClass c);
// Accepts "GEO", "IGSO", "MEO". Throws ParseError otherwise.
SatClass sat_class_from_string(std::string_view s);
// Class implied by the id prefix (G/I/M), if any.
std::optional<SatClass> sat_class_from_id(std::string_view id);

struct SatelliteRecord {
  std::string id;
  SatClass sat_class = SatClass::Geo;
  OrbitalElements elements;

  bool is_geo() const { return sat_class == SatClass::Geo; }
};

// Ordered, non-empty list of satellites with unique ids.
class Catalog {
 public:
  // Throws DomainError when empty or when an id repeats.
  explicit Catalog(std::vector<SatelliteRecord> records);

  const std::vector<SatelliteRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  std::size_t geo_count() const;

  // nullptr when absent.
  const SatelliteRecord* find(std::string_view id) const;
  // Throws DomainError when absent.
  const SatelliteRecord& at(std::string_view id) const;

  // Copy without the listed ids. The result must still be non-empty.
  Catalog without(const std::vector<std::string>& ids) const;

 private:
  std::vector<SatelliteRecord> records_;
};

struct SatellitePosition {
  std::string id;
  SatClass sat_class = SatClass::Geo;
  EcefVector position;
};

struct VisibleSatellite {
  std::string id;
  SatClass sat_class = SatClass::Geo;
  EcefVector position;
  double elevation_deg = 0.0;
  bool is_geo = false;
};

// One entry per record, in catalog order. A propagation failure is rethrown
// as PropagationError naming the satellite.
std::vector<SatellitePosition> positions_at(const Catalog& cat, UtcTime t);

// Satellites at or above `cutoff_deg` as seen from `user`. The user must lie
// between 1 km below the ellipsoid and 2000 km above it.
std::vector<VisibleSatellite> visible_satellites(const Catalog& cat, const EcefVector& user,
                                                 UtcTime t, double cutoff_deg);

// Same filter over precomputed positions.
std::vector<VisibleSatellite> visible_satellites(const std::vector<SatellitePosition>& positions,
                                                 const EcefVector& user, double cutoff_deg);

int count_visible_geos(const Catalog& cat, const EcefVector& user, UtcTime t, double cutoff_deg);

}  // namespace bdsfix
