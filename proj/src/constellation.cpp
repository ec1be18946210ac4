#include "bdsfix/constellation.hpp"

#include <algorithm>
#include <unordered_set>

#include "bdsfix/error.hpp"

namespace bdsfix {

std::string_view to_string(SatClass c) {
  switch (c) {
    case SatClass::Geo:
      return "GEO";
    case SatClass::Igso:
      return "IGSO";
    case SatClass::Meo:
      return "MEO";
  }
  return "?";
}

SatClass sat_class_from_string(std::string_view s) {
  if (s == "GEO") return SatClass::Geo;
  if (s == "IGSO") return SatClass::Igso;
  if (s == "MEO") return SatClass::Meo;
  throw ParseError("unknown satellite class '" + std::string(s) + "'");
}

std::optional<SatClass> sat_class_from_id(std::string_view id) {
  if (id.empty()) return std::nullopt;
  switch (id.front()) {
    case 'G':
      return SatClass::Geo;
    case 'I':
      return SatClass::Igso;
    case 'M':
      return SatClass::Meo;
    default:
      return std::nullopt;
  }
}

Catalog::Catalog(std::vector<SatelliteRecord> records) : records_(std::move(records)) {
  if (records_.empty()) {
    throw DomainError("catalog must contain at least one satellite");
  }
  std::unordered_set<std::string> seen;
  for (const auto& r : records_) {
    if (!seen.insert(r.id).second) {
      throw DomainError("duplicate satellite id '" + r.id + "'");
    }
  }
}

std::size_t Catalog::geo_count() const {
  return static_cast<std::size_t>(
      std::count_if(records_.begin(), records_.end(), [](const auto& r) { return r.is_geo(); }));
}

const SatelliteRecord* Catalog::find(std::string_view id) const {
  auto it = std::find_if(records_.begin(), records_.end(), [&](const auto& r) { return r.id == id; });
  return it == records_.end() ? nullptr : &*it;
}

const SatelliteRecord& Catalog::at(std::string_view id) const {
  const SatelliteRecord* r = find(id);
  if (r == nullptr) {
    throw DomainError("satellite '" + std::string(id) + "' is not in the catalog");
  }
  return *r;
}

Catalog Catalog::without(const std::vector<std::string>& ids) const {
  std::vector<SatelliteRecord> kept;
  for (const auto& r : records_) {
    if (std::find(ids.begin(), ids.end(), r.id) == ids.end()) kept.push_back(r);
  }
  return Catalog(std::move(kept));
}

std::vector<SatellitePosition> positions_at(const Catalog& cat, UtcTime t) {
  std::vector<SatellitePosition> out;
  out.reserve(cat.size());
  for (const auto& r : cat.records()) {
    try {
      out.push_back({r.id, r.sat_class, propagate_kepler(r.elements, t)});
    } catch (const Error& e) {
      throw PropagationError("satellite " + r.id + ": " + e.what());
    }
  }
  return out;
}

std::vector<VisibleSatellite> visible_satellites(const std::vector<SatellitePosition>& positions,
                                                 const EcefVector& user, double cutoff_deg) {
  const GeodeticPoint g = ecef_to_geodetic(user);
  // Millimetre slack so a point built at exactly a bound survives the round trip.
  if (g.altitude_m < -1000.0 - 1e-3 || g.altitude_m > 2.0e6 + 1e-3) {
    throw DomainError("user altitude must be within [-1 km, 2000 km] of the ellipsoid");
  }
  std::vector<VisibleSatellite> out;
  for (const auto& p : positions) {
    const double el = elevation_angle(user, p.position);
    if (el >= cutoff_deg) {
      out.push_back({p.id, p.sat_class, p.position, el, p.sat_class == SatClass::Geo});
    }
  }
  return out;
}

std::vector<VisibleSatellite> visible_satellites(const Catalog& cat, const EcefVector& user,
                                                 UtcTime t, double cutoff_deg) {
  return visible_satellites(positions_at(cat, t), user, cutoff_deg);
}

int count_visible_geos(const Catalog& cat, const EcefVector& user, UtcTime t, double cutoff_deg) {
  const auto vis = visible_satellites(cat, user, t, cutoff_deg);
  return static_cast<int>(std::count_if(vis.begin(), vis.end(), [](const auto& v) { return v.is_geo; }));
}

}  // namespace bdsfix
