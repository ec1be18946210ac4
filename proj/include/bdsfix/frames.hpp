#pragma once

#include <Eigen/Core>

#include "bdsfix/time.hpp"

namespace bdsfix {

// Earth-centered earth-fixed position, meters.
using EcefVector = Eigen::Vector3d;

struct GeodeticPoint {
  double latitude_deg = 0.0;   // [-90, 90]
  double longitude_deg = 0.0;  // (-180, 180]
  double altitude_m = 0.0;     // above the ellipsoid
};

// Keplerian elements of one satellite at a reference epoch. Angles are
// referred to the inertial frame whose x axis points at Greenwich at `epoch`
// rotated back by the Greenwich sidereal angle, i.e. an ordinary
// true-of-date style inertial frame.
struct OrbitalElements {
  double semi_major_axis_m = 0.0;
  double eccentricity = 0.0;
  double inclination_deg = 0.0;
  double raan_deg = 0.0;
  double arg_perigee_deg = 0.0;
  double true_anomaly_deg = 0.0;
  UtcTime epoch{};
};

// Throws DomainError when latitude/longitude are out of range or not finite.
void validate(const GeodeticPoint& p);
// Throws DomainError unless a > equatorial radius and 0 <= e < 1.
void validate(const OrbitalElements& elem);

// Wraps any longitude into (-180, 180].
double wrap_longitude_deg(double lon_deg);

EcefVector geodetic_to_ecef(const GeodeticPoint& p);

// Iterative inversion; longitude is reported as 0 on the polar axis.
// Throws DomainError for the origin.
GeodeticPoint ecef_to_geodetic(const EcefVector& v);

// Solves E - e sin E = M with a bracketed Newton iteration started at E = M.
// Throws PropagationError (with the residual) if 50 iterations do not converge.
double solve_kepler(double mean_anomaly_rad, double eccentricity);

double true_to_mean_anomaly(double true_anomaly_rad, double eccentricity);

// Two-body position at `seconds_since_epoch` after elem.epoch, in ECEF. The
// earth rotation angle is the Greenwich sidereal angle at the epoch advanced
// by the earth rotation rate.
EcefVector propagate_kepler(const OrbitalElements& elem, double seconds_since_epoch);

// Same, at an absolute time. Throws PropagationError outside +/-30 days.
EcefVector propagate_kepler(const OrbitalElements& elem, UtcTime t);

inline constexpr double kPropagationWindowSeconds = 30.0 * 86400.0;

// Rotates a satellite position about +Z by -omega_e * travel_time, mapping the
// transmit-time ECEF frame into the receive-time ECEF frame.
EcefVector sagnac_correct(const EcefVector& sat_pos, double travel_time_s);

// Elevation of `sat` above the local tangent plane at `user`, degrees.
double elevation_angle(const EcefVector& user, const EcefVector& sat);

// Local up unit vector (ellipsoid normal) at the user's geodetic position.
EcefVector local_up(const EcefVector& user);

}  // namespace bdsfix
