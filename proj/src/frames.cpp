#include "bdsfix/frames.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bdsfix/constants.hpp"
#include "bdsfix/error.hpp"

namespace bdsfix {

using namespace constants;

void validate(const GeodeticPoint& p) {
  if (!std::isfinite(p.latitude_deg) || !std::isfinite(p.longitude_deg) ||
      !std::isfinite(p.altitude_m)) {
    throw DomainError("geodetic point has non-finite components");
  }
  if (p.latitude_deg < -90.0 || p.latitude_deg > 90.0) {
    throw DomainError("latitude out of [-90, 90]");
  }
  if (p.longitude_deg <= -180.0 || p.longitude_deg > 180.0) {
    throw DomainError("longitude out of (-180, 180]");
  }
}

void validate(const OrbitalElements& elem) {
  if (!(elem.semi_major_axis_m > kEllipsoidA)) {
    throw DomainError("semi-major axis must exceed the earth radius");
  }
  if (!(elem.eccentricity >= 0.0 && elem.eccentricity < 1.0)) {
    throw DomainError("eccentricity must be in [0, 1)");
  }
  for (double angle : {elem.inclination_deg, elem.raan_deg, elem.arg_perigee_deg,
                       elem.true_anomaly_deg}) {
    if (!std::isfinite(angle)) throw DomainError("non-finite orbital angle");
  }
}

double wrap_longitude_deg(double lon_deg) {
  double w = std::fmod(lon_deg, 360.0);
  if (w <= -180.0) w += 360.0;
  if (w > 180.0) w -= 360.0;
  return w;
}

// Both conversions run in extended precision so the double round trip is
// limited only by rounding of the ECEF components themselves.
EcefVector geodetic_to_ecef(const GeodeticPoint& p) {
  using L = long double;
  const L lat = static_cast<L>(p.latitude_deg) * std::numbers::pi_v<L> / 180.0L;
  const L lon = static_cast<L>(p.longitude_deg) * std::numbers::pi_v<L> / 180.0L;
  const L e2 = kEllipsoidE2;
  const L sin_lat = std::sin(lat);
  const L cos_lat = std::cos(lat);
  const L n = static_cast<L>(kEllipsoidA) / std::sqrt(1.0L - e2 * sin_lat * sin_lat);
  const L h = p.altitude_m;
  return {static_cast<double>((n + h) * cos_lat * std::cos(lon)),
          static_cast<double>((n + h) * cos_lat * std::sin(lon)),
          static_cast<double>((n * (1.0L - e2) + h) * sin_lat)};
}

GeodeticPoint ecef_to_geodetic(const EcefVector& v) {
  using L = long double;
  const double r = v.norm();
  if (!(r > 1e-3)) {
    throw DomainError("origin has no geodetic image");
  }
  const L x = v.x();
  const L y = v.y();
  const L z = v.z();
  const L p = std::hypot(x, y);
  GeodeticPoint out;
  out.longitude_deg = p > 0.0L ? wrap_longitude_deg(static_cast<double>(std::atan2(y, x) * 180.0L / std::numbers::pi_v<L>)) : 0.0;

  if (p == 0.0L) {
    out.latitude_deg = z > 0.0L ? 90.0 : -90.0;
    out.altitude_m = std::abs(v.z()) - kEllipsoidB;
    return out;
  }

  const L a = kEllipsoidA;
  const L e2 = kEllipsoidE2;
  // Fixed-point iteration on latitude; converges in a handful of steps for
  // any point outside a few km of the center.
  L lat = std::atan2(z, p * (1.0L - e2));
  for (int i = 0; i < 40; ++i) {
    const L s = std::sin(lat);
    const L n = a / std::sqrt(1.0L - e2 * s * s);
    const L next = std::atan2(z + e2 * n * s, p);
    const bool done = std::abs(next - lat) < 1e-18L;
    lat = next;
    if (done) break;
  }
  const L s = std::sin(lat);
  const L c = std::cos(lat);
  const L n = a / std::sqrt(1.0L - e2 * s * s);
  out.altitude_m = static_cast<double>(p * c + z * s - a * a / n);
  out.latitude_deg = static_cast<double>(lat * 180.0L / std::numbers::pi_v<L>);
  return out;
}

double solve_kepler(double mean_anomaly_rad, double eccentricity) {
  if (!(eccentricity >= 0.0 && eccentricity < 1.0)) {
    throw DomainError("eccentricity must be in [0, 1)");
  }
  const double two_pi = 2.0 * std::numbers::pi;
  const double turns = std::round(mean_anomaly_rad / two_pi);
  const double m = mean_anomaly_rad - turns * two_pi;  // [-pi, pi]

  // f(E) = E - e sin E - M is monotone; the root lies in [M - e, M + e].
  double lo = m - eccentricity;
  double hi = m + eccentricity;
  double e_anom = m;
  double residual = 0.0;
  for (int i = 0; i < 50; ++i) {
    residual = e_anom - eccentricity * std::sin(e_anom) - m;
    if (std::abs(residual) < 1e-14) {
      return e_anom + turns * two_pi;
    }
    if (residual > 0.0) {
      hi = e_anom;
    } else {
      lo = e_anom;
    }
    const double slope = 1.0 - eccentricity * std::cos(e_anom);
    double next = e_anom - residual / slope;
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    const double step = next - e_anom;
    e_anom = next;
    if (std::abs(step) < 1e-12) {
      residual = e_anom - eccentricity * std::sin(e_anom) - m;
      if (std::abs(residual) < 1e-12) return e_anom + turns * two_pi;
    }
  }
  std::ostringstream msg;
  msg << "Kepler iteration did not converge (M=" << mean_anomaly_rad << ", e=" << eccentricity
      << ", residual=" << residual << ")";
  throw PropagationError(msg.str());
}

double true_to_mean_anomaly(double true_anomaly_rad, double eccentricity) {
  const double e_anom = 2.0 * std::atan2(std::sqrt(1.0 - eccentricity) * std::sin(true_anomaly_rad / 2.0),
                                         std::sqrt(1.0 + eccentricity) * std::cos(true_anomaly_rad / 2.0));
  return e_anom - eccentricity * std::sin(e_anom);
}

EcefVector propagate_kepler(const OrbitalElements& elem, double seconds_since_epoch) {
  const double a = elem.semi_major_axis_m;
  const double e = elem.eccentricity;
  const double mean_motion = std::sqrt(kEarthGm / (a * a * a));
  const double m0 = true_to_mean_anomaly(elem.true_anomaly_deg * kDegToRad, e);
  const double e_anom = solve_kepler(m0 + mean_motion * seconds_since_epoch, e);

  // Perifocal frame.
  const double xp = a * (std::cos(e_anom) - e);
  const double yp = a * std::sqrt(1.0 - e * e) * std::sin(e_anom);

  const double cw = std::cos(elem.arg_perigee_deg * kDegToRad);
  const double sw = std::sin(elem.arg_perigee_deg * kDegToRad);
  const double ci = std::cos(elem.inclination_deg * kDegToRad);
  const double si = std::sin(elem.inclination_deg * kDegToRad);
  const double co = std::cos(elem.raan_deg * kDegToRad);
  const double so = std::sin(elem.raan_deg * kDegToRad);

  // R3(-raan) R1(-i) R3(-w) applied to (xp, yp, 0).
  const double x_orb = cw * xp - sw * yp;
  const double y_orb = sw * xp + cw * yp;
  const double x_eq = x_orb;
  const double y_eq = ci * y_orb;
  const double z_eq = si * y_orb;
  const double xi = co * x_eq - so * y_eq;
  const double yi = so * x_eq + co * y_eq;

  const double theta =
      greenwich_sidereal_angle(elem.epoch) + kEarthRotationRate * seconds_since_epoch;
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  return {ct * xi + st * yi, -st * xi + ct * yi, z_eq};
}

EcefVector propagate_kepler(const OrbitalElements& elem, UtcTime t) {
  const double dt = seconds_between(elem.epoch, t);
  if (std::abs(dt) > kPropagationWindowSeconds) {
    throw PropagationError("propagation time " + format_utc(t) +
                           " is outside the +/-30 day window around " + format_utc(elem.epoch));
  }
  return propagate_kepler(elem, dt);
}

EcefVector sagnac_correct(const EcefVector& sat_pos, double travel_time_s) {
  const double angle = kEarthRotationRate * travel_time_s;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * sat_pos.x() + s * sat_pos.y(), -s * sat_pos.x() + c * sat_pos.y(), sat_pos.z()};
}

EcefVector local_up(const EcefVector& user) {
  const GeodeticPoint g = ecef_to_geodetic(user);
  const double lat = g.latitude_deg * kDegToRad;
  const double lon = std::atan2(user.y(), user.x());
  return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

double elevation_angle(const EcefVector& user, const EcefVector& sat) {
  const EcefVector los = sat - user;
  const double range = los.norm();
  if (!(range > 0.0)) {
    throw DomainError("satellite coincides with the user");
  }
  const double sin_el = std::clamp(los.dot(local_up(user)) / range, -1.0, 1.0);
  return std::asin(sin_el) * kRadToDeg;
}

}  // namespace bdsfix
