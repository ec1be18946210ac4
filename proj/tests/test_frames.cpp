#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Geometry>

#include "bdsfix/constants.hpp"
#include "bdsfix/error.hpp"
#include "bdsfix/frames.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace bdsfix;
using test_support::uniform;

TEST_CASE("geodetic_to_ecef reference points") {
  const EcefVector eq = geodetic_to_ecef({0.0, 0.0, 0.0});
  CHECK(eq.x() == doctest::Approx(constants::kEllipsoidA).epsilon(1e-15));
  CHECK(std::abs(eq.y()) < 1e-9);
  CHECK(std::abs(eq.z()) < 1e-9);

  for (double lon : {0.0, 45.0, 180.0}) {
    const EcefVector pole = geodetic_to_ecef({90.0, lon, 0.0});
    CHECK(std::hypot(pole.x(), pole.y()) < 1e-6);
    CHECK(pole.z() == doctest::Approx(constants::kEllipsoidB).epsilon(1e-15));
  }

  // Frozen from a 40-digit evaluation through the parametric latitude.
  const EcefVector p = geodetic_to_ecef({40.0, 116.0, 50.0});
  CHECK(std::abs(p.x() - -2144838.6321511078) < 1e-6);
  CHECK(std::abs(p.y() - 4397570.8870670993) < 1e-6);
  CHECK(std::abs(p.z() - 4078017.7114740428) < 1e-6);
  CHECK((p - oracle::geodetic_to_ecef_parametric(40.0, 116.0, 50.0)).norm() < 1e-6);
}

TEST_CASE("geodetic_to_ecef agrees with the parametric-latitude form") {
  for (int i = 0; i < 2000; ++i) {
    const double lat = uniform(-90.0, 90.0);
    const double lon = uniform(-179.999, 180.0);
    const double h = uniform(-1000.0, 2.0e6);
    const EcefVector a = geodetic_to_ecef({lat, lon, h});
    const EcefVector b = oracle::geodetic_to_ecef_parametric(lat, lon, h);
    REQUIRE((a - b).norm() < 1e-6);
  }
}

TEST_CASE("ecef_to_geodetic special points") {
  const GeodeticPoint eq = ecef_to_geodetic({constants::kEllipsoidA, 0.0, 0.0});
  CHECK(std::abs(eq.latitude_deg) < 1e-12);
  CHECK(std::abs(eq.longitude_deg) < 1e-12);
  CHECK(std::abs(eq.altitude_m) < 1e-9);

  const GeodeticPoint np = ecef_to_geodetic({0.0, 0.0, constants::kEllipsoidB + 1.0e6});
  CHECK(np.latitude_deg == 90.0);
  CHECK(np.longitude_deg == 0.0);
  CHECK(std::abs(np.altitude_m - 1.0e6) < 1e-9);

  const GeodeticPoint sp = ecef_to_geodetic({0.0, 0.0, -constants::kEllipsoidB - 10.0});
  CHECK(sp.latitude_deg == -90.0);
  CHECK(std::abs(sp.altitude_m - 10.0) < 1e-9);

  CHECK_THROWS_AS(ecef_to_geodetic(EcefVector::Zero()), DomainError);
}

TEST_CASE("geodetic round trip over random points") {
  double worst_h = 0.0;
  double worst_ang = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const GeodeticPoint p{uniform(-89.9, 89.9), uniform(-179.999, 180.0), uniform(-1000.0, 2.0e6)};
    const GeodeticPoint q = ecef_to_geodetic(geodetic_to_ecef(p));
    worst_h = std::max(worst_h, std::abs(q.altitude_m - p.altitude_m));
    worst_ang = std::max({worst_ang, std::abs(q.latitude_deg - p.latitude_deg),
                          std::abs(wrap_longitude_deg(q.longitude_deg - p.longitude_deg))});
  }
  CHECK(worst_h < 1e-9);
  CHECK(worst_ang < 1e-12);
}

TEST_CASE("wrap_longitude_deg") {
  CHECK(wrap_longitude_deg(180.0) == 180.0);
  CHECK(wrap_longitude_deg(-180.0) == 180.0);
  CHECK(wrap_longitude_deg(190.0) == doctest::Approx(-170.0));
  CHECK(wrap_longitude_deg(-540.0) == 180.0);
}

TEST_CASE("validate rejects bad inputs") {
  CHECK_THROWS_AS(validate(GeodeticPoint{91.0, 0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(validate(GeodeticPoint{0.0, -180.0, 0.0}), DomainError);
  CHECK_THROWS_AS(validate(GeodeticPoint{0.0, NAN, 0.0}), DomainError);
  OrbitalElements e;
  e.semi_major_axis_m = 6.0e6;
  CHECK_THROWS_AS(validate(e), DomainError);
  e.semi_major_axis_m = 4.2e7;
  e.eccentricity = 1.0;
  CHECK_THROWS_AS(validate(e), DomainError);
  e.eccentricity = 0.1;
  CHECK_NOTHROW(validate(e));
}

TEST_CASE("solve_kepler trivial cases") {
  CHECK(solve_kepler(1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(solve_kepler(0.0, 0.5)) < 1e-15);
  CHECK_THROWS_AS(solve_kepler(1.0, 1.0), DomainError);
}

TEST_CASE("solve_kepler matches the bisection oracle") {
  const double m = std::numbers::pi / 2.0;
  const double e = 0.004004;  // I1
  const double expected = oracle::kepler_bisection(m, e, 0.0, std::numbers::pi);
  CHECK(std::abs(expected - 1.5748002946993580) < 1e-14);
  CHECK(std::abs(solve_kepler(m, e) - expected) < 1e-12);
}

TEST_CASE("solve_kepler residual over an (M, e) grid") {
  for (double e : {0.0, 0.001, 0.01, 0.1, 0.5, 0.9}) {
    for (int k = 0; k < 720; ++k) {
      const double m = 2.0 * std::numbers::pi * k / 720.0;
      const double big_e = solve_kepler(m, e);
      INFO("M=" << m << " e=" << e);
      REQUIRE(std::abs(big_e - e * std::sin(big_e) - m) < 1e-12);
    }
  }
  // Many revolutions in.
  const double m = 94.0;
  const double big_e = solve_kepler(m, 0.3);
  CHECK(std::abs(big_e - 0.3 * std::sin(big_e) - m) < 1e-12);
}

namespace {

OrbitalElements circular_equatorial(double a) {
  OrbitalElements e;
  e.semi_major_axis_m = a;
  e.epoch = test_support::table1_epoch();
  return e;
}

}  // namespace

TEST_CASE("geostationary orbit returns to the same ECEF point after one period") {
  const double a_geo = std::cbrt(constants::kEarthGm / std::pow(constants::kEarthRotationRate, 2));
  const OrbitalElements geo = circular_equatorial(a_geo);
  const double period = 2.0 * std::numbers::pi / constants::kEarthRotationRate;
  CHECK((propagate_kepler(geo, period) - propagate_kepler(geo, 0.0)).norm() < 1.0);

  // 42,164,169 m sits ~4 m below that radius and drifts by 2 pi a |1 - w/n|.
  const OrbitalElements near = circular_equatorial(42164169.0);
  const double n = std::sqrt(constants::kEarthGm / std::pow(42164169.0, 3));
  const double t = 2.0 * std::numbers::pi / n;
  const double drift = 2.0 * std::numbers::pi * 42164169.0 * std::abs(1.0 - constants::kEarthRotationRate / n);
  const double moved = (propagate_kepler(near, t) - propagate_kepler(near, 0.0)).norm();
  CHECK(moved == doctest::Approx(drift).epsilon(1e-3));
  CHECK(moved < 40.0);
}

TEST_CASE("G1 at its epoch sits near 140E") {
  const auto& g1 = test_support::table1().at("G1").elements;
  const EcefVector p = propagate_kepler(g1, g1.epoch);
  const double lon = std::atan2(p.y(), p.x()) * constants::kRadToDeg;
  CHECK(std::abs(lon - 140.0) < 0.5);
  const double a = g1.semi_major_axis_m;
  CHECK(p.norm() >= a * (1.0 - g1.eccentricity));
  CHECK(p.norm() <= a * (1.0 + g1.eccentricity));
}

TEST_CASE("M3 half an orbit later agrees with an RK4 two-body integration") {
  const auto& m3 = test_support::table1().at("M3").elements;
  const double a = m3.semi_major_axis_m;
  const double half = std::numbers::pi / std::sqrt(constants::kEarthGm / (a * a * a));

  const auto s0 = oracle::state_from_elements(a, m3.eccentricity, m3.inclination_deg, m3.raan_deg,
                                              m3.arg_perigee_deg, m3.true_anomaly_deg);
  const auto s1 = oracle::rk4_two_body(s0, half, 1.0);
  const double theta0 = greenwich_sidereal_angle(m3.epoch);
  const EcefVector ref = oracle::rotate_frame_z(s1.r, theta0 + constants::kEarthRotationRate * half);

  const EcefVector got = propagate_kepler(m3, half);
  CHECK((got - ref).norm() < 1e-3);
  CHECK(got.norm() >= a * (1.0 - m3.eccentricity));
  CHECK(got.norm() <= a * (1.0 + m3.eccentricity));

  // Antipodal within the orbit plane (near-circular, so within a degree).
  const double cos_angle = s0.r.normalized().dot(s1.r.normalized());
  CHECK(std::acos(std::clamp(cos_angle, -1.0, 1.0)) * constants::kRadToDeg > 179.0);
  CHECK(std::abs(s1.r.normalized().dot(s0.r.cross(s0.v).normalized())) < 1e-9);
}

TEST_CASE("propagation keeps the radius within the apsides") {
  for (const auto& rec : test_support::table1().records()) {
    const auto& e = rec.elements;
    for (int k = 0; k <= 48; ++k) {
      const double r = propagate_kepler(e, k * 4.0 * 3600.0).norm();
      REQUIRE(r >= e.semi_major_axis_m * (1.0 - e.eccentricity) * (1.0 - 1e-12));
      REQUIRE(r <= e.semi_major_axis_m * (1.0 + e.eccentricity) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("propagation window is enforced") {
  const auto& e = test_support::table1().at("G1").elements;
  CHECK_NOTHROW(propagate_kepler(e, add_seconds(e.epoch, 29.0 * 86400.0)));
  CHECK_THROWS_AS(propagate_kepler(e, add_seconds(e.epoch, 31.0 * 86400.0)), PropagationError);
  CHECK_THROWS_AS(propagate_kepler(e, add_seconds(e.epoch, -31.0 * 86400.0)), PropagationError);
}

TEST_CASE("sagnac_correct") {
  const EcefVector sat(42164000.0 * std::cos(1.0), 42164000.0 * std::sin(1.0), 1.0e5);
  CHECK(sagnac_correct(sat, 0.0) == sat);

  const double angle = constants::kEarthRotationRate * 0.07;
  const double radial = std::hypot(sat.x(), sat.y());
  const double expected = 2.0 * radial * std::sin(angle / 2.0);  // chord of the rotation
  const EcefVector moved = sagnac_correct(sat, 0.07);
  CHECK((moved - sat).norm() == doctest::Approx(expected).epsilon(1e-9));
  CHECK((moved - sat).norm() == doctest::Approx(radial * std::sin(angle)).epsilon(1e-6));
  CHECK((moved - oracle::rotate_frame_z(sat, angle)).norm() < 1e-6);
  // Earth turns east during flight, so the satellite appears rotated west.
  CHECK(std::atan2(moved.y(), moved.x()) < 1.0);

  // Group property. At GEO radius one ulp is ~7e-9 m, so the absolute bound is
  // checked on a vector whose components resolve it and a few-ulp bound at GEO.
  const EcefVector small(3.0e6, -2.0e6, 1.0e6);
  CHECK((sagnac_correct(sagnac_correct(small, 0.03), 0.05) - sagnac_correct(small, 0.08)).norm() < 1e-9);
  const EcefVector twice = sagnac_correct(sagnac_correct(sat, 0.03), 0.05);
  CHECK((twice - sagnac_correct(sat, 0.08)).norm() < 4.0 * std::numeric_limits<double>::epsilon() * sat.norm());

  for (int i = 0; i < 1000; ++i) {
    const EcefVector v(uniform(-5e7, 5e7), uniform(-5e7, 5e7), uniform(-5e7, 5e7));
    const double t = uniform(0.0, 0.999);
    REQUIRE(std::abs(sagnac_correct(v, t).norm() - v.norm()) <= 1e-9 * v.norm());
  }
}

TEST_CASE("elevation_angle") {
  const GeodeticPoint g{35.0, 120.0, 100.0};
  const EcefVector user = geodetic_to_ecef(g);
  const EcefVector up = local_up(user);
  CHECK(elevation_angle(user, user + 2.0e7 * up) == doctest::Approx(90.0).epsilon(1e-12));

  const EcefVector east(-std::sin(120.0 * constants::kDegToRad), std::cos(120.0 * constants::kDegToRad), 0.0);
  CHECK(std::abs(elevation_angle(user, user + 2.0e7 * east)) < 1e-9);

  // Geostationary satellite on the user's meridian at the equator.
  const EcefVector eq_user = geodetic_to_ecef({0.0, 100.0, 0.0});
  const double r_geo = 42164000.0;
  const EcefVector geo(r_geo * std::cos(100.0 * constants::kDegToRad), r_geo * std::sin(100.0 * constants::kDegToRad), 0.0);
  CHECK(std::abs(elevation_angle(eq_user, geo) - 90.0) < 0.2);

  // Spherical-geometry oracle: for a GEO 40 degrees of longitude away.
  const EcefVector geo40(r_geo * std::cos(140.0 * constants::kDegToRad), r_geo * std::sin(140.0 * constants::kDegToRad), 0.0);
  const double gamma = 40.0 * constants::kDegToRad;
  const double r_e = constants::kEllipsoidA;
  const double spherical = std::atan2(std::cos(gamma) - r_e / r_geo, std::sin(gamma)) * constants::kRadToDeg;
  CHECK(std::abs(elevation_angle(eq_user, geo40) - spherical) < 0.2);

  CHECK_THROWS_AS(elevation_angle(user, user), DomainError);
}

TEST_CASE("elevation_angle is antisymmetric about the tangent plane") {
  for (int i = 0; i < 2000; ++i) {
    const EcefVector user = geodetic_to_ecef({uniform(-89.0, 89.0), uniform(-179.0, 180.0), uniform(0.0, 1.0e6)});
    const EcefVector up = local_up(user);
    const EcefVector d(uniform(-3e7, 3e7), uniform(-3e7, 3e7), uniform(-3e7, 3e7));
    const EcefVector reflected = d - 2.0 * d.dot(up) * up;
    REQUIRE(std::abs(elevation_angle(user, user + d) + elevation_angle(user, user + reflected)) < 1e-9);
  }
}

TEST_CASE("sidereal angle and timestamps") {
  const UtcTime t = parse_utc("2015-05-19T04:00:00Z");
  CHECK(greenwich_sidereal_angle(t) * constants::kRadToDeg == doctest::Approx(296.5133257).epsilon(1e-9));
  CHECK(format_utc(t) == "2015-05-19T04:00:00Z");
  CHECK(format_utc(add_seconds(t, 0.25)) == "2015-05-19T04:00:00.25Z");
  CHECK(seconds_between(t, parse_utc("2015-05-27T04:00:00")) == 8.0 * 86400.0);
  CHECK(parse_utc("2015-05-19 04:00:00.5Z") == add_seconds(t, 0.5));
  CHECK_THROWS_AS(parse_utc("2015-13-19T04:00:00Z"), ParseError);
  CHECK_THROWS_AS(parse_utc("2015-05-19T04:00"), ParseError);
  CHECK_THROWS_AS(parse_utc("2015-05-19T04:00:00Zx"), ParseError);
}
