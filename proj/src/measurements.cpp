#include "bdsfix/measurements.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bdsfix/constants.hpp"
#include "bdsfix/error.hpp"

namespace bdsfix {

using constants::kSpeedOfLight;

double period_seconds(FractionalPeriod p) {
  return p == FractionalPeriod::OneMs ? 0.001 : 0.020;
}

double cycle_length_m(FractionalPeriod p) {
  return p == FractionalPeriod::OneMs ? kSpeedOfLight / 1000.0 : kSpeedOfLight / 50.0;
}

int period_ms(FractionalPeriod p) { return p == FractionalPeriod::OneMs ? 1 : 20; }

FractionalPeriod period_from_ms(int ms) {
  if (ms == 1) return FractionalPeriod::OneMs;
  if (ms == 20) return FractionalPeriod::TwentyMs;
  throw ParseError("fractional modulus must be 1 or 20 ms, got " + std::to_string(ms));
}

double Measurement::cycle_length() const {
  if (!period) throw DomainError("full measurement " + sat_id + " has no ambiguity cycle");
  return cycle_length_m(*period);
}

Measurement Measurement::full(std::string sat, UtcTime epoch, double value_m) {
  return {std::move(sat), epoch, std::nullopt, value_m};
}

Measurement Measurement::fractional(std::string sat, UtcTime epoch, FractionalPeriod period,
                                    double value_m) {
  return {std::move(sat), epoch, period, value_m};
}

void validate(const Measurement& m) {
  if (!std::isfinite(m.value_m)) {
    throw DomainError("measurement " + m.sat_id + " is not finite");
  }
  if (m.is_full()) {
    if (!(m.value_m > 0.0)) throw DomainError("full measurement " + m.sat_id + " must be positive");
    return;
  }
  if (m.value_m < 0.0 || m.value_m >= m.cycle_length()) {
    throw DomainError("fractional measurement " + m.sat_id + " is outside [0, c*T)");
  }
}

void MeasurementSet::add(Measurement m) {
  validate(m);
  if (m.epoch != epoch_) {
    throw DomainError("measurement " + m.sat_id + " epoch differs from set epoch");
  }
  const bool dup = std::any_of(items_.begin(), items_.end(),
                               [&](const Measurement& x) { return x.sat_id == m.sat_id; });
  if (dup) throw DomainError("duplicate measurement for " + m.sat_id);
  items_.push_back(std::move(m));
}

std::size_t MeasurementSet::full_count() const {
  return static_cast<std::size_t>(
      std::count_if(items_.begin(), items_.end(), [](const Measurement& m) { return m.is_full(); }));
}

std::size_t MeasurementSet::fractional_count() const { return items_.size() - full_count(); }

SignalPath trace_signal(const OrbitalElements& elem, UtcTime receive_time, const EcefVector& receiver) {
  const double dt_rx = seconds_between(elem.epoch, receive_time);
  if (std::abs(dt_rx) > kPropagationWindowSeconds) {
    throw PropagationError("receive time " + format_utc(receive_time) +
                           " is outside the propagation window");
  }
  SignalPath path;
  path.travel_time_s = (propagate_kepler(elem, dt_rx) - receiver).norm() / kSpeedOfLight;
  for (int i = 0; i < 2; ++i) {
    path.sat_position = sagnac_correct(propagate_kepler(elem, dt_rx - path.travel_time_s), path.travel_time_s);
    path.range_m = (path.sat_position - receiver).norm();
    path.travel_time_s = path.range_m / kSpeedOfLight;
  }
  return path;
}

double simulate_full(const EcefVector& sat_pos, const EcefVector& user_pos, double clock_bias_m,
                     double noise_m) {
  return (sat_pos - user_pos).norm() + clock_bias_m + noise_m;
}

Truncation truncate_fractional(double z_full_m, FractionalPeriod period) {
  if (!(z_full_m >= 0.0)) throw DomainError("full pseudorange must be non-negative");
  const double ct = cycle_length_m(period);
  auto n = static_cast<std::int64_t>(std::floor(z_full_m / ct));
  double frac = z_full_m - static_cast<double>(n) * ct;
  // The quotient can round across an integer boundary.
  if (frac < 0.0) {
    --n;
    frac = z_full_m - static_cast<double>(n) * ct;
  } else if (frac >= ct) {
    ++n;
    frac = z_full_m - static_cast<double>(n) * ct;
  }
  return {frac, n};
}

SimulatedEpoch simulate_scenario(const Catalog& cat, const SimulationScenario& scen, UtcTime t) {
  validate(scen.user_truth);
  if (scen.noise_sigma_m < 0.0) throw DomainError("noise sigma must be non-negative");

  const EcefVector user = geodetic_to_ecef(scen.user_truth);
  const double bias_m = scen.clock_bias_s * kSpeedOfLight;

  std::vector<SatellitePosition> positions;
  for (auto& p : positions_at(cat, t)) {
    if (std::find(scen.excluded_sats.begin(), scen.excluded_sats.end(), p.id) ==
        scen.excluded_sats.end()) {
      positions.push_back(std::move(p));
    }
  }
  const auto visible = visible_satellites(positions, user, scen.elevation_cutoff_deg);
  if (visible.empty()) throw DomainError("no satellites visible from the scenario position");

  std::mt19937_64 rng(scen.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SimulatedEpoch out{MeasurementSet(t), MeasurementSet(t), {user, bias_m, {}}, {}, 0, false};
  for (const auto& v : visible) {
    const SignalPath path = trace_signal(cat.at(v.id).elements, t, user);
    const double noise = scen.noise_sigma_m * gauss(rng);
    const double z = simulate_full(path.sat_position, user, bias_m, noise);
    out.full_measurements.add(Measurement::full(v.id, t, z));
    if (v.is_geo) {
      ++out.geo_visible;
      out.measurements.add(Measurement::full(v.id, t, z));
    } else {
      const Truncation tr = truncate_fractional(z, scen.fractional_period);
      out.measurements.add(Measurement::fractional(v.id, t, scen.fractional_period, tr.fractional_m));
      out.truth.ambiguities.push_back(static_cast<double>(tr.ambiguity));
      out.ambiguity_sats.push_back(v.id);
    }
  }
  out.geo_deficient = out.geo_visible < 4;
  return out;
}

}  // namespace bdsfix
