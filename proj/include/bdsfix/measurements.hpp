#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdsfix/constellation.hpp"
#include "bdsfix/frames.hpp"
#include "bdsfix/time.hpp"

namespace bdsfix {

// Period a fractional pseudorange is ambiguous by: one code period or one
// navigation bit.
enum class FractionalPeriod { OneMs, TwentyMs };

double period_seconds(FractionalPeriod p);
// c * T, meters. Computed as c / 1000 and c / 50 so that 1 ms gives exactly
// 299792.458 m.
double cycle_length_m(FractionalPeriod p);
int period_ms(FractionalPeriod p);
// 1 or 20; throws ParseError otherwise.
FractionalPeriod period_from_ms(int ms);

struct Measurement {
  std::string sat_id;
  UtcTime epoch{};
  std::optional<FractionalPeriod> period;  // empty for a full pseudorange
  double value_m = 0.0;

  bool is_full() const { return !period.has_value(); }
  bool is_fractional() const { return period.has_value(); }
  bool operator==(const Measurement&) const = default;
  // Throws DomainError for full measurements.
  double cycle_length() const;

  static Measurement full(std::string sat, UtcTime epoch, double value_m);
  static Measurement fractional(std::string sat, UtcTime epoch, FractionalPeriod period,
                                double value_m);
};

// Throws DomainError: full values must be positive, fractional values in
// [0, c*T).
void validate(const Measurement& m);

// All measurements of one receive epoch, at most one per satellite.
class MeasurementSet {
 public:
  explicit MeasurementSet(UtcTime epoch) : epoch_(epoch) {}

  // Validates the measurement, its epoch and uniqueness of sat_id.
  void add(Measurement m);

  UtcTime epoch() const { return epoch_; }
  const std::vector<Measurement>& measurements() const { return items_; }
  std::size_t size() const { return items_.size(); }
  std::size_t full_count() const;
  std::size_t fractional_count() const;

  bool operator==(const MeasurementSet&) const = default;

 private:
  UtcTime epoch_;
  std::vector<Measurement> items_;
};

struct SimulationScenario {
  GeodeticPoint user_truth;
  double clock_bias_s = 5.0;
  double noise_sigma_m = 1.3;
  std::uint64_t seed = 1;
  FractionalPeriod fractional_period = FractionalPeriod::OneMs;
  double elevation_cutoff_deg = 0.0;
  std::vector<std::string> excluded_sats;
};

// Satellite position in the receive-time ECEF frame together with the
// geometric range, from a fixed-point solve of the signal travel time.
struct SignalPath {
  EcefVector sat_position;
  double range_m = 0.0;
  double travel_time_s = 0.0;
};

// Starts from the range to the satellite at the receive time, then performs
// two fixed-point iterations of t_tx = t_rx - range / c, each propagating to
// the transmit time and applying the earth rotation correction.
SignalPath trace_signal(const OrbitalElements& elem, UtcTime receive_time, const EcefVector& receiver);

// |sat_pos - user_pos| + clock_bias_m + noise. sat_pos is expected to be the
// rotation-corrected transmit-time position.
double simulate_full(const EcefVector& sat_pos, const EcefVector& user_pos, double clock_bias_m,
                     double noise_m);

struct Truncation {
  double fractional_m = 0.0;
  std::int64_t ambiguity = 0;
};

// N = floor(z / cT), fractional = z - N cT with 0 <= fractional < cT.
// fractional + N * cT reproduces z exactly.
Truncation truncate_fractional(double z_full_m, FractionalPeriod period);

// Receiver position, clock bias (meters) and ambiguities (cycles).
struct NavState {
  EcefVector position = EcefVector::Zero();
  double clock_bias_m = 0.0;
  std::vector<double> ambiguities;
};

struct SimulatedEpoch {
  MeasurementSet measurements;       // full for GEOs, fractional for the rest
  MeasurementSet full_measurements;  // the same noise realization, all full
  NavState truth;                    // ambiguities aligned with fractional entries
  std::vector<std::string> ambiguity_sats;
  int geo_visible = 0;
  bool geo_deficient = false;  // fewer than four GEOs visible
};

// Deterministic for a fixed seed. Throws DomainError when no satellite is
// visible.
SimulatedEpoch simulate_scenario(const Catalog& cat, const SimulationScenario& scen, UtcTime t);

}  // namespace bdsfix
