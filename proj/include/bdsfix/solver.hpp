#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bdsfix/constellation.hpp"
#include "bdsfix/measurements.hpp"

namespace bdsfix {

struct SolverConfig {
  double alpha_m = 150000.0;  // half of a 1 ms code cycle
  double beta = 3000.0;       // GDOP gate threshold
  int max_iterations = 20;
  double convergence_norm_m = 1e-4;
  double elevation_cutoff_deg = 0.0;  // used where visibility is decided
  // Optional per-measurement weights in measurement order; empty means unit
  // weights.
  std::vector<double> weights;
};

// Throws DomainError on a non-positive alpha/beta/convergence norm or
// max_iterations < 1.
void validate(const SolverConfig& cfg);

// beta = alpha / max |range error|, e.g. 150 km / 50 m = 3000.
double gdop_threshold(double alpha_m, double max_range_error_m);

enum class SolveStatus { Converged, GdopGateFailed, MaxIterations, InsufficientMeasurements };

std::string_view to_string(SolveStatus s);

struct SolveResult {
  NavState state;  // ambiguities are integer-valued once fixed
  std::vector<std::string> ambiguity_sats;
  std::vector<std::int64_t> fixed_ambiguities;
  std::vector<double> recovered_full_pseudoranges;  // aligned with ambiguity_sats
  double gdop_geo = 0.0;  // NaN when never evaluated
  int iterations = 0;     // Gauss-Newton iterations before fixing
  SolveStatus status = SolveStatus::InsufficientMeasurements;
  std::string message;

  bool converged() const { return status == SolveStatus::Converged; }
};

// Satellite positions, one per measurement in set order, for a given receiver
// estimate. Positions are transmit-time positions in the receive-time frame.
using SatelliteGeometry = std::function<std::vector<EcefVector>(const EcefVector& receiver)>;

// Traces every satellite of `meas` through the catalog (trace_signal).
SatelliteGeometry catalog_geometry(const Catalog& cat, const MeasurementSet& meas);
// Positions independent of the receiver estimate.
SatelliteGeometry fixed_geometry(std::vector<EcefVector> positions);

// |X_k - x| for every satellite. Throws GeometryError("degenerate geometry")
// when the estimate coincides with a satellite.
std::vector<double> geometric_distances(const NavState& state, std::span<const EcefVector> sats);

// Observed minus predicted. Full rows: z - (rho + b); fractional rows:
// z - (rho + b - N cT). Ambiguities are matched to fractional rows in order.
Eigen::VectorXd residuals(const NavState& state, const MeasurementSet& meas,
                          std::span<const EcefVector> sats);

// (n+m) x (4+m). Row k: [-e_k^T, 1, 0 ... -cT (own ambiguity column) ... 0],
// e_k the unit line of sight from the receiver estimate to satellite k.
Eigen::MatrixXd design_matrix(const NavState& state, const MeasurementSet& meas,
                              std::span<const EcefVector> sats);

struct GeoNormalMatrix {
  Eigen::Matrix4d d = Eigen::Matrix4d::Zero();
  Eigen::Vector4d eigenvalues = Eigen::Vector4d::Zero();  // ascending

  // Wraps an arbitrary symmetric matrix, computing its eigenvalues.
  static GeoNormalMatrix from_matrix(const Eigen::Matrix4d& d);
};

// D = G^T G with G rows [-e_i^T, 1] from `receiver` to each anchor satellite.
// Throws DomainError with fewer than four satellites.
GeoNormalMatrix geo_normal_matrix(std::span<const EcefVector> anchor_sats, const EcefVector& receiver);

// Same, over the full-pseudorange rows of `meas`.
GeoNormalMatrix geo_normal_matrix(const MeasurementSet& meas, const NavState& state,
                                  std::span<const EcefVector> sats);

struct GateResult {
  bool pass = false;
  double gdop = 0.0;  // sqrt(sum 1/lambda); +inf for singular geometry
  std::string reason;
};

// Passes iff sqrt(sum 1/lambda_i) < beta. Any lambda <= 0 fails with
// reason "singular geometry".
GateResult eigenvalue_gate(const GeoNormalMatrix& d, double beta);

struct Step {
  NavState state;
  Eigen::VectorXd correction;  // [dx dy dz db dN...], ambiguities in cycles
  double step_norm_m = 0.0;    // ambiguity components scaled to meters
};

// One unweighted (or weighted, per `weights`) least-squares update with the
// ambiguities kept real-valued. Throws GeometryError("underdetermined
// system") when the design matrix is rank deficient.
Step iterate_once(const NavState& state, const MeasurementSet& meas, std::span<const EcefVector> sats,
                  std::span<const double> weights = {});

struct CorrectionResult {
  NavState state;
  int iterations = 0;
  bool converged = false;
};

// Rebuilds full pseudoranges z_j + N_j cT from integer ambiguities and
// re-solves position and clock over every measurement, ambiguities held.
CorrectionResult state_correction(const NavState& fixed_state, const MeasurementSet& meas,
                                  const SatelliteGeometry& geometry, const SolverConfig& cfg);

// Full pseudoranges with the fractional rows lifted by their integer
// ambiguities.
MeasurementSet reconstruct_full(const MeasurementSet& meas, std::span<const std::int64_t> ambiguities);

// Position, clock and float ambiguities by Gauss-Newton from `initial`
// (earth center, zero clock, zero ambiguities by default) with the GDOP gate
// evaluated on the full rows before every update; then ambiguity rounding
// and state correction.
SolveResult solve_fast(const MeasurementSet& meas, const SatelliteGeometry& geometry,
                       const SolverConfig& cfg, const NavState& initial);
SolveResult solve_fast(const MeasurementSet& meas, const Catalog& cat, const SolverConfig& cfg);

// Ordinary single-point positioning over full measurements only, from the
// earth center. Throws DomainError if `meas` holds fractional rows.
SolveResult solve_conventional(const MeasurementSet& meas, const SatelliteGeometry& geometry,
                               const SolverConfig& cfg);
SolveResult solve_conventional(const MeasurementSet& meas, const Catalog& cat, const SolverConfig& cfg);

struct UsabilityVerdict {
  double projected_sum_m = 0.0;  // max_j |sum_i drho_i (e_i . e_j)|
  double los_error_m = 0.0;      // max_j |[-e_j, 1] (G^T G)^-1 G^T drho|
  double gdop = 0.0;
  double gdop_bound_m = 0.0;     // gdop * max_i |drho_i|
  bool projection_pass = false;  // projected_sum_m < alpha
  bool gdop_pass = false;        // gdop_bound_m < alpha

  bool usable() const { return gdop_pass; }
};

// Ambiguity-safety check for one error realization of the anchor (GEO)
// ranges. LOS vectors must be unit length.
UsabilityVerdict usability_criterion(std::span<const double> geo_errors,
                                     std::span<const EcefVector> geo_los,
                                     std::span<const EcefVector> nongeo_los, double alpha_m);

}  // namespace bdsfix
