#include "bdsfix/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "bdsfix/error.hpp"
#include "bdsfix/symmetric_eigen.hpp"

namespace bdsfix {

void validate(const SolverConfig& cfg) {
  if (!(cfg.alpha_m > 0.0)) throw DomainError("alpha must be positive");
  if (!(cfg.beta > 0.0)) throw DomainError("beta must be positive");
  if (cfg.max_iterations < 1) throw DomainError("max_iterations must be at least 1");
  if (!(cfg.convergence_norm_m > 0.0)) throw DomainError("convergence norm must be positive");
}

double gdop_threshold(double alpha_m, double max_range_error_m) {
  if (!(alpha_m > 0.0) || !(max_range_error_m > 0.0)) {
    throw DomainError("alpha and the range error bound must be positive");
  }
  return alpha_m / max_range_error_m;
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:
      return "converged";
    case SolveStatus::GdopGateFailed:
      return "gdop_gate_failed";
    case SolveStatus::MaxIterations:
      return "max_iterations";
    case SolveStatus::InsufficientMeasurements:
      return "insufficient_measurements";
  }
  return "?";
}

SatelliteGeometry catalog_geometry(const Catalog& cat, const MeasurementSet& meas) {
  std::vector<const OrbitalElements*> elems;
  elems.reserve(meas.size());
  for (const auto& m : meas.measurements()) elems.push_back(&cat.at(m.sat_id).elements);
  const UtcTime t = meas.epoch();
  return [elems = std::move(elems), t](const EcefVector& receiver) {
    std::vector<EcefVector> out;
    out.reserve(elems.size());
    for (const auto* e : elems) out.push_back(trace_signal(*e, t, receiver).sat_position);
    return out;
  };
}

SatelliteGeometry fixed_geometry(std::vector<EcefVector> positions) {
  return [positions = std::move(positions)](const EcefVector&) { return positions; };
}

std::vector<double> geometric_distances(const NavState& state, std::span<const EcefVector> sats) {
  std::vector<double> out;
  out.reserve(sats.size());
  for (const auto& s : sats) {
    const double d = (s - state.position).norm();
    if (!(d > 0.0)) throw GeometryError("degenerate geometry");
    out.push_back(d);
  }
  return out;
}

namespace {

void check_shapes(const NavState& state, const MeasurementSet& meas, std::span<const EcefVector> sats) {
  if (sats.size() != meas.size()) {
    throw DomainError("satellite position count does not match measurement count");
  }
  if (state.ambiguities.size() != meas.fractional_count()) {
    throw DomainError("ambiguity count does not match fractional measurement count");
  }
}

}  // namespace

Eigen::VectorXd residuals(const NavState& state, const MeasurementSet& meas,
                          std::span<const EcefVector> sats) {
  check_shapes(state, meas, sats);
  // Measured values and the clock term sit near 1.5e9 m where a double ulp is
  // 2.4e-7 m. Weak geometry amplifies that rounding past the convergence
  // threshold, so the differences are taken in extended precision.
  using L = long double;
  Eigen::VectorXd r(static_cast<Eigen::Index>(meas.size()));
  std::size_t amb = 0;
  for (std::size_t k = 0; k < meas.size(); ++k) {
    const Measurement& m = meas.measurements()[k];
    const EcefVector d = sats[k] - state.position;
    const L rho = std::sqrt(static_cast<L>(d.x()) * d.x() + static_cast<L>(d.y()) * d.y() +
                            static_cast<L>(d.z()) * d.z());
    if (!(rho > 0.0L)) throw GeometryError("degenerate geometry");
    L predicted = rho + static_cast<L>(state.clock_bias_m);
    if (m.is_fractional()) {
      predicted -= static_cast<L>(state.ambiguities[amb++]) * static_cast<L>(m.cycle_length());
    }
    r(static_cast<Eigen::Index>(k)) = static_cast<double>(static_cast<L>(m.value_m) - predicted);
  }
  return r;
}

Eigen::MatrixXd design_matrix(const NavState& state, const MeasurementSet& meas,
                              std::span<const EcefVector> sats) {
  check_shapes(state, meas, sats);
  const auto rows = static_cast<Eigen::Index>(meas.size());
  const auto cols = static_cast<Eigen::Index>(4 + meas.fractional_count());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::Index amb_col = 4;
  for (Eigen::Index k = 0; k < rows; ++k) {
    const EcefVector los = sats[static_cast<std::size_t>(k)] - state.position;
    const double range = los.norm();
    if (!(range > 0.0)) throw GeometryError("zero-length line of sight");
    h.block<1, 3>(k, 0) = -(los / range).transpose();
    h(k, 3) = 1.0;
    const Measurement& m = meas.measurements()[static_cast<std::size_t>(k)];
    if (m.is_fractional()) {
      h(k, amb_col++) = -m.cycle_length();
    }
  }
  return h;
}

GeoNormalMatrix GeoNormalMatrix::from_matrix(const Eigen::Matrix4d& d) {
  return {d, jacobi_eigenvalues<4>(d)};
}

GeoNormalMatrix geo_normal_matrix(std::span<const EcefVector> anchor_sats, const EcefVector& receiver) {
  if (anchor_sats.size() < 4) {
    throw DomainError("at least four anchor satellites are required for the GEO normal matrix");
  }
  Eigen::MatrixX4d g(static_cast<Eigen::Index>(anchor_sats.size()), 4);
  for (std::size_t i = 0; i < anchor_sats.size(); ++i) {
    const EcefVector los = anchor_sats[i] - receiver;
    const double range = los.norm();
    if (!(range > 0.0)) throw GeometryError("zero-length line of sight");
    const auto row = static_cast<Eigen::Index>(i);
    g.block<1, 3>(row, 0) = -(los / range).transpose();
    g(row, 3) = 1.0;
  }
  return GeoNormalMatrix::from_matrix(g.transpose() * g);
}

GeoNormalMatrix geo_normal_matrix(const MeasurementSet& meas, const NavState& state,
                                  std::span<const EcefVector> sats) {
  if (sats.size() != meas.size()) {
    throw DomainError("satellite position count does not match measurement count");
  }
  std::vector<EcefVector> anchors;
  for (std::size_t k = 0; k < meas.size(); ++k) {
    if (meas.measurements()[k].is_full()) anchors.push_back(sats[k]);
  }
  return geo_normal_matrix(anchors, state.position);
}

GateResult eigenvalue_gate(const GeoNormalMatrix& d, double beta) {
  GateResult out;
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double lambda = d.eigenvalues(i);
    if (!(lambda > 0.0)) {
      out.gdop = std::numeric_limits<double>::infinity();
      out.reason = "singular geometry";
      return out;
    }
    sum += 1.0 / lambda;
  }
  out.gdop = std::sqrt(sum);
  out.pass = out.gdop < beta;
  if (!out.pass) {
    std::ostringstream msg;
    msg << "GDOP " << out.gdop << " is not below threshold " << beta;
    out.reason = msg.str();
  }
  return out;
}

Step iterate_once(const NavState& state, const MeasurementSet& meas, std::span<const EcefVector> sats,
                  std::span<const double> weights) {
  Eigen::MatrixXd h = design_matrix(state, meas, sats);
  Eigen::VectorXd r = residuals(state, meas, sats);
  if (h.rows() < h.cols()) throw GeometryError("underdetermined system");

  if (!weights.empty()) {
    if (weights.size() != meas.size()) throw DomainError("weight count does not match measurements");
    for (Eigen::Index k = 0; k < h.rows(); ++k) {
      const double w = weights[static_cast<std::size_t>(k)];
      if (!(w > 0.0)) throw DomainError("weights must be positive");
      h.row(k) *= std::sqrt(w);
      r(k) *= std::sqrt(w);
    }
  }

  // Ambiguity columns are solved in meters (divided by cT) so every column
  // has unit scale.
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(h.cols());
  {
    Eigen::Index col = 4;
    for (const auto& m : meas.measurements()) {
      if (m.is_fractional()) scale(col++) = m.cycle_length();
    }
  }
  const Eigen::MatrixXd hs = h * scale.cwiseInverse().asDiagonal();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(hs);
  if (qr.rank() < hs.cols()) throw GeometryError("underdetermined system");
  const Eigen::VectorXd delta_scaled = qr.solve(r);

  Step out;
  out.correction = delta_scaled.cwiseQuotient(scale);
  out.step_norm_m = delta_scaled.norm();
  out.state = state;
  out.state.position += out.correction.head<3>();
  out.state.clock_bias_m += out.correction(3);
  for (std::size_t j = 0; j < state.ambiguities.size(); ++j) {
    out.state.ambiguities[j] += out.correction(static_cast<Eigen::Index>(4 + j));
  }
  return out;
}

MeasurementSet reconstruct_full(const MeasurementSet& meas, std::span<const std::int64_t> ambiguities) {
  if (ambiguities.size() != meas.fractional_count()) {
    throw DomainError("ambiguity count does not match fractional measurement count");
  }
  MeasurementSet out(meas.epoch());
  std::size_t j = 0;
  for (const auto& m : meas.measurements()) {
    if (m.is_full()) {
      out.add(m);
    } else {
      const double full = m.value_m + static_cast<double>(ambiguities[j++]) * m.cycle_length();
      out.add(Measurement::full(m.sat_id, m.epoch, full));
    }
  }
  return out;
}

namespace {

struct LoopOutcome {
  NavState state;
  int iterations = 0;
  bool converged = false;
  bool gate_failed = false;
  GateResult gate;
};

// Gauss-Newton over whatever unknowns `state` carries. With `gated`, the
// eigenvalue gate runs on the full rows before each update.
LoopOutcome gauss_newton(const MeasurementSet& meas, const SatelliteGeometry& geometry,
                         const SolverConfig& cfg, NavState state, bool gated) {
  LoopOutcome out;
  out.gate.gdop = std::numeric_limits<double>::quiet_NaN();
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const auto sats = geometry(state.position);
    if (gated) {
      out.gate = eigenvalue_gate(geo_normal_matrix(meas, state, sats), cfg.beta);
      if (!out.gate.pass) {
        out.state = std::move(state);
        out.iterations = it;
        out.gate_failed = true;
        return out;
      }
    }
    Step step = iterate_once(state, meas, sats, cfg.weights);
    state = std::move(step.state);
    out.iterations = it;
    if (step.step_norm_m < cfg.convergence_norm_m) {
      out.converged = true;
      break;
    }
  }
  out.state = std::move(state);
  return out;
}

double full_row_gdop(const MeasurementSet& meas, const SatelliteGeometry& geometry, const NavState& state) {
  try {
    const auto sats = geometry(state.position);
    return eigenvalue_gate(geo_normal_matrix(meas, state, sats), 1.0).gdop;
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

CorrectionResult state_correction(const NavState& fixed_state, const MeasurementSet& meas,
                                  const SatelliteGeometry& geometry, const SolverConfig& cfg) {
  std::vector<std::int64_t> fixed;
  fixed.reserve(fixed_state.ambiguities.size());
  for (double n : fixed_state.ambiguities) fixed.push_back(std::llround(n));
  const MeasurementSet full = reconstruct_full(meas, fixed);

  // Cold start from the earth center, exactly as the conventional solver does.
  // With the clock term near 1.5e9 m a warm start from the float solution
  // lands on a different floating-point fixed point, a few 1e-7 m away; the
  // cold start makes the corrected output identical to a conventional solve
  // of the reconstructed set at the cost of a few extra iterations.
  const LoopOutcome loop = gauss_newton(full, geometry, cfg, NavState{}, false);

  CorrectionResult out;
  out.state = loop.state;
  out.state.ambiguities.assign(fixed.begin(), fixed.end());
  out.iterations = loop.iterations;
  out.converged = loop.converged;
  return out;
}

SolveResult solve_fast(const MeasurementSet& meas, const SatelliteGeometry& geometry,
                       const SolverConfig& cfg, const NavState& initial) {
  validate(cfg);
  SolveResult result;
  result.gdop_geo = std::numeric_limits<double>::quiet_NaN();
  for (const auto& m : meas.measurements()) {
    if (m.is_fractional()) result.ambiguity_sats.push_back(m.sat_id);
  }
  if (meas.full_count() < 4) {
    result.status = SolveStatus::InsufficientMeasurements;
    result.message = "at least four full pseudoranges are required";
    return result;
  }

  NavState start = initial;
  start.ambiguities.resize(meas.fractional_count(), 0.0);
  const LoopOutcome loop = gauss_newton(meas, geometry, cfg, std::move(start), true);
  result.iterations = loop.iterations;
  result.gdop_geo = loop.gate.gdop;
  result.state = loop.state;

  if (loop.gate_failed) {
    result.status = SolveStatus::GdopGateFailed;
    result.message = loop.gate.reason;
    return result;
  }
  if (!loop.converged) {
    result.status = SolveStatus::MaxIterations;
    result.message = "float solution did not converge";
    return result;
  }

  const CorrectionResult corrected = state_correction(loop.state, meas, geometry, cfg);
  result.state = corrected.state;
  for (double n : corrected.state.ambiguities) result.fixed_ambiguities.push_back(std::llround(n));
  const MeasurementSet full = reconstruct_full(meas, result.fixed_ambiguities);
  for (const auto& m : full.measurements()) {
    if (std::find(result.ambiguity_sats.begin(), result.ambiguity_sats.end(), m.sat_id) !=
        result.ambiguity_sats.end()) {
      result.recovered_full_pseudoranges.push_back(m.value_m);
    }
  }
  if (!corrected.converged) {
    result.status = SolveStatus::MaxIterations;
    result.message = "state correction did not converge";
    return result;
  }
  result.status = SolveStatus::Converged;
  return result;
}

SolveResult solve_fast(const MeasurementSet& meas, const Catalog& cat, const SolverConfig& cfg) {
  return solve_fast(meas, catalog_geometry(cat, meas), cfg, NavState{});
}

SolveResult solve_conventional(const MeasurementSet& meas, const SatelliteGeometry& geometry,
                               const SolverConfig& cfg) {
  validate(cfg);
  if (meas.fractional_count() != 0) {
    throw DomainError("conventional positioning takes full pseudoranges only");
  }
  SolveResult result;
  result.gdop_geo = std::numeric_limits<double>::quiet_NaN();
  if (meas.full_count() < 4) {
    result.status = SolveStatus::InsufficientMeasurements;
    result.message = "at least four full pseudoranges are required";
    return result;
  }
  const LoopOutcome loop = gauss_newton(meas, geometry, cfg, NavState{}, false);
  result.state = loop.state;
  result.iterations = loop.iterations;
  result.gdop_geo = full_row_gdop(meas, geometry, loop.state);
  result.status = loop.converged ? SolveStatus::Converged : SolveStatus::MaxIterations;
  if (!loop.converged) result.message = "solution did not converge";
  return result;
}

SolveResult solve_conventional(const MeasurementSet& meas, const Catalog& cat, const SolverConfig& cfg) {
  return solve_conventional(meas, catalog_geometry(cat, meas), cfg);
}

UsabilityVerdict usability_criterion(std::span<const double> geo_errors,
                                     std::span<const EcefVector> geo_los,
                                     std::span<const EcefVector> nongeo_los, double alpha_m) {
  if (geo_errors.size() != geo_los.size()) {
    throw DomainError("one range error is needed per GEO line of sight");
  }
  if (geo_los.size() < 4) throw DomainError("at least four GEO lines of sight are required");

  const auto n = static_cast<Eigen::Index>(geo_los.size());
  Eigen::MatrixX4d g(n, 4);
  Eigen::VectorXd drho(n);
  double max_err = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    g.block<1, 3>(i, 0) = -geo_los[k].transpose();
    g(i, 3) = 1.0;
    drho(i) = geo_errors[k];
    max_err = std::max(max_err, std::abs(geo_errors[k]));
  }
  const Eigen::Matrix4d normal = g.transpose() * g;
  const GateResult gate = eigenvalue_gate(GeoNormalMatrix::from_matrix(normal), 1.0);

  UsabilityVerdict out;
  out.gdop = gate.gdop;
  out.gdop_bound_m = max_err == 0.0 ? 0.0 : out.gdop * max_err;

  if (std::isfinite(out.gdop)) {
    const Eigen::Vector4d dx = normal.ldlt().solve(g.transpose() * drho);
    for (const auto& ej : nongeo_los) {
      double sum = 0.0;
      for (std::size_t i = 0; i < geo_los.size(); ++i) sum += geo_errors[i] * geo_los[i].dot(ej);
      out.projected_sum_m = std::max(out.projected_sum_m, std::abs(sum));
      const double los_err = -ej.dot(dx.head<3>()) + dx(3);
      out.los_error_m = std::max(out.los_error_m, std::abs(los_err));
    }
  } else {
    out.los_error_m = std::numeric_limits<double>::infinity();
  }
  out.projection_pass = out.projected_sum_m < alpha_m;
  out.gdop_pass = out.gdop_bound_m < alpha_m;
  return out;
}

}  // namespace bdsfix
