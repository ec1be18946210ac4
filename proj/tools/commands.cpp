#include "commands.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bdsfix/constants.hpp"
#include "bdsfix/coverage.hpp"
#include "bdsfix/error.hpp"
#include "bdsfix/io.hpp"

namespace bdsfix::cli {

using nlohmann::json;

std::string default_elements_path() { return std::string(BDSFIX_DATA_DIR) + "/table1.csv"; }

namespace {

double to_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("bad " + what + " '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw ParseError("bad " + what + " '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    out.push_back(a == std::string::npos ? std::string{} : item.substr(a, b - a + 1));
  }
  return out;
}

SolverConfig solver_config(double threshold, double cutoff) {
  SolverConfig cfg;
  cfg.beta = threshold;
  cfg.elevation_cutoff_deg = cutoff;
  validate(cfg);
  return cfg;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    io::write_file_atomic(path, text);
  }
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json series_json(const ProportionSeries& s) {
  return {{"max", optional_number(s.max_proportion)},
          {"min", optional_number(s.min_proportion)},
          {"overall", optional_number(s.overall)}};
}

}  // namespace

double parse_duration(const std::string& text) {
  if (text.empty()) throw ParseError("empty duration");
  double scale = 1.0;
  std::string number = text;
  switch (text.back()) {
    case 's':
      number.pop_back();
      break;
    case 'm':
      scale = 60.0;
      number.pop_back();
      break;
    case 'h':
      scale = 3600.0;
      number.pop_back();
      break;
    case 'd':
      scale = 86400.0;
      number.pop_back();
      break;
    default:
      break;
  }
  const double v = to_double(number, "duration") * scale;
  if (v < 0.0) throw ParseError("duration must be non-negative");
  return v;
}

GeodeticPoint parse_lla(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw ParseError("expected \"lat,lon,alt\", got '" + text + "'");
  GeodeticPoint p{to_double(parts[0], "latitude"), to_double(parts[1], "longitude"),
                  to_double(parts[2], "altitude")};
  p.longitude_deg = wrap_longitude_deg(p.longitude_deg);
  validate(p);
  return p;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(to_double(part, "number"));
  if (out.empty()) throw ParseError("empty number list");
  return out;
}

std::vector<std::string> parse_id_list(const std::string& text) {
  std::vector<std::string> out;
  for (auto& part : split(text, ',')) {
    if (!part.empty()) out.push_back(std::move(part));
  }
  return out;
}

FractionalPeriod parse_modulus(const std::string& text) {
  if (text == "1ms" || text == "1") return FractionalPeriod::OneMs;
  if (text == "20ms" || text == "20") return FractionalPeriod::TwentyMs;
  throw ParseError("fractional modulus must be 1ms or 20ms, got '" + text + "'");
}

int exit_code_for(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:
      return kExitOk;
    case SolveStatus::GdopGateFailed:
      return kExitGateFailed;
    case SolveStatus::InsufficientMeasurements:
      return kExitInsufficient;
    case SolveStatus::MaxIterations:
      return kExitMaxIterations;
  }
  return kExitFailure;
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& log) {
  if (opt.out.empty()) throw ParseError("--out is required");
  const Catalog cat = io::read_elements(opt.elements);
  const UtcTime t = parse_utc(opt.epoch);
  const SolverConfig cfg = solver_config(opt.threshold, opt.cutoff_deg);

  SimulationScenario scen;
  scen.user_truth = parse_lla(opt.user_lla);
  scen.clock_bias_s = opt.clock_bias_s;
  scen.noise_sigma_m = opt.noise_sigma_m;
  scen.seed = opt.seed;
  scen.fractional_period = parse_modulus(opt.frac_modulus);
  scen.elevation_cutoff_deg = opt.cutoff_deg;
  scen.excluded_sats = opt.exclude;

  const SimulatedEpoch sim = simulate_scenario(cat, scen, t);
  io::write_measurements({sim.measurements}, opt.out);

  json truth;
  truth["epoch"] = format_utc(t);
  truth["user_lla"] = {{"lat_deg", scen.user_truth.latitude_deg},
                       {"lon_deg", scen.user_truth.longitude_deg},
                       {"alt_m", scen.user_truth.altitude_m}};
  const EcefVector& p = sim.truth.position;
  truth["position_ecef_m"] = {p.x(), p.y(), p.z()};
  truth["clock_bias_s"] = scen.clock_bias_s;
  truth["clock_bias_m"] = sim.truth.clock_bias_m;
  truth["noise_sigma_m"] = scen.noise_sigma_m;
  truth["seed"] = scen.seed;
  truth["frac_modulus_ms"] = period_ms(scen.fractional_period);
  json ambs = json::array();
  for (std::size_t k = 0; k < sim.ambiguity_sats.size(); ++k) {
    ambs.push_back({{"sat", sim.ambiguity_sats[k]}, {"N", std::llround(sim.truth.ambiguities[k])}});
  }
  truth["ambiguities"] = std::move(ambs);
  truth["geo_visible"] = sim.geo_visible;
  truth["threshold"] = cfg.beta;
  if (sim.geo_deficient) {
    truth["warning"] = "fewer than 4 GEOs visible (" + std::to_string(sim.geo_visible) + ")";
    truth["gdop_geo"] = nullptr;
    truth["gate_pass"] = false;
    log << "warning: only " << sim.geo_visible << " GEOs visible; the fast solver will not run\n";
  } else {
    std::vector<EcefVector> geos;
    for (const auto& m : sim.measurements.measurements()) {
      if (m.is_full()) geos.push_back(trace_signal(cat.at(m.sat_id).elements, t, p).sat_position);
    }
    const GateResult gate = eigenvalue_gate(geo_normal_matrix(geos, p), cfg.beta);
    truth["gdop_geo"] = std::isfinite(gate.gdop) ? json(gate.gdop) : json(nullptr);
    truth["gate_pass"] = gate.pass;
  }
  io::write_json(truth, opt.truth.empty() ? opt.out + ".truth.json" : opt.truth);
  log << "wrote " << sim.measurements.size() << " measurements (" << sim.measurements.full_count()
      << " full, " << sim.measurements.fractional_count() << " fractional) to " << opt.out << "\n";
  return kExitOk;
}

int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& log) {
  if (opt.meas.empty()) throw ParseError("--meas is required");
  if (opt.mode != "fast" && opt.mode != "conventional") {
    throw ParseError("--mode must be fast or conventional");
  }
  validate(opt.config);
  const Catalog cat = io::read_elements(opt.elements);
  const auto sets = io::read_measurements(opt.meas);
  if (sets.empty()) throw ParseError(opt.meas + ": no measurements");

  json docs = json::array();
  int code = kExitOk;
  for (const auto& set : sets) {
    SolveResult res;
    if (opt.mode == "fast") {
      res = solve_fast(set, cat, opt.config);
    } else {
      // Conventional positioning uses the full rows only.
      MeasurementSet full(set.epoch());
      for (const auto& m : set.measurements()) {
        if (m.is_full()) full.add(m);
      }
      res = solve_conventional(full, cat, opt.config);
    }
    json doc = io::result_to_json(res);
    doc["epoch"] = format_utc(set.epoch());
    doc["mode"] = opt.mode;
    docs.push_back(std::move(doc));
    log << format_utc(set.epoch()) << ": " << to_string(res.status) << "\n";
    if (code == kExitOk) code = exit_code_for(res.status);
  }
  const json& doc = docs.size() == 1 ? docs.front() : docs;
  emit(doc.dump(2) + "\n", opt.out, out);
  return code;
}

int cmd_coverage(const CoverageOptions& opt, std::ostream& out, std::ostream& log) {
  const Catalog cat = io::read_elements(opt.elements);
  const UtcTime start = parse_utc(opt.start);
  const double duration = parse_duration(opt.duration);
  const SolverConfig cfg = solver_config(opt.threshold, opt.cutoff_deg);
  GridSpec grid{opt.grid_deg, opt.grid_deg, parse_number_list(opt.alts)};
  validate(grid);

  std::vector<io::CoverageRow> rows;
  CellVisitor visit;
  if (!opt.out.empty()) {
    visit = [&rows](UtcTime t, const CoverageCell& c) { rows.push_back({t, c}); };
  }
  const SweepSummary s = sweep(cat, start, duration, opt.step_s, grid, cfg, visit);
  if (!opt.out.empty()) io::write_coverage(std::move(rows), opt.out);

  json summary;
  summary["start"] = format_utc(start);
  summary["duration_s"] = duration;
  summary["step_s"] = opt.step_s;
  summary["grid_deg"] = opt.grid_deg;
  summary["threshold"] = cfg.beta;
  summary["cutoff_deg"] = cfg.elevation_cutoff_deg;
  summary["epochs"] = s.all.epochs.size();
  json alts = json::array();
  for (std::size_t a = 0; a < s.altitudes_m.size(); ++a) {
    json entry = series_json(s.per_altitude[a]);
    entry["alt_m"] = s.altitudes_m[a];
    alts.push_back(std::move(entry));
  }
  summary["altitudes"] = std::move(alts);
  summary["all"] = series_json(s.all);
  json per_epoch = json::array();
  for (std::size_t a = 0; a < s.altitudes_m.size(); ++a) {
    for (const auto& e : s.per_altitude[a].epochs) {
      per_epoch.push_back({{"epoch", format_utc(e.epoch)},
                           {"alt_m", s.altitudes_m[a]},
                           {"cells_4geo", e.cells_4geo},
                           {"cells_pass", e.cells_pass},
                           {"proportion", optional_number(e.proportion)}});
    }
  }
  summary["per_epoch"] = std::move(per_epoch);
  emit(summary.dump(2) + "\n", opt.summary, out);
  log << "swept " << s.all.epochs.size() << " epochs\n";
  return kExitOk;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t point, std::uint64_t trial) {
  // splitmix64 over the packed key.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ point) ^ trial);
}

PointComparison compare_point(const Catalog& cat, const SimulationScenario& base, UtcTime t, int trials,
                              const SolverConfig& cfg) {
  PointComparison pc;
  pc.point = base.user_truth;
  pc.trials = trials;
  double sum_fast = 0.0;
  double sum_conv = 0.0;
  for (int k = 0; k < trials; ++k) {
    SimulationScenario scen = base;
    scen.seed = trial_seed(base.seed, 0, static_cast<std::uint64_t>(k));
    const SimulatedEpoch sim = simulate_scenario(cat, scen, t);

    const SolveResult conv = solve_conventional(sim.full_measurements, cat, cfg);
    sum_conv += (conv.state.position - sim.truth.position).squaredNorm();

    const SolveResult fast = solve_fast(sim.measurements, cat, cfg);
    if (!fast.converged()) continue;
    ++pc.fast_converged;
    pc.max_fast_iterations = std::max(pc.max_fast_iterations, fast.iterations);
    sum_fast += (fast.state.position - sim.truth.position).squaredNorm();
    pc.max_fast_conv_diff_m = std::max(pc.max_fast_conv_diff_m, (fast.state.position - conv.state.position).norm());
    bool all_right = fast.fixed_ambiguities.size() == sim.truth.ambiguities.size();
    for (std::size_t j = 0; all_right && j < fast.fixed_ambiguities.size(); ++j) {
      all_right = fast.fixed_ambiguities[j] == std::llround(sim.truth.ambiguities[j]);
    }
    if (all_right) ++pc.ambiguity_successes;
  }
  if (trials > 0) pc.rmse_conv_m = std::sqrt(sum_conv / trials);
  pc.rmse_fast_m = pc.fast_converged > 0 ? std::sqrt(sum_fast / pc.fast_converged)
                                         : std::numeric_limits<double>::quiet_NaN();
  return pc;
}

int cmd_compare(const CompareOptions& opt, std::ostream& out, std::ostream& log) {
  if (opt.trials < 1) throw ParseError("--trials must be at least 1");
  const Catalog cat = io::read_elements(opt.elements);
  const UtcTime t = parse_utc(opt.epoch);
  const SolverConfig cfg = solver_config(opt.threshold, opt.cutoff_deg);

  std::vector<GeodeticPoint> points;
  if (!opt.user_lla.empty()) {
    points.push_back(parse_lla(opt.user_lla));
  } else {
    GridSpec grid{opt.grid_deg, opt.grid_deg, parse_number_list(opt.alts)};
    for (const auto& fp : footprint(cat.without(opt.exclude), t, cfg, grid)) {
      for (const auto& c : fp.cells) points.push_back(c.point);
    }
  }

  SimulationScenario base;
  base.clock_bias_s = opt.clock_bias_s;
  base.noise_sigma_m = opt.noise_sigma_m;
  base.fractional_period = parse_modulus(opt.frac_modulus);
  base.elevation_cutoff_deg = opt.cutoff_deg;
  base.excluded_sats = opt.exclude;

  std::ostringstream csv;
  csv.precision(12);
  csv << "lat,lon,alt,rmse_fast_m,rmse_conv_m,ambiguity_success_rate\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    base.user_truth = points[i];
    base.seed = trial_seed(opt.seed, i, 0);
    const PointComparison pc = compare_point(cat, base, t, opt.trials, cfg);
    csv << pc.point.latitude_deg << ',' << pc.point.longitude_deg << ',' << pc.point.altitude_m << ',';
    if (std::isfinite(pc.rmse_fast_m)) csv << pc.rmse_fast_m;
    csv << ',' << pc.rmse_conv_m << ',' << pc.success_rate() << '\n';
  }
  emit(csv.str(), opt.out, out);
  log << "compared " << points.size() << " points x " << opt.trials << " trials\n";
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Fast BeiDou positioning from full GEO and fractional non-GEO pseudoranges"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Simulate one epoch of measurements at a user position");
  s->add_option("--elements", sim.elements, "Orbital elements CSV");
  s->add_option("--epoch", sim.epoch, "Receive time, ISO-8601 UTC");
  s->add_option("--user-lla", sim.user_lla, "User position \"lat,lon,alt\"")->required();
  s->add_option("--clock-bias", sim.clock_bias_s, "Receiver clock bias, seconds");
  s->add_option("--noise-sigma", sim.noise_sigma_m, "Pseudorange noise 1-sigma, meters");
  s->add_option("--seed", sim.seed, "Noise seed");
  s->add_option("--frac-modulus", sim.frac_modulus, "1ms or 20ms");
  s->add_option("--cutoff", sim.cutoff_deg, "Elevation cutoff, degrees");
  s->add_option("--threshold", sim.threshold, "GDOP gate threshold recorded in the truth file");
  std::string exclude;
  s->add_option("--exclude", exclude, "Comma separated satellite ids to leave out");
  s->add_option("--out", sim.out, "Measurements JSONL output")->required();
  s->add_option("--truth", sim.truth, "Truth JSON output (default <out>.truth.json)");

  SolveOptions sol;
  auto* v = app.add_subcommand("solve", "Solve position from a measurements file");
  v->add_option("--elements", sol.elements, "Orbital elements CSV");
  v->add_option("--meas", sol.meas, "Measurements JSONL")->required();
  v->add_option("--mode", sol.mode, "fast or conventional");
  v->add_option("--out", sol.out, "Result JSON (stdout when omitted)");
  v->add_option("--threshold", sol.config.beta, "GDOP gate threshold");
  v->add_option("--alpha", sol.config.alpha_m, "Half-cycle ambiguity threshold, meters");
  v->add_option("--max-iterations", sol.config.max_iterations, "Gauss-Newton iteration limit");
  v->add_option("--convergence", sol.config.convergence_norm_m, "Step norm for convergence, meters");
  v->add_option("--cutoff", sol.config.elevation_cutoff_deg, "Elevation cutoff, degrees");

  CoverageOptions cov;
  auto* c = app.add_subcommand("coverage", "Sweep 4-GEO coverage and GDOP gate usability");
  c->add_option("--elements", cov.elements, "Orbital elements CSV");
  c->add_option("--start", cov.start, "First epoch, ISO-8601 UTC");
  c->add_option("--duration", cov.duration, "Sweep length (s/m/h/d suffix)");
  c->add_option("--step", cov.step_s, "Epoch step, seconds");
  c->add_option("--grid", cov.grid_deg, "Grid spacing, degrees");
  c->add_option("--alts", cov.alts, "Comma separated altitudes, meters");
  c->add_option("--cutoff", cov.cutoff_deg, "Elevation cutoff, degrees");
  c->add_option("--threshold", cov.threshold, "GDOP gate threshold");
  c->add_option("--out", cov.out, "Per-cell coverage CSV");
  c->add_option("--summary", cov.summary, "Summary JSON (stdout when omitted)");

  CompareOptions cmp;
  auto* p = app.add_subcommand("compare", "Monte-Carlo fast vs conventional accuracy");
  p->add_option("--elements", cmp.elements, "Orbital elements CSV");
  p->add_option("--epoch", cmp.epoch, "Receive time, ISO-8601 UTC");
  p->add_option("--grid", cmp.grid_deg, "Grid spacing, degrees");
  p->add_option("--alts", cmp.alts, "Comma separated altitudes, meters");
  p->add_option("--user-lla", cmp.user_lla, "Single point \"lat,lon,alt\" instead of the grid");
  p->add_option("--trials", cmp.trials, "Trials per point");
  p->add_option("--clock-bias", cmp.clock_bias_s, "Receiver clock bias, seconds");
  p->add_option("--noise-sigma", cmp.noise_sigma_m, "Pseudorange noise 1-sigma, meters");
  p->add_option("--seed", cmp.seed, "Base seed");
  p->add_option("--frac-modulus", cmp.frac_modulus, "1ms or 20ms");
  p->add_option("--cutoff", cmp.cutoff_deg, "Elevation cutoff, degrees");
  p->add_option("--threshold", cmp.threshold, "GDOP gate threshold");
  std::string cmp_exclude;
  p->add_option("--exclude", cmp_exclude, "Comma separated satellite ids to leave out");
  p->add_option("--out", cmp.out, "Comparison CSV (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*s) {
      sim.exclude = parse_id_list(exclude);
      return cmd_simulate(sim, std::cerr);
    }
    if (*v) return cmd_solve(sol, std::cout, std::cerr);
    if (*c) return cmd_coverage(cov, std::cout, std::cerr);
    if (*p) {
      cmp.exclude = parse_id_list(cmp_exclude);
      return cmd_compare(cmp, std::cout, std::cerr);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace bdsfix::cli
