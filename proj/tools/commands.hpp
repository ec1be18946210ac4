#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bdsfix/constellation.hpp"
#include "bdsfix/measurements.hpp"
#include "bdsfix/solver.hpp"

namespace bdsfix::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitGateFailed = 2,
  kExitInsufficient = 3,
  kExitMaxIterations = 4,
  kExitIoError = 5,
  kExitParseError = 6,
  kExitFailure = 7,
};

inline constexpr const char* kDefaultEpoch = "2015-05-19T04:00:00Z";

std::string default_elements_path();

// "90", "90s", "15m", "6h", "8d" -> seconds.
double parse_duration(const std::string& text);
// "lat,lon,alt" in degrees, degrees, meters.
GeodeticPoint parse_lla(const std::string& text);
std::vector<double> parse_number_list(const std::string& text);
std::vector<std::string> parse_id_list(const std::string& text);
// "1ms" / "20ms" (or "1" / "20").
FractionalPeriod parse_modulus(const std::string& text);

int exit_code_for(SolveStatus s);

struct SimulateOptions {
  std::string elements = default_elements_path();
  std::string epoch = kDefaultEpoch;
  std::string user_lla;
  double clock_bias_s = 5.0;
  double noise_sigma_m = 1.3;
  std::uint64_t seed = 1;
  std::string frac_modulus = "1ms";
  double cutoff_deg = 0.0;
  double threshold = 3000.0;
  std::vector<std::string> exclude;
  std::string out;
  std::string truth;  // defaults to <out>.truth.json
};

struct SolveOptions {
  std::string elements = default_elements_path();
  std::string meas;
  std::string mode = "fast";
  std::string out;  // stdout when empty
  SolverConfig config;
};

struct CoverageOptions {
  std::string elements = default_elements_path();
  std::string start = kDefaultEpoch;
  std::string duration = "0";
  double step_s = 3600.0;
  double grid_deg = 5.0;
  std::string alts = "0,1000000";
  double cutoff_deg = 0.0;
  double threshold = 3000.0;
  std::string out;      // coverage CSV, skipped when empty
  std::string summary;  // summary JSON, stdout when empty
};

struct CompareOptions {
  std::string elements = default_elements_path();
  std::string epoch = kDefaultEpoch;
  double grid_deg = 5.0;
  std::string alts = "0";
  std::string user_lla;  // single point instead of the grid
  int trials = 100;
  double clock_bias_s = 5.0;
  double noise_sigma_m = 1.3;
  std::uint64_t seed = 1;
  std::string frac_modulus = "1ms";
  double cutoff_deg = 0.0;
  double threshold = 3000.0;
  std::vector<std::string> exclude;
  std::string out;  // stdout when empty
};

int cmd_simulate(const SimulateOptions& opt, std::ostream& log);
int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& log);
int cmd_coverage(const CoverageOptions& opt, std::ostream& out, std::ostream& log);
int cmd_compare(const CompareOptions& opt, std::ostream& out, std::ostream& log);

// Paired fast/conventional Monte-Carlo at one point: every trial draws one
// noise realization and feeds it to both solvers.
struct PointComparison {
  GeodeticPoint point;
  int trials = 0;
  int fast_converged = 0;
  int ambiguity_successes = 0;  // every ambiguity equal to the truth
  double rmse_fast_m = 0.0;     // over converged fast trials
  double rmse_conv_m = 0.0;
  double max_fast_conv_diff_m = 0.0;
  int max_fast_iterations = 0;

  double success_rate() const { return trials > 0 ? static_cast<double>(ambiguity_successes) / trials : 0.0; }
};

PointComparison compare_point(const Catalog& cat, const SimulationScenario& base, UtcTime t, int trials,
                              const SolverConfig& cfg);

// Per-trial seed derived from (seed, point index, trial) independent of
// evaluation order.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t point, std::uint64_t trial);

// Full CLI entry point.
int run(int argc, char** argv);

}  // namespace bdsfix::cli
