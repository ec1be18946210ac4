#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "bdsfix/error.hpp"
#include "test_support.hpp"

using namespace bdsfix;
using namespace bdsfix::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "bdsfix_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

json read_json(const fs::path& p) { return json::parse(io::read_file(p)); }

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "bdsfix");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("flag parsing helpers") {
  CHECK(parse_duration("90") == 90.0);
  CHECK(parse_duration("15m") == 900.0);
  CHECK(parse_duration("6h") == 21600.0);
  CHECK(parse_duration("8d") == 8 * 86400.0);
  CHECK_THROWS_AS(parse_duration("8w"), ParseError);
  CHECK_THROWS_AS(parse_duration("-1h"), ParseError);
  const GeodeticPoint p = parse_lla("30,110,1000");
  CHECK(p.latitude_deg == 30.0);
  CHECK(p.altitude_m == 1000.0);
  CHECK_THROWS_AS(parse_lla("30,110"), ParseError);
  CHECK(parse_number_list("0,1000000") == std::vector<double>{0.0, 1.0e6});
  CHECK(parse_id_list("M5, I2") == std::vector<std::string>{"M5", "I2"});
  CHECK(parse_modulus("20ms") == FractionalPeriod::TwentyMs);
  CHECK(parse_modulus("1") == FractionalPeriod::OneMs);
  CHECK_THROWS_AS(parse_modulus("5ms"), ParseError);
  CHECK(exit_code_for(SolveStatus::Converged) == kExitOk);
  CHECK(exit_code_for(SolveStatus::GdopGateFailed) == kExitGateFailed);
  CHECK(exit_code_for(SolveStatus::InsufficientMeasurements) == kExitInsufficient);
  CHECK(exit_code_for(SolveStatus::MaxIterations) == kExitMaxIterations);
}

TEST_CASE("simulate defaults") {
  const SimulateOptions d;
  CHECK(d.clock_bias_s == 5.0);
  CHECK(d.noise_sigma_m == 1.3);
  CHECK(d.cutoff_deg == 0.0);
  CHECK(d.threshold == 3000.0);
  CHECK(SolveOptions{}.config.beta == 3000.0);
}

TEST_CASE("noiseless simulate then solve reproduces the input position") {
  SimulateOptions so;
  so.user_lla = "25,105,300";
  so.noise_sigma_m = 0.0;
  so.clock_bias_s = 0.0;
  so.out = scratch("noiseless.jsonl").string();
  std::ostringstream log;
  REQUIRE(cmd_simulate(so, log) == kExitOk);
  const json truth = read_json(so.out + ".truth.json");
  CHECK(truth.at("gate_pass") == true);

  SolveOptions fo;
  fo.meas = so.out;
  fo.out = scratch("noiseless.result.json").string();
  std::ostringstream out;
  REQUIRE(cmd_solve(fo, out, log) == kExitOk);
  const json res = read_json(fo.out);
  CHECK(res.at("status") == "converged");
  const auto& lla = res.at("position_lla");
  const EcefVector got = geodetic_to_ecef({lla.at("lat_deg"), lla.at("lon_deg"), lla.at("alt_m")});
  const auto& pe = res.at("position_ecef_m");
  const EcefVector ecef(pe[0].get<double>(), pe[1].get<double>(), pe[2].get<double>());
  const EcefVector want = geodetic_to_ecef(parse_lla(so.user_lla));
  CHECK((ecef - want).norm() < 1e-6);
  CHECK((got - want).norm() < 1e-6);
  CHECK(res.at("ambiguities") .size() == truth.at("ambiguities").size());
  for (std::size_t k = 0; k < truth.at("ambiguities").size(); ++k) {
    CHECK(res.at("ambiguities")[k].at("sat") == truth.at("ambiguities")[k].at("sat"));
    CHECK(res.at("ambiguities")[k].at("N") == truth.at("ambiguities")[k].at("N"));
  }
}

TEST_CASE("simulate is deterministic under a seed") {
  SimulateOptions so;
  so.user_lla = "30,110,0";
  so.seed = 42;
  std::ostringstream log;
  so.out = scratch("seed_a.jsonl").string();
  REQUIRE(cmd_simulate(so, log) == kExitOk);
  so.out = scratch("seed_b.jsonl").string();
  REQUIRE(cmd_simulate(so, log) == kExitOk);
  CHECK(io::read_file(scratch("seed_a.jsonl")) == io::read_file(scratch("seed_b.jsonl")));
  CHECK(io::read_file(scratch("seed_a.jsonl.truth.json")) == io::read_file(scratch("seed_b.jsonl.truth.json")));
}

TEST_CASE("simulate at a GEO-deficient point records a warning") {
  SimulateOptions so;
  so.user_lla = "60,-20,0";
  so.out = scratch("deficient.jsonl").string();
  std::ostringstream log;
  REQUIRE(cmd_simulate(so, log) == kExitOk);
  const json truth = read_json(so.out + ".truth.json");
  CHECK(truth.contains("warning"));
  CHECK(truth.at("gate_pass") == false);

  SolveOptions fo;
  fo.meas = so.out;
  std::ostringstream out;
  CHECK(cmd_solve(fo, out, log) == kExitInsufficient);
  CHECK(json::parse(out.str()).at("status") == "insufficient_measurements");
}

TEST_CASE("fast and conventional modes on full-only measurements agree") {
  const auto sim = simulate_scenario(test_support::table1(),
                                     SimulationScenario{{-15.0, 120.0, 0.0}, 5.0, 1.3, 9, FractionalPeriod::OneMs, 0.0, {}},
                                     test_support::table1_epoch());
  const fs::path p = scratch("fullonly.jsonl");
  io::write_measurements({sim.full_measurements}, p);
  std::ostringstream log;
  SolveOptions fo;
  fo.meas = p.string();
  std::ostringstream fast_out;
  REQUIRE(cmd_solve(fo, fast_out, log) == kExitOk);
  fo.mode = "conventional";
  std::ostringstream conv_out;
  REQUIRE(cmd_solve(fo, conv_out, log) == kExitOk);
  const json a = json::parse(fast_out.str());
  const json b = json::parse(conv_out.str());
  CHECK(a.at("status") == "converged");
  CHECK(a.at("position_ecef_m") == b.at("position_ecef_m"));
  CHECK(a.at("clock_bias_m") == b.at("clock_bias_m"));
  CHECK(a.at("ambiguities").empty());

  fo.mode = "sideways";
  CHECK_THROWS_AS(cmd_solve(fo, conv_out, log), ParseError);
}

TEST_CASE("coverage reduction and vacuous threshold") {
  CoverageOptions co;
  co.grid_deg = 10.0;
  co.duration = "0";
  co.out = scratch("cov.csv").string();
  std::ostringstream out, log;
  REQUIRE(cmd_coverage(co, out, log) == kExitOk);
  const json summary = json::parse(out.str());
  CHECK(summary.at("epochs") == 1);

  // Same as a direct footprint at that instant.
  const GridSpec grid{10.0, 10.0, {0.0, 1.0e6}};
  const auto fps = footprint(test_support::table1(), test_support::table1_epoch(), SolverConfig{}, grid);
  std::size_t n4 = 0, pass = 0;
  for (const auto& fp : fps) {
    n4 += fp.cells.size();
    for (const auto& c : fp.cells) pass += c.gate_pass;
  }
  CHECK(summary.at("all").at("overall").get<double>() == static_cast<double>(pass) / static_cast<double>(n4));
  std::istringstream csv(io::read_file(co.out));
  std::string line;
  std::size_t rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 1 + 2 * grid_points(grid, 0.0).size());

  co.duration = "12h";
  co.step_s = 4 * 3600.0;
  co.threshold = 1e12;
  co.out.clear();
  std::ostringstream out2;
  REQUIRE(cmd_coverage(co, out2, log) == kExitOk);
  const json s2 = json::parse(out2.str());
  CHECK(s2.at("epochs") == 4);
  for (const auto& e : s2.at("per_epoch")) CHECK(e.at("proportion") == 1.0);
  CHECK(s2.at("all").at("min") == 1.0);
}

TEST_CASE("compare with zero noise") {
  CompareOptions co;
  co.user_lla = "30,110,0";
  co.noise_sigma_m = 0.0;
  co.trials = 5;
  std::ostringstream out, log;
  REQUIRE(cmd_compare(co, out, log) == kExitOk);
  std::istringstream csv(out.str());
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  CHECK(header == "lat,lon,alt,rmse_fast_m,rmse_conv_m,ambiguity_success_rate");
  std::vector<double> v;
  std::stringstream cells(row);
  for (std::string f; std::getline(cells, f, ',');) v.push_back(std::stod(f));
  REQUIRE(v.size() == 6);
  CHECK(v[3] < 1e-6);
  CHECK(v[4] < 1e-6);
  CHECK(v[5] == 1.0);
}

TEST_CASE("paired comparison at gate-passing points") {
  const SolverConfig cfg;
  for (const GeodeticPoint& p : {GeodeticPoint{30.0, 110.0, 0.0}, GeodeticPoint{-40.0, 95.0, 5.0e5},
                                 GeodeticPoint{5.0, 140.0, 0.0}}) {
    REQUIRE(evaluate_cell(test_support::table1(), p, test_support::table1_epoch(), cfg).gate_pass);
    SimulationScenario base;
    base.user_truth = p;
    base.seed = 17;
    const auto pc = compare_point(test_support::table1(), base, test_support::table1_epoch(), 100, cfg);
    CHECK(pc.fast_converged == 100);
    CHECK(pc.success_rate() == 1.0);
    CHECK(std::abs(pc.rmse_fast_m - pc.rmse_conv_m) < 1e-6);
    CHECK(pc.max_fast_conv_diff_m < 1e-6);
  }
  CHECK(trial_seed(1, 2, 3) == trial_seed(1, 2, 3));
  CHECK(trial_seed(1, 2, 3) != trial_seed(1, 2, 4));
  CHECK(trial_seed(1, 2, 3) != trial_seed(1, 3, 3));
}

TEST_CASE("exit codes from the entry point") {
  CHECK(run_args({}) == kExitUsage);
  CHECK(run_args({"solve", "--meas", scratch("nope.jsonl").string()}) == kExitIoError);
  const fs::path bad = scratch("bad.jsonl");
  io::write_file_atomic(bad, "{broken\n");
  CHECK(run_args({"solve", "--meas", bad.string()}) == kExitParseError);
  CHECK(run_args({"simulate", "--user-lla", "95,0,0", "--out", scratch("x.jsonl").string()}) != kExitOk);
  CHECK(run_args({"simulate", "--user-lla", "30,110,0", "--seed", "3", "--out", scratch("ok.jsonl").string()}) == kExitOk);
  CHECK(run_args({"solve", "--meas", scratch("ok.jsonl").string(), "--threshold", "1"}) == kExitGateFailed);
  CHECK(run_args({"solve", "--meas", scratch("ok.jsonl").string()}) == kExitOk);
}
