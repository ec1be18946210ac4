#include "bdsfix/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "bdsfix/constants.hpp"
#include "bdsfix/error.hpp"

namespace bdsfix::io {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string& field, const char* name, int line_no) {
  double value = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line_no) + ": bad " + name + " '" + field + "'");
  }
  return value;
}

std::string fmt_double(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::vector<std::pair<int, std::string>> lines_of(const std::string& text) {
  std::vector<std::pair<int, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!trim(line).empty()) out.emplace_back(n, line);
  }
  return out;
}

}  // namespace

Catalog parse_elements(const std::string& text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError("elements file is empty");
  const auto header = split_csv(lines.front().second);
  if (header != split_csv(kElementsHeader)) {
    throw ParseError("line " + std::to_string(lines.front().first) + ": unexpected elements header");
  }

  std::vector<SatelliteRecord> records;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [line_no, line] = lines[i];
    const auto f = split_csv(line);
    if (f.size() != 9) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 9 columns, got " +
                       std::to_string(f.size()));
    }
    SatelliteRecord r;
    r.id = f[0];
    if (r.id.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty sat_id");
    try {
      r.sat_class = sat_class_from_string(f[1]);
      if (auto implied = sat_class_from_id(r.id); implied && *implied != r.sat_class) {
        throw ParseError("class " + f[1] + " contradicts id " + r.id);
      }
      r.elements.semi_major_axis_m = parse_number(f[2], "semi_major_axis_m", line_no);
      r.elements.eccentricity = parse_number(f[3], "eccentricity", line_no);
      r.elements.inclination_deg = parse_number(f[4], "inclination_deg", line_no);
      r.elements.raan_deg = parse_number(f[5], "raan_deg", line_no);
      r.elements.arg_perigee_deg = parse_number(f[6], "arg_perigee_deg", line_no);
      r.elements.true_anomaly_deg = parse_number(f[7], "true_anomaly_deg", line_no);
      r.elements.epoch = parse_utc(f[8]);
      validate(r.elements);
    } catch (const ParseError& e) {
      const std::string what = e.what();
      if (what.rfind("line ", 0) == 0) throw;
      throw ParseError("line " + std::to_string(line_no) + ": " + what);
    } catch (const DomainError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
    records.push_back(std::move(r));
  }
  if (records.empty()) throw ParseError("elements file has no satellites");
  try {
    return Catalog(std::move(records));
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
}

Catalog read_elements(const fs::path& path) {
  try {
    return parse_elements(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_elements(const Catalog& cat) {
  std::string out = std::string(kElementsHeader) + "\n";
  for (const auto& r : cat.records()) {
    const auto& e = r.elements;
    out += r.id + "," + std::string(to_string(r.sat_class)) + "," + fmt_double(e.semi_major_axis_m) + "," +
           fmt_double(e.eccentricity) + "," + fmt_double(e.inclination_deg) + "," + fmt_double(e.raan_deg) +
           "," + fmt_double(e.arg_perigee_deg) + "," + fmt_double(e.true_anomaly_deg) + "," +
           format_utc(e.epoch) + "\n";
  }
  return out;
}

void write_elements(const Catalog& cat, const fs::path& path) {
  write_file_atomic(path, format_elements(cat));
}

std::vector<MeasurementSet> parse_measurements(const std::string& text) {
  std::map<UtcTime, MeasurementSet> by_epoch;
  for (const auto& [line_no, line] : lines_of(text)) {
    const std::string where = "line " + std::to_string(line_no) + ": ";
    try {
      const json j = json::parse(line);
      const UtcTime epoch = parse_utc(j.at("epoch").get<std::string>());
      const std::string sat = j.at("sat").get<std::string>();
      const std::string kind = j.at("kind").get<std::string>();
      const double value = j.at("value_m").get<double>();
      Measurement m;
      if (kind == "full") {
        if (j.contains("modulus_ms")) throw ParseError("full measurement must not carry modulus_ms");
        m = Measurement::full(sat, epoch, value);
      } else if (kind == "fractional") {
        m = Measurement::fractional(sat, epoch, period_from_ms(j.at("modulus_ms").get<int>()), value);
      } else {
        throw ParseError("unknown kind '" + kind + "'");
      }
      by_epoch.try_emplace(epoch, epoch).first->second.add(std::move(m));
    } catch (const json::exception& e) {
      throw ParseError(where + e.what());
    } catch (const Error& e) {
      throw ParseError(where + e.what());
    }
  }
  std::vector<MeasurementSet> out;
  for (auto& [_, set] : by_epoch) out.push_back(std::move(set));
  return out;
}

std::vector<MeasurementSet> read_measurements(const fs::path& path) {
  try {
    return parse_measurements(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string format_measurements(const std::vector<MeasurementSet>& sets) {
  std::string out;
  for (const auto& set : sets) {
    for (const auto& m : set.measurements()) {
      json j;
      j["epoch"] = format_utc(m.epoch);
      j["sat"] = m.sat_id;
      j["kind"] = m.is_full() ? "full" : "fractional";
      if (m.is_fractional()) j["modulus_ms"] = period_ms(*m.period);
      j["value_m"] = m.value_m;
      out += j.dump() + "\n";
    }
  }
  return out;
}

void write_measurements(const std::vector<MeasurementSet>& sets, const fs::path& path) {
  write_file_atomic(path, format_measurements(sets));
}

json result_to_json(const SolveResult& res) {
  json j;
  j["status"] = std::string(to_string(res.status));
  if (res.status == SolveStatus::InsufficientMeasurements) {
    j["message"] = res.message;
    return j;
  }
  j["gdop_geo"] = std::isfinite(res.gdop_geo) ? json(res.gdop_geo) : json(nullptr);
  j["iterations"] = res.iterations;
  if (res.status != SolveStatus::Converged) {
    j["message"] = res.message;
    return j;
  }
  const EcefVector& p = res.state.position;
  j["position_ecef_m"] = {p.x(), p.y(), p.z()};
  const GeodeticPoint g = ecef_to_geodetic(p);
  j["position_lla"] = {{"lat_deg", g.latitude_deg}, {"lon_deg", g.longitude_deg}, {"alt_m", g.altitude_m}};
  j["clock_bias_m"] = res.state.clock_bias_m;
  j["clock_bias_s"] = res.state.clock_bias_m / constants::kSpeedOfLight;
  json ambs = json::array();
  for (std::size_t k = 0; k < res.ambiguity_sats.size(); ++k) {
    json a{{"sat", res.ambiguity_sats[k]}, {"N", res.fixed_ambiguities.at(k)}};
    if (k < res.recovered_full_pseudoranges.size()) a["full_pseudorange_m"] = res.recovered_full_pseudoranges[k];
    ambs.push_back(std::move(a));
  }
  j["ambiguities"] = std::move(ambs);
  return j;
}

void write_json(const json& doc, const fs::path& path) { write_file_atomic(path, doc.dump(2) + "\n"); }

void write_result(const SolveResult& res, const fs::path& path) { write_json(result_to_json(res), path); }

std::string format_coverage(std::vector<CoverageRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const CoverageRow& a, const CoverageRow& b) {
    const auto& p = a.cell.point;
    const auto& q = b.cell.point;
    return std::tie(a.epoch, p.latitude_deg, p.longitude_deg, p.altitude_m) <
           std::tie(b.epoch, q.latitude_deg, q.longitude_deg, q.altitude_m);
  });
  std::string out = std::string(kCoverageHeader) + "\n";
  out.reserve(out.size() + rows.size() * 64);
  for (const auto& r : rows) {
    const auto& c = r.cell;
    out += format_utc(r.epoch);
    out += ',' + fmt_double(c.point.latitude_deg, 10);
    out += ',' + fmt_double(c.point.longitude_deg, 10);
    out += ',' + fmt_double(c.point.altitude_m, 10);
    out += ',' + std::to_string(c.n_geo_visible);
    out += ',';
    if (c.gdop_geo) out += fmt_double(*c.gdop_geo, 10);
    out += c.gate_pass ? ",1\n" : ",0\n";
  }
  return out;
}

void write_coverage(std::vector<CoverageRow> rows, const fs::path& path) {
  write_file_atomic(path, format_coverage(std::move(rows)));
}

}  // namespace bdsfix::io
