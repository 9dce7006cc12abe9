#pragma once

// Result serialization: the CSV contract for BER curves, the JSON run
// manifest and the flat key-value config format.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcm/sim.hpp"

namespace hcm {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kCsvHeader = "power_dbm,ber,ci95,bits,errors";

// Shortest round-trip decimal representation, locale independent.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

inline std::string curve_to_csv(const BerCurve& curve) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const BerPoint& p : curve) {
    out += format_double(p.power_dbm);
    out += ',';
    out += format_double(p.ber);
    out += ',';
    out += format_double(p.ci95);
    out += ',';
    out += std::to_string(p.bits);
    out += ',';
    out += std::to_string(p.errors);
    out += '\n';
  }
  return out;
}

inline nlohmann::json spec_to_json(const SweepSpec& spec) {
  nlohmann::json j;
  j["scheme"] = scheme_name(spec.scheme);
  j["n"] = spec.n;
  j["m"] = spec.m;
  j["cp_len"] = spec.cp_len;
  j["taps"] = spec.taps;
  j["noise_dbm"] = spec.noise_dbm;
  j["power_dbm"] = spec.power_dbm;
  j["min_errors"] = spec.min_errors;
  j["max_bits"] = spec.max_bits;
  j["base_seed"] = spec.base_seed;
  j["p0"] = spec.p0;
  j["workers"] = spec.workers;
  j["data_rate_mbps"] = spec.data_rate_mbps;
  if (spec.interleaver) j["interleaver"] = spec.interleaver->perm;
  return j;
}

// FNV-1a over the canonical spec serialization.
inline std::string config_hash(const SweepSpec& spec) {
  const std::string s = spec_to_json(spec).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

inline nlohmann::json make_manifest(const SweepSpec& spec,
                                    const std::string& timestamp = "") {
  nlohmann::json j;
  j["tool_version"] = kToolVersion;
  j["spec"] = spec_to_json(spec);
  j["config_hash"] = config_hash(spec);
  if (!timestamp.empty()) j["timestamp"] = timestamp;
  return j;
}

// Flat key = value config with optional [section] grouping lines (sections
// are cosmetic; keys are global). '#' starts a comment.
inline std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  auto trim = [](std::string s) {
    const char* ws = " \t\r";
    s.erase(0, s.find_first_not_of(ws));
    auto last = s.find_last_not_of(ws);
    s.erase(last == std::string::npos ? 0 : last + 1);
    return s;
  };
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": unterminated section");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": empty key");
    kv[key] = value;
  }
  return kv;
}

inline std::map<std::string, std::string> parse_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_config(in);
}

// "start:stop:step" (inclusive, dBm) or a single value.
inline std::vector<double> parse_power_grid(const std::string& text) {
  std::vector<double> grid;
  auto c1 = text.find(':');
  if (c1 == std::string::npos) {
    grid.push_back(std::stod(text));
    return grid;
  }
  auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw std::invalid_argument("power grid must be start:stop:step");
  const double start = std::stod(text.substr(0, c1));
  const double stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  const double step = std::stod(text.substr(c2 + 1));
  if (step <= 0.0 || stop < start)
    throw std::invalid_argument("power grid must be ascending with step > 0");
  for (double p = start; p <= stop + 1e-9; p += step) grid.push_back(p);
  return grid;
}

inline std::vector<double> parse_taps(const std::string& text) {
  std::vector<double> taps;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) taps.push_back(std::stod(item));
  if (taps.empty()) throw std::invalid_argument("empty tap list");
  return taps;
}

}  // namespace hcm
