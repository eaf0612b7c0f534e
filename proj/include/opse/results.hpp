#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

namespace opse {

// Serializable record of one experiment run. The payload is the
// reproducible part: rerunning with the same config and seed must
// reproduce it byte-identically in exact mode. The timestamp lives in the
// envelope, outside the payload.
struct ExperimentResult {
  int schema_version = 1;
  std::string command;
  std::map<std::string, std::string> config;  // resolved key=value echo
  std::uint64_t seed = 0;
  std::string version;
  std::string timestamp;  // ISO 8601 UTC
  nlohmann::json payload;

  std::string to_json() const;
  static ExperimentResult from_json(const std::string& text);
};

std::string iso8601_utc_now();

// Flat key=value config-file format: one pair per line, '#' comments,
// blank lines ignored.
std::map<std::string, std::string> parse_config_file(const std::string& text);

// Writes atomically enough for our purposes; throws std::runtime_error on
// I/O failure.
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Locale-independent float formatting used by every CSV/JSON writer.
std::string format_double(double x);

}  // namespace opse
