#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kinetic/errors.hpp"

namespace kinetic {

// Flat key=value run configuration (one pair per line, '#' comments).
// Parsing is schema-driven per subcommand and collects every error rather
// than stopping at the first.

enum class KeyType { Int, Real, String, List };

struct KeySpec {
  KeyType type = KeyType::String;
  bool required = false;
  std::string default_value;  // empty = no default
};

using Schema = std::map<std::string, KeySpec>;
const Schema& schema_for(const std::string& subcommand);
std::vector<std::string> known_subcommands();

struct ConfigIssue {
  int line = 0;  // 0 when not tied to a line (e.g. missing key)
  std::string message;
};

struct RunConfig {
  std::string subcommand;
  std::map<std::string, std::string> values;
  bool seed_given = false;

  bool has(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  double get_real(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;

  std::uint64_t seed() const;
  std::string out_prefix() const;
  int threads() const;
  // FNV-1a hash of the canonical sorted key=value text.
  std::string config_hash() const;
};

struct ParseResult {
  RunConfig config;
  std::vector<ConfigIssue> errors;
  bool ok() const { return errors.empty(); }
};

ParseResult parse_config(const std::string& text,
                         const std::string& subcommand);

// 17 significant digits; round-trips doubles exactly.
std::string format_dbl(double v);

// Write-to-temp-then-rename; an interrupted run leaves no partial file.
void write_file_atomic(const std::string& path, const std::string& content);

// Dispatch to the owning module; writes artifacts next to out_prefix.
// Returns 0 on success, 1 on oracle/assertion failure, 2 on config error.
int run(const RunConfig& cfg);

// The built-in oracle suite behind the `validate` subcommand.  Prints one
// line per check, writes <prefix>_validate.json, returns the failure count.
int run_validation_suite(const std::string& out_prefix, std::uint64_t seed);

}  // namespace kinetic
