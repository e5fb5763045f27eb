#include "kinetic/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "kinetic/parallel.hpp"

namespace kinetic {

namespace {

Schema with_common(Schema s) {
  s["seed"] = {KeyType::Int, false, "0"};
  s["out_prefix"] = {KeyType::String, false, ""};
  s["threads"] = {KeyType::Int, false, "0"};
  return s;
}

std::map<std::string, Schema> build_schemas() {
  std::map<std::string, Schema> all;
  all["validate"] = with_common({});
  all["escape"] = with_common({
      {"potential", {KeyType::String, true, ""}},
      {"a", {KeyType::Int, true, ""}},
      {"b", {KeyType::Int, true, ""}},
      {"alpha", {KeyType::Int, false, "0"}},
      {"beta", {KeyType::Int, false, "0"}},
      {"eps", {KeyType::List, true, ""}},
      {"samples", {KeyType::Int, false, "10000"}},
  });
  all["zzd"] = with_common({
      {"dim", {KeyType::Int, false, "1"}},
      {"potential", {KeyType::String, true, ""}},
      {"torus", {KeyType::Int, false, "0"}},
      {"steps", {KeyType::Int, false, "1000"}},
      {"chains", {KeyType::Int, false, "1"}},
      {"factorized", {KeyType::Int, false, "0"}},
      {"order", {KeyType::String, false, "id"}},
      {"thin", {KeyType::String, false, "none"}},
  });
  all["validate-invariance"] = with_common({
      {"dim", {KeyType::Int, false, "1"}},
      {"potential", {KeyType::String, true, ""}},
      {"torus", {KeyType::Int, true, ""}},
      {"factorized", {KeyType::Int, false, "0"}},
  });
  all["scaling"] = with_common({
      {"H", {KeyType::String, true, ""}},
      {"eps", {KeyType::List, true, ""}},
      {"t", {KeyType::Real, true, ""}},
      {"samples", {KeyType::Int, false, "10000"}},
  });
  all["hybrid"] = with_common({
      {"M", {KeyType::Int, true, ""}},
      {"a", {KeyType::Real, true, ""}},
      {"r", {KeyType::Real, false, "1"}},
      {"U0", {KeyType::Real, false, "1"}},
      {"R", {KeyType::Real, true, ""}},
      {"delta", {KeyType::Real, true, ""}},
      {"gamma", {KeyType::Real, false, "0"}},
      {"lambda", {KeyType::Real, false, "0"}},
      {"steps", {KeyType::Int, true, ""}},
      {"split", {KeyType::String, false, "pairwise"}},
      {"ou_mode", {KeyType::String, false, "exact"}},
      {"xyz_in", {KeyType::String, false, ""}},
      {"block", {KeyType::Int, false, "0"}},
      {"traj_stride", {KeyType::Int, false, "0"}},
      {"use_verlet", {KeyType::Int, false, "0"}},
      {"naive_segment", {KeyType::Int, false, "0"}},
  });
  return all;
}

const std::map<std::string, Schema>& schemas() {
  static const std::map<std::string, Schema> all = build_schemas();
  return all;
}

bool parse_int_checked(const std::string& s, std::int64_t& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtoll(s.c_str(), &end, 10);
  return end != s.c_str() && *end == '\0';
}

bool parse_real_checked(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end != s.c_str() && *end == '\0';
}

bool parse_list_checked(const std::string& s, std::vector<double>& out) {
  out.clear();
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string tok = s.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    double v;
    if (!parse_real_checked(tok, v)) return false;
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return !out.empty();
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

const Schema& schema_for(const std::string& subcommand) {
  auto it = schemas().find(subcommand);
  if (it == schemas().end())
    throw ConfigError("unknown subcommand: " + subcommand);
  return it->second;
}

std::vector<std::string> known_subcommands() {
  std::vector<std::string> out;
  for (const auto& [name, schema] : schemas()) out.push_back(name);
  return out;
}

bool RunConfig::has(const std::string& key) const {
  auto it = values.find(key);
  return it != values.end() && !it->second.empty();
}

std::int64_t RunConfig::get_int(const std::string& key) const {
  std::int64_t v = 0;
  auto it = values.find(key);
  if (it == values.end() || !parse_int_checked(it->second, v))
    throw ConfigError("missing or non-integer key: " + key);
  return v;
}

double RunConfig::get_real(const std::string& key) const {
  double v = 0;
  auto it = values.find(key);
  if (it == values.end() || !parse_real_checked(it->second, v))
    throw ConfigError("missing or non-numeric key: " + key);
  return v;
}

std::string RunConfig::get_string(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw ConfigError("missing key: " + key);
  return it->second;
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
  std::vector<double> v;
  auto it = values.find(key);
  if (it == values.end() || !parse_list_checked(it->second, v))
    throw ConfigError("missing or malformed list key: " + key);
  return v;
}

std::uint64_t RunConfig::seed() const {
  return static_cast<std::uint64_t>(get_int("seed"));
}

std::string RunConfig::out_prefix() const {
  std::string p = has("out_prefix") ? get_string("out_prefix") : "";
  return p.empty() ? subcommand : p;
}

int RunConfig::threads() const {
  return resolve_threads(static_cast<int>(get_int("threads")));
}

std::string RunConfig::config_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  mix(subcommand);
  for (const auto& [k, v] : values) {  // std::map iterates sorted
    // execution details do not identify the experiment
    if (k == "threads" || k == "out_prefix") continue;
    mix(k);
    mix("=");
    mix(v);
    mix("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

ParseResult parse_config(const std::string& text,
                         const std::string& subcommand) {
  ParseResult out;
  out.config.subcommand = subcommand;
  const Schema* schema = nullptr;
  try {
    schema = &schema_for(subcommand);
  } catch (const ConfigError& e) {
    out.errors.push_back({0, e.what()});
    return out;
  }

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line = text.substr(
        pos, nl == std::string::npos ? std::string::npos : nl - pos);
    ++line_no;
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;

    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      out.errors.push_back({line_no, "expected key=value"});
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    auto spec = schema->find(key);
    if (spec == schema->end()) {
      out.errors.push_back({line_no, "unknown key: " + key});
      continue;
    }
    bool ok = true;
    std::int64_t iv;
    double rv;
    std::vector<double> lv;
    switch (spec->second.type) {
      case KeyType::Int:
        ok = parse_int_checked(value, iv);
        break;
      case KeyType::Real:
        ok = parse_real_checked(value, rv);
        break;
      case KeyType::List:
        ok = parse_list_checked(value, lv);
        break;
      case KeyType::String:
        ok = !value.empty();
        break;
    }
    if (!ok) {
      out.errors.push_back(
          {line_no, "type mismatch for key '" + key + "': " + value});
      continue;
    }
    if (out.config.values.count(key))
      out.errors.push_back({line_no, "duplicate key: " + key});
    out.config.values[key] = value;
    if (key == "seed") out.config.seed_given = true;
  }

  for (const auto& [key, spec] : *schema) {
    if (out.config.values.count(key)) continue;
    if (spec.required) {
      out.errors.push_back({0, "missing required key: " + key});
    } else if (!spec.default_value.empty() || spec.type != KeyType::String) {
      out.config.values[key] = spec.default_value;
    }
  }
  return out;
}

std::string format_dbl(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open for writing: " + tmp.string());
    out << content;
    if (!out.good()) throw ConfigError("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace kinetic
