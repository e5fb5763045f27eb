#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kinetic/config.hpp"

using namespace kinetic;

TEST_SUITE_BEGIN("cli");

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("empty config is valid for validate with a defaulted seed") {
  ParseResult r = parse_config("", "validate");
  CHECK(r.ok());
  CHECK(r.config.seed() == 0);
  CHECK_FALSE(r.config.seed_given);
  CHECK(r.config.out_prefix() == "validate");
}

TEST_CASE("hybrid config with missing keys is flagged, not guessed") {
  ParseResult r = parse_config("delta=0.01\ngamma=1.0\nsteps=1000\n", "hybrid");
  CHECK_FALSE(r.ok());
  bool missing_m = false, missing_box = false, missing_r = false;
  for (const auto& issue : r.errors) {
    missing_m |= issue.message.find("M") != std::string::npos;
    missing_box |= issue.message.find(": a") != std::string::npos;
    missing_r |= issue.message.find(": R") != std::string::npos;
  }
  CHECK(missing_m);
  CHECK(missing_box);
  CHECK(missing_r);
}

TEST_CASE("type mismatches carry line numbers and all errors are collected") {
  ParseResult r = parse_config(
      "delta=abc\n# comment line\nsteps=10\nbogus_key=3\ngamma=!\n", "hybrid");
  CHECK_FALSE(r.ok());
  bool line1 = false, line4 = false, line5 = false;
  for (const auto& issue : r.errors) {
    if (issue.line == 1)
      line1 = issue.message.find("delta") != std::string::npos;
    if (issue.line == 4)
      line4 = issue.message.find("bogus_key") != std::string::npos;
    if (issue.line == 5)
      line5 = issue.message.find("gamma") != std::string::npos;
  }
  CHECK(line1);
  CHECK(line4);
  CHECK(line5);
  CHECK(r.errors.size() >= 3);
}

TEST_CASE("list values parse and duplicates are caught") {
  ParseResult r = parse_config(
      "potential=abs\na=-2\nb=2\neps=0.5,0.35,0.25\nseed=9\n", "escape");
  CHECK(r.ok());
  CHECK(r.config.get_list("eps").size() == 3);
  CHECK(r.config.get_list("eps")[1] == doctest::Approx(0.35));
  CHECK(r.config.seed_given);

  ParseResult dup =
      parse_config("potential=abs\npotential=zero\na=-2\nb=2\neps=1\n",
                   "escape");
  CHECK_FALSE(dup.ok());
}

TEST_CASE("unknown subcommand is an error") {
  ParseResult r = parse_config("", "frobnicate");
  CHECK_FALSE(r.ok());
}

TEST_CASE("17-digit formatting round-trips doubles") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -7.2e-31, 403.4287934927351}) {
    CHECK(std::stod(format_dbl(v)) == v);
  }
}

TEST_CASE("config hash is stable and order-insensitive") {
  ParseResult a = parse_config("a=-2\nb=2\npotential=abs\neps=1\n", "escape");
  ParseResult b = parse_config("potential=abs\neps=1\nb=2\na=-2\n", "escape");
  CHECK(a.config.config_hash() == b.config.config_hash());
  ParseResult c = parse_config("potential=abs\neps=1\nb=3\na=-2\n", "escape");
  CHECK(a.config.config_hash() != c.config.config_hash());
}

TEST_CASE("atomic writes leave no temp file behind") {
  const std::string path = "cli_atomic_test.csv";
  write_file_atomic(path, "x,y\n1,2\n");
  CHECK(slurp(path) == "x,y\n1,2\n");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::remove(path.c_str());
}

TEST_CASE("escape run emits one csv row per temperature, deterministically") {
  ParseResult r = parse_config(
      "potential=doublewell:1,1,2\na=-2\nb=2\nalpha=0\nbeta=0\n"
      "eps=0.6,0.5,0.45,0.4\nsamples=200\nseed=4\nout_prefix=cli_escape_test\n"
      "threads=2\n",
      "escape");
  REQUIRE(r.ok());
  CHECK(run(r.config) == 0);
  std::string first = slurp("cli_escape_test.csv");
  std::istringstream lines(first);
  std::string line;
  int rows = 0;
  bool header_seen = false;
  while (std::getline(lines, line)) {
    if (line.rfind("#", 0) == 0) continue;
    if (line.rfind("eps,", 0) == 0) {
      header_seen = true;
      CHECK(line == "eps,mean_tau,predicted_tau,p_left,predicted_p_left,ks_exp");
      continue;
    }
    if (!line.empty()) ++rows;
  }
  CHECK(header_seen);
  CHECK(rows == 4);

  // bit-identical re-run, independent of the thread count
  ParseResult r1 = parse_config(
      "potential=doublewell:1,1,2\na=-2\nb=2\nalpha=0\nbeta=0\n"
      "eps=0.6,0.5,0.45,0.4\nsamples=200\nseed=4\nout_prefix=cli_escape_test\n"
      "threads=1\n",
      "escape");
  REQUIRE(r1.ok());
  CHECK(run(r1.config) == 0);
  std::string second = slurp("cli_escape_test.csv");
  // the banner embeds the config hash, which differs via the threads key;
  // numeric payload must match exactly
  CHECK(first.substr(first.find("eps,")) == second.substr(second.find("eps,")));
  std::remove("cli_escape_test.csv");
}

TEST_CASE("validate-invariance run passes on a torus potential") {
  ParseResult r = parse_config(
      "dim=1\npotential=abs:0.5\ntorus=16\nseed=1\n", "validate-invariance");
  REQUIRE(r.ok());
  CHECK(run(r.config) == 0);
}

TEST_CASE("built-in oracle suite passes and writes its report") {
  ParseResult r = parse_config("seed=2\nout_prefix=cli_validate_test\n",
                               "validate");
  REQUIRE(r.ok());
  CHECK(run(r.config) == 0);
  CHECK(std::filesystem::exists("cli_validate_test_validate.json"));
  std::string report = slurp("cli_validate_test_validate.json");
  CHECK(report.find("\"failures\": 0") != std::string::npos);
  std::remove("cli_validate_test_validate.json");
}

TEST_SUITE_END();
