#include <doctest.h>

#include <string>

#include "rigidlab/errors.hpp"
#include "rigidlab/experiment.hpp"
#include "rigidlab/manifest.hpp"

using namespace rigidlab;

namespace {

const char* kMinimal = R"([system]
kind = adic
radices = 2
depth = 10

[analysis j]
type = joining
depth = 1
k = 2
)";

std::string error_of(const std::string& text) {
  try {
    parse_manifest(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("manifest") {
  TEST_CASE("minimal manifest parses") {
    const auto m = parse_manifest(kMinimal);
    CHECK(m.system.depth == 10);
    REQUIRE(m.analyses.size() == 1);
    CHECK(m.analyses[0].type == "joining");
    CHECK(m.analyses[0].get("k", "") == "2");
    CHECK_FALSE(m.extension);
  }

  TEST_CASE("negative depth names the line") {
    std::string text = kMinimal;
    text.replace(text.find("depth = 10"), 10, "depth = -3");
    const auto msg = error_of(text);
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("depth must be non-negative, got -3") != std::string::npos);
  }

  TEST_CASE("every error is reported") {
    const auto msg = error_of(R"([system]
kind = adic
radices = 2,x
depth = 8
[analysis a]
type = nonsense
[analysis b]
type = joining
colour = blue
)");
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("line 6") != std::string::npos);
    CHECK(msg.find("line 9") != std::string::npos);
  }

  TEST_CASE("index lists") {
    CHECK(parse_index_list("1..3, 7") == std::vector<std::uint64_t>{1, 2, 3, 7});
    CHECK(parse_index_list("5,2,5") == std::vector<std::uint64_t>{2, 5});
    CHECK_THROWS(parse_index_list("3..1"));
  }

  TEST_CASE("demo manifest runs and is deterministic") {
    const auto m = parse_manifest(demo_manifest());
    REQUIRE(m.extension);
    CHECK(m.extension->cocycle == "RUDIN_SHAPIRO");
    const auto a = run_experiment(m, {1, OracleMode::Sample});
    const auto b = run_experiment(m, {2, OracleMode::Sample});
    CHECK(a.exit_code() == 0);
    REQUIRE(a.results.size() == b.results.size());
    for (std::size_t i = 0; i < a.results.size(); ++i) {
      CHECK(a.results[i].verdict == b.results[i].verdict);
      REQUIRE(a.results[i].csv.size() == b.results[i].csv.size());
      for (std::size_t j = 0; j < a.results[i].csv.size(); ++j) CHECK(a.results[i].csv[j].body == b.results[i].csv[j].body);
    }
    CHECK(a.render("T1").substr(a.render("T1").find('\n')) == a.render("T2").substr(a.render("T2").find('\n')));
  }

  TEST_CASE("exit codes") {
    Report r;
    CHECK(r.exit_code() == 0);
    r.results.push_back({});
    r.results.back().aborted = true;
    CHECK(r.exit_code() == 4);
    r.results.push_back({});
    r.results.back().verdict = Verdict::Fail;
    CHECK(r.exit_code() == 2);
    r.results.push_back({});
    r.results.back().config_error = true;
    CHECK(r.exit_code() == 3);
  }

  TEST_CASE("resource aborts are confined to one analysis") {
    const auto m = parse_manifest(R"([system]
radices = 2
depth = 14
[analysis big]
type = joining
depth = 12
k = 1
[analysis small]
type = joining
depth = 1
k = 1
)");
    const auto r = run_experiment(m, {1, OracleMode::Off});
    REQUIRE(r.results.size() == 2);
    CHECK(r.results[0].aborted);
    CHECK_FALSE(r.results[1].aborted);
    CHECK(r.exit_code() == 4);
  }
}
