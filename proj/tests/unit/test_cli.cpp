#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cartan/cli.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace cartan;
using Json = nlohmann::json;

namespace {

const std::filesystem::path kFixtures(CARTAN_FIXTURES);

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::vector<const char*> argv{"cartan-dual"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return (kFixtures / name).string(); }

std::filesystem::path scratch() {
  const auto dir = std::filesystem::temp_directory_path() / "cartan-dual-cli-tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("split report") {
  const Result r = run({"split", "--matrix", fixture("m.json")});
  REQUIRE(r.code == cli::kOk);
  const Json report = Json::parse(r.out);
  CHECK(report["tool"] == "cartan-dual");
  CHECK(report["version"] == cli::kVersion);
  CHECK(report["config"]["command"] == "split");
  CHECK(report["results"]["kPart"] == Json::parse("[[0.0,-0.5],[0.5,0.0]]"));
  CHECK(report["results"]["pPart"] == Json::parse("[[1.0,2.5],[2.5,4.0]]"));
}

TEST_CASE("dual-check on the fixture passes") {
  const Result r = run({"dual-check", "--k", fixture("k.json"), "--p", fixture("p.json"), "--tol", "1e-8"});
  REQUIRE(r.code == cli::kOk);
  const Json report = Json::parse(r.out);
  CHECK(report["results"]["dualityDefect"].get<double>() < 1e-8);
  CHECK(report["results"]["pass"] == true);
}

TEST_CASE("duality on the Gaussian e-connection passes at 4096 steps") {
  const Result r = run({"duality", "--family", "gaussian1d", "--alpha", "1", "--steps", "4096", "--loop",
                        fixture("loop.json")});
  REQUIRE(r.code == cli::kOk);
  const Json report = Json::parse(r.out);
  CHECK(std::abs(report["results"]["pairingDefect"].get<double>()) < 1e-6);
}

TEST_CASE("exit codes") {
  Result r = run({"--config", fixture("malformed.json")});
  CHECK(r.code == cli::kInputError);
  CHECK(r.err.find("line 3") != std::string::npos);
  r = run({"--config", fixture("unknown_field.json")});
  CHECK(r.code == cli::kInputError);
  CHECK(r.err.find("stpes") != std::string::npos);
  r = run({"--config", fixture("wrong_type.json")});
  CHECK(r.code == cli::kInputError);
  CHECK(r.err.find("alpha") != std::string::npos);
  r = run({"--config", fixture("above_tolerance.json")});
  CHECK(r.code == cli::kNumericFailure);
  CHECK(Json::parse(r.out)["results"]["pass"] == false);
  r = run({"split"});
  CHECK(r.code == cli::kInputError);
  r = run({"split", "--matrix", fixture("does_not_exist.json")});
  CHECK(r.code == cli::kInputError);
  r = run({"split", "--bogus"});
  CHECK(r.code == cli::kInputError);
  r = run({"holonomy", "--family", "poisson"});
  CHECK(r.code == cli::kInputError);
  r = run({"transport", "--family", "gaussian1d", "--curve", fixture("curve.json"), "--steps", "0"});
  CHECK(r.code == cli::kInputError);
  r = run({"--version"});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find(cli::kVersion) != std::string::npos);
}

TEST_CASE("module errors are reported verbatim") {
  const auto path = scratch() / "singular.json";
  std::ofstream(path) << "[[1, 2], [2, 4]]";
  const Result r = run({"polar", "--matrix", path.string()});
  CHECK(r.code == cli::kInputError);
  CHECK(r.err.rfind("error: singularity error: ", 0) == 0);
}

TEST_CASE("unwritable output path") {
  const Result r = run({"split", "--matrix", fixture("m.json"), "--out", "/nonexistent-dir/report.json"});
  CHECK(r.code == cli::kInputError);
}

TEST_CASE("flags override config fields") {
  const Result r = run({"--config", fixture("duality.json"), "--steps", "64", "--tol", "1"});
  REQUIRE(r.code == cli::kOk);
  const Json report = Json::parse(r.out);
  CHECK(report["config"]["steps"] == 64);
  CHECK(report["config"]["tol"] == 1.0);
  CHECK(report["config"]["alpha"] == 1.0);
}

TEST_CASE("reports are byte-deterministic and self-describing") {
  for (const char* name : {"polar.json", "transport.json", "holonomy.json", "stat_report.json"}) {
    for (const char* format : {"json", "csv"}) {
      const Result a = run({"--config", fixture(name), "--format", format});
      const Result b = run({"--config", fixture(name), "--format", format});
      CHECK(a.code == cli::kOk);
      CHECK(a.out == b.out);
    }
    const Result a = run({"--config", fixture(name)});
    const auto embedded = scratch() / "embedded.json";
    std::ofstream(embedded) << Json::parse(a.out)["config"].dump();
    CHECK(run({"--config", embedded.string()}).out == a.out);
  }
}

TEST_CASE("holonomy sampling does not depend on the thread count") {
  ::setenv("CARTAN_DUAL_THREADS", "1", 1);
  const Result one = run({"--config", fixture("holonomy.json")});
  ::setenv("CARTAN_DUAL_THREADS", "3", 1);
  const Result three = run({"--config", fixture("holonomy.json")});
  ::setenv("CARTAN_DUAL_THREADS", "many", 1);
  const Result bad = run({"--config", fixture("holonomy.json")});
  ::unsetenv("CARTAN_DUAL_THREADS");
  CHECK(one.code == cli::kOk);
  CHECK(one.out == three.out);
  CHECK(bad.code == cli::kInputError);
}

TEST_CASE("holonomy sample dump is JSON lines") {
  const auto path = scratch() / "samples.jsonl";
  const Result r = run({"--config", fixture("holonomy.json"), "--samples-out", path.string()});
  REQUIRE(r.code == cli::kOk);
  std::ifstream in(path);
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    const Json s = Json::parse(line);
    CHECK(s.contains("spec"));
    CHECK(s.contains("element"));
    CHECK(s.contains("log"));
    ++count;
  }
  CHECK(count == 20);
  const Json report = Json::parse(r.out);
  CHECK(report["results"]["estimate"]["inSO"] == true);
}

TEST_CASE("csv layout") {
  CHECK(cli::results_csv(Json::object()) == "key,value\n");
  CHECK(cli::results_csv(Json{{"defect", 0.125}}) == "key,value\ndefect,0.125\n");
  CHECK(cli::results_csv(Json{{"defect", 0.1}}) == "key,value\ndefect,0.1\n");
  CHECK(cli::results_csv(Json{{"note", "a,b"}}) == "key,value\nnote,\"a,b\"\n");
  const std::string csv = cli::emit_report(Json{{"config", {{"command", "split"}}}, {"results", Json::object()}},
                                           cli::Format::csv);
  CHECK(csv.substr(csv.find("key,value")) == "key,value\n");
  const Result r = run({"split", "--matrix", fixture("m.json"), "--format", "csv"});
  REQUIRE(r.code == cli::kOk);
  CHECK(r.out.find("kPart[0][1],-0.5\n") != std::string::npos);
}

TEST_CASE("stat-report covers every family") {
  const Result r = run({"--config", fixture("stat_report_bernoulli.json")});
  REQUIRE(r.code == cli::kOk);
  const Json report = Json::parse(r.out);
  CHECK(report["results"]["points"].size() == 5);
  const Json& first = report["results"]["points"][0];
  const double p = first["point"][0].get<double>();
  CHECK(first["fisher"][0][0].get<double>() == doctest::Approx(1.0 / (p * (1.0 - p))).epsilon(1e-12));
}

TEST_CASE("transport accepts a grid-sampled form file") {
  const auto path = scratch() / "grid.json";
  Json grid = {{"baseDim", 2},
               {"fiberDim", 2},
               {"domain", {{"lower", {-1.0, 0.5}}, {"upper", {1.0, 2.0}}}},
               {"shape", {2, 2}},
               {"nodes", Json::array()}};
  const Json zero = Json::parse("[[[0, 0], [0, 0]], [[0, 0], [0, 0]]]");
  for (int k = 0; k < 4; ++k) grid["nodes"].push_back(zero);
  std::ofstream(path) << grid.dump();
  const Result r = run({"transport", "--form", path.string(), "--curve", fixture("curve.json"), "--vector",
                        fixture("vector.json")});
  REQUIRE(r.code == cli::kOk);
  CHECK(Json::parse(r.out)["results"]["transported"] == Json::parse("[1.0, 0.0]"));
}
