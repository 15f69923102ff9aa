#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "vfield/varmin.hpp"
#include "vfield/volume.hpp"

using namespace vfield;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream l(line);
    std::string cell;
    while (std::getline(l, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("vfield_cli_" + name);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

}  // namespace

TEST_CASE("volume of a loxodromic field") {
  const Result r = run({"volume", "--loxodromic", "0.7853981634"});
  REQUIRE(r.code == cli::kOk);
  const json j = json::parse(r.out);
  CHECK(j["tool"] == "vfield-lab");
  CHECK(j["version"] == cli::kToolVersion);
  CHECK(j["config"]["field"]["theta0"] == 0.7853981634);
  CHECK(std::abs(j["volume"]["value"].get<double>() - kS3Volume) < 1e-6 * kS3Volume);
  CHECK(j["bound"]["s2"].get<double>() == 2 * kPi * kPi);
  CHECK(j["bound"]["s3"].get<double>() == 4 * kPi * kPi);
  CHECK(j["indices"]["north"] == 1);
  CHECK(j["indices"]["south"] == 1);
  CHECK(j["sharpness"]["sup_i"].get<double>() < 1e-10);
  CHECK(j["sharpness"]["sup_ii"].get<double>() < 1e-10);
  CHECK(j["hemispheres"]["anchor"] == "hemisphere integral, = pi^2");
}

TEST_CASE("output is deterministic") {
  const std::vector<std::string> args{"volume", "--test-field", "k=0,a=0.3,m=1", "--nphi", "64", "--nlambda", "128"};
  const Result a = run(args);
  const Result b = run(args);
  CHECK(a.code == cli::kOk);
  CHECK(a.out == b.out);
  const Result c = run({"curvature-map", "--test-field", "k=1,a=0.2,m=2", "--format", "json"});
  CHECK(c.out == run({"curvature-map", "--test-field", "k=1,a=0.2,m=2", "--format", "json"}).out);
}

TEST_CASE("csv volume report") {
  const Result r = run({"volume", "--loxodromic", "0", "--format", "csv", "--nphi", "32", "--nlambda", "64"});
  REQUIRE(r.code == cli::kOk);
  const auto rows = csv_rows(r.out);
  CHECK(rows[0] == std::vector<std::string>{"quantity", "value", "error_estimate"});
  CHECK(rows[1][0] == "volume");
  CHECK(std::stod(rows[1][1]) == doctest::Approx(kS3Volume).epsilon(1e-12));
}

TEST_CASE("degree input is rejected") {
  for (const char* bad : {"45deg", "45 DEG", "45\xc2\xb0", "0.5d"}) {
    const Result r = run({"volume", "--loxodromic", bad});
    CHECK(r.code == cli::kConfigError);
    CHECK(r.err.find("radians only") != std::string::npos);
  }
  CHECK(run({"trace", "--theta0", "0.5", "--start", "10deg,0"}).code == cli::kConfigError);
  CHECK(run({"volume", "--test-field", "k=0,a=0.1,m=1,theta0=30deg"}).code == cli::kConfigError);
}

TEST_CASE("configuration errors") {
  CHECK(run({"volume"}).code == cli::kConfigError);
  CHECK(run({"volume", "--loxodromic", "0", "--test-field", "k=0,a=0,m=1"}).code == cli::kConfigError);
  CHECK(run({"volume", "--loxodromic", "abc"}).code == cli::kConfigError);
  CHECK(run({"volume", "--loxodromic", "0", "--format", "xml"}).code == cli::kConfigError);
  CHECK(run({"volume", "--loxodromic", "0", "--bogus", "1"}).code == cli::kConfigError);
  CHECK(run({"volume", "--test-field", "k=0,a=0.1"}).code == cli::kConfigError);
  CHECK(run({"volume", "--test-field", "k=0,a=0.1,m=1,q=2"}).code == cli::kConfigError);
  CHECK(run({"index", "--loxodromic", "0", "--probe", "-0.3"}).code == cli::kConfigError);
  CHECK(run({"volume", "--grid", "/nonexistent/grid.json"}).code == cli::kConfigError);
  CHECK(run({}).code == cli::kConfigError);
  CHECK(run({"--help"}).code == cli::kOk);
}

TEST_CASE("config file, environment and flag precedence") {
  const auto path = scratch("config.json");
  write_file(path, R"({"loxodromic": 0.5, "nphi": 32, "nlambda": 64, "format": "csv"})");
  const Result from_file = run({"volume", "--config", path.string()});
  CHECK(from_file.code == cli::kOk);
  CHECK(from_file.out.rfind("quantity,value", 0) == 0);

  const Result overridden = run({"volume", "--config", path.string(), "--format", "json", "--nphi", "16"});
  REQUIRE(overridden.code == cli::kOk);
  const json j = json::parse(overridden.out);
  CHECK(j["config"]["nphi"] == 16);
  CHECK(j["config"]["nlambda"] == 64);
  CHECK(j["config"]["field"]["theta0"] == 0.5);

  setenv(cli::kConfigEnv, path.string().c_str(), 1);
  const Result from_env = run({"volume"});
  unsetenv(cli::kConfigEnv);
  CHECK(from_env.code == cli::kOk);
  CHECK(from_env.out == from_file.out);

  write_file(path, R"({"loxodromic": 0.5, "resolution": 3})");
  const Result unknown = run({"volume", "--config", path.string()});
  CHECK(unknown.code == cli::kConfigError);
  CHECK(unknown.err.find("unknown key 'resolution'") != std::string::npos);
  write_file(path, "{not json");
  CHECK(run({"volume", "--config", path.string()}).code == cli::kConfigError);
  std::filesystem::remove(path);
}

TEST_CASE("meridian trace") {
  const Result r = run({"trace", "--theta0", "1.5707963268", "--start", "0,0", "--smax", "1.5"});
  REQUIRE(r.code == cli::kOk);
  const auto rows = csv_rows(r.out);
  CHECK(rows[0] == std::vector<std::string>{"s", "phi", "lambda", "x", "y", "z"});
  CHECK(rows.size() == 152);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(std::abs(std::stod(rows[k][2])) < 1e-9);
    CHECK(std::abs(std::stod(rows[k][1]) - std::stod(rows[k][0])) < 1e-12);
  }
  CHECK(r.out.find('\r') == std::string::npos);
}

TEST_CASE("trace to the pole in json") {
  const Result r = run({"trace", "--theta0", "0.7853981634", "--smax", "10", "--format", "json"});
  REQUIRE(r.code == cli::kOk);
  const json j = json::parse(r.out);
  CHECK(j["stop"] == "pole");
  CHECK(std::abs(j["length_to_pole"]["value"].get<double>() - kHalfPi / std::sin(0.7853981634)) < 1e-6);
}

TEST_CASE("curvature map") {
  const Result r = run({"curvature-map", "--loxodromic", "0", "--nphi", "5", "--nlambda", "4"});
  REQUIRE(r.code == cli::kOk);
  const auto rows = csv_rows(r.out);
  CHECK(rows[0] == std::vector<std::string>{"phi", "lambda", "kappa", "tau", "method"});
  CHECK(rows.size() == 21);
  CHECK(rows[1][4] == "closed-form");
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(std::abs(std::abs(std::stod(rows[k][2])) - std::abs(std::tan(std::stod(rows[k][0])))) < 1e-9);
  }
  const Result e = run({"curvature-map", "--loxodromic", "0", "--nphi", "5", "--nlambda", "4", "--extrinsic"});
  CHECK(csv_rows(e.out)[1][4] == "extrinsic");
}

TEST_CASE("index command") {
  const Result lox = run({"index", "--loxodromic", "1.2"});
  REQUIRE(lox.code == cli::kOk);
  const json j = json::parse(lox.out);
  REQUIRE(j["reports"].size() == 4);
  for (const json& rep : j["reports"]) CHECK(rep["index"] == 1);
  CHECK(j["sum"]["value"] == 2);

  const Result wound = run({"index", "--test-field", "k=1,a=0.2,m=2", "--format", "csv"});
  REQUIRE(wound.code == cli::kOk);
  const auto rows = csv_rows(wound.out);
  CHECK(rows[1][2] == "2");
  CHECK(rows[3][2] == "0");
}

TEST_CASE("minimize with checkpoint and resume") {
  const auto cp = scratch("checkpoint.json");
  const Result r = run({"minimize", "--test-field", "k=0,a=0.3,m=1,theta0=1.0471975512", "--nphi", "16", "--nlambda",
                        "32", "--checkpoint", cp.string()});
  const json j = json::parse(r.out);
  CHECK(j["converged"] == true);
  CHECK(j["audit"]["passed"] == true);
  CHECK(j["final_volume"]["distance_to_reference"].get<double>() < 1e-3);
  const double defect = j["loxodromy_defect"]["value"].get<double>();
  CHECK(defect < 1e-3);
  // a converged k = 0 run must end with defect < 10 tol, otherwise exit 4
  CHECK(r.code == (defect < 10 * 1e-6 ? cli::kOk : cli::kInvariantViolation));
  REQUIRE(std::filesystem::exists(cp));
  const Checkpoint saved = load_checkpoint(cp);
  CHECK(saved.iteration == j["iterations"].get<std::size_t>());

  const Result resumed = run({"minimize", "--grid", cp.string()});
  CHECK(resumed.code == r.code);
  const json k = json::parse(resumed.out);
  CHECK(k["loxodromy_defect"]["value"].get<double>() == defect);
  CHECK(k["iterations"] == 0);
  CHECK(k["start_iteration"] == saved.iteration);
  std::filesystem::remove(cp);

  const Result capped = run({"minimize", "--test-field", "k=0,a=0.3,m=1", "--nphi", "16", "--nlambda", "32",
                             "--max-iter", "3"});
  CHECK(capped.code == cli::kNonConvergence);
  CHECK(json::parse(capped.out)["status"] == "max-iterations");

  const Result exploratory = run({"minimize", "--test-field", "k=1,a=0.1,m=2", "--nphi", "12", "--nlambda", "24",
                                  "--max-iter", "2", "--format", "csv"});
  CHECK(csv_rows(exploratory.out)[0] == std::vector<std::string>{"iteration", "volume", "defect", "step"});
}

TEST_CASE("report written to a file") {
  const auto path = scratch("out.csv");
  const Result r = run({"trace", "--theta0", "0.3", "--smax", "0.1", "--out", path.string()});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  CHECK(first == "s,phi,lambda,x,y,z");
  std::filesystem::remove(path);
}
