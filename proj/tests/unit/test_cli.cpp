#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "hjs/cli.hpp"
#include "support.hpp"

using namespace hjs;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("hjs_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write_scenario(const TempDir& dir, const std::string& text) {
  const fs::path p = dir.path / "scenario.json";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

RunOutcome run_task(const std::string& task, const fs::path& scenario, const fs::path& out,
                    std::vector<std::string> overrides = {}) {
  RunOptions o;
  o.task = task;
  o.scenario = scenario;
  o.out = out;
  o.jobs = 1;
  o.overrides = std::move(overrides);
  return run(o);
}

const char* kQuadratic = R"({
  "model": {"form": "quadratic", "dim": 1},
  "u": {"form": "neg_abs"},
  "task": {"fundamental": {"x": [0.0], "y": [0.5], "t": 0.5}}
})";

}  // namespace

TEST_CASE("overrides create nested keys and parse JSON literals") {
  ScenarioDoc doc = ScenarioDoc::object();
  apply_override(doc, "task.fundamental.t=0.25");
  apply_override(doc, "task.fundamental.x=[1,2]");
  apply_override(doc, "model.form=quadratic");
  CHECK(doc["task"]["fundamental"]["t"].get<double>() == 0.25);
  CHECK(doc["task"]["fundamental"]["x"].size() == 2);
  CHECK(doc["model"]["form"] == "quadratic");
  CHECK_THROWS_AS(apply_override(doc, "novalue"), ValidationError);
  CHECK_THROWS_AS(apply_override(doc, "task..t=1"), ValidationError);
}

TEST_CASE("validation names the offending field") {
  auto expect_message = [](const std::string& text, const std::string& fragment) {
    try {
      scenario_from_json(ScenarioDoc::parse(text));
      FAIL("accepted: " << text);
    } catch (const ValidationError& e) {
      CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, e.what());
    }
  };
  expect_message(R"({"task": {"fundamental": {"t": -1}}})", "task.fundamental.t");
  expect_message(R"({"modle": {}})", "modle");
  expect_message(R"({"model": {"form": "quadratic", "colour": 1}})", "model.colour");
  expect_message(R"({"task": {"regularize": {"resolutions": [3]}}})", "task.regularize.resolutions");
  expect_message(R"({"model": {"form": "quartic"}})", "model.form");
  expect_message(R"({"seed": -3})", "seed");
}

TEST_CASE("scenario hash ignores key order and tracks content") {
  const auto a = scenario_from_json(ScenarioDoc::parse(R"({"seed": 1, "model": {"form": "quadratic", "dim": 2}})"));
  const auto b = scenario_from_json(ScenarioDoc::parse(R"({"model": {"dim": 2, "form": "quadratic"}, "seed": 1})"));
  const auto c = scenario_from_json(ScenarioDoc::parse(R"({"model": {"dim": 2, "form": "quadratic"}, "seed": 2})"));
  CHECK(a.hash == b.hash);
  CHECK(a.hash != c.hash);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
}

TEST_CASE("model and u builders") {
  const auto model = build_model(ScenarioDoc::parse(R"({"form": "mechanical", "A": [[2, 0], [0, 1]],
      "potential": "x1^2", "drift": [0, 1], "theta": "0.25*r^2", "c0": 1.0})"));
  CHECK(model.dim() == 2);
  CHECK(model.kinetic_matrix()->isApprox(vec({2, 1}).asDiagonal().toDenseMatrix()));
  CHECK(model.theta(2.0).value() == doctest::Approx(1.0));
  const auto u = build_u(ScenarioDoc::parse(R"({"form": "min_of_planes", "normals": [[1, 0], [0, 1]]})"), 2);
  CHECK(u(vec({0.3, -0.2})) == doctest::Approx(-0.2));
  CHECK_THROWS_AS(build_u(ScenarioDoc::parse(R"({"form": "neg_abs", "center": [0]})"), 2), ValidationError);
}

TEST_CASE("fundamental task writes result, curve and manifest") {
  TempDir dir;
  const auto scenario = write_scenario(dir, kQuadratic);
  const auto out = dir.path / "out";
  const RunOutcome r = run_task("fundamental", scenario, out);
  REQUIRE(r.exit_code == kExitOk);
  for (const char* f : {"result.json", "curve.csv", "curve.dat", "manifest.json"}) CHECK(fs::exists(out / f));
  const Json result = Json::parse(slurp(out / "result.json"));
  CHECK(result["schema_version"] == kSchemaVersion);
  CHECK(result["result"]["value"].get<double>() == doctest::Approx(0.25).epsilon(1e-9));
  const Json manifest = Json::parse(slurp(out / "manifest.json"));
  CHECK(manifest["status"]["fundamental"] == "ok");
  CHECK(manifest["files"].size() == 3);
  CHECK(manifest.contains("t0"));
  CHECK(manifest["scenario"]["hash"].get<std::string>().size() == 16);
  const std::string csv = slurp(out / "curve.csv");
  CHECK(csv.rfind("s,x1,v1,p1,energy\n", 0) == 0);
  CHECK(slurp(out / "curve.dat").rfind("# s x1 v1 p1 energy\n", 0) == 0);
}

TEST_CASE("output formats restrict the written files") {
  TempDir dir;
  const auto scenario = write_scenario(dir, kQuadratic);
  const RunOutcome r = run_task("fundamental", scenario, dir.path / "out", {"output.formats=[\"csv\"]"});
  REQUIRE(r.exit_code == kExitOk);
  CHECK(fs::exists(dir.path / "out" / "curve.csv"));
  CHECK_FALSE(fs::exists(dir.path / "out" / "curve.dat"));
  CHECK_FALSE(fs::exists(dir.path / "out" / "result.json"));
}

TEST_CASE("exit codes") {
  TempDir dir;
  const auto scenario = write_scenario(dir, kQuadratic);
  SUBCASE("negative time") {
    const RunOutcome r = run_task("fundamental", scenario, dir.path / "a", {"task.fundamental.t=-1"});
    CHECK(r.exit_code == kExitValidation);
    CHECK(r.message.find("task.fundamental.t") != std::string::npos);
  }
  SUBCASE("unknown override key") {
    CHECK(run_task("fundamental", scenario, dir.path / "b", {"task.fundamental.z=1"}).exit_code == kExitValidation);
  }
  SUBCASE("missing file") {
    CHECK(run_task("fundamental", dir.path / "nope.json", dir.path / "c").exit_code == kExitValidation);
  }
  SUBCASE("empty catalog selection") {
    CHECK(run_task("verify", scenario, dir.path / "d", {"task.verify.entries=[]"}).exit_code == kExitValidation);
  }
  SUBCASE("unknown catalog entry") {
    CHECK(run_task("verify", scenario, dir.path / "e", {"task.verify.entries=nothing"}).exit_code == kExitValidation);
  }
  SUBCASE("unreachable tolerance is a numerical failure") {
    const RunOutcome r = run_task("fundamental", scenario, dir.path / "f",
                                  {"model.form=mechanical", "model.potential=\"0.5*x1^2\"",
                                   "task.fundamental.el_tolerance=1e-300", "task.fundamental.nodes=4"});
    CHECK(r.exit_code == kExitNumerical);
    CHECK(Json::parse(slurp(dir.path / "f" / "manifest.json"))["status"]["fundamental"] == "numerical-failure");
  }
}

TEST_CASE("verify on one catalog entry passes and lists every property") {
  TempDir dir;
  const auto scenario = write_scenario(dir, R"({"catalog": "neg-abs-1d", "task": {"verify": {}}})");
  const RunOutcome r = run_task("verify", scenario, dir.path / "out");
  CHECK(r.exit_code == kExitOk);
  const Json report = Json::parse(slurp(dir.path / "out" / "report.json"));
  REQUIRE(report["entries"].size() == 1);
  CHECK(report["entries"][0]["properties"].size() == 9);
  for (const auto& p : report["entries"][0]["properties"]) CHECK_MESSAGE(p["pass"].get<bool>(), p["name"]);
}

TEST_CASE("catalog lookup") {
  CHECK(catalog_names().size() == 5);
  CHECK(catalog_entry("drift-2d").anchor.size() == 2);
  CHECK_THROWS_AS(catalog_entry("missing"), ValidationError);
}
