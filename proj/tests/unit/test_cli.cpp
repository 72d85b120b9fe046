#include "geoflow/io.hpp"
#include "support.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace geoflow;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

fs::path scratch() {
  const fs::path d = fs::temp_directory_path() / "geoflow_cli_test";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt";
  const std::string cmd = std::string(GEOFLOW_CLI_PATH) + " " + args + " > " + out.string() + " 2> " +
                          (scratch() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

Json run_json(const std::string& args, int expected = 0) {
  const Run r = run(args);
  REQUIRE(r.code == expected);
  return Json::parse(r.out);
}

}  // namespace

TEST_CASE("surface listing") {
  const Run r = run("surface list");
  CHECK(r.code == 0);
  for (const std::string& name : catalog_names()) CHECK(r.out.find(name) != std::string::npos);
  const Json info = run_json("surface info vee");
  CHECK(info["bounds"]["hess_sup"].get<double>() == doctest::Approx(2.0));
  CHECK(run("surface info nosuch").code == 2);
}

TEST_CASE("geodesic command") {
  const Json j = run_json("geodesic --surface hemisphere --x0 0,0 --y0 1,0 --t 3");
  CHECK(j["schema"] == kSchemaVersion);
  CHECK(j["command"] == "geodesic");
  CHECK(j["exit_reason"] == exit_reason_name(ExitReason::LeftChart));
  CHECK(j["t_final"].get<double>() == doctest::Approx(std::asin(0.8)).epsilon(1e-10));

  const Json flat = run_json("geodesic --surface flat --x0 0,0 --y0 0.6,0.8 --t 1");
  CHECK(flat["final_state"]["x"][0].get<double>() == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(flat["final_state"]["x"][1].get<double>() == doctest::Approx(0.8).epsilon(1e-14));

  const fs::path csv = scratch() / "traj.csv";
  CHECK(run("geodesic --surface trough --x0 0,0 --y0 1,0 --t 0.5 --csv " + csv.string()).code == 0);
  CHECK(slurp(csv).rfind("t,x1,x2,y1,y2,speed\n", 0) == 0);
}

TEST_CASE("jacobian command") {
  const Json j = run_json("jacobian --surface hemisphere --x0 0.1,0 --y0 0.5,0.5 --t 0.5 --fd-check");
  CHECK(j["matrix"].size() == 4);
  CHECK(j["max_abs_diff"].get<double>() < 1e-5);
  const Json id = run_json("jacobian --surface trough --x0 0,0 --y0 1,0 --t 0");
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) CHECK(id["matrix"][r][c].get<double>() == (r == c ? 1.0 : 0.0));
  }
  CHECK(run("jacobian --surface hemisphere --x0 0,0 --y0 1,0 --t 3").code == 3);
}

TEST_CASE("argument and configuration errors exit with 2") {
  CHECK(run("geodesic --surface nosuch --x0 0,0 --y0 1,0 --t 1").code == 2);
  CHECK(run("geodesic --surface flat --x0 0,0 --t 1").code == 2);
  CHECK(run("geodesic --surface flat --x0 0,0,0 --y0 1,0 --t 1").code == 2);
  CHECK(run("geodesic --surface flat --x0 0,0 --y0 1,0 --t 1 --method euler").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("report --suite 99").code == 2);
  CHECK(run("geodesic --config /nonexistent.json").code == 2);
}

TEST_CASE("starting outside the chart exits with 3") {
  CHECK(run("geodesic --surface hemisphere --x0 0.9,0 --y0 1,0 --t 1").code == 3);
}

TEST_CASE("config files and flag overrides") {
  const fs::path cfg = scratch() / "cfg.json";
  RunConfig c;
  c.command = "geodesic";
  c.surface.name = "flat";
  c.params = Json::object({{"x0", {0.0, 0.0}}, {"y0", {1.0, 0.0}}, {"t", 0.25}});
  std::ofstream(cfg) << dump_json(to_json(c));

  const Json a = run_json("geodesic --config " + cfg.string());
  CHECK(a["final_state"]["x"][0].get<double>() == doctest::Approx(0.25));
  const Json b = run_json("geodesic --config " + cfg.string() + " --t 0.5");
  CHECK(b["final_state"]["x"][0].get<double>() == doctest::Approx(0.5));
  // The echoed config reproduces the run.
  std::ofstream(cfg) << dump_json(b["config"]);
  const Json again = run_json("geodesic --config " + cfg.string());
  CHECK(again["final_state"] == b["final_state"]);
}

TEST_CASE("output is deterministic") {
  const fs::path o = scratch() / "o.json";
  const std::string args = "smooth-converge --surface c21_cubic --scales 0.1,0.05 --probes 3 --seed 5 --out ";
  REQUIRE(run(args + o.string()).code == 0);
  const std::string first = slurp(o);
  REQUIRE(run(args + o.string()).code == 0);
  CHECK(slurp(o) == first);
  CHECK(Json::parse(first)["scales"].size() == 2);
}

TEST_CASE("smoothing CSV") {
  const fs::path csv = scratch() / "smooth.csv";
  REQUIRE(run("smooth-converge --surface vee --scales 0.1,0.05 --probes 2 --csv " + csv.string()).code == 0);
  std::istringstream in(slurp(csv));
  std::string line;
  std::getline(in, line);
  CHECK(line == "level,scale,metric_c1,pi_c0,flow_c0,dflow_c0");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("minimality command") {
  const Json j = run_json("minimality --surface hemisphere --x0 0,0 --y0 1,0.5 --t 0.4 --resolution 64");
  CHECK(j["verdict"] == "minimal");
  CHECK(j["margin"].get<double>() >= 0.0);
  CHECK(j["geodesic_length"].get<double>() == doctest::Approx(0.4).epsilon(1e-6));
}

TEST_CASE("report command") {
  const Json j = run_json("report --suite 1,sphere-jacobi");
  CHECK(j["passed"] == true);
  CHECK(j["results"].size() == 2);
  CHECK_FALSE(j["results"][0].contains("seconds"));
  CHECK(run("report --suite 1 --tolerance 1e-30").code == 1);
}
