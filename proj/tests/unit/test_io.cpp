#include "geoflow/errors.hpp"
#include "geoflow/io.hpp"
#include "support.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

using namespace geoflow;
using geoflow::test::vec;

TEST_CASE("doubles print at full precision") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("JSON printer") {
  Json j;
  j["b"] = 1.0 / 3.0;
  j["a"] = Json::array({1, 2, 3});
  j["nested"] = Json::array({Json::object({{"x", std::numeric_limits<double>::infinity()}})});
  j["empty"] = Json::object();
  const std::string text = dump_json(j);
  CHECK(text ==
        "{\n"
        "  \"b\": 0.33333333333333331,\n"
        "  \"a\": [1, 2, 3],\n"
        "  \"nested\": [\n"
        "    {\n"
        "      \"x\": null\n"
        "    }\n"
        "  ],\n"
        "  \"empty\": {}\n"
        "}\n");
  CHECK(Json::parse(text)["b"].get<double>() == 1.0 / 3.0);
}

TEST_CASE("vector, matrix and domain conversions") {
  const Vector v = vec({0.1, -2.0});
  CHECK(vector_from_json(to_json(v), "v") == v);
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  CHECK(to_json(m).dump() == "[[1.0,2.0],[3.0,4.0]]");
  const ChartDomain d(vec({-0.8, -0.8}), vec({0.8, 0.8}), 0.8);
  CHECK(domain_from_json(to_json(d)) == d);
  CHECK(to_json(TangentVector{vec({1}), vec({2})}).dump() == "{\"x\":[1.0],\"y\":[2.0]}");
  CHECK_THROWS_AS(vector_from_json(Json("x"), "v"), ConfigError);
  CHECK_THROWS_AS(vector_from_json(Json::array({1, "a"}), "v"), ConfigError);
  CHECK_THROWS_AS(domain_from_json(Json::object({{"lower", {0}}})), ConfigError);
}

TEST_CASE("surface specifications") {
  CHECK(surface_spec_from_json(Json("vee")).name == "vee");
  SurfaceSpec s;
  s.name = "c2alpha";
  s.alpha = 0.25;
  s.domain = ChartDomain::cube(2, 0.5);
  CHECK(surface_spec_from_json(to_json(s)) == s);
  const GraphSurface g = make_surface(s);
  CHECK(g.regularity().alpha == 0.25);
  CHECK(g.domain() == ChartDomain::cube(2, 0.5));

  SurfaceSpec grid;
  grid.kind = "grid";
  grid.lattice.origin = vec({-1, -1});
  grid.lattice.spacing = vec({0.25, 0.25});
  grid.lattice.counts = {9, 9};
  for (int k = 0; k < 81; ++k) grid.values.push_back(0.0);
  CHECK(surface_spec_from_json(to_json(grid)) == grid);
  const GraphSurface gs = make_surface(grid);
  CHECK(gs.height(vec({0.1, 0.2}))[0] == 0.0);
  grid.values.pop_back();
  CHECK_THROWS_AS(surface_spec_from_json(to_json(grid)), ConfigError);

  CHECK_THROWS_AS(surface_spec_from_json(Json::object({{"kind", "mesh"}})), ConfigError);
  SurfaceSpec unknown;
  unknown.name = "nosuch";
  CHECK_THROWS_AS(make_surface(unknown), UnknownSurface);
}

TEST_CASE("tolerance specifications") {
  ToleranceSpec t;
  t.method = "rk4";
  t.fixed_step = 5e-4;
  t.rel_tol = 1e-9;
  CHECK(tolerance_spec_from_json(to_json(t)) == t);
  const FlowOptions f = t.flow_options();
  CHECK(f.method == StepMethod::FixedRK4);
  CHECK(f.fixed_step == 5e-4);
  CHECK(*f.rel_tol == 1e-9);
  CHECK_FALSE(f.abs_tol.has_value());
  CHECK_THROWS_AS(tolerance_spec_from_json(Json::object({{"method", "euler"}})), ConfigError);
}

TEST_CASE("run configuration round trip") {
  RunConfig c;
  c.command = "geodesic";
  c.surface.name = "hemisphere";
  c.params = Json::object({{"x0", {0.1, 0.2}}, {"t", 0.5}});
  c.tolerances.rel_tol = 1e-11;
  c.out = "out.json";
  c.seed = 7;
  const RunConfig back = run_config_from_json(Json::parse(dump_json(to_json(c))));
  CHECK(back == c);
  CHECK(dump_json(to_json(back)) == dump_json(to_json(c)));

  CHECK_THROWS_AS(run_config_from_json(Json::object({{"schema", 2}})), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(Json::object({{"params", 3}})), ConfigError);
  CHECK_THROWS_AS(run_config_from_json(Json::object({{"seed", -1}})), ConfigError);
  CHECK(run_config_from_json(Json::object()) == RunConfig{});
}

TEST_CASE("config files") {
  const std::filesystem::path dir = std::filesystem::temp_directory_path();
  const std::filesystem::path good = dir / "geoflow_test_config.json";
  const std::filesystem::path bad = dir / "geoflow_test_bad.json";
  std::ofstream(good) << "{\"command\": \"geodesic\", \"surface\": \"trough\", \"seed\": 3}";
  std::ofstream(bad) << "{not json";
  const RunConfig c = load_run_config(good.string());
  CHECK(c.command == "geodesic");
  CHECK(c.surface.name == "trough");
  CHECK(c.seed == 3);
  CHECK_THROWS_AS(load_run_config(bad.string()), ConfigError);
  CHECK_THROWS_AS(load_run_config((dir / "geoflow_missing.json").string()), ConfigError);
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}
