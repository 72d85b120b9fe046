#include "geoflow/catalog.hpp"
#include "geoflow/errors.hpp"
#include "geoflow/io.hpp"
#include "geoflow/minimality.hpp"
#include "geoflow/mollify.hpp"
#include "geoflow/suites.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace geoflow;

namespace {

TangentVector tv(const Vector& x, const Vector& y) { return {x, y}; }

py::object to_python(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

FlowOptions flow_opts(std::optional<double> rel_tol, const std::string& method, double fixed_step) {
  FlowOptions o;
  o.rel_tol = rel_tol;
  o.method = method == "rk4" ? StepMethod::FixedRK4 : StepMethod::Adaptive;
  o.fixed_step = fixed_step;
  return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Geodesic flows on embedded graph surfaces";

  auto base = py::register_exception<Error>(m, "GeoflowError");
  py::register_exception<OutOfChart>(m, "OutOfChart", base.ptr());
  py::register_exception<OutOfDomain>(m, "OutOfDomain", base.ptr());
  py::register_exception<DomainTooSmall>(m, "DomainTooSmall", base.ptr());
  py::register_exception<UnknownSurface>(m, "UnknownSurface", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<GraphSurface>(m, "Surface")
      .def_property_readonly("name", &GraphSurface::name)
      .def_property_readonly("dim", &GraphSurface::dim)
      .def_property_readonly("codim", &GraphSurface::codim)
      .def_property_readonly("regularity", [](const GraphSurface& s) { return s.regularity().tag(); })
      .def_property_readonly("lower", [](const GraphSurface& s) { return s.domain().lower(); })
      .def_property_readonly("upper", [](const GraphSurface& s) { return s.domain().upper(); })
      .def_property_readonly("hess_sup", [](const GraphSurface& s) { return s.bounds().hess_sup; })
      .def_property_readonly("grad_sup", [](const GraphSurface& s) { return s.bounds().grad_sup; })
      .def("contains", &GraphSurface::contains, py::arg("x"))
      .def("height", &GraphSurface::height, py::arg("x"))
      .def("embed", [](const GraphSurface& s, const Vector& x) { return embed(s, x); }, py::arg("x"))
      .def("metric", [](const GraphSurface& s, const Vector& x) { return metric_at(s, x).g; }, py::arg("x"))
      .def("__repr__", [](const GraphSurface& s) { return "<Surface " + s.name() + " " + s.regularity().tag() + ">"; });

  m.def("catalog_names", &catalog_names);
  m.def(
      "make_surface",
      [](const std::string& name, double alpha) {
        CatalogParams p;
        p.alpha = alpha;
        return make_catalog_surface(name, p);
      },
      py::arg("name"), py::arg("alpha") = 0.5);
  m.def(
      "mollify",
      [](const GraphSurface& s, double eps, std::optional<double> region, int nodes_per_radius) {
        MollifyOptions o;
        o.nodes_per_radius = nodes_per_radius;
        if (region) o.region = ChartDomain::cube(s.dim(), *region);
        return mollify(s, eps, o);
      },
      py::arg("surface"), py::arg("eps"), py::arg("region") = py::none(), py::arg("nodes_per_radius") = 8);

  m.def(
      "second_fundamental_form",
      [](const GraphSurface& s, const Vector& x, const Vector& u, const Vector& v) {
        return second_fundamental_form(s, x, u, v);
      },
      py::arg("surface"), py::arg("x"), py::arg("u"), py::arg("v"));
  m.def(
      "curvature_operator",
      [](const GraphSurface& s, const Vector& x, const Vector& v) { return curvature_operator(s, x, v); },
      py::arg("surface"), py::arg("x"), py::arg("v"));
  m.def(
      "sectional_curvature",
      [](const GraphSurface& s, const Vector& x, const Vector& u, const Vector& v) {
        return sectional_curvature(s, x, u, v);
      },
      py::arg("surface"), py::arg("x"), py::arg("u"), py::arg("v"));

  m.def(
      "integrate_geodesic",
      [](const GraphSurface& s, const Vector& x, const Vector& y, double t, std::optional<double> rel_tol,
         const std::string& method, double fixed_step) {
        const Trajectory tr = integrate_geodesic(s, tv(x, y), t, flow_opts(rel_tol, method, fixed_step));
        const int m = s.dim();
        Matrix states(static_cast<Eigen::Index>(tr.states.size()), 2 * m);
        for (std::size_t i = 0; i < tr.states.size(); ++i) {
          states.row(static_cast<Eigen::Index>(i)) = tr.states[i].stacked().transpose();
        }
        py::dict d;
        d["times"] = tr.times;
        d["states"] = states;
        d["exit_reason"] = exit_reason_name(tr.exit_reason);
        d["speed_drift"] = tr.speed_drift(s);
        return d;
      },
      py::arg("surface"), py::arg("x"), py::arg("y"), py::arg("t"), py::arg("rel_tol") = py::none(),
      py::arg("method") = "adaptive", py::arg("fixed_step") = 1e-3);
  m.def(
      "geodesic_flow",
      [](const GraphSurface& s, double t, const Vector& x, const Vector& y) {
        return geodesic_flow(s, t, tv(x, y)).stacked();
      },
      py::arg("surface"), py::arg("t"), py::arg("x"), py::arg("y"));
  m.def(
      "exp_map", [](const GraphSurface& s, const Vector& x, const Vector& y) { return exp_map(s, tv(x, y)); },
      py::arg("surface"), py::arg("x"), py::arg("y"));
  m.def(
      "flow_differential",
      [](const GraphSurface& s, double t, const Vector& x, const Vector& y) {
        return flow_differential(s, t, tv(x, y)).matrix;
      },
      py::arg("surface"), py::arg("t"), py::arg("x"), py::arg("y"));
  m.def(
      "fd_flow_differential",
      [](const GraphSurface& s, double t, const Vector& x, const Vector& y, double eps) {
        FdOptions o;
        o.eps = eps;
        return fd_flow_differential(s, t, tv(x, y), o);
      },
      py::arg("surface"), py::arg("t"), py::arg("x"), py::arg("y"), py::arg("eps") = 1e-5);
  m.def(
      "propagate_jacobi",
      [](const GraphSurface& s, const Vector& x, const Vector& y, const Vector& j, const Vector& k, double t) {
        return propagate_jacobi(s, tv(x, y), {j, k}, t).stacked();
      },
      py::arg("surface"), py::arg("x"), py::arg("y"), py::arg("J"), py::arg("K"), py::arg("t"));
  m.def(
      "mixed_partials_residual",
      [](const GraphSurface& s, const Vector& x, const Vector& y, const Vector& w, double eps) {
        return mixed_partials_residual(s, tv(x, y), w, eps);
      },
      py::arg("surface"), py::arg("x"), py::arg("y"), py::arg("w"), py::arg("eps") = 1e-4);

  m.def(
      "shortest_path_length",
      [](const GraphSurface& s, const Vector& p, const Vector& q, int resolution) {
        return shortest_path_length(build_mesh_oracle(s, resolution), p, q);
      },
      py::arg("surface"), py::arg("p"), py::arg("q"), py::arg("resolution") = 128);
  m.def(
      "minimality_margin",
      [](const GraphSurface& s, const Vector& x, const Vector& y, double t, int resolution) {
        const Trajectory tr = integrate_geodesic(s, tv(x, y), t);
        return minimality_margin(s, tr, build_mesh_oracle(s, resolution));
      },
      py::arg("surface"), py::arg("x"), py::arg("y"), py::arg("t"), py::arg("resolution") = 128);
  m.def(
      "curve_length", [](const GraphSurface& s, const std::vector<Vector>& pts) { return curve_length(s, pts); },
      py::arg("surface"), py::arg("points"));

  m.def("criterion_ids", &criterion_ids);
  m.def(
      "run_criterion",
      [](int id, std::uint64_t seed) {
        SuiteOptions o;
        o.seed = seed;
        CriterionResult r;
        {
          py::gil_scoped_release release;
          r = run_criterion(id, o);
        }
        return to_python(to_json(r, true));
      },
      py::arg("id"), py::arg("seed") = SuiteOptions{}.seed);
}
