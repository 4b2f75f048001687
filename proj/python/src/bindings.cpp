#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mlab/conservation.hpp"
#include "mlab/errors.hpp"
#include "mlab/gp.hpp"
#include "mlab/gp_morawetz.hpp"
#include "mlab/morawetz.hpp"
#include "mlab/nls.hpp"
#include "mlab/runner.hpp"

namespace py = pybind11;
using namespace mlab;

namespace {

using GridRef = std::shared_ptr<Grid>;
using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

std::vector<py::ssize_t> shape_of(const Grid& g) {
  return std::vector<py::ssize_t>(static_cast<std::size_t>(g.dim), static_cast<py::ssize_t>(g.points_per_axis));
}

// numpy array of shape (N,)*dim -> position-space field
ComplexField to_field(const GridPtr& grid, const CArray& a) {
  if (static_cast<std::size_t>(a.size()) != grid->size())
    throw ContractError("array has " + std::to_string(a.size()) + " entries, grid has " + std::to_string(grid->size()));
  return ComplexField(grid, std::vector<cplx>(a.data(), a.data() + a.size()));
}

CArray to_array(const ComplexField& f) {
  CArray out(shape_of(*f.grid));
  std::copy(f.values.begin(), f.values.end(), out.mutable_data());
  return out;
}

Vec3 vec3(const std::vector<double>& v) {
  if (v.size() > 3) throw ContractError("at most three components");
  Vec3 out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

NLSParams params(double lambda, double exponent) {
  NLSParams p{lambda, exponent};
  p.validate();
  return p;
}

MixtureState mixture(const GridPtr& grid, const std::vector<double>& weights, const std::vector<CArray>& orbitals) {
  std::vector<ComplexField> phi;
  for (const auto& o : orbitals) phi.push_back(to_field(grid, o));
  return MixtureState(weights, std::move(phi));
}

py::dict interaction_dict(const GPInteractionTerms& t) {
  py::dict d;
  d["A1"] = t.A1, d["A2"] = t.A2, d["A3"] = t.A3, d["A4"] = t.A4;
  d["theta1"] = t.theta1, d["theta2"] = t.theta2, d["theta3"] = t.theta3, d["theta4"] = t.theta4;
  d["raw_rate"] = t.raw_rate();
  d["theorem_rate"] = t.theorem_rate();
  return d;
}

py::dict result_dict(const ScenarioResult& r) {
  return py::module_::import("json").attr("loads")(to_json(r));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "NLS and GP hierarchy Morawetz checks";

  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalAbort>(m, "NumericalAbort", PyExc_RuntimeError);

  py::class_<Grid, std::shared_ptr<Grid>>(m, "Grid")
      .def(py::init([](int dim, std::size_t n, double length) { return std::const_pointer_cast<Grid>(make_grid(dim, n, length)); }), py::arg("dim"),
           py::arg("points"), py::arg("length"))
      .def_readonly("dim", &Grid::dim)
      .def_readonly("points", &Grid::points_per_axis)
      .def_readonly("length", &Grid::box_length)
      .def_readonly("spacing", &Grid::spacing)
      .def_property_readonly("shape", [](const Grid& g) { return shape_of(g); })
      .def_property_readonly("coordinates", [](const Grid& g) {
        std::vector<double> x(g.points_per_axis);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = g.coordinate(i);
        return x;
      })
      .def("__repr__", [](const Grid& g) {
        return "Grid(dim=" + std::to_string(g.dim) + ", points=" + std::to_string(g.points_per_axis) +
               ", length=" + std::to_string(g.box_length) + ")";
      });

  m.def(
      "initial_data",
      [](const GridRef& grid, const std::string& kind, double amplitude, double width, double chirp,
         std::vector<double> center, std::vector<double> velocity, double eta, std::uint64_t seed, double mass,
         double envelope_width, double max_wavenumber) {
        InitialData d;
        d.kind = initial_kind_from_string(kind);
        d.amplitude = amplitude, d.width = width, d.chirp = chirp, d.eta = eta;
        d.center = std::move(center), d.velocity = std::move(velocity);
        d.seed = seed, d.mass = mass, d.envelope_width = envelope_width, d.max_wavenumber = max_wavenumber;
        return to_array(make_initial_data(d, grid));
      },
      py::arg("grid"), py::arg("kind") = "gaussian", py::arg("amplitude") = 1.0, py::arg("width") = 1.0,
      py::arg("chirp") = 0.0, py::arg("center") = std::vector<double>{}, py::arg("velocity") = std::vector<double>{},
      py::arg("eta") = 1.0, py::arg("seed") = 0, py::arg("mass") = 1.0, py::arg("envelope_width") = 0.0,
      py::arg("max_wavenumber") = 0.0);

  m.def(
      "soliton",
      [](const GridRef& grid, double eta, double x0, double velocity, double t) {
        return to_array(soliton_exact(grid, eta, x0, velocity, t));
      },
      py::arg("grid"), py::arg("eta") = 1.0, py::arg("x0") = 0.0, py::arg("velocity") = 0.0, py::arg("t") = 0.0);

  m.def(
      "evolve",
      [](const GridRef& grid, const CArray& u0, double lambda, double exponent, double dt, long steps,
         long observer_stride, const std::string& method, bool dealias, bool check_decay, double blowup_factor) {
        SolverConfig c;
        c.dt = dt, c.steps = steps, c.observer_stride = observer_stride, c.method = method_from_string(method);
        c.dealias = dealias, c.check_decay = check_decay, c.blowup_factor = blowup_factor;
        EvolveResult r;
        {
          py::gil_scoped_release release;
          r = evolve(to_field(grid, u0), params(lambda, exponent), c);
        }
        py::list snaps;
        for (const auto& s : r.trajectory.snapshots) snaps.append(to_array(s));
        return py::make_tuple(r.trajectory.times, snaps);
      },
      py::arg("grid"), py::arg("u0"), py::arg("lam") = 1.0, py::arg("exponent") = 3.0, py::arg("dt") = 1e-3,
      py::arg("steps") = 1, py::arg("observer_stride") = 1, py::arg("method") = "strang", py::arg("dealias") = true,
      py::arg("check_decay") = true, py::arg("blowup_factor") = 1e6,
      "Returns (times, snapshots) sampled every observer_stride steps.");

  m.def("mass", [](const GridRef& g, const CArray& u) { return mass(to_field(g, u)); });
  m.def(
      "energy", [](const GridRef& g, const CArray& u, double lambda, double exponent) {
        return energy(to_field(g, u), params(lambda, exponent));
      },
      py::arg("grid"), py::arg("u"), py::arg("lam") = 1.0, py::arg("exponent") = 3.0);
  m.def("momentum", [](const GridRef& g, const CArray& u) { return momentum(to_field(g, u)); });
  m.def("boundary_ratio", [](const GridRef& g, const CArray& u) { return boundary_ratio(to_field(g, u)); });

  py::class_<Weight>(m, "Weight")
      .def_static("abs_smoothed", &Weight::abs_smoothed, py::arg("dim"), py::arg("epsilon"))
      .def_property_readonly("dim", &Weight::dim)
      .def_property_readonly("epsilon", &Weight::epsilon)
      .def("value", [](const Weight& w, const std::vector<double>& d) { return w.value(vec3(d)); })
      .def("laplacian", [](const Weight& w, const std::vector<double>& d) { return w.laplacian(vec3(d)); })
      .def("bilaplacian", [](const Weight& w, const std::vector<double>& d) { return w.bilaplacian(vec3(d)); });

  m.def(
      "morawetz_action",
      [](const GridRef& g, const CArray& u, const Weight& w, const std::vector<double>& center) {
        return morawetz_action(to_field(g, u), vec3(center), w);
      },
      py::arg("grid"), py::arg("u"), py::arg("weight"), py::arg("center") = std::vector<double>{});
  m.def(
      "morawetz_rhs",
      [](const GridRef& g, const CArray& u, const Weight& w, double lambda, double exponent,
         const std::vector<double>& center) {
        const auto r = dt_morawetz_rhs(to_field(g, u), vec3(center), w, params(lambda, exponent));
        py::dict d;
        d["smoothing"] = r.smoothing, d["potential"] = r.potential, d["hessian"] = r.hessian, d["total"] = r.total();
        return d;
      },
      py::arg("grid"), py::arg("u"), py::arg("weight"), py::arg("lam") = 1.0, py::arg("exponent") = 3.0,
      py::arg("center") = std::vector<double>{});
  m.def(
      "interaction_action",
      [](const GridRef& g, const CArray& u, const Weight& w, bool direct) {
        const auto f = to_field(g, u);
        return direct ? interaction_action_direct(f, w) : interaction_action(f, w);
      },
      py::arg("grid"), py::arg("u"), py::arg("weight"), py::arg("direct") = false);
  m.def(
      "interaction_terms",
      [](const GridRef& g, const CArray& u, const Weight& w, double lambda, double exponent, bool direct) {
        const auto f = to_field(g, u);
        const auto p = params(lambda, exponent);
        const auto t = direct ? interaction_rhs_terms_direct(f, w, p) : interaction_rhs_terms(f, w, p);
        py::dict d;
        d["I"] = t.I, d["II"] = t.II, d["III"] = t.III, d["IV"] = t.IV, d["sum"] = t.sum();
        return d;
      },
      py::arg("grid"), py::arg("u"), py::arg("weight"), py::arg("lam") = 1.0, py::arg("exponent") = 3.0,
      py::arg("direct") = false);

  // GP side: a mixture is given as (grid, weights, orbitals)
  m.def(
      "marginal",
      [](const GridRef& g, const std::vector<double>& w, const std::vector<CArray>& phi, int k) {
        const auto t = marginal(mixture(g, w, phi), k);
        CArray out(std::vector<py::ssize_t>(t.slots(), static_cast<py::ssize_t>(t.points())));
        std::copy(t.values.begin(), t.values.end(), out.mutable_data());
        return out;
      },
      py::arg("grid"), py::arg("weights"), py::arg("orbitals"), py::arg("k"));
  m.def(
      "h_alpha_norm",
      [](const GridRef& g, const std::vector<double>& w, const std::vector<CArray>& phi, int k, double alpha) {
        return h_alpha_norm(mixture(g, w, phi), k, alpha);
      },
      py::arg("grid"), py::arg("weights"), py::arg("orbitals"), py::arg("k"), py::arg("alpha"));
  m.def(
      "h_xi_norm",
      [](const GridRef& g, const std::vector<double>& w, const std::vector<CArray>& phi, int k_max, double xi,
         double alpha) {
        const auto n = h_xi_norm(mixture(g, w, phi), k_max, xi, alpha);
        py::dict d;
        d["partial"] = n.partial, d["terms"] = n.terms, d["orbital_bound"] = n.orbital_bound;
        d["tail_bound"] = n.tail_bound, d["divergent"] = n.divergent;
        return d;
      },
      py::arg("grid"), py::arg("weights"), py::arg("orbitals"), py::arg("k_max"), py::arg("xi"), py::arg("alpha"));
  m.def(
      "gp_one_particle_rhs",
      [](const GridRef& g, const std::vector<double>& w, const std::vector<CArray>& phi, const Weight& weight,
         double lambda, const std::vector<double>& center) {
        const auto t = gp_one_particle_rhs(mixture(g, w, phi), weight, lambda, vec3(center));
        py::dict d;
        d["T1"] = t.T1, d["T2"] = t.T2, d["T3"] = t.T3, d["T1_chain"] = t.T1_chain, d["total"] = t.total();
        return d;
      },
      py::arg("grid"), py::arg("weights"), py::arg("orbitals"), py::arg("weight"), py::arg("lam") = 1.0,
      py::arg("center") = std::vector<double>{});
  m.def(
      "gp_one_particle_action",
      [](const GridRef& g, const std::vector<double>& w, const std::vector<CArray>& phi, const Weight& weight,
         const std::vector<double>& center) {
        return gp_one_particle_action(mixture(g, w, phi), weight, vec3(center));
      },
      py::arg("grid"), py::arg("weights"), py::arg("orbitals"), py::arg("weight"),
      py::arg("center") = std::vector<double>{});
  m.def(
      "gp_interaction_rhs",
      [](const GridRef& g, const std::vector<double>& w, const std::vector<CArray>& phi, const Weight& weight,
         double lambda) {
        return interaction_dict(gp_interaction_rhs(mixture(g, w, phi), GPWeight::displacement(weight), lambda));
      },
      py::arg("grid"), py::arg("weights"), py::arg("orbitals"), py::arg("weight"), py::arg("lam") = 1.0);
  m.def(
      "gp_interaction_action",
      [](const GridRef& g, const std::vector<double>& w, const std::vector<CArray>& phi, const Weight& weight) {
        return gp_interaction_action(mixture(g, w, phi), GPWeight::displacement(weight));
      },
      py::arg("grid"), py::arg("weights"), py::arg("orbitals"), py::arg("weight"));
  m.def(
      "reduction_consistency",
      [](const GridRef& g, const std::vector<double>& w, const std::vector<CArray>& phi, const Weight& weight,
         double lambda, const std::vector<double>& center) {
        const auto r = reduction_consistency(mixture(g, w, phi), weight, lambda, vec3(center));
        py::dict d;
        d["theorem_delta"] = r.theorem_delta, d["raw_delta"] = r.raw_delta;
        d["max_theorem_delta"] = r.max_theorem_delta(), d["max_raw_delta"] = r.max_raw_delta();
        return d;
      },
      py::arg("grid"), py::arg("weights"), py::arg("orbitals"), py::arg("weight"), py::arg("lam") = 1.0,
      py::arg("center") = std::vector<double>{});

  // scenario runner
  m.def("builtin_names", [] {
    std::vector<std::string> v;
    for (const auto& b : builtin_catalog()) v.push_back(b.name);
    return v;
  });
  m.def("builtin_yaml", &builtin_yaml, py::arg("name"));
  m.def(
      "run_config",
      [](const std::string& text, std::optional<std::uint64_t> seed, bool strict) {
        const auto scenarios = parse_config(text);
        RunOptions o;
        o.seed = seed, o.strict = strict;
        py::list out;
        for (const auto& s : scenarios) {
          ScenarioResult r;
          {
            py::gil_scoped_release release;
            r = run_scenario(s, o);
          }
          out.append(result_dict(r));
        }
        return out;
      },
      py::arg("text"), py::arg("seed") = py::none(), py::arg("strict") = false,
      "Parses YAML text and runs every scenario; returns one summary dict per scenario.");
  m.def(
      "run_builtin",
      [](const std::string& name, std::optional<std::uint64_t> seed, bool strict) {
        const auto s = builtin_scenario(name);
        RunOptions o;
        o.seed = seed, o.strict = strict;
        ScenarioResult r;
        {
          py::gil_scoped_release release;
          r = run_scenario(s, o);
        }
        return result_dict(r);
      },
      py::arg("name"), py::arg("seed") = py::none(), py::arg("strict") = false);
}
