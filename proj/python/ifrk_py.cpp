#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ifrk/errors.hpp"
#include "ifrk/harness.hpp"

namespace py = pybind11;
using namespace ifrk;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<py::ssize_t> shape_of(const GridSpec& g) {
  return std::vector<py::ssize_t>(static_cast<std::size_t>(g.dim), static_cast<py::ssize_t>(g.points));
}

Field to_field(const GridSpec& g, const Array& a) {
  if (static_cast<std::size_t>(a.size()) != g.size())
    throw GridMismatch("array has " + std::to_string(a.size()) + " entries, grid has " + std::to_string(g.size()));
  return Field(g, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const Field& u) {
  Array out(shape_of(u.grid));
  std::copy(u.values.begin(), u.values.end(), out.mutable_data());
  return out;
}

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

ReactionTerm make_reaction(const std::string& kind, double theta, double theta_c) {
  return make_term(TermSpec{kind, theta, theta_c});
}

py::dict series_dict(const TimeSeries& s) {
  std::vector<double> t, sup, energy;
  std::vector<bool> ok;
  for (const auto& r : s.records) {
    t.push_back(r.t);
    sup.push_back(r.sup_norm);
    energy.push_back(r.energy);
    ok.push_back(r.mbp_ok);
  }
  py::dict d;
  d["t"] = t;
  d["sup_norm"] = sup;
  d["energy"] = energy;
  d["mbp_ok"] = ok;
  d["status"] = to_string(s.status);
  return d;
}

}  // namespace

PYBIND11_MODULE(ifrk, m) {
  m.doc() = "Integrating factor Runge-Kutta schemes for Allen-Cahn type equations";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<GridMismatch>(m, "GridMismatch", PyExc_ValueError);
  py::register_exception<StepRefused>(m, "StepRefused", PyExc_RuntimeError);

  py::class_<GridSpec>(m, "Grid")
      .def(py::init<int, std::size_t, double>(), py::arg("dim"), py::arg("points"), py::arg("h"))
      .def_static("unit", &GridSpec::unit, py::arg("dim"), py::arg("points"))
      .def_readonly("dim", &GridSpec::dim)
      .def_readonly("points", &GridSpec::points)
      .def_readonly("h", &GridSpec::h)
      .def_property_readonly("size", &GridSpec::size)
      .def("__repr__", [](const GridSpec& g) {
        return "Grid(dim=" + std::to_string(g.dim) + ", points=" + std::to_string(g.points) +
               ", h=" + format_double(g.h) + ")";
      });

  py::class_<LinearOperator>(m, "LinearOperator")
      .def_static("periodic_laplacian", &LinearOperator::periodic_laplacian, py::arg("grid"), py::arg("diffusion"))
      .def_property_readonly("grid", &LinearOperator::grid)
      .def_property_readonly("diffusion", &LinearOperator::diffusion)
      .def_property_readonly("is_spectral", &LinearOperator::is_spectral)
      .def("eigenvalues",
           [](const LinearOperator& op) {
             const auto ev = op.eigenvalues();
             return std::vector<double>(ev.begin(), ev.end());
           })
      .def("to_dense", &LinearOperator::to_dense)
      .def("exp", [](const LinearOperator& op, const Array& u, double scale) {
        return to_array(apply_exponential(op, to_field(op.grid(), u), scale));
      }, py::arg("u"), py::arg("scale"))
      .def("apply", [](const LinearOperator& op, const Array& u) {
        return to_array(apply_operator(op, to_field(op.grid(), u)));
      });

  py::class_<ReactionTerm>(m, "ReactionTerm")
      .def_static("cubic", &ReactionTerm::cubic)
      .def_static("flory_huggins", &ReactionTerm::flory_huggins, py::arg("theta") = 0.8, py::arg("theta_c") = 1.6)
      .def_property_readonly("name", &ReactionTerm::name)
      .def_property_readonly("rho", &ReactionTerm::rho)
      .def_property_readonly("omega_plus", &ReactionTerm::omega_plus)
      .def_property_readonly("omega_minus", &ReactionTerm::omega_minus)
      .def("f", py::vectorize([](ReactionTerm& t, double x) { return t.f(x); }))
      .def("fprime", py::vectorize([](ReactionTerm& t, double x) { return t.fprime(x); }))
      .def("potential", py::vectorize([](ReactionTerm& t, double x) { return t.potential(x); }));

  m.def("schemes", &builtin_names);
  m.def("tableau_info", [](const std::string& scheme, const std::string& term, double theta, double theta_c) {
    return to_python(tableau_info(scheme, TermSpec{term, theta, theta_c}));
  }, py::arg("scheme"), py::arg("term") = "flory_huggins", py::arg("theta") = 0.8, py::arg("theta_c") = 1.6);
  m.def("max_timestep", [](const std::string& scheme, const ReactionTerm& term) {
    return max_timestep(builtin(scheme), term);
  }, py::arg("scheme"), py::arg("term"));

  py::class_<Stepper>(m, "Stepper")
      .def(py::init([](const LinearOperator& op, const ReactionTerm& term, const std::string& scheme, double tau,
                       bool enforce, const std::string& form) {
             return Stepper(op, term, builtin(scheme), tau, StepperOptions{enforce, parse_stage_form(form)});
           }),
           py::arg("op"), py::arg("term"), py::arg("scheme"), py::arg("tau"), py::arg("enforce_mbp") = false,
           py::arg("stage_form") = "shu_osher")
      .def_property_readonly("tau", &Stepper::tau)
      .def_property_readonly("max_timestep", &Stepper::max_timestep)
      .def("step", [](Stepper& s, const Array& u) { return to_array(s.step(to_field(s.op().grid(), u))); })
      .def("integrate", [](Stepper& s, const Array& u0, double t_end, std::size_t record_every) {
        IntegrateOptions opt;
        opt.record_every = record_every;
        const Field start = to_field(s.op().grid(), u0);
        IntegrationResult r;
        {
          py::gil_scoped_release release;
          r = integrate(s, start, t_end, opt);
        }
        return py::make_tuple(to_array(r.final), series_dict(r.series));
      }, py::arg("u0"), py::arg("t_end"), py::arg("record_every") = 1);

  m.def("sup_norm", [](const Array& u) { return sup_norm(std::span<const double>(u.data(), u.size())); });
  m.def("energy", [](const LinearOperator& op, const Array& u, const ReactionTerm& term) {
    return operator_energy(op, to_field(op.grid(), u), term);
  }, py::arg("op"), py::arg("u"), py::arg("term"));

  m.def("make_term", &make_reaction, py::arg("kind"), py::arg("theta") = 0.8, py::arg("theta_c") = 1.6);

  m.def("run_coarsening", [](py::dict overrides) {
    const auto json_text = py::module_::import("json").attr("dumps")(overrides).cast<std::string>();
    const RunConfig cfg = config_from_json(nlohmann::json::parse(json_text), default_config(Experiment::coarsen));
    std::vector<RunResult> runs;
    {
      py::gil_scoped_release release;
      runs = run_coarsening(cfg);
    }
    py::list out;
    for (const auto& r : runs) {
      py::dict d = series_dict(r.run.series);
      d["scheme"] = r.scheme;
      d["tau"] = r.tau;
      d["steps"] = r.run.steps;
      d["final"] = to_array(r.run.final);
      out.append(d);
    }
    return out;
  }, py::arg("config") = py::dict());
}
