#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ctrwlab/cadlag.hpp"
#include "ctrwlab/decompositions.hpp"
#include "ctrwlab/error.hpp"
#include "ctrwlab/expr.hpp"
#include "ctrwlab/integral.hpp"
#include "ctrwlab/metrics.hpp"
#include "ctrwlab/processes.hpp"
#include "ctrwlab/scenario.hpp"
#include "ctrwlab/stats.hpp"

namespace py = pybind11;
using namespace ctrwlab;

namespace {

py::array_t<double> to_array(std::span<const double> v) {
    py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

std::vector<double> to_vec(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    return {a.data(), a.data() + a.size()};
}

// Dicts go through JSON so the bindings share the CLI's strict schema.
nlohmann::json to_json(const py::handle& obj) {
    auto dumps = py::module_::import("json").attr("dumps");
    return nlohmann::json::parse(dumps(obj).cast<std::string>());
}

py::object from_json(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

ProcessConfig make_config(double alpha, const std::string& innovation, std::optional<double> beta,
                          std::vector<double> coefficients, std::int64_t n, double scale) {
    ProcessConfig c;
    c.innovation = {alpha, innovation_mode_from_string(innovation), scale};
    if (beta) c.waiting = WaitingLaw{*beta, 1.0};
    c.coefficients = std::move(coefficients);
    c.n = n;
    c.validate();
    return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "C++ core of ctrwlab";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParamError>(m, "ParamError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());

    py::class_<StepPath>(m, "StepPath")
        .def(py::init([](py::array_t<double, py::array::c_style | py::array::forcecast> t,
                         py::array_t<double, py::array::c_style | py::array::forcecast> v, double horizon) {
                 return StepPath(to_vec(t), to_vec(v), horizon);
             }),
             py::arg("times"), py::arg("values"), py::arg("horizon"))
        .def("__call__", &StepPath::operator(), py::arg("t"))
        .def("left_limit", &StepPath::left_limit, py::arg("t"))
        .def_property_readonly("times", [](const StepPath& p) { return to_array(p.times()); })
        .def_property_readonly("values", [](const StepPath& p) { return to_array(p.values()); })
        .def_property_readonly("horizon", &StepPath::horizon)
        .def("__len__", &StepPath::size)
        .def("__eq__", [](const StepPath& a, const StepPath& b) { return a == b; });

    m.def("total_variation", &total_variation, py::arg("path"), py::arg("t"));
    m.def("m1_modulus", &m1_modulus, py::arg("path"), py::arg("delta"), py::arg("t"));
    m.def("max_eps_increments", &max_eps_increments, py::arg("path"), py::arg("eps"), py::arg("t"));
    m.def("d_uniform", [](const StepPath& x, const StepPath& y) { return d_uniform(x, y).value; });
    m.def("d_j1", [](const StepPath& x, const StepPath& y) { return d_j1(x, y).value; });
    m.def(
        "d_m1",
        [](const StepPath& x, const StepPath& y, int resolution) {
            const auto r = d_m1(x, y, resolution);
            return py::make_tuple(r.value, r.mesh);
        },
        py::arg("x"), py::arg("y"), py::arg("resolution") = 64, "M1 distance and its discretisation mesh");

    m.def(
        "sample_stable",
        [](double alpha, double skew, double scale, double shift, std::uint64_t seed, std::size_t count) {
            return to_array(sample_stable({alpha, skew, scale, shift}, {seed, 0}, count));
        },
        py::arg("alpha"), py::arg("skew") = 0.0, py::arg("scale") = 1.0, py::arg("shift") = 0.0,
        py::arg("seed") = 0, py::arg("count") = 1000);

    m.def(
        "simulate",
        [](double alpha, const std::string& innovation, std::optional<double> beta, std::vector<double> coefficients,
           std::int64_t n, double horizon, double scale, std::uint64_t seed, std::uint64_t stream) {
            const auto b = gen_process(make_config(alpha, innovation, beta, std::move(coefficients), n, scale), horizon,
                                       {seed, stream});
            py::dict d;
            d["x"] = b.x;
            d["counting"] = b.counting;
            d["innovations"] = to_array(b.innovations);
            d["waits"] = to_array(b.waits);
            d["scaling"] = b.scaling();
            return d;
        },
        py::arg("alpha") = 1.5, py::arg("innovation") = "symmetric", py::arg("beta") = py::none(),
        py::arg("coefficients") = std::vector<double>{1.0}, py::arg("n") = 100, py::arg("horizon") = 1.0,
        py::arg("scale") = 1.0, py::arg("seed") = 0, py::arg("stream") = 0,
        "One moving-average (beta=None) or CTRW path with its innovation record.");

    m.def(
        "ito_integral",
        [](const std::string& expr, const StepPath& x) {
            const Expr e = Expr::parse(expr);
            return ito_integral(Integrand::deterministic([e](double t) {
                                    Vars v;
                                    v.t = t;
                                    return e(v);
                                }),
                                x);
        },
        py::arg("expr"), py::arg("x"), "int_0^. f(s-) dX_s for a deterministic f(t) given as an expression");

    m.def(
        "evaluate",
        [](const std::string& expr, double t, double y, double ytilde, double xdel, double s) {
            return Expr::parse(expr)({t, y, ytilde, xdel, s});
        },
        py::arg("expr"), py::arg("t") = 0.0, py::arg("y") = 0.0, py::arg("ytilde") = 0.0, py::arg("xdel") = 0.0,
        py::arg("s") = 0.0);

    m.def(
        "ks_two_sample",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            const auto r = ks_two_sample(SampleSet(a), SampleSet(b));
            return py::make_tuple(r.statistic, r.p_value);
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "wasserstein1", [](const std::vector<double>& a, const std::vector<double>& b) {
            return wasserstein1(SampleSet(a), SampleSet(b));
        },
        py::arg("a"), py::arg("b"));

    m.def(
        "truncated_h_mean",
        [](double alpha, const std::string& innovation, double s, double a) {
            return truncated_h_mean({alpha, innovation_mode_from_string(innovation), 1.0}, s, a);
        },
        py::arg("alpha"), py::arg("innovation"), py::arg("s"), py::arg("a"));

    m.def(
        "run_scenario",
        [](const py::dict& config, int threads, bool write_files) {
            const auto s = Scenario::from_json(to_json(config));
            RunOptions o;
            o.threads = threads;
            o.write_files = write_files;
            DiagnosticReport rep;
            {
                py::gil_scoped_release release;
                rep = run_scenario(s, o);
            }
            return from_json(rep.to_json());
        },
        py::arg("config"), py::arg("threads") = 1, py::arg("write_files") = false,
        "Run a scenario given as a dict with the CLI schema; returns the report as a dict.");
    m.def(
        "canonical_report",
        [](const py::dict& config, int threads) {
            const auto s = Scenario::from_json(to_json(config));
            RunOptions o;
            o.threads = threads;
            o.write_files = false;
            py::gil_scoped_release release;
            return run_scenario(s, o).canonical();
        },
        py::arg("config"), py::arg("threads") = 1);
}
