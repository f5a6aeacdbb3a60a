#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "carter/catalog.hpp"
#include "carter/orbit.hpp"
#include "carter/theorem.hpp"

namespace py = pybind11;
using namespace carter;

namespace {

Environment to_env(const py::dict& d) {
    Environment env;
    for (auto item : d) env[py::cast<std::string>(item.first)] = py::cast<double>(item.second);
    return env;
}

/// constants for every separable presentation, keyed by chart name
py::dict system_constants(const SystemDefinition& sys) {
    py::dict out;
    for (const Presentation& pres : sys.presentations) {
        if (!pres.separable) continue;
        const SeparableStructure& s = *pres.separable;
        py::list forms;
        if (s.pairs.size() >= 2 || s.nested) {
            auto cs = s.nested ? nested_constants(s, *s.nested, sys.chart(pres.chart))
                               : carter_constants(s);
            for (const auto& c : cs) {
                py::dict d;
                d["index"] = c.index;
                d["quotient"] = print(c.quotient_form);
                d["product"] = print(c.product_form);
                forms.append(d);
            }
        }
        out[py::str(pres.chart)] = forms;
    }
    return out;
}

std::string verify_catalog(const std::string& name, int samples, std::uint64_t seed,
                           const py::dict& params) {
    Tolerances tol;
    if (samples > 0) tol.samples = samples;
    return run_entry(name, tol, seed, to_env(params)).to_json();
}

std::string verify_text(const std::string& json_text, int samples, std::uint64_t seed) {
    Tolerances tol;
    if (samples > 0) tol.samples = samples;
    return run_system(load_system_text(json_text), tol, seed).to_json();
}

std::string orbit_csv(const std::string& name, double dt, int steps) {
    const CatalogEntry& entry = catalog_entry(name);
    if (!entry.orbit) throw ModelError("entry '" + name + "' has no orbit");
    OrbitSpec spec = *entry.orbit;
    if (dt > 0.0) spec.dt = dt;
    if (steps > 0) spec.steps = steps;
    const SystemDefinition& sys = entry.system;
    const Presentation* pres = sys.presentation_in(spec.chart);
    const Chart& chart = sys.chart(spec.chart);
    std::vector<std::pair<std::string, Expr>> invariants{{"H", pres->hamiltonian}};
    PhaseState s0{spec.chart, spec.q0, spec.p0};
    return trajectory_csv(integrate(pres->hamiltonian, s0, chart, sys.parameters,
                                    spec.dt, spec.steps, spec.method, invariants),
                          chart);
}

} // namespace

PYBIND11_MODULE(cartersep, m) {
    m.doc() = "constants of motion from separably structured Hamiltonians";

    m.def("catalog_list", &list_catalog, "names of the built-in systems");
    m.def("export_system", [](const std::string& name) {
        return system_to_json(catalog_entry(name).system);
    }, py::arg("name"), "built-in system as definition-schema JSON");

    m.def("evaluate", [](const std::string& expr, const py::dict& env) {
        return evaluate(parse(expr), to_env(env));
    }, py::arg("expr"), py::arg("env"));
    m.def("partial", [](const std::string& expr, const std::string& var, const py::dict& env) {
        return partial(parse(expr), var, to_env(env));
    }, py::arg("expr"), py::arg("var"), py::arg("env"));

    m.def("constants", [](const std::string& name) {
        return system_constants(catalog_entry(name).system);
    }, py::arg("name"), "derived constants per chart, both closed forms");
    m.def("constants_from_json", [](const std::string& text) {
        return system_constants(load_system_text(text));
    }, py::arg("json_text"));

    m.def("verify", &verify_catalog, py::arg("name"), py::arg("samples") = 0,
          py::arg("seed") = 42, py::arg("params") = py::dict(),
          "run the verification pipeline on a built-in system; returns report JSON");
    m.def("verify_from_json", &verify_text, py::arg("json_text"),
          py::arg("samples") = 0, py::arg("seed") = 42);

    m.def("orbit_csv", &orbit_csv, py::arg("name"), py::arg("dt") = 0.0,
          py::arg("steps") = 0, "integrate an entry's reference orbit to CSV");

    py::register_exception<ParseError>(m, "ExprParseError", PyExc_ValueError);
    py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
}
