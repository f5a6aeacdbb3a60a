#include "carter/catalog.hpp"

#include <cmath>

#include "carter/bracket.hpp"
#include "carter/geometry.hpp"
#include "carter/independence.hpp"
#include "carter/orbit.hpp"
#include "carter/theorem.hpp"

namespace carter {

namespace {

const char* kExample1 = R"json({
  "name": "example1",
  "parameters": {"alpha": 1.0, "beta": 1.0, "gamma": 1.0},
  "charts": [
    {"name": "cartesian", "coords": ["x", "y"], "momenta": ["p_x", "p_y"],
     "to_cartesian": ["x", "y"], "domain": ["y"],
     "sample_ranges": {"x": [-1.2, 1.2], "y": [0.2, 1.4]}},
    {"name": "polar", "coords": ["r", "th"], "momenta": ["p_r", "p_th"],
     "to_cartesian": ["r*cos(th)", "r*sin(th)"], "domain": ["r", "sin(th)"],
     "sample_ranges": {"r": [0.3, 1.5], "th": [0.25, 2.9]}},
    {"name": "parabolic", "coords": ["xi", "eta"], "momenta": ["p_xi", "p_eta"],
     "to_cartesian": ["(xi - eta)/2", "sqrt(xi*eta)"], "domain": ["xi", "eta"],
     "sample_ranges": {"xi": [0.3, 1.7], "eta": [0.3, 1.7]}}
  ],
  "presentations": [
    {"chart": "polar",
     "hamiltonian": "((r*p_r)^2/2 + p_th^2/2 + alpha*r + beta/(cos(th) + 1) + gamma/(1 - cos(th)))/r^2",
     "separable": {"kind": "full", "convention_scale": 2.0, "pairs": [
       {"U": "r^2", "H": "r^2*p_r^2/2 + alpha*r", "block": [0]},
       {"U": "0", "H": "p_th^2/2 + beta/(cos(th) + 1) + gamma/(1 - cos(th))", "block": [1]}
     ]}},
    {"chart": "parabolic",
     "hamiltonian": "(2*xi*p_xi^2 + 2*eta*p_eta^2 + 2*alpha + 2*beta/xi + 2*gamma/eta)/(xi + eta)",
     "separable": {"kind": "full", "pairs": [
       {"U": "xi", "H": "4*xi*p_xi^2 + 4*beta/xi + 4*alpha", "block": [0]},
       {"U": "eta", "H": "4*eta*p_eta^2 + 4*gamma/eta", "block": [1]}
     ]}},
    {"chart": "cartesian",
     "hamiltonian": "(p_x^2 + p_y^2)/2 + (alpha + beta/(x + sqrt(x^2 + y^2)) + gamma/(sqrt(x^2 + y^2) - x))/sqrt(x^2 + y^2)"}
  ],
  "declared_constants": [
    {"name": "K1", "chart": "cartesian",
     "expr": "(x*p_y - y*p_x)^2/2 + beta*sqrt(x^2 + y^2)/(sqrt(x^2 + y^2) + x) + gamma*sqrt(x^2 + y^2)/(sqrt(x^2 + y^2) - x)"},
    {"name": "K3", "chart": "cartesian",
     "expr": "2*p_y*(x*p_y - y*p_x) + (2/sqrt(x^2 + y^2))*(gamma*(sqrt(x^2 + y^2) + x)/(sqrt(x^2 + y^2) - x) - beta*(sqrt(x^2 + y^2) - x)/(sqrt(x^2 + y^2) + x)) - 2*alpha*(sqrt(x^2 + y^2) - x)/sqrt(x^2 + y^2)"}
  ]
})json";

const char* kExample2 = R"json({
  "name": "example2",
  "parameters": {"alpha": 1.0, "beta": 1.0, "gamma": 1.0},
  "charts": [
    {"name": "cartesian", "coords": ["x", "y"], "momenta": ["p_x", "p_y"],
     "to_cartesian": ["x", "y"], "domain": ["x", "y"],
     "sample_ranges": {"x": [0.2, 1.2], "y": [0.2, 1.2]}},
    {"name": "rotparabolic", "coords": ["sig", "tau"], "momenta": ["p_sig", "p_tau"],
     "to_cartesian": ["sig*tau", "(tau^2 - sig^2)/2"],
     "domain": ["sig", "tau", "tau - sig"],
     "sample_ranges": {"sig": [0.3, 1.0], "tau": [1.1, 1.8]}},
    {"name": "parabolic", "coords": ["xi", "eta"], "momenta": ["p_xi", "p_eta"],
     "to_cartesian": ["(xi - eta)/2", "sqrt(xi*eta)"], "domain": ["xi", "eta", "xi - eta"],
     "sample_ranges": {"xi": [1.0, 1.7], "eta": [0.3, 0.9]}}
  ],
  "presentations": [
    {"chart": "rotparabolic",
     "hamiltonian": "(p_sig^2/2 + p_tau^2/2 + 2*alpha + sqrt(2)*beta*(sig + tau) + sqrt(2)*gamma*(tau - sig))/(sig^2 + tau^2)",
     "separable": {"kind": "full", "pairs": [
       {"U": "sig^2", "H": "p_sig^2 + 4*alpha + 2*sqrt(2)*(beta - gamma)*sig", "block": [0]},
       {"U": "tau^2", "H": "p_tau^2 + 2*sqrt(2)*(beta + gamma)*tau", "block": [1]}
     ]}},
    {"chart": "parabolic",
     "hamiltonian": "(2*xi*p_xi^2 + 2*eta*p_eta^2 + 2*alpha + 2*beta*sqrt(xi) + 2*gamma*sqrt(eta))/(xi + eta)",
     "separable": {"kind": "full", "pairs": [
       {"U": "xi", "H": "4*xi*p_xi^2 + 4*beta*sqrt(xi) + 4*alpha", "block": [0]},
       {"U": "eta", "H": "4*eta*p_eta^2 + 4*gamma*sqrt(eta)", "block": [1]}
     ]}},
    {"chart": "cartesian",
     "hamiltonian": "(p_x^2 + p_y^2)/2 + (alpha + beta*sqrt(x + sqrt(x^2 + y^2)) + gamma*sqrt(sqrt(x^2 + y^2) - x))/sqrt(x^2 + y^2)"}
  ],
  "declared_constants": [
    {"name": "K1", "chart": "cartesian",
     "expr": "(4*sqrt(x^2 + y^2)*p_x*(x*p_y - y*p_x) + 2*sqrt(2)*((beta + gamma)*(sqrt(x^2 + y^2) - y)*sqrt(sqrt(x^2 + y^2) + y) - (beta - gamma)*(sqrt(x^2 + y^2) + y)*sqrt(sqrt(x^2 + y^2) - y)) - 4*alpha*(sqrt(x^2 + y^2) + y))/(2*sqrt(x^2 + y^2))"},
    {"name": "K3", "chart": "cartesian",
     "expr": "2*(sqrt(x^2 + y^2)*p_y*(x*p_y - y*p_x) + gamma*(sqrt(x^2 + y^2) + x)*sqrt(sqrt(x^2 + y^2) - x) - beta*(sqrt(x^2 + y^2) - x)*sqrt(sqrt(x^2 + y^2) + x) - alpha*(sqrt(x^2 + y^2) - x))/sqrt(x^2 + y^2)"}
  ]
})json";

const char* kExample3 = R"json({
  "name": "example3",
  "parameters": {},
  "charts": [
    {"name": "rotparabolic", "coords": ["sig", "tau"], "momenta": ["p_sig", "p_tau"],
     "to_cartesian": ["sig*tau", "(tau^2 - sig^2)/2"], "domain": ["sig^2 + tau^2"],
     "sample_ranges": {"sig": [0.3, 1.2], "tau": [0.3, 1.2]}},
    {"name": "cartesian", "coords": ["x", "y"], "momenta": ["p_x", "p_y"],
     "to_cartesian": ["x", "y"], "domain": [],
     "sample_ranges": {"x": [-1.2, 1.2], "y": [-1.2, 1.2]}}
  ],
  "presentations": [
    {"chart": "rotparabolic",
     "hamiltonian": "(p_sig^2 + p_tau^2 + tau^4 - sig^4)/(sig^2 + tau^2)",
     "separable": {"kind": "full", "convention_scale": 2.0, "pairs": [
       {"U": "sig^2", "H": "p_sig^2 - sig^4", "block": [0]},
       {"U": "tau^2", "H": "p_tau^2 + tau^4", "block": [1]}
     ]}},
    {"chart": "cartesian", "hamiltonian": "p_x^2 + p_y^2 + 2*y"}
  ],
  "declared_constants": [
    {"name": "K1", "chart": "cartesian", "expr": "2*p_x*(x*p_y - y*p_x) + x^2"},
    {"name": "K2", "chart": "cartesian", "expr": "p_x"}
  ]
})json";

const char* kEvans = R"json({
  "name": "evans",
  "parameters": {"k": 1.0, "k1": 1.0, "k2": 1.0},
  "charts": [
    {"name": "cartesian", "coords": ["x", "y", "z"], "momenta": ["p_x", "p_y", "p_z"],
     "to_cartesian": ["x", "y", "z"], "domain": ["x", "y"],
     "sample_ranges": {"x": [0.4, 1.2], "y": [0.4, 1.2], "z": [0.3, 1.0]}},
    {"name": "spherical", "coords": ["r", "th", "ph"], "momenta": ["p_r", "p_th", "p_ph"],
     "to_cartesian": ["r*sin(th)*cos(ph)", "r*sin(th)*sin(ph)", "r*cos(th)"],
     "domain": ["r", "sin(th)", "cos(ph)", "sin(ph)"],
     "sample_ranges": {"r": [0.5, 1.4], "th": [0.4, 1.2], "ph": [0.3, 1.2]}},
    {"name": "rotparabolic", "coords": ["xi", "eta", "ph"], "momenta": ["p_xi", "p_eta", "p_ph"],
     "to_cartesian": ["xi*eta*cos(ph)", "xi*eta*sin(ph)", "(eta^2 - xi^2)/2"],
     "domain": ["xi", "eta", "cos(ph)", "sin(ph)"],
     "sample_ranges": {"xi": [0.4, 1.0], "eta": [1.1, 1.6], "ph": [0.3, 1.2]}}
  ],
  "presentations": [
    {"chart": "spherical",
     "hamiltonian": "(p_r^2 + p_th^2/r^2 + p_ph^2/(r^2*sin(th)^2))/2 - k/r + k1/(r^2*sin(th)^2*cos(ph)^2) + k2/(r^2*sin(th)^2*sin(ph)^2)",
     "separable": {"kind": "partial", "convention_scale": 2.0, "pairs": [
       {"U": "r^2", "H": "r^2*p_r^2/2 - k*r", "block": [0]},
       {"U": "0", "H": "p_th^2/2 + p_ph^2/(2*sin(th)^2) + k1/(sin(th)^2*cos(ph)^2) + k2/(sin(th)^2*sin(ph)^2)", "block": [1, 2]}
     ],
     "nested": [
       {"U": "sin(th)^2", "H": "sin(th)^2*p_th^2/2", "block": [1]},
       {"U": "0", "H": "p_ph^2/2 + k1/cos(ph)^2 + k2/sin(ph)^2", "block": [2]}
     ]}},
    {"chart": "rotparabolic",
     "hamiltonian": "(p_xi^2 + p_eta^2 + (eta^2 + xi^2)*p_ph^2/(xi^2*eta^2) - 4*k + 2*k1*(eta^2 + xi^2)/(xi^2*eta^2*cos(ph)^2) + 2*k2*(eta^2 + xi^2)/(xi^2*eta^2*sin(ph)^2))/(2*(eta^2 + xi^2))",
     "separable": {"kind": "partial",
       "folds": {"I2": "p_ph^2/2 + k1/cos(ph)^2 + k2/sin(ph)^2"},
       "pairs": [
         {"U": "eta^2", "H": "p_eta^2 + 2*I2/eta^2 - 2*k", "block": [1]},
         {"U": "xi^2", "H": "p_xi^2 + 2*I2/xi^2 - 2*k", "block": [0, 2]}
     ]}},
    {"chart": "cartesian",
     "hamiltonian": "(p_x^2 + p_y^2 + p_z^2)/2 - k/sqrt(x^2 + y^2 + z^2) + k1/x^2 + k2/y^2"}
  ],
  "declared_constants": [
    {"name": "I1", "chart": "cartesian",
     "expr": "((y*p_z - z*p_y)^2 + (z*p_x - x*p_z)^2 + (x*p_y - y*p_x)^2)/2 + k1*(x^2 + y^2 + z^2)/x^2 + k2*(x^2 + y^2 + z^2)/y^2"},
    {"name": "I2", "chart": "cartesian",
     "expr": "(x*p_y - y*p_x)^2/2 + k1*(x^2 + y^2)/x^2 + k2*(x^2 + y^2)/y^2"},
    {"name": "I4", "chart": "cartesian",
     "expr": "2*(sqrt(x^2 + y^2 + z^2) - z)*((p_x^2 + p_y^2 + p_z^2)/2 - k/sqrt(x^2 + y^2 + z^2) + k1/x^2 + k2/y^2) - ((sqrt(x^2 + y^2 + z^2) + z)*(x*p_x + y*p_y)^2/(x^2 + y^2) - 2*(x*p_x + y*p_y)*p_z + (sqrt(x^2 + y^2 + z^2) - z)*p_z^2) - 2*((x*p_y - y*p_x)^2/2 + k1*(x^2 + y^2)/x^2 + k2*(x^2 + y^2)/y^2)/(sqrt(x^2 + y^2 + z^2) - z) + 2*k"}
  ]
})json";

const char* kGeneric2Dof = R"json({
  "name": "generic2dof",
  "parameters": {},
  "charts": [
    {"name": "cartesian", "coords": ["r", "mu"], "momenta": ["p_r", "p_mu"],
     "to_cartesian": ["r", "mu"], "domain": ["r^2 + mu^2"],
     "sample_ranges": {"r": [0.3, 1.2], "mu": [0.3, 1.2]}}
  ],
  "presentations": [
    {"chart": "cartesian",
     "hamiltonian": "(p_r^2 + p_mu^2 + r^4 + mu^4)/(2*(r^2 + mu^2))",
     "separable": {"kind": "full", "pairs": [
       {"U": "r^2", "H": "p_r^2 + r^4", "block": [0]},
       {"U": "mu^2", "H": "p_mu^2 + mu^4", "block": [1]}
     ]}}
  ],
  "declared_constants": [
    {"name": "K1", "chart": "cartesian",
     "expr": "(r^2*(p_mu^2 + mu^4) - mu^2*(p_r^2 + r^4))/(r^2 + mu^2)"}
  ]
})json";

std::vector<CatalogEntry> build_catalog() {
    std::vector<CatalogEntry> out;

    CatalogEntry e1;
    e1.name = "example1";
    e1.summary = "2-DOF Coulomb-like potential, separable in polar and parabolic charts";
    e1.system = load_system_text(kExample1);
    e1.expected = {2, 3};
    e1.orbit = OrbitSpec{"polar", {1.0, 1.2}, {0.3, 0.4}, 1e-3, 5000,
                         "implicit_midpoint", 1e-6};
    out.push_back(std::move(e1));

    CatalogEntry e2;
    e2.name = "example2";
    e2.summary = "2-DOF radical potential, separable in rotational-parabolic and "
                 "parabolic charts";
    e2.system = load_system_text(kExample2);
    e2.expected = {2, 3};
    e2.orbit = OrbitSpec{"rotparabolic", {0.6, 1.3}, {0.3, -0.2}, 1e-3, 5000,
                         "implicit_midpoint", 1e-6};
    out.push_back(std::move(e2));

    CatalogEntry e3;
    e3.name = "example3";
    e3.summary = "2-DOF linear potential, quartic in the rotational-parabolic chart";
    e3.system = load_system_text(kExample3);
    e3.expected = {2, 3};
    e3.orbit = OrbitSpec{"rotparabolic", {1.0, 0.5}, {0.2, -0.3}, 1e-3, 100000,
                         "implicit_midpoint", 1e-6};
    out.push_back(std::move(e3));

    CatalogEntry ev;
    ev.name = "evans";
    ev.summary = "3-DOF Kepler plus inverse-square bars; nested split in the "
                 "spherical chart, folded split in the rotational-parabolic chart";
    ev.system = load_system_text(kEvans);
    ev.expected = {2, 4};
    ev.orbit = OrbitSpec{"spherical", {1.0, 0.8, 0.7}, {0.3, -0.2, 0.25}, 2e-4, 5000,
                         "implicit_midpoint", 1e-6};
    out.push_back(std::move(ev));

    CatalogEntry g;
    g.name = "generic2dof";
    g.summary = "editable 2-DOF quotient-form template; export and swap the U/H pieces";
    g.system = load_system_text(kGeneric2Dof);
    g.expected = {2, 2};
    g.orbit = OrbitSpec{"cartesian", {0.8, 0.6}, {0.2, 0.3}, 2e-4, 5000,
                        "implicit_midpoint", 1e-6};
    out.push_back(std::move(g));

    return out;
}

Chart sampling_chart(std::vector<std::string> coords, std::vector<std::string> momenta,
                     std::vector<std::string> domain,
                     std::map<std::string, std::array<double, 2>> ranges) {
    Chart c;
    c.name = "sampling";
    c.coords = std::move(coords);
    c.momenta = std::move(momenta);
    for (const auto& q : c.coords) c.to_cartesian.push_back(Expr::symbol(q));
    for (const auto& d : domain) c.domain.push_back(parse(d));
    c.sample_ranges = std::move(ranges);
    return c;
}

SeparablePair make_pair(const std::string& u, const std::string& h, std::vector<int> block) {
    return {parse(u), parse(h), std::move(block)};
}

std::vector<ReproductionCase> build_cases() {
    std::vector<ReproductionCase> out;

    {
        ReproductionCase c;
        c.name = "example1-polar-K1";
        c.chart = sampling_chart({"r", "th"}, {"p_r", "p_th"}, {"r", "sin(th)"},
                                 {{"r", {0.3, 1.5}}, {"th", {0.25, 2.9}}});
        c.params = {{"alpha", 1.0}, {"beta", 1.0}, {"gamma", 1.0}};
        c.structure.kind = SplitKind::Full;
        c.structure.pairs = {
            make_pair("r^2", "r^2*p_r^2/2 + alpha*r", {0}),
            make_pair("0", "p_th^2/2 + beta/(cos(th) + 1) + gamma/(1 - cos(th))", {1})};
        c.reference_form = parse("p_th^2/2 + beta/(cos(th) + 1) + gamma/(1 - cos(th))");
        out.push_back(std::move(c));
    }
    {
        ReproductionCase c;
        c.name = "example1-parabolic-K3";
        c.chart = sampling_chart({"xi", "eta"}, {"p_xi", "p_eta"}, {"xi", "eta"},
                                 {{"xi", {0.3, 1.7}}, {"eta", {0.3, 1.7}}});
        c.params = {{"beta", 1.0}, {"gamma", 1.0}};
        c.structure.kind = SplitKind::Full;
        c.structure.pairs = {make_pair("xi", "xi^2*p_xi^2 + beta/xi", {0}),
                             make_pair("eta", "eta^2*p_eta^2 + gamma/eta", {1})};
        c.reference_form = parse(
            "(xi*(eta^2*p_eta^2 + gamma/eta) - eta*(xi^2*p_xi^2 + beta/xi))/(eta + xi)");
        out.push_back(std::move(c));
    }
    {
        ReproductionCase c;
        c.name = "example2-rotparabolic-K1";
        c.chart = sampling_chart({"sig", "tau"}, {"p_sig", "p_tau"}, {"sig", "tau"},
                                 {{"sig", {0.3, 1.2}}, {"tau", {0.3, 1.2}}});
        c.params = {{"beta", 1.0}, {"gamma", 1.0}};
        c.structure.kind = SplitKind::Full;
        c.structure.pairs = {
            make_pair("sig^2", "p_sig^2 + (beta + gamma)*sig", {0}),
            make_pair("tau^2", "p_tau^2 + (beta - gamma)*tau", {1})};
        c.reference_form = parse(
            "(tau^2*(p_sig^2 + (beta + gamma)*sig) - sig^2*(p_tau^2 + (beta - gamma)*tau))"
            "/(sig^2 + tau^2)");
        c.sign = -1.0; // the published form separates the other block first
        out.push_back(std::move(c));
    }
    {
        ReproductionCase c;
        c.name = "example2-parabolic-K3";
        c.chart = sampling_chart({"xi", "eta"}, {"p_xi", "p_eta"}, {"xi", "eta"},
                                 {{"xi", {0.3, 1.7}}, {"eta", {0.3, 1.7}}});
        c.params = {{"beta", 1.0}, {"gamma", 1.0}};
        c.structure.kind = SplitKind::Full;
        c.structure.pairs = {make_pair("xi", "xi^2*p_xi^2 + beta*sqrt(xi)", {0}),
                             make_pair("eta", "eta^2*p_eta^2 + gamma*sqrt(eta)", {1})};
        c.reference_form = parse(
            "(xi*(eta^2*p_eta^2 + gamma*sqrt(eta)) - eta*(xi^2*p_xi^2 + beta*sqrt(xi)))"
            "/(eta + xi)");
        out.push_back(std::move(c));
    }
    {
        ReproductionCase c;
        c.name = "example3-rotparabolic-K1";
        c.chart = sampling_chart({"sig", "tau"}, {"p_sig", "p_tau"}, {"sig^2 + tau^2"},
                                 {{"sig", {0.3, 1.2}}, {"tau", {0.3, 1.2}}});
        c.structure.kind = SplitKind::Full;
        c.structure.pairs = {make_pair("sig^2", "p_sig^2 - sig^4", {0}),
                             make_pair("tau^2", "p_tau^2 + tau^4", {1})};
        c.reference_form = parse(
            "(sig^2*(p_tau^2 + tau^4) - tau^2*(p_sig^2 - sig^4))/(sig^2 + tau^2)");
        out.push_back(std::move(c));
    }
    {
        ReproductionCase c;
        c.name = "evans-spherical-I1";
        c.chart = sampling_chart({"r", "th", "ph"}, {"p_r", "p_th", "p_ph"},
                                 {"r", "sin(th)", "cos(ph)", "sin(ph)"},
                                 {{"r", {0.5, 1.4}}, {"th", {0.4, 1.2}}, {"ph", {0.3, 1.2}}});
        c.params = {{"k", 1.0}, {"k1", 1.0}, {"k2", 1.0}};
        c.structure.kind = SplitKind::Partial;
        c.structure.pairs = {
            make_pair("r^2", "r^2*p_r^2/2 - k*r", {0}),
            make_pair("0",
                      "p_th^2/2 + p_ph^2/(2*sin(th)^2) + k1/(sin(th)^2*cos(ph)^2)"
                      " + k2/(sin(th)^2*sin(ph)^2)",
                      {1, 2})};
        c.reference_form = parse(
            "(p_th^2 + p_ph^2/sin(th)^2)/2 + k1/(sin(th)^2*cos(ph)^2)"
            " + k2/(sin(th)^2*sin(ph)^2)");
        out.push_back(std::move(c));
    }
    {
        ReproductionCase c;
        c.name = "evans-nested-I2";
        c.chart = sampling_chart({"r", "th", "ph"}, {"p_r", "p_th", "p_ph"},
                                 {"r", "sin(th)", "cos(ph)", "sin(ph)"},
                                 {{"r", {0.5, 1.4}}, {"th", {0.4, 1.2}}, {"ph", {0.3, 1.2}}});
        c.params = {{"k", 1.0}, {"k1", 1.0}, {"k2", 1.0}};
        c.structure.kind = SplitKind::Partial;
        c.structure.pairs = {
            make_pair("r^2", "r^2*p_r^2/2 - k*r", {0}),
            make_pair("0",
                      "p_th^2/2 + p_ph^2/(2*sin(th)^2) + k1/(sin(th)^2*cos(ph)^2)"
                      " + k2/(sin(th)^2*sin(ph)^2)",
                      {1, 2})};
        c.structure.nested = {{make_pair("sin(th)^2", "sin(th)^2*p_th^2/2", {1}),
                               make_pair("0", "p_ph^2/2 + k1/cos(ph)^2 + k2/sin(ph)^2",
                                         {2})}};
        c.reference_form = parse("p_ph^2/2 + k1/cos(ph)^2 + k2/sin(ph)^2");
        c.nested = true;
        out.push_back(std::move(c));
    }
    {
        ReproductionCase c;
        c.name = "evans-rotparabolic-I4";
        c.chart = sampling_chart({"eta", "xi"}, {"p_eta", "p_xi"}, {"eta", "xi"},
                                 {{"eta", {0.4, 1.4}}, {"xi", {0.4, 1.4}}});
        c.params = {{"I2", 0.8}, {"k", 1.1}};
        c.structure.kind = SplitKind::Partial;
        c.structure.pairs = {make_pair("eta^2", "p_eta^2 + I2/eta^2 - 2*k", {0}),
                             make_pair("xi^2", "p_xi^2 + I2/xi^2 - 2*k", {1})};
        c.reference_form = parse(
            "(eta^2*(p_xi^2 + I2/xi^2 - 2*k) - xi^2*(p_eta^2 + I2/eta^2 - 2*k))"
            "/(eta^2 + xi^2)");
        out.push_back(std::move(c));
    }
    return out;
}

} // namespace

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = build_catalog();
    return entries;
}

const CatalogEntry& catalog_entry(const std::string& name) {
    for (const auto& e : catalog())
        if (e.name == name) return e;
    throw ModelError("no catalog entry named '" + name + "'");
}

std::vector<std::string> list_catalog() {
    std::vector<std::string> names;
    for (const auto& e : catalog()) names.push_back(e.name);
    return names;
}

const std::vector<ReproductionCase>& reproduction_cases() {
    static const std::vector<ReproductionCase> cases = build_cases();
    return cases;
}

// ---------------------------------------------------------------------------
// verification pipeline

namespace {

std::vector<std::pair<std::string, CarterConstant>> engine_constants(
    const Presentation& pres, const Chart& chart) {
    std::vector<std::pair<std::string, CarterConstant>> out;
    const SeparableStructure& s = *pres.separable;
    std::vector<CarterConstant> cs =
        s.nested ? nested_constants(s, *s.nested, chart) : carter_constants(s);
    for (std::size_t i = 0; i < cs.size(); ++i)
        out.emplace_back(pres.chart + ":kappa_" + std::to_string(i + 1),
                         std::move(cs[i]));
    return out;
}

} // namespace

VerificationReport run_system(const SystemDefinition& sys, const Tolerances& tol,
                              std::uint64_t seed,
                              const std::optional<OrbitSpec>& orbit,
                              const ExpectedVerdicts* expected) {
    VerificationReport rep;
    rep.system = sys.name;
    rep.seed = static_cast<int>(seed);

    // stage 1: separability and assembly
    for (const Presentation& pres : sys.presentations) {
        if (!pres.separable) continue;
        const Chart& chart = sys.chart(pres.chart);
        auto violations = validate_separability(*pres.separable, chart, sys.parameters);
        for (const auto& v : violations) {
            rep.separability_ok = false;
            rep.separability_violations.push_back(
                pres.chart + ": pair " + std::to_string(v.pair_index) + " " + v.which +
                " depends on '" + v.symbol + "'");
        }
        Expr assembled = assemble_hamiltonian(*pres.separable);
        StateSampler sampler(chart, sys.parameters, seed + 11);
        for (int i = 0; i < 100; ++i) {
            PhaseState s = sampler.next();
            Environment env = chart.state_env(s, sys.parameters);
            double h = evaluate(pres.hamiltonian, env);
            double a = pres.separable->convention_scale * evaluate(assembled, env);
            rep.assembly_residual =
                std::max(rep.assembly_residual, std::fabs(h - a) / (1.0 + std::fabs(h)));
        }
    }
    bool assembly_ok = rep.assembly_residual <= tol.assembly;

    // stage 2: conservation of engine-derived and declared constants
    for (const Presentation& pres : sys.presentations) {
        if (!pres.separable) continue;
        const Chart& chart = sys.chart(pres.chart);
        for (const auto& [name, c] : engine_constants(pres, chart)) {
            BracketReport br =
                conservation_check(c.quotient_form, pres.hamiltonian, chart,
                                   sys.parameters, tol.samples, tol.bracket, seed + 23,
                                   name, "H");
            rep.constants.push_back({name, print(c.quotient_form), br.max_abs, br.pass});
        }
    }
    for (const DeclaredConstant& d : sys.declared_constants) {
        const Presentation* pres = sys.presentation_in(d.chart);
        if (!pres) continue;
        const Chart& chart = sys.chart(d.chart);
        BracketReport br = conservation_check(d.expr, pres->hamiltonian, chart,
                                              sys.parameters, tol.samples, tol.bracket,
                                              seed + 37, d.name, "H");
        rep.constants.push_back({d.name, print(d.expr), br.max_abs, br.pass});
    }

    // stage 3: cross-chart equivalence
    if (sys.presentations.size() >= 2) {
        for (auto& r :
             verify_chart_equivalence(sys, tol.samples, tol.equivalence, seed + 41))
            rep.chart_equivalence.push_back({r.pair, r.residual, r.pass});
    }

    // stage 4: gradient rank of {H} + declared constants in the reference chart
    const Chart* ref = sys.reference_chart();
    const Presentation* ref_pres = ref ? sys.presentation_in(ref->name) : nullptr;
    if (ref_pres) {
        std::vector<Expr> fs{ref_pres->hamiltonian};
        std::vector<std::string> names{"H"};
        for (const DeclaredConstant& d : sys.declared_constants) {
            if (d.chart != ref->name) continue;
            fs.push_back(d.expr);
            names.push_back(d.name);
        }
        if (fs.size() >= 2) {
            RankReport rr = functional_rank(fs, names, *ref, sys.parameters,
                                            tol.rank_samples, tol.rank_rel, seed + 53);
            rep.rank.modal = rr.modal_rank;
            rep.rank.per_sample_offmodal = rr.off_modal;
            rep.rank.expected = expected ? expected->modal_rank : 0;
            rep.rank.pass = rep.rank.expected == 0
                                ? true
                                : rr.modal_rank == rep.rank.expected &&
                                      20 * (tol.rank_samples - rr.off_modal) >=
                                          19 * tol.rank_samples;
        }
    }

    // stage 5: one drift orbit
    if (orbit) {
        const Presentation* pres = sys.presentation_in(orbit->chart);
        if (!pres) throw ModelError("orbit chart '" + orbit->chart + "' has no presentation");
        const Chart& chart = sys.chart(orbit->chart);
        std::vector<std::pair<std::string, Expr>> invariants{{"H", pres->hamiltonian}};
        if (pres->separable)
            for (const auto& [name, c] : engine_constants(*pres, chart))
                invariants.emplace_back(name, c.quotient_form);
        PhaseState s0;
        s0.chart = orbit->chart;
        s0.q = orbit->q0;
        s0.p = orbit->p0;
        Trajectory traj = integrate(pres->hamiltonian, s0, chart, sys.parameters,
                                    orbit->dt, orbit->steps, orbit->method, invariants);
        VerificationReport::OrbitResult res;
        res.method = orbit->method;
        res.dt = orbit->dt;
        res.steps = orbit->steps;
        res.max_rel_drift = traj.max_rel_drift();
        res.pass = traj.status == OrbitStatus::Ok && res.max_rel_drift <= orbit->drift_tol;
        rep.orbit = res;
    }

    rep.pass = rep.separability_ok && assembly_ok;
    for (const auto& c : rep.constants) rep.pass = rep.pass && c.pass;
    for (const auto& p : rep.chart_equivalence) rep.pass = rep.pass && p.pass;
    rep.pass = rep.pass && rep.rank.pass;
    if (rep.orbit) rep.pass = rep.pass && rep.orbit->pass;
    return rep;
}

VerificationReport run_entry(const std::string& name, const Tolerances& tol,
                             std::uint64_t seed, const Environment& param_overrides,
                             const std::optional<OrbitSpec>& orbit_override) {
    const CatalogEntry& entry = catalog_entry(name);
    SystemDefinition sys = entry.system;
    for (const auto& [key, val] : param_overrides) {
        if (!sys.parameters.count(key))
            throw ModelError("system '" + name + "' has no parameter '" + key + "'");
        sys.parameters[key] = val;
    }
    return run_system(sys, tol, seed, orbit_override ? orbit_override : entry.orbit,
                      &entry.expected);
}

} // namespace carter
