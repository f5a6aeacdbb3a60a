#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "carter/catalog.hpp"
#include "carter/orbit.hpp"
#include "carter/theorem.hpp"
#include "oracle.hpp"

using namespace carter;

namespace {

Chart chart_1d() {
    Chart c = oracle::identity_chart(1);
    c.coords = {"q"};
    c.momenta = {"p"};
    c.to_cartesian = {parse("q")};
    c.sample_ranges = {{"q", {-1.5, 1.5}}};
    return c;
}

/// oscillator error at t = steps*dt against the closed-form solution
double oscillator_error(const std::string& method, double dt, int steps) {
    Chart c = chart_1d();
    PhaseState s0{"cartesian", {1.0}, {0.0}};
    Trajectory t = integrate(parse("(p^2 + q^2)/2"), s0, c, {}, dt, steps, method, {});
    REQUIRE(t.status == OrbitStatus::Ok);
    double T = dt * steps;
    double q = t.states.back().q[0], p = t.states.back().p[0];
    return std::hypot(q - std::cos(T), p + std::sin(T));
}

} // namespace

TEST_CASE("hamilton_rhs worked points and FD oracle") {
    Chart c = chart_1d();
    auto [dq, dp] = hamilton_rhs(parse("p^2/2"), {"cartesian", {0.0}, {3.0}}, c, {});
    CHECK(dq == std::vector<double>{3.0});
    CHECK(dp == std::vector<double>{0.0});

    auto [dq2, dp2] = hamilton_rhs(parse("(p^2 + q^2)/2"), {"cartesian", {1.0}, {0.0}}, c, {});
    CHECK(dq2 == std::vector<double>{0.0});
    CHECK(dp2 == std::vector<double>{-1.0});

    // example system RHS vs central differences
    const SystemDefinition& sys = catalog_entry("example3").system;
    const Presentation* pres = sys.presentation_in("rotparabolic");
    const Chart& chart = sys.chart("rotparabolic");
    PhaseState s{"rotparabolic", {1.0, 1.0}, {0.0, 0.0}};
    auto [dq3, dp3] = hamilton_rhs(pres->hamiltonian, s, chart, sys.parameters);
    Environment env = chart.state_env(s, sys.parameters);
    for (int i = 0; i < 2; ++i) {
        double fdq = oracle::central_diff(pres->hamiltonian,
                                          chart.momenta[static_cast<std::size_t>(i)], env);
        double fdp = oracle::central_diff(pres->hamiltonian,
                                          chart.coords[static_cast<std::size_t>(i)], env);
        CHECK(std::fabs(dq3[static_cast<std::size_t>(i)] - fdq) <= 1e-6 * (1.0 + std::fabs(fdq)));
        CHECK(std::fabs(dp3[static_cast<std::size_t>(i)] + fdp) <= 1e-6 * (1.0 + std::fabs(fdp)));
    }
}

TEST_CASE("free particle is integrated exactly") {
    Chart c = chart_1d();
    for (const char* method : {"rk4", "implicit_midpoint"}) {
        PhaseState s0{"cartesian", {0.1}, {0.7}};
        Trajectory t = integrate(parse("p^2/2"), s0, c, {}, 1e-3, 1000, method, {});
        REQUIRE(t.status == OrbitStatus::Ok);
        for (std::size_t k = 0; k < t.states.size(); ++k) {
            double want = 0.1 + 0.7 * static_cast<double>(k) * 1e-3;
            CHECK(std::fabs(t.states[k].q[0] - want) <= 1e-12);
            CHECK(t.states[k].p[0] == doctest::Approx(0.7).epsilon(1e-14));
        }
    }
}

TEST_CASE("implicit midpoint conserves the oscillator energy to roundoff") {
    Chart c = chart_1d();
    PhaseState s0{"cartesian", {1.0}, {0.0}};
    Trajectory t = integrate(parse("(p^2 + q^2)/2"), s0, c, {}, 0.01, 10000,
                             "implicit_midpoint", {{"H", parse("(p^2 + q^2)/2")}});
    REQUIRE(t.status == OrbitStatus::Ok);
    CHECK(t.max_rel_drift() <= 1e-10);
}

TEST_CASE("order verification across dt halvings") {
    // rk4 global error ~ dt^4 (ratio 16), midpoint ~ dt^2 (ratio 4), factor 2 slack
    double e1 = oscillator_error("rk4", 1e-2, 100);
    double e2 = oscillator_error("rk4", 5e-3, 200);
    double e3 = oscillator_error("rk4", 2.5e-3, 400);
    CHECK(e1 / e2 >= 8.0);
    CHECK(e1 / e2 <= 32.0);
    CHECK(e2 / e3 >= 8.0);
    CHECK(e2 / e3 <= 32.0);

    double m1 = oscillator_error("implicit_midpoint", 1e-2, 100);
    double m2 = oscillator_error("implicit_midpoint", 5e-3, 200);
    double m3 = oscillator_error("implicit_midpoint", 2.5e-3, 400);
    CHECK(m1 / m2 >= 2.0);
    CHECK(m1 / m2 <= 8.0);
    CHECK(m2 / m3 >= 2.0);
    CHECK(m2 / m3 <= 8.0);
}

TEST_CASE("implicit midpoint is time-reversible") {
    // flip momenta at the far end, integrate the same number of steps, flip
    // back: the symmetric method returns to the start within 1e-9
    const SystemDefinition& sys = catalog_entry("example3").system;
    const Presentation* pres = sys.presentation_in("rotparabolic");
    const Chart& chart = sys.chart("rotparabolic");
    PhaseState s0{"rotparabolic", {1.0, 0.5}, {0.2, -0.3}};
    Trajectory fwd = integrate(pres->hamiltonian, s0, chart, sys.parameters, 1e-3, 500,
                               "implicit_midpoint", {});
    REQUIRE(fwd.status == OrbitStatus::Ok);
    PhaseState mid = fwd.states.back();
    for (double& p : mid.p) p = -p;
    Trajectory back = integrate(pres->hamiltonian, mid, chart, sys.parameters, 1e-3, 500,
                                "implicit_midpoint", {});
    REQUIRE(back.status == OrbitStatus::Ok);
    const PhaseState& end = back.states.back();
    for (int k = 0; k < 2; ++k) {
        CHECK(std::fabs(end.q[static_cast<std::size_t>(k)] -
                        s0.q[static_cast<std::size_t>(k)]) <= 1e-9);
        CHECK(std::fabs(end.p[static_cast<std::size_t>(k)] +
                        s0.p[static_cast<std::size_t>(k)]) <= 1e-9);
    }
}

TEST_CASE("drift shrinks under dt refinement; a wrong constant drifts O(1)") {
    const SystemDefinition& sys = catalog_entry("example1").system;
    const Presentation* pres = sys.presentation_in("polar");
    const Chart& chart = sys.chart("polar");
    Expr K1 = carter_constants(*pres->separable)[0].quotient_form;
    PhaseState s0{"polar", {1.0, 1.2}, {0.3, 0.4}};

    auto drift_at = [&](double dt, int steps) {
        Trajectory t = integrate(pres->hamiltonian, s0, chart, sys.parameters, dt, steps,
                                 "implicit_midpoint",
                                 {{"H", pres->hamiltonian}, {"K1", K1}});
        REQUIRE(t.status == OrbitStatus::Ok);
        return t.max_rel_drift();
    };
    double d1 = drift_at(2e-3, 1000);
    double d2 = drift_at(1e-3, 2000);
    CHECK(d2 < d1);
    CHECK(d1 / d2 >= 3.0); // order-2 scaling

    // p_th is NOT conserved here (beta != gamma breaks the rotational symmetry)
    SystemDefinition skew = sys;
    skew.parameters["gamma"] = 2.0;
    const Presentation* spres = skew.presentation_in("polar");
    Trajectory t = integrate(spres->hamiltonian, s0, chart, skew.parameters, 1e-3, 2000,
                             "implicit_midpoint", {{"p_th", parse("p_th")}});
    REQUIRE(t.status == OrbitStatus::Ok);
    CHECK(t.max_rel_drift() >= 1e-2);
}

TEST_CASE("domain violations abort with a partial trajectory and CSV footer") {
    Chart c = chart_1d();
    c.domain = {parse("q")}; // require q > 0
    c.sample_ranges = {{"q", {0.1, 1.0}}};
    PhaseState s0{"cartesian", {0.5}, {-1.0}};
    Trajectory t = integrate(parse("p^2/2"), s0, c, {}, 0.01, 100, "rk4", {});
    CHECK(t.status == OrbitStatus::DomainViolation);
    CHECK(t.abort_step > 0);
    CHECK(t.states.size() == static_cast<std::size_t>(t.abort_step));
    std::string csv = trajectory_csv(t, c);
    CHECK(csv.find("# aborted at step") != std::string::npos);
    CHECK(csv.find("domain") != std::string::npos);
}

TEST_CASE("blow-up detection") {
    Chart c = chart_1d();
    c.sample_ranges = {{"q", {0.5, 2.0}}};
    // H = p^2/2 - q^4: runaway acceleration overflows quickly under rk4
    Trajectory t = integrate(parse("p^2/2 - q^4"), {"cartesian", {1.5}, {0.0}}, c, {},
                             0.5, 10000, "rk4", {});
    CHECK((t.status == OrbitStatus::Blowup || t.status == OrbitStatus::DomainViolation));
}

TEST_CASE("csv layout") {
    Chart c = chart_1d();
    Trajectory t = integrate(parse("p^2/2"), {"cartesian", {0.0}, {1.0}}, c, {}, 0.1, 3,
                             "rk4", {{"H", parse("p^2/2")}});
    std::string csv = trajectory_csv(t, c);
    CHECK(csv.rfind("t,q,p,H\n", 0) == 0);
    int rows = 0;
    for (char ch : csv)
        if (ch == '\n') ++rows;
    CHECK(rows == 5); // header + 4 states
}

TEST_CASE("argument validation") {
    Chart c = chart_1d();
    PhaseState s0{"cartesian", {0.0}, {1.0}};
    CHECK_THROWS_AS(integrate(parse("p^2/2"), s0, c, {}, -1.0, 10, "rk4", {}), ModelError);
    CHECK_THROWS_AS(integrate(parse("p^2/2"), s0, c, {}, 0.1, 0, "rk4", {}), ModelError);
    CHECK_THROWS_AS(integrate(parse("p^2/2"), s0, c, {}, 0.1, 10, "euler", {}), ModelError);
}
